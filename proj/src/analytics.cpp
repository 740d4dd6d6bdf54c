#include "aoiseq/analytics.hpp"
#include "aoiseq/error.hpp"
#include "aoiseq/partitions.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace aoiseq {

void Scenario::validate() const
{
    if (n_users < 1)
        throw Error(ErrorCode::InvalidArgument, "need at least one user");
    if (t_frame < 1)
        throw Error(ErrorCode::InvalidArgument, "frame length must be positive");
    if (family.sequences.empty())
        throw Error(ErrorCode::EmptyInput, "scenario has an empty sequence family");
    if (static_cast<std::int64_t>(assignment.size()) != n_users)
        throw Error(ErrorCode::InvalidArgument, "assignment must list one sequence per user");
    bool needs_pool = false;
    for (auto index : assignment) {
        if (index == 0)
            needs_pool = true;
        else if (index < 1 || index > family.size())
            throw Error(ErrorCode::InvalidArgument, "assigned sequence index " + std::to_string(index) + " out of range");
    }
    if (needs_pool && reuse_pool.empty())
        throw Error(ErrorCode::InvalidArgument, "random assignment requested without a reuse pool");
    for (auto index : reuse_pool)
        if (index < 1 || index > family.size())
            throw Error(ErrorCode::InvalidArgument, "reuse pool index " + std::to_string(index) + " out of range");
}

Scenario make_scenario(std::int64_t n_users, std::int64_t t_frame, SequenceFamily family, std::vector<std::int64_t> pool)
{
    Scenario s;
    s.n_users = n_users;
    s.t_frame = t_frame;
    const std::int64_t size = family.size();
    s.family = std::move(family);
    if (pool.empty())
        for (std::int64_t g = 1; g <= size; ++g)
            pool.push_back(g);
    s.reuse_pool = std::move(pool);
    for (std::int64_t u = 0; u < n_users; ++u) {
        if (n_users <= size)
            s.assignment.push_back(size - n_users + 1 + u);
        else
            s.assignment.push_back(u < size ? u + 1 : 0);
    }
    s.validate();
    return s;
}

double EventStats::bracket_slot() const
{
    long double sy = 0, yy = 0, y = 0;
    for (std::size_t j = 0; j < drop_times.size(); ++j) {
        long double yj = static_cast<long double>(inter_departures_slot[j]);
        sy += static_cast<long double>(service_times[j]) * yj;
        yy += yj * yj;
        y += yj;
    }
    return static_cast<double>(sy / y + yy / (2 * y) - 0.5L);
}

double EventStats::bracket_frame() const
{
    long double sx = 0, xx = 0, x = 0;
    const std::size_t n = drop_times.size();
    for (std::size_t j = 0; j < n; ++j) {
        long double xj = static_cast<long double>(inter_departures_frame[j]);
        sx += static_cast<long double>(service_times[(j + 1) % n]) * xj;
        xx += xj * xj;
        x += xj;
    }
    return static_cast<double>(sx / x + xx / (2 * x) - 0.5L);
}

Rational EventStats::exact_average() const
{
    BigInt twice_area = 0;
    for (std::size_t j = 0; j < drop_times.size(); ++j) {
        BigInt y = inter_departures_slot[j];
        twice_area += 2 * BigInt(service_times[j]) * y + y * y - y;
    }
    return Rational(twice_area, 2 * BigInt(beta));
}

BigInt stirling2(std::int64_t n, std::int64_t k)
{
    if (n < 0 || k < 0 || k > n)
        throw Error(ErrorCode::InvalidArgument, "stirling2 needs 0 <= k <= n");
    // row-by-row recurrence S(i, j) = j S(i-1, j) + S(i-1, j-1)
    std::vector<BigInt> row(static_cast<std::size_t>(k + 1), 0);
    row[0] = 1;
    for (std::int64_t i = 1; i <= n; ++i) {
        for (std::int64_t j = std::min(i, k); j >= 1; --j)
            row[static_cast<std::size_t>(j)] = j * row[static_cast<std::size_t>(j)] + row[static_cast<std::size_t>(j - 1)];
        row[0] = 0;
    }
    return row[static_cast<std::size_t>(k)];
}

BigInt event_offset_count(std::int64_t r, std::int64_t n_users, std::int64_t w, std::int64_t L)
{
    if (r < 1 || r > w)
        throw Error(ErrorCode::InvalidArgument, "event size r must satisfy 1 <= r <= w");
    if (n_users < 1 || L < w * w)
        throw Error(ErrorCode::InvalidArgument, "event_offset_count needs N >= 1 and L >= w^2");
    const std::int64_t failed = w - r;
    const BigInt clear = L - w * w;
    BigInt total = 0;
    for (std::int64_t n = failed; n <= n_users - 1; ++n) {
        BigInt surjections = 0;
        for (std::int64_t m = 0; m <= failed; ++m) {
            BigInt term = binomial(failed, m) * ipow(BigInt(failed - m), n);
            if (m % 2 == 0)
                surjections += term;
            else
                surjections -= term;
        }
        total += binomial(n_users - 1, n) * surjections * ipow(BigInt(w), n) * ipow(clear, n_users - 1 - n);
    }
    return total;
}

Rational event_probability(std::int64_t r, std::int64_t n_users, std::int64_t w, std::int64_t L)
{
    return Rational(event_offset_count(r, n_users, w, L), ipow(BigInt(L), n_users - 1));
}

Rational event_probability(std::int64_t r, const Scenario& scenario)
{
    return event_probability(r, scenario.n_users, scenario.weight(), scenario.period());
}

std::vector<double> event_probabilities(const Scenario& scenario)
{
    std::vector<double> probs;
    for (std::int64_t r = 1; r <= scenario.weight(); ++r)
        probs.push_back(to_double(event_probability(r, scenario)));
    return probs;
}

double f1(std::int64_t d, std::int64_t t_frame, std::int64_t L)
{
    if (d <= 0)
        throw Error(ErrorCode::InvalidArgument, "f1 needs a positive distance");
    if (t_frame < 1 || L < 1)
        throw Error(ErrorCode::InvalidArgument, "f1 needs positive T and L");
    using i128 = __int128;
    const i128 T = t_frame;
    const i128 fl = d / t_frame;
    const i128 ce = (d + t_frame - 1) / t_frame;
    const i128 f = d - fl * T - 1;
    const i128 numerator = ce * f * (f + 1) + fl * (f + T) * (T - f - 1) + (fl * (2 * d - T) - fl * fl * T + d) * T - d;
    return static_cast<double>(static_cast<long double>(numerator) / (2.0L * L));
}

EventStats evaluate_event(const ScheduleSequence& seq, std::int64_t t_frame, std::span<const std::int64_t> success_set)
{
    if (success_set.empty())
        throw Error(ErrorCode::InvalidArgument, "an event needs at least one successful \"1\"");
    if (t_frame < 1)
        throw Error(ErrorCode::InvalidArgument, "frame length must be positive");
    std::vector<std::int64_t> successes(success_set.begin(), success_set.end());
    std::ranges::sort(successes);
    for (auto x : successes)
        if (!std::ranges::binary_search(seq.ones(), x))
            throw Error(ErrorCode::InvalidArgument, "success position " + std::to_string(x) + " is not a \"1\" of the sequence");

    EventStats stats;
    stats.t_frame = t_frame;
    stats.beta = lcm64(t_frame, seq.period());
    std::vector<std::int64_t> frames;
    std::int64_t last_frame = -1;
    for (std::int64_t base = 0; base < stats.beta; base += seq.period()) {
        for (auto x : successes) {
            const std::int64_t t = base + x;
            const std::int64_t frame = t / t_frame;
            if (frame == last_frame)
                continue;
            last_frame = frame;
            stats.drop_times.push_back(t);
            stats.service_times.push_back(t - frame * t_frame);
            frames.push_back(frame * t_frame);
        }
    }
    const std::size_t n = stats.drop_times.size();
    stats.inter_departures_slot.resize(n);
    stats.inter_departures_frame.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::int64_t wrap = j + 1 < n ? 0 : stats.beta;
        stats.inter_departures_slot[j] = stats.drop_times[(j + 1) % n] + wrap - stats.drop_times[j];
        stats.inter_departures_frame[j] = frames[(j + 1) % n] + wrap - frames[j];
    }
    return stats;
}

double avg_aoi_event_enum(const Scenario& scenario, const ScheduleSequence& seq, std::int64_t max_weight)
{
    const std::int64_t w = seq.weight();
    if (w > max_weight || w > 30)
        throw Error(ErrorCode::InfeasibleSize,
                    "event enumeration over 2^" + std::to_string(w) + " events exceeds the limit w <= " + std::to_string(max_weight));
    const auto probs = event_probabilities(scenario);
    std::vector<long double> per_r(static_cast<std::size_t>(w + 1), 0.0L);
    std::vector<std::int64_t> successes;
    const auto ones = seq.ones();
    for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << w); ++mask) {
        successes.clear();
        for (std::int64_t i = 0; i < w; ++i)
            if (mask & (std::uint32_t{1} << i))
                successes.push_back(ones[static_cast<std::size_t>(i)]);
        const auto stats = evaluate_event(seq, scenario.t_frame, successes);
        const double a = stats.bracket_slot();
        const double b = stats.bracket_frame();
        if (std::abs(a - b) > 1e-9 * std::max(1.0, std::abs(a)))
            throw Error(ErrorCode::Internal, "slot-level and frame-level brackets disagree");
        per_r[static_cast<std::size_t>(std::popcount(mask))] += a;
    }
    long double total = 0;
    for (std::int64_t r = 1; r <= w; ++r)
        total += probs[static_cast<std::size_t>(r - 1)] * per_r[static_cast<std::size_t>(r)];
    return static_cast<double>(total);
}

namespace {

void check_view(const Scenario& scenario, const SuperframeView& view)
{
    if (view.t_frame != scenario.t_frame || view.period != scenario.period() || view.weight != scenario.weight())
        throw Error(ErrorCode::InvalidArgument, "superframe view does not belong to the scenario");
}

double mix_over_events(const Scenario& scenario, std::span<const double> b)
{
    const auto probs = event_probabilities(scenario);
    const int w = static_cast<int>(scenario.weight());
    long double total = 0;
    for (int r = 1; r <= w; ++r)
        total += probs[static_cast<std::size_t>(r - 1)] * partition_event_sum<double>(w, r, b);
    return static_cast<double>(total);
}

} // namespace

double avg_aoi_coprime(const Scenario& scenario, const SuperframeView& view)
{
    check_view(scenario, view);
    if (gcd64(view.t_frame, view.period) != 1)
        throw Error(ErrorCode::NotCoprime, "coprime closed form needs gcd(T, L) = 1");
    const std::int64_t T = view.t_frame;
    const std::int64_t L = view.period;
    const auto b = b_values<double>([&](std::int64_t d) { return f1(d, T, L); }, view.period_distances());
    return mix_over_events(scenario, b);
}

double avg_aoi_one_per_frame(const Scenario& scenario, const SuperframeView& view)
{
    check_view(scenario, view);
    const auto w = static_cast<std::size_t>(view.weight);
    const std::int64_t L = view.period;
    std::int64_t max_in_frame = 0;
    for (std::size_t k = 0; k < view.positions.size();) {
        std::size_t e = k;
        while (e < view.positions.size() && view.positions[e] / view.t_frame == view.positions[k] / view.t_frame)
            ++e;
        max_in_frame = std::max<std::int64_t>(max_in_frame, static_cast<std::int64_t>(e - k));
        k = e;
    }
    if (max_in_frame > 1)
        throw Error(ErrorCode::PreconditionViolated, "a frame holds " + std::to_string(max_in_frame) + " \"1\"s");

    std::vector<double> b(w, 0.0);
    const auto& sf = view.distances;
    for (std::size_t k = 0; k < sf.size(); ++k) {
        std::int64_t run = 0;
        const double weight = static_cast<double>(view.one_positions[k]) / static_cast<double>(view.beta);
        for (std::size_t j = 1; j <= w; ++j) {
            run += sf[(k + j - 1) % sf.size()];
            b[j - 1] += static_cast<double>(run) * weight;
        }
    }
    const auto b3 = b_values<double>(
        [&](std::int64_t z) { return static_cast<double>(z) * static_cast<double>(z - 1) / (2.0 * static_cast<double>(L)); },
        view.period_distances());
    for (std::size_t j = 0; j < w; ++j)
        b[j] += b3[j];
    return mix_over_events(scenario, b);
}

double aoi_upper_bound(std::int64_t t_frame, std::int64_t beta)
{
    return static_cast<double>(t_frame) + static_cast<double>(beta - 3) / 2.0;
}

} // namespace aoiseq
