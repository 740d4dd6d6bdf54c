#include "aoiseq/simulator.hpp"
#include "aoiseq/error.hpp"
#include "aoiseq/parallel.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace aoiseq {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::int64_t uniform_below(std::mt19937_64& rng, std::int64_t n)
{
    const auto range = static_cast<std::uint64_t>(n);
    const std::uint64_t threshold = (0 - range) % range;
    for (;;) {
        const std::uint64_t r = rng();
        if (r >= threshold)
            return static_cast<std::int64_t>(r % range);
    }
}

double uniform01(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// failures before the first success
std::int64_t geometric_failures(std::mt19937_64& rng, double p)
{
    if (p >= 1.0)
        return 0;
    const double u = uniform01(rng);
    const double g = std::floor(std::log1p(-u) / std::log1p(-p));
    return g > 4e18 ? std::numeric_limits<std::int64_t>::max() / 2 : static_cast<std::int64_t>(g);
}

std::int64_t floor_div(std::int64_t a, std::int64_t b)
{
    std::int64_t q = a / b;
    return (a % b != 0 && (a < 0) != (b < 0)) ? q - 1 : q;
}

std::int64_t draw_offset(std::mt19937_64& rng, const OffsetDistribution& dist, std::int64_t L)
{
    return std::visit(overloaded{
                          [&](const UniformFull&) { return uniform_below(rng, L); },
                          [&](const UniformRange& d) { return uniform_below(rng, d.hi + 1); },
                          [&](const Geometric& d) { return geometric_failures(rng, d.p_stop) % L; },
                      },
                      dist);
}

// A(t) over [0, horizon) given sorted success slots; frames of the user start at phase + kT.
struct AgeWalk {
    std::int64_t t_frame;
    std::int64_t phase;
    std::int64_t initial_age;

    template <class Segment>
    bool walk(const std::vector<std::int64_t>& successes, std::int64_t horizon, Segment&& segment) const
    {
        std::int64_t start = 0;
        std::int64_t base = initial_age;
        std::int64_t delivered = std::numeric_limits<std::int64_t>::min();
        bool dropped = false;
        for (auto t : successes) {
            if (t >= horizon)
                break;
            const std::int64_t frame = floor_div(t - phase, t_frame);
            if (frame == delivered)
                continue;
            delivered = frame;
            if (t > start)
                segment(start, t, base);
            start = t;
            base = t - phase - frame * t_frame;
            dropped = true;
        }
        if (horizon > start)
            segment(start, horizon, base);
        return dropped;
    }
};

struct WindowArea {
    std::int64_t from;
    std::int64_t to;
    long double area = 0;

    void operator()(std::int64_t start, std::int64_t end, std::int64_t base)
    {
        const std::int64_t a = std::max(start, from);
        const std::int64_t b = std::min(end, to);
        if (a >= b)
            return;
        const long double n = static_cast<long double>(b - a);
        const long double first = static_cast<long double>(base + (a - start));
        area += n * first + n * (n - 1) / 2;
    }
};

struct Workspace {
    std::vector<std::int64_t> sequence_of;
    std::vector<std::int64_t> offsets;
    std::vector<std::uint8_t> occupancy;
    std::vector<std::vector<std::int64_t>> transmissions;
    std::vector<std::int64_t> successes;
    std::vector<std::int64_t> picks;
    std::vector<double> values; // NaN = no drop
};

class RunEngine {
public:
    RunEngine(const Scenario& scenario, const SchemeConfig& scheme, const OffsetDistribution& dist,
              std::uint64_t seed, const SimulationOptions& options)
        : scenario_(scenario)
        , scheme_(scheme)
        , dist_(dist)
        , seed_(seed)
        , options_(options)
        , beta_(scenario.beta())
    {
    }

    bool is_sequence() const { return std::holds_alternative<SequenceScheme>(scheme_); }

    std::int64_t horizon() const
    {
        if (is_sequence())
            return (options_.warmup_superframes + options_.measure_superframes) * beta_;
        return (options_.aloha_warmup + options_.aloha_measure) * scenario_.n_users * scenario_.t_frame;
    }

    std::int64_t warmup() const
    {
        if (is_sequence())
            return options_.warmup_superframes * beta_;
        return options_.aloha_warmup * scenario_.n_users * scenario_.t_frame;
    }

    void run(std::int64_t run_index, Workspace& ws) const
    {
        auto rng = run_rng(seed_, static_cast<std::uint64_t>(run_index));
        const auto n = static_cast<std::size_t>(scenario_.n_users);
        ws.values.assign(n, std::numeric_limits<double>::quiet_NaN());
        if (is_sequence()) {
            draw_sequence_run(rng, ws);
            if (options_.engine == Engine::Exact)
                exact_sequence_values(ws);
            else
                slot_values(ws, sequence_phases(ws));
        } else {
            const auto phases = aloha_phases(rng);
            draw_aloha_transmissions(rng, phases, ws);
            slot_values(ws, phases);
        }
    }

    std::vector<std::int64_t> trace(std::int64_t run_index, std::size_t user, Workspace& ws) const
    {
        auto rng = run_rng(seed_, static_cast<std::uint64_t>(run_index));
        std::vector<std::int64_t> phases;
        if (is_sequence()) {
            draw_sequence_run(rng, ws);
            phases = sequence_phases(ws);
            sequence_transmissions(ws);
        } else {
            phases = aloha_phases(rng);
            draw_aloha_transmissions(rng, phases, ws);
        }
        collect_successes(ws, user);
        std::vector<std::int64_t> out;
        out.reserve(static_cast<std::size_t>(horizon()));
        AgeWalk walk{scenario_.t_frame, phases[user], scenario_.t_frame};
        walk.walk(ws.successes, horizon(), [&](std::int64_t start, std::int64_t end, std::int64_t base) {
            for (std::int64_t t = start; t < end; ++t)
                out.push_back(base + (t - start));
        });
        return out;
    }

private:
    void draw_sequence_run(std::mt19937_64& rng, Workspace& ws) const
    {
        const auto n = static_cast<std::size_t>(scenario_.n_users);
        ws.sequence_of.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto fixed = scenario_.assignment[i];
            ws.sequence_of[i] = fixed != 0
                ? fixed
                : scenario_.reuse_pool[static_cast<std::size_t>(
                      uniform_below(rng, static_cast<std::int64_t>(scenario_.reuse_pool.size())))];
        }
        const std::int64_t L = scenario_.period();
        ws.offsets.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            ws.offsets[i] = draw_offset(rng, dist_, L);
        ws.occupancy.assign(static_cast<std::size_t>(L), 0);
        for (std::size_t i = 0; i < n; ++i)
            for (auto x : scenario_.family.at(ws.sequence_of[i]).ones()) {
                auto& cell = ws.occupancy[static_cast<std::size_t>((x + ws.offsets[i]) % L)];
                if (cell < 2)
                    ++cell;
            }
    }

    std::vector<std::int64_t> sequence_phases(const Workspace& ws) const
    {
        std::vector<std::int64_t> phases(ws.offsets.size());
        for (std::size_t i = 0; i < phases.size(); ++i)
            phases[i] = ws.offsets[i] % scenario_.t_frame;
        return phases;
    }

    void exact_sequence_values(Workspace& ws) const
    {
        const std::int64_t L = scenario_.period();
        const std::int64_t T = scenario_.t_frame;
        for (std::size_t i = 0; i < ws.offsets.size(); ++i) {
            // successes in the user's own time axis, where its frames start at multiples of T
            ws.successes.clear();
            for (auto x : scenario_.family.at(ws.sequence_of[i]).ones())
                if (ws.occupancy[static_cast<std::size_t>((x + ws.offsets[i]) % L)] == 1)
                    ws.successes.push_back(x);
            if (ws.successes.empty())
                continue;
            std::int64_t first_drop = -1;
            std::int64_t prev_drop = -1, prev_service = 0;
            std::int64_t last_frame = -1;
            long double area = 0;
            auto close = [&](std::int64_t next_drop) {
                const long double y = static_cast<long double>(next_drop - prev_drop);
                area += static_cast<long double>(prev_service) * y + (y * y - y) / 2;
            };
            for (std::int64_t base = 0; base < beta_; base += L) {
                for (auto x : ws.successes) {
                    const std::int64_t t = base + x;
                    const std::int64_t frame = t / T;
                    if (frame == last_frame)
                        continue;
                    last_frame = frame;
                    if (prev_drop < 0)
                        first_drop = t;
                    else
                        close(t);
                    prev_drop = t;
                    prev_service = t - frame * T;
                }
            }
            close(first_drop + beta_);
            ws.values[i] = static_cast<double>(area / static_cast<long double>(beta_));
        }
    }

    void sequence_transmissions(Workspace& ws) const
    {
        const std::int64_t L = scenario_.period();
        const std::int64_t H = horizon();
        const auto n = ws.offsets.size();
        ws.transmissions.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            auto& list = ws.transmissions[i];
            list.clear();
            std::vector<std::int64_t> slots;
            for (auto x : scenario_.family.at(ws.sequence_of[i]).ones())
                slots.push_back((x + ws.offsets[i]) % L);
            std::ranges::sort(slots);
            for (std::int64_t base = 0; base < H; base += L)
                for (auto s : slots)
                    if (base + s < H)
                        list.push_back(base + s);
        }
        // the occupancy over Z_L already decides collisions for periodic schedules
    }

    std::vector<std::int64_t> aloha_phases(std::mt19937_64& rng) const
    {
        std::vector<std::int64_t> phases(static_cast<std::size_t>(scenario_.n_users), 0);
        if (!options_.aligned_frames)
            for (auto& phase : phases)
                phase = uniform_below(rng, scenario_.t_frame);
        return phases;
    }

    void draw_aloha_transmissions(std::mt19937_64& rng, const std::vector<std::int64_t>& phases, Workspace& ws) const
    {
        const std::int64_t H = horizon();
        const std::int64_t T = scenario_.t_frame;
        const auto n = phases.size();
        ws.transmissions.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            auto& list = ws.transmissions[i];
            list.clear();
            if (const auto* framed = std::get_if<FramedAloha>(&scheme_)) {
                for (std::int64_t start = phases[i] - T; start < H; start += T) {
                    // Floyd's sampling of w_fa distinct slots in the frame
                    ws.picks.clear();
                    for (std::int64_t j = T - framed->w_fa; j < T; ++j) {
                        const std::int64_t candidate = uniform_below(rng, j + 1);
                        if (std::ranges::find(ws.picks, candidate) == ws.picks.end())
                            ws.picks.push_back(candidate);
                        else
                            ws.picks.push_back(j);
                    }
                    std::ranges::sort(ws.picks);
                    for (auto pick : ws.picks) {
                        const std::int64_t t = start + pick;
                        if (t >= 0 && t < H)
                            list.push_back(t);
                    }
                }
            } else {
                const double p = to_double(std::get<SlottedAloha>(scheme_).p_t);
                for (std::int64_t t = geometric_failures(rng, p); t < H; t += 1 + geometric_failures(rng, p))
                    list.push_back(t);
            }
        }
        ws.occupancy.assign(static_cast<std::size_t>(H), 0);
        for (const auto& list : ws.transmissions)
            for (auto t : list) {
                auto& cell = ws.occupancy[static_cast<std::size_t>(t)];
                if (cell < 2)
                    ++cell;
            }
    }

    void collect_successes(Workspace& ws, std::size_t user) const
    {
        ws.successes.clear();
        const bool periodic = is_sequence();
        const auto L = static_cast<std::size_t>(scenario_.period());
        for (auto t : ws.transmissions[user]) {
            const auto cell = periodic ? ws.occupancy[static_cast<std::size_t>(t) % L] : ws.occupancy[static_cast<std::size_t>(t)];
            if (cell == 1)
                ws.successes.push_back(t);
        }
    }

    void slot_values(Workspace& ws, const std::vector<std::int64_t>& phases) const
    {
        if (is_sequence())
            sequence_transmissions(ws);
        const std::int64_t H = horizon();
        const std::int64_t W0 = warmup();
        for (std::size_t i = 0; i < phases.size(); ++i) {
            collect_successes(ws, i);
            AgeWalk walk{scenario_.t_frame, phases[i], scenario_.t_frame};
            WindowArea window{W0, H};
            if (!walk.walk(ws.successes, H, window))
                continue;
            ws.values[i] = static_cast<double>(window.area / static_cast<long double>(H - W0));
        }
    }

    const Scenario& scenario_;
    const SchemeConfig& scheme_;
    const OffsetDistribution& dist_;
    std::uint64_t seed_;
    SimulationOptions options_;
    std::int64_t beta_;
};

struct ChunkTotals {
    std::vector<long double> user_sum;
    std::vector<std::int64_t> user_count;
    long double run_mean_sum = 0;
    long double run_mean_sq = 0;
    std::int64_t runs_with_data = 0;
    std::int64_t no_drop = 0;
};

void check_options(const SimulationOptions& options)
{
    if (options.warmup_superframes < 1 || options.measure_superframes < 1)
        throw Error(ErrorCode::InvalidArgument, "sequence horizon needs at least one warm-up and one measured superframe");
    if (options.aloha_warmup < 0 || options.aloha_measure < 1)
        throw Error(ErrorCode::InvalidArgument, "ALOHA horizon needs a positive measurement window");
    if (options.chunks < 1)
        throw Error(ErrorCode::InvalidArgument, "chunk count must be positive");
}

void check_distribution(const OffsetDistribution& dist, const Scenario& scenario)
{
    if (const auto* range = std::get_if<UniformRange>(&dist)) {
        if (range->hi < 0 || range->hi >= scenario.period())
            throw Error(ErrorCode::InvalidArgument, "range offset bound must lie in [0, L)");
    } else if (const auto* geo = std::get_if<Geometric>(&dist)) {
        if (!(geo->p_stop > 0.0 && geo->p_stop < 1.0))
            throw Error(ErrorCode::InvalidArgument, "geometric offset parameter must lie in (0, 1)");
    }
}

} // namespace

std::string scheme_name(const SchemeConfig& scheme)
{
    return std::visit(overloaded{
                          [](const SequenceScheme&) { return std::string("seq"); },
                          [](const SlottedAloha&) { return std::string("slotted"); },
                          [](const FramedAloha&) { return std::string("framed"); },
                      },
                      scheme);
}

std::string dist_name(const OffsetDistribution& dist)
{
    return std::visit(overloaded{
                          [](const UniformFull&) { return std::string("uniform"); },
                          [](const UniformRange& d) { return fmt::format("range:{}", d.hi); },
                          [](const Geometric& d) { return fmt::format("geom:{}", d.p_stop); },
                      },
                      dist);
}

OffsetDistribution parse_distribution(const std::string& text)
{
    try {
        if (text == "uniform")
            return UniformFull{};
        std::size_t used = 0;
        if (text.rfind("range:", 0) == 0) {
            const auto hi = std::stoll(text.substr(6), &used);
            if (used == text.size() - 6 && hi >= 0)
                return UniformRange{hi};
        } else if (text.rfind("geom:", 0) == 0) {
            const auto p = std::stod(text.substr(5), &used);
            if (used == text.size() - 5 && p > 0 && p <= 1)
                return Geometric{p};
        }
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::ParseError, "unknown offset distribution '" + text + "' (uniform, range:<hi>, geom:<p>)");
}

void validate_scheme(const SchemeConfig& scheme, const Scenario& scenario)
{
    if (const auto* slotted = std::get_if<SlottedAloha>(&scheme)) {
        if (slotted->p_t <= 0 || slotted->p_t > 1)
            throw Error(ErrorCode::InvalidArgument, "slotted ALOHA probability must lie in (0, 1]");
    } else if (const auto* framed = std::get_if<FramedAloha>(&scheme)) {
        if (framed->w_fa < 1 || framed->w_fa > scenario.t_frame)
            throw Error(ErrorCode::InvalidArgument, "framed ALOHA needs 1 <= w_fa <= T");
    }
}

Rational duty_factor(const SchemeConfig& scheme, const Scenario& scenario)
{
    validate_scheme(scheme, scenario);
    return std::visit(overloaded{
                          [&](const SequenceScheme&) { return Rational(scenario.weight(), scenario.period()); },
                          [](const SlottedAloha& s) { return s.p_t; },
                          [&](const FramedAloha& f) { return Rational(f.w_fa, scenario.t_frame); },
                      },
                      scheme);
}

std::mt19937_64 run_rng(std::uint64_t seed, std::uint64_t run)
{
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(run + 0x632be59bd9b4e019ULL)));
}

AoiStats run_simulation(const Scenario& scenario, const SchemeConfig& scheme, const OffsetDistribution& dist,
                        std::int64_t runs, std::uint64_t seed, const SimulationOptions& options)
{
    scenario.validate();
    validate_scheme(scheme, scenario);
    check_distribution(dist, scenario);
    check_options(options);
    if (runs < 1)
        throw Error(ErrorCode::InvalidArgument, "need at least one run");

    const RunEngine engine(scenario, scheme, dist, seed, options);
    const auto n = static_cast<std::size_t>(scenario.n_users);
    const std::int64_t chunks = std::min(runs, options.chunks);
    std::vector<ChunkTotals> totals(static_cast<std::size_t>(chunks));
    parallel_chunks(runs, chunks, [&](std::int64_t begin, std::int64_t end, std::int64_t chunk) {
        auto& acc = totals[static_cast<std::size_t>(chunk)];
        acc.user_sum.assign(n, 0.0L);
        acc.user_count.assign(n, 0);
        Workspace ws;
        for (std::int64_t r = begin; r < end; ++r) {
            engine.run(r, ws);
            long double run_sum = 0;
            std::int64_t run_count = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (std::isnan(ws.values[i])) {
                    ++acc.no_drop;
                    continue;
                }
                acc.user_sum[i] += ws.values[i];
                ++acc.user_count[i];
                run_sum += ws.values[i];
                ++run_count;
            }
            if (run_count > 0) {
                const long double m = run_sum / run_count;
                acc.run_mean_sum += m;
                acc.run_mean_sq += m * m;
                ++acc.runs_with_data;
            }
        }
    });

    AoiStats stats;
    stats.run_count = runs;
    stats.seed = seed;
    std::vector<long double> user_sum(n, 0.0L);
    stats.per_user_samples.assign(n, 0);
    long double mean_sum = 0, mean_sq = 0;
    std::int64_t runs_with_data = 0;
    for (const auto& acc : totals) {
        for (std::size_t i = 0; i < n; ++i) {
            user_sum[i] += acc.user_sum[i];
            stats.per_user_samples[i] += acc.user_count[i];
        }
        mean_sum += acc.run_mean_sum;
        mean_sq += acc.run_mean_sq;
        runs_with_data += acc.runs_with_data;
        stats.no_drop += acc.no_drop;
    }
    long double pooled_sum = 0;
    std::int64_t pooled_count = 0;
    stats.per_user_mean.assign(n, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i) {
        if (stats.per_user_samples[i] > 0)
            stats.per_user_mean[i] = static_cast<double>(user_sum[i] / stats.per_user_samples[i]);
        pooled_sum += user_sum[i];
        pooled_count += stats.per_user_samples[i];
    }
    stats.pooled_mean = pooled_count > 0 ? static_cast<double>(pooled_sum / pooled_count)
                                         : std::numeric_limits<double>::infinity();
    if (runs_with_data > 1) {
        const long double m = mean_sum / runs_with_data;
        const long double var = std::max(0.0L, (mean_sq - runs_with_data * m * m) / (runs_with_data - 1));
        stats.std_error = static_cast<double>(std::sqrt(var / runs_with_data));
    }
    return stats;
}

std::vector<std::int64_t> simulate_trace(const Scenario& scenario, const SchemeConfig& scheme,
                                         const OffsetDistribution& dist, std::uint64_t seed, std::int64_t run,
                                         std::size_t user, const SimulationOptions& options)
{
    scenario.validate();
    validate_scheme(scheme, scenario);
    check_distribution(dist, scenario);
    check_options(options);
    if (user >= static_cast<std::size_t>(scenario.n_users))
        throw Error(ErrorCode::InvalidArgument, "user index out of range");
    const RunEngine engine(scenario, scheme, dist, seed, options);
    Workspace ws;
    return engine.trace(run, user, ws);
}

} // namespace aoiseq
