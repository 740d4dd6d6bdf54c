#include "aoiseq/sequences.hpp"
#include "aoiseq/error.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace aoiseq {

namespace {

std::int64_t mod(std::int64_t a, std::int64_t m)
{
    std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

struct ExtendedGcd {
    std::int64_t g;
    std::int64_t x;
    std::int64_t y;
};

// a*x + b*y = g
ExtendedGcd extended_gcd(std::int64_t a, std::int64_t b)
{
    std::int64_t old_r = a, r = b;
    std::int64_t old_s = 1, s = 0;
    std::int64_t old_t = 0, t = 1;
    while (r != 0) {
        std::int64_t quotient = old_r / r;
        std::tie(old_r, r) = std::make_pair(r, old_r - quotient * r);
        std::tie(old_s, s) = std::make_pair(s, old_s - quotient * s);
        std::tie(old_t, t) = std::make_pair(t, old_t - quotient * t);
    }
    return {old_r, old_s, old_t};
}

} // namespace

ScheduleSequence::ScheduleSequence(std::int64_t period, std::vector<std::int64_t> ones)
    : period_(period)
    , ones_(std::move(ones))
{
    if (period_ < 1)
        throw Error(ErrorCode::InvalidArgument, "sequence period must be positive");
    if (ones_.empty())
        throw Error(ErrorCode::InvalidArgument, "sequence must contain at least one \"1\"");
    std::ranges::sort(ones_);
    if (std::ranges::adjacent_find(ones_) != ones_.end())
        throw Error(ErrorCode::InvalidArgument, "duplicate position in characteristic set");
    if (ones_.front() < 0 || ones_.back() >= period_)
        throw Error(ErrorCode::InvalidArgument, "characteristic set entry outside [0, period)");
}

bool ScheduleSequence::transmits_at(std::int64_t slot) const
{
    return std::ranges::binary_search(ones_, mod(slot, period_));
}

std::vector<std::uint8_t> ScheduleSequence::dense() const
{
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(period_), 0);
    for (auto x : ones_)
        bits[static_cast<std::size_t>(x)] = 1;
    return bits;
}

std::vector<std::int64_t> ScheduleSequence::cyclic_distances() const
{
    std::vector<std::int64_t> gaps(ones_.size());
    for (std::size_t k = 0; k + 1 < ones_.size(); ++k)
        gaps[k] = ones_[k + 1] - ones_[k];
    gaps.back() = ones_.front() + period_ - ones_.back();
    return gaps;
}

const ScheduleSequence& SequenceFamily::at(std::int64_t index) const
{
    if (index < 1 || index > size())
        throw Error(ErrorCode::InvalidArgument,
                    "sequence index " + std::to_string(index) + " outside 1.." + std::to_string(size()));
    return sequences[static_cast<std::size_t>(index - 1)];
}

std::span<const std::int64_t> SuperframeView::period_distances() const
{
    return std::span<const std::int64_t>(distances).first(static_cast<std::size_t>(weight));
}

std::map<std::int64_t, std::int64_t> SuperframeView::position_multiset() const
{
    std::map<std::int64_t, std::int64_t> counts;
    for (auto sigma : one_positions)
        ++counts[sigma];
    return counts;
}

std::int64_t gcd64(std::int64_t a, std::int64_t b)
{
    return std::gcd(a, b);
}

std::int64_t lcm64(std::int64_t a, std::int64_t b)
{
    return a / std::gcd(a, b) * b;
}

bool is_prime(std::int64_t n)
{
    if (n < 2)
        return false;
    if (n % 2 == 0)
        return n == 2;
    for (std::int64_t d = 3; d * d <= n; d += 2)
        if (n % d == 0)
            return false;
    return true;
}

std::int64_t smallest_prime_geq(std::int64_t n)
{
    if (n < 1)
        throw Error(ErrorCode::InvalidArgument, "smallest_prime_geq requires n >= 1");
    std::int64_t candidate = std::max<std::int64_t>(n, 2);
    while (!is_prime(candidate))
        ++candidate;
    return candidate;
}

std::int64_t crt_combine(std::int64_t a, std::int64_t p, std::int64_t b, std::int64_t q)
{
    auto [g, x, y] = extended_gcd(p, q);
    if (g != 1)
        throw Error(ErrorCode::NotCoprime, "CRT moduli must be coprime");
    // p*x = 1 (mod q), q*y = 1 (mod p)
    const std::int64_t L = p * q;
    __int128 t = static_cast<__int128>(mod(a, p)) * q % L * mod(y, p) % L
        + static_cast<__int128>(mod(b, q)) * p % L * mod(x, q) % L;
    return static_cast<std::int64_t>(t % L);
}

SequenceFamily crt_construct(std::int64_t p, std::int64_t q)
{
    if (!is_prime(p))
        throw Error(ErrorCode::NotPrime, "p=" + std::to_string(p) + " is not prime");
    if (q < 1 || gcd64(p, q) != 1)
        throw Error(ErrorCode::NotCoprime,
                    "gcd(p=" + std::to_string(p) + ", q=" + std::to_string(q) + ") != 1");
    if (q < 2 * p - 1)
        throw Error(ErrorCode::QTooSmall,
                    "q=" + std::to_string(q) + " < 2p-1=" + std::to_string(2 * p - 1));

    SequenceFamily family;
    family.p = p;
    family.q = q;
    family.w = p;
    family.L = p * q;
    family.sequences.reserve(static_cast<std::size_t>(p + 1));
    for (std::int64_t g = 1; g <= p + 1; ++g) {
        std::vector<std::int64_t> ones;
        ones.reserve(static_cast<std::size_t>(p));
        for (std::int64_t u = 0; u < p; ++u) {
            if (g <= p)
                ones.push_back(crt_combine(u * g % p, p, u % q, q));
            else
                ones.push_back(crt_combine(u, p, 0, q));
        }
        family.sequences.emplace_back(family.L, std::move(ones));
    }
    return family;
}

std::int64_t cross_correlation(const ScheduleSequence& a, const ScheduleSequence& b, std::int64_t tau)
{
    if (a.period() != b.period())
        throw Error(ErrorCode::PeriodMismatch, "cross-correlation of sequences with different periods");
    std::int64_t hits = 0;
    for (auto x : a.ones())
        if (b.transmits_at(x + tau))
            ++hits;
    return hits;
}

std::vector<std::int64_t> cross_correlation_profile(const ScheduleSequence& a, const ScheduleSequence& b)
{
    if (a.period() != b.period())
        throw Error(ErrorCode::PeriodMismatch, "cross-correlation of sequences with different periods");
    const std::int64_t L = a.period();
    std::vector<std::int64_t> profile(static_cast<std::size_t>(L), 0);
    // s_a(t) s_b(t + tau) = 1  iff  t = x in A and t + tau = y in B
    for (auto x : a.ones())
        for (auto y : b.ones())
            ++profile[static_cast<std::size_t>(mod(y - x, L))];
    return profile;
}

MhuiReport verify_mhui(std::span<const ScheduleSequence> sequences, std::int64_t n_users)
{
    if (sequences.empty())
        throw Error(ErrorCode::EmptyInput, "verify_mhui needs at least one sequence");
    const std::int64_t L = sequences.front().period();
    for (const auto& s : sequences)
        if (s.period() != L)
            throw Error(ErrorCode::PeriodMismatch, "sequences in an MHUI check must share a period");

    MhuiReport report;
    report.n_users = n_users;
    report.min_weight = sequences.front().weight();
    for (const auto& s : sequences)
        report.min_weight = std::min(report.min_weight, s.weight());
    report.weights_ok = report.min_weight >= n_users;

    for (std::size_t i = 0; i < sequences.size(); ++i) {
        for (std::size_t j = i + 1; j < sequences.size(); ++j) {
            auto profile = cross_correlation_profile(sequences[i], sequences[j]);
            report.max_cross_correlation =
                std::max(report.max_cross_correlation, *std::ranges::max_element(profile));
            ++report.pairs_checked;
        }
    }
    report.pass = report.weights_ok && report.max_cross_correlation <= 1;
    return report;
}

SuperframeView superframe_view(const ScheduleSequence& seq, std::int64_t t_frame)
{
    if (t_frame < 1)
        throw Error(ErrorCode::InvalidArgument, "frame length must be positive");
    SuperframeView view;
    view.period = seq.period();
    view.t_frame = t_frame;
    view.beta = lcm64(t_frame, seq.period());
    view.weight = seq.weight();
    const std::int64_t repeats = view.beta / seq.period();
    view.w_prime = seq.weight() * repeats;

    view.positions.reserve(static_cast<std::size_t>(view.w_prime));
    for (std::int64_t a = 0; a < repeats; ++a)
        for (auto x : seq.ones())
            view.positions.push_back(a * seq.period() + x);

    const auto n = view.positions.size();
    view.distances.resize(n);
    view.one_positions.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        view.distances[k] = k + 1 < n ? view.positions[k + 1] - view.positions[k]
                                      : view.positions.front() + view.beta - view.positions[k];
        view.one_positions[k] = view.positions[k] % t_frame;
    }
    return view;
}

std::int64_t max_ones_per_frame(const ScheduleSequence& seq, std::int64_t t_frame)
{
    if (t_frame < 1)
        throw Error(ErrorCode::InvalidArgument, "frame length must be positive");
    const std::int64_t beta = lcm64(t_frame, seq.period());
    std::int64_t best = 0;
    std::int64_t current_frame = -1;
    std::int64_t count = 0;
    // positions are visited in increasing order, so frames arrive in order too
    for (std::int64_t base = 0; base < beta; base += seq.period()) {
        for (auto x : seq.ones()) {
            std::int64_t frame = (base + x) / t_frame;
            if (frame != current_frame) {
                current_frame = frame;
                count = 0;
            }
            best = std::max(best, ++count);
        }
    }
    return best;
}

nlohmann::json to_json(const SequenceFamily& family)
{
    nlohmann::json doc;
    doc["p"] = family.p;
    doc["q"] = family.q;
    doc["w"] = family.w;
    doc["L"] = family.L;
    auto& list = doc["sequences"] = nlohmann::json::array();
    for (std::size_t i = 0; i < family.sequences.size(); ++i) {
        const auto ones = family.sequences[i].ones();
        list.push_back({{"index", static_cast<std::int64_t>(i + 1)},
                        {"characteristic_set", std::vector<std::int64_t>(ones.begin(), ones.end())}});
    }
    return doc;
}

SequenceFamily family_from_json(const nlohmann::json& doc)
{
    try {
        SequenceFamily family;
        family.p = doc.at("p").get<std::int64_t>();
        family.q = doc.at("q").get<std::int64_t>();
        family.w = doc.at("w").get<std::int64_t>();
        family.L = doc.at("L").get<std::int64_t>();
        if (family.L != family.p * family.q)
            throw Error(ErrorCode::ParseError, "family document has L != p*q");
        std::vector<nlohmann::json> entries(doc.at("sequences").begin(), doc.at("sequences").end());
        std::ranges::sort(entries, {}, [](const nlohmann::json& e) { return e.at("index").get<std::int64_t>(); });
        std::int64_t expected = 1;
        for (const auto& entry : entries) {
            if (entry.at("index").get<std::int64_t>() != expected++)
                throw Error(ErrorCode::ParseError, "sequence indices must be 1..n without gaps");
            auto ones = entry.at("characteristic_set").get<std::vector<std::int64_t>>();
            family.sequences.emplace_back(family.L, std::move(ones));
            if (family.sequences.back().weight() != family.w)
                throw Error(ErrorCode::ParseError, "sequence weight differs from w");
        }
        return family;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
}

} // namespace aoiseq
