#include "aoiseq/oracle.hpp"
#include "aoiseq/error.hpp"
#include "aoiseq/parallel.hpp"

#include <limits>
#include <string>

namespace aoiseq {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b)
{
    std::int64_t q = a / b;
    return (a % b != 0 && (a < 0) != (b < 0)) ? q - 1 : q;
}

std::int64_t mod(std::int64_t a, std::int64_t m)
{
    std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

void check_inputs(const Scenario& scenario, const OffsetVector& offsets, std::size_t user)
{
    if (static_cast<std::int64_t>(offsets.offsets.size()) != scenario.n_users)
        throw Error(ErrorCode::InvalidArgument, "offset vector length must equal the number of users");
    if (user >= offsets.offsets.size())
        throw Error(ErrorCode::InvalidArgument, "user index out of range");
    for (auto index : scenario.assignment)
        if (index == 0)
            throw Error(ErrorCode::InvalidArgument, "oracle needs a fixed sequence for every user");
}

// Success flags of `user` over one period Z_L, in absolute slot coordinates.
std::vector<std::uint8_t> success_mask(const Scenario& scenario, const std::vector<std::int64_t>& tau, std::size_t user)
{
    const std::int64_t L = scenario.period();
    std::vector<std::uint8_t> occupancy(static_cast<std::size_t>(L), 0);
    for (std::size_t i = 0; i < tau.size(); ++i)
        for (auto x : scenario.family.at(scenario.assignment[i]).ones()) {
            auto& cell = occupancy[static_cast<std::size_t>(mod(x + tau[i], L))];
            if (cell < 2)
                ++cell;
        }
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(L), 0);
    for (auto x : scenario.family.at(scenario.assignment[user]).ones()) {
        const auto slot = static_cast<std::size_t>(mod(x + tau[user], L));
        mask[slot] = occupancy[slot] == 1;
    }
    return mask;
}

template <class Visit>
void run_trace(const Scenario& scenario, const std::vector<std::uint8_t>& mask, std::int64_t tau_user,
               std::int64_t horizon, Visit&& visit)
{
    const std::int64_t L = scenario.period();
    const std::int64_t T = scenario.t_frame;
    std::int64_t age = T;
    std::int64_t delivered = std::numeric_limits<std::int64_t>::min();
    for (std::int64_t t = 0; t < horizon; ++t) {
        const std::int64_t local = t - tau_user;
        const std::int64_t frame = floor_div(local, T);
        if (mask[static_cast<std::size_t>(mod(t, L))] && frame != delivered) {
            delivered = frame;
            age = local - frame * T;
        } else if (t > 0) {
            ++age;
        }
        visit(t, age);
    }
}

ReplayResult replay_with_mask(const Scenario& scenario, const std::vector<std::uint8_t>& mask, std::int64_t tau_user)
{
    ReplayResult result;
    result.window = scenario.beta();
    for (auto bit : mask)
        if (bit) {
            result.has_drops = true;
            break;
        }
    if (!result.has_drops)
        return result;
    const std::int64_t beta = result.window;
    run_trace(scenario, mask, tau_user, 2 * beta, [&](std::int64_t t, std::int64_t age) {
        if (t >= beta)
            result.area += age;
    });
    return result;
}

std::int64_t offset_space(const Scenario& scenario, std::int64_t budget)
{
    const std::int64_t L = scenario.period();
    std::int64_t count = 1;
    BigInt exact = 1;
    for (std::int64_t i = 1; i < scenario.n_users; ++i) {
        exact *= L;
        if (exact > budget)
            throw Error(ErrorCode::BudgetExceeded,
                        "oracle needs L^(N-1) = " + ipow(BigInt(L), scenario.n_users - 1).str() +
                            " offset vectors, budget is " + std::to_string(budget));
        count *= L;
    }
    if (count > budget)
        throw Error(ErrorCode::BudgetExceeded,
                    "oracle needs " + std::to_string(count) + " offset vectors, budget is " + std::to_string(budget));
    return count;
}

// Offsets for enumeration index `index`, with the user pinned at 0.
void decode(std::int64_t index, std::int64_t L, std::size_t user, std::vector<std::int64_t>& tau)
{
    for (std::size_t i = 0; i < tau.size(); ++i) {
        if (i == user) {
            tau[i] = 0;
            continue;
        }
        tau[i] = index % L;
        index /= L;
    }
}

template <class PerVector>
void enumerate_offsets(const Scenario& scenario, std::size_t user, std::int64_t count, std::int64_t chunks,
                       PerVector&& per_vector)
{
    const std::int64_t L = scenario.period();
    parallel_chunks(count, chunks, [&](std::int64_t begin, std::int64_t end, std::int64_t chunk) {
        std::vector<std::int64_t> tau(static_cast<std::size_t>(scenario.n_users), 0);
        for (std::int64_t index = begin; index < end; ++index) {
            decode(index, L, user, tau);
            per_vector(chunk, tau);
        }
    });
}

} // namespace

ReplayResult replay_aoi(const Scenario& scenario, const OffsetVector& offsets, std::size_t user)
{
    scenario.validate();
    check_inputs(scenario, offsets, user);
    const auto mask = success_mask(scenario, offsets.offsets, user);
    return replay_with_mask(scenario, mask, mod(offsets.offsets[user], scenario.period()));
}

std::vector<std::int64_t> aoi_trace(const Scenario& scenario, const OffsetVector& offsets, std::size_t user,
                                    std::int64_t horizon)
{
    scenario.validate();
    check_inputs(scenario, offsets, user);
    const auto mask = success_mask(scenario, offsets.offsets, user);
    std::vector<std::int64_t> trace;
    trace.reserve(static_cast<std::size_t>(std::max<std::int64_t>(horizon, 0)));
    run_trace(scenario, mask, mod(offsets.offsets[user], scenario.period()), horizon,
              [&](std::int64_t, std::int64_t age) { trace.push_back(age); });
    return trace;
}

OracleResult oracle_avg_aoi(const Scenario& scenario, std::size_t user, std::int64_t budget)
{
    scenario.validate();
    check_inputs(scenario, OffsetVector{std::vector<std::int64_t>(static_cast<std::size_t>(scenario.n_users), 0)}, user);
    const std::int64_t count = offset_space(scenario, budget);
    const std::int64_t chunks = std::min<std::int64_t>(count, 64);
    std::vector<__int128> areas(static_cast<std::size_t>(chunks), 0);
    std::vector<std::int64_t> misses(static_cast<std::size_t>(chunks), 0);
    enumerate_offsets(scenario, user, count, chunks, [&](std::int64_t chunk, const std::vector<std::int64_t>& tau) {
        const auto mask = success_mask(scenario, tau, user);
        const auto replay = replay_with_mask(scenario, mask, 0);
        if (replay.has_drops)
            areas[static_cast<std::size_t>(chunk)] += replay.area;
        else
            ++misses[static_cast<std::size_t>(chunk)];
    });

    BigInt total = 0;
    OracleResult result;
    result.vectors = count;
    for (std::size_t c = 0; c < areas.size(); ++c) {
        const auto high = static_cast<std::int64_t>(areas[c] >> 62);
        const auto low = static_cast<std::int64_t>(areas[c] & ((__int128{1} << 62) - 1));
        total += (BigInt(high) << 62) + low;
        result.no_drop += misses[c];
    }
    const std::int64_t counted = count - result.no_drop;
    if (counted > 0)
        result.average = Rational(total, BigInt(counted) * scenario.beta());
    return result;
}

std::map<std::int64_t, BigInt> oracle_event_counts(const Scenario& scenario, std::size_t user, std::int64_t budget)
{
    scenario.validate();
    check_inputs(scenario, OffsetVector{std::vector<std::int64_t>(static_cast<std::size_t>(scenario.n_users), 0)}, user);
    const std::int64_t count = offset_space(scenario, budget);
    const std::int64_t chunks = std::min<std::int64_t>(count, 64);
    const std::int64_t w = scenario.family.at(scenario.assignment[user]).weight();
    std::vector<std::vector<std::int64_t>> tallies(static_cast<std::size_t>(chunks),
                                                   std::vector<std::int64_t>(static_cast<std::size_t>(w + 1), 0));
    enumerate_offsets(scenario, user, count, chunks, [&](std::int64_t chunk, const std::vector<std::int64_t>& tau) {
        const auto mask = success_mask(scenario, tau, user);
        std::int64_t r = 0;
        for (auto bit : mask)
            r += bit;
        ++tallies[static_cast<std::size_t>(chunk)][static_cast<std::size_t>(r)];
    });
    std::map<std::int64_t, BigInt> counts;
    for (std::int64_t r = 0; r <= w; ++r) {
        BigInt sum = 0;
        for (const auto& tally : tallies)
            sum += tally[static_cast<std::size_t>(r)];
        if (sum != 0)
            counts[r] = sum;
    }
    return counts;
}

} // namespace aoiseq
