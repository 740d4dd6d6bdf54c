#include "aoiseq/optimizer.hpp"
#include "aoiseq/error.hpp"

#include <algorithm>
#include <cmath>

namespace aoiseq {

const char* to_string(DecisionReason reason) noexcept
{
    switch (reason) {
    case DecisionReason::QEqualsT:
        return "q_equals_T";
    case DecisionReason::TwoPMinusOneNotWorse:
        return "q_2p_minus_1_not_worse";
    case DecisionReason::ConditionFailed:
        return "condition_failed";
    }
    return "unknown";
}

namespace {

std::vector<std::int64_t> pool_from(std::int64_t first, std::int64_t last)
{
    std::vector<std::int64_t> pool;
    for (std::int64_t g = first; g <= last; ++g)
        pool.push_back(g);
    return pool;
}

} // namespace

SelectionResult select_parameters(std::int64_t n_users, std::int64_t t_frame)
{
    if (n_users < 2)
        throw Error(ErrorCode::InvalidArgument, "parameter selection needs N >= 2");
    if (t_frame < 1)
        throw Error(ErrorCode::InvalidArgument, "frame length must be positive");

    SelectionResult result;
    result.p = smallest_prime_geq(n_users);
    result.w = result.p;
    const std::int64_t p = result.p;
    const std::int64_t q_short = 2 * p - 1;

    result.q = q_short;
    result.chosen_pool = pool_from(1, p + 1);
    if (t_frame < q_short || gcd64(t_frame, p * q_short) != 1) {
        result.decision_reason = DecisionReason::ConditionFailed;
        return result;
    }

    const auto short_family = crt_construct(p, q_short);
    const auto short_view = superframe_view(short_family.at(2), t_frame);
    const auto short_scenario = make_scenario(n_users, t_frame, short_family);
    result.a_q2p = avg_aoi_coprime(short_scenario, short_view);

    const auto long_family = crt_construct(p, t_frame);
    const auto long_view = superframe_view(long_family.at(2), t_frame);
    const auto long_scenario = make_scenario(n_users, t_frame, long_family);
    result.a_qT = avg_aoi_one_per_frame(long_scenario, long_view);

    if (*result.a_q2p > *result.a_qT) {
        result.q = t_frame;
        result.chosen_pool = pool_from(2, p + 1);
        result.decision_reason = DecisionReason::QEqualsT;
    } else {
        result.decision_reason = DecisionReason::TwoPMinusOneNotWorse;
    }
    return result;
}

std::int64_t default_sweep_runs(std::int64_t n_users)
{
    return std::max<std::int64_t>(20, 20000 / std::max<std::int64_t>(1, n_users * n_users));
}

Scenario aloha_scenario(std::int64_t n_users, std::int64_t t_frame)
{
    const std::int64_t p = smallest_prime_geq(std::max<std::int64_t>(n_users, 2));
    return make_scenario(n_users, t_frame, crt_construct(p, 2 * p - 1));
}

FramedAlohaSweep optimize_framed_aloha(std::int64_t n_users, std::int64_t t_frame, std::int64_t runs,
                                       std::uint64_t seed, std::int64_t w_limit, const SimulationOptions& options)
{
    if (runs < 1)
        throw Error(ErrorCode::InvalidArgument, "sweep needs at least one run per candidate");
    if (w_limit == 0)
        w_limit = t_frame;
    if (w_limit < 1 || w_limit > t_frame)
        throw Error(ErrorCode::InvalidArgument, "sweep limit must lie in [1, T]");

    const auto scenario = aloha_scenario(n_users, t_frame);
    FramedAlohaSweep sweep;
    sweep.n_users = n_users;
    sweep.t_frame = t_frame;
    sweep.runs = runs;
    sweep.seed = seed;
    sweep.best_mean = INFINITY;
    for (std::int64_t w = 1; w <= w_limit; ++w) {
        SchemeConfig scheme = FramedAloha{w};
        SweepRow row{w, duty_factor(scheme, scenario), run_simulation(scenario, scheme, UniformFull{}, runs, seed, options)};
        if (row.stats.pooled_mean < sweep.best_mean) {
            sweep.best_mean = row.stats.pooled_mean;
            sweep.best_w = w;
        }
        sweep.rows.push_back(std::move(row));
    }
    if (sweep.best_w == 0)
        throw Error(ErrorCode::Internal, "no framed-ALOHA candidate produced any AoI drop");
    return sweep;
}

} // namespace aoiseq
