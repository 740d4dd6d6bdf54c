#pragma once

#include "aoiseq/simulator.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace aoiseq {

enum class DecisionReason {
    QEqualsT,             // condition held and A1 > A2
    TwoPMinusOneNotWorse, // condition held and A1 <= A2
    ConditionFailed,      // T < 2p-1 or gcd(T, p(2p-1)) != 1
};

const char* to_string(DecisionReason reason) noexcept;

struct SelectionResult {
    std::int64_t p = 0;
    std::int64_t q = 0;
    std::int64_t w = 0;
    std::vector<std::int64_t> chosen_pool;
    std::optional<double> a_q2p;
    std::optional<double> a_qT;
    DecisionReason decision_reason = DecisionReason::ConditionFailed;
};

SelectionResult select_parameters(std::int64_t n_users, std::int64_t t_frame);

struct SweepRow {
    std::int64_t w_fa = 0;
    Rational duty;
    AoiStats stats;
};

struct FramedAlohaSweep {
    std::int64_t n_users = 0;
    std::int64_t t_frame = 0;
    std::int64_t runs = 0;
    std::uint64_t seed = 0;
    std::int64_t best_w = 0;
    double best_mean = 0;
    std::vector<SweepRow> rows;
};

/// Runs used by the sweep when the caller does not choose: about 2*10^4 / N^2, at least 20.
std::int64_t default_sweep_runs(std::int64_t n_users);

/// Scenario for the ALOHA baselines (the family only fixes N and T bookkeeping).
Scenario aloha_scenario(std::int64_t n_users, std::int64_t t_frame);

/// Exhaustive search over w_fa in [1, w_limit] (w_limit = 0 means T), all candidates sharing the seed.
FramedAlohaSweep optimize_framed_aloha(std::int64_t n_users, std::int64_t t_frame, std::int64_t runs,
                                       std::uint64_t seed, std::int64_t w_limit = 0,
                                       const SimulationOptions& options = {});

} // namespace aoiseq
