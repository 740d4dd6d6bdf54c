#pragma once

#include "aoiseq/analytics.hpp"
#include "aoiseq/bigint.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace aoiseq {

struct OffsetVector {
    std::vector<std::int64_t> offsets; // tau_i in Z_L
};

struct ReplayResult {
    bool has_drops = false;
    std::int64_t area = 0;   // sum of A(t) over the measured window
    std::int64_t window = 0; // beta

    Rational average() const { return Rational(area, window); }
};

/// Slot-level replay over two superframes, measuring the second.
ReplayResult replay_aoi(const Scenario& scenario, const OffsetVector& offsets, std::size_t user);

/// Instantaneous AoI for t = 0..horizon-1, starting from A(0) = T unless slot 0 drops.
std::vector<std::int64_t> aoi_trace(const Scenario& scenario, const OffsetVector& offsets, std::size_t user,
                                    std::int64_t horizon);

struct OracleResult {
    Rational average;            // over offset vectors that produced drops
    std::int64_t vectors = 0;    // L^{N-1}
    std::int64_t no_drop = 0;    // vectors left out of the average

    double value() const { return to_double(average); }
};

inline constexpr std::int64_t default_oracle_budget = 1'000'000;

/// Average over every offset vector with tau_user = 0.
OracleResult oracle_avg_aoi(const Scenario& scenario, std::size_t user, std::int64_t budget = default_oracle_budget);

/// r -> number of offset vectors (tau_user = 0) under which exactly r of the user's "1"s succeed.
std::map<std::int64_t, BigInt> oracle_event_counts(const Scenario& scenario, std::size_t user,
                                                   std::int64_t budget = default_oracle_budget);

} // namespace aoiseq
