#pragma once

#include "aoiseq/bigint.hpp"
#include "aoiseq/sequences.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace aoiseq {

/// N users with frame length T sharing one CRT family.
struct Scenario {
    std::int64_t n_users = 0;
    std::int64_t t_frame = 0;
    SequenceFamily family;
    /// 1-based sequence index per user; 0 draws an index from reuse_pool (simulation only).
    std::vector<std::int64_t> assignment;
    std::vector<std::int64_t> reuse_pool;

    std::int64_t period() const noexcept { return family.L; }
    std::int64_t weight() const noexcept { return family.w; }
    std::int64_t beta() const { return lcm64(t_frame, family.L); }

    void validate() const;
};

/// Users 1..N on v_{p+2-N}..v_{p+1}. Beyond p+1 users the extra ones draw from `pool`
/// (default: the whole family).
Scenario make_scenario(std::int64_t n_users, std::int64_t t_frame, SequenceFamily family,
                       std::vector<std::int64_t> pool = {});

/// One deterministic superframe of a single user whose success set repeats every period.
struct EventStats {
    std::int64_t beta = 0;
    std::int64_t t_frame = 0;
    std::vector<std::int64_t> drop_times;
    std::vector<std::int64_t> service_times;          // S_j
    std::vector<std::int64_t> inter_departures_slot;  // Y_j = drop_{j+1} - drop_j
    std::vector<std::int64_t> inter_departures_frame; // X_j = frame_{j+1} - frame_j

    std::int64_t drop_count() const noexcept { return static_cast<std::int64_t>(drop_times.size()); }

    /// E[SY]/E[Y] + E[Y^2]/(2E[Y]) - 1/2
    double bracket_slot() const;
    /// sum S_{j+1} X_j / sum X + sum X^2 / (2 sum X) - 1/2
    double bracket_frame() const;
    /// The time-average AoI over the superframe as an exact rational.
    Rational exact_average() const;
};

BigInt stirling2(std::int64_t n, std::int64_t k);

/// Number of offset vectors of the N-1 interferers under which one specific event with r
/// successes occurs.
BigInt event_offset_count(std::int64_t r, std::int64_t n_users, std::int64_t w, std::int64_t L);

/// Probability of one specific event with r successful "1"s.
Rational event_probability(std::int64_t r, std::int64_t n_users, std::int64_t w, std::int64_t L);
Rational event_probability(std::int64_t r, const Scenario& scenario);

/// All P_1..P_w as doubles (index r-1).
std::vector<double> event_probabilities(const Scenario& scenario);

double f1(std::int64_t d, std::int64_t t_frame, std::int64_t L);

EventStats evaluate_event(const ScheduleSequence& seq, std::int64_t t_frame,
                          std::span<const std::int64_t> success_set);

/// Brute force over all 2^w - 1 events. Refuses w above max_weight.
double avg_aoi_event_enum(const Scenario& scenario, const ScheduleSequence& seq, std::int64_t max_weight = 20);

double avg_aoi_coprime(const Scenario& scenario, const SuperframeView& view);

double avg_aoi_one_per_frame(const Scenario& scenario, const SuperframeView& view);

double aoi_upper_bound(std::int64_t t_frame, std::int64_t beta);

} // namespace aoiseq
