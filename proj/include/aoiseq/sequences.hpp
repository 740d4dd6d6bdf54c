#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace aoiseq {

/// A periodic binary schedule stored by the positions of its "1"s.
///
/// The characteristic set is kept sorted and duplicate-free, so two
/// sequences compare equal iff they transmit in the same slots.
class ScheduleSequence {
public:
    ScheduleSequence(std::int64_t period, std::vector<std::int64_t> ones);

    std::int64_t period() const noexcept { return period_; }
    std::int64_t weight() const noexcept { return static_cast<std::int64_t>(ones_.size()); }
    std::span<const std::int64_t> ones() const noexcept { return ones_; }

    bool transmits_at(std::int64_t slot) const;

    /// Dense 0/1 expansion of one period; only the simulator's slot engine needs it.
    std::vector<std::uint8_t> dense() const;

    /// Cyclic gaps between consecutive "1"s within one period; they sum to the period.
    std::vector<std::int64_t> cyclic_distances() const;

    friend bool operator==(const ScheduleSequence&, const ScheduleSequence&) = default;

private:
    std::int64_t period_;
    std::vector<std::int64_t> ones_;
};

/// The p+1 sequences of the CRT construction with period L = p*q and weight p.
struct SequenceFamily {
    std::int64_t p = 0;
    std::int64_t q = 0;
    std::int64_t w = 0;
    std::int64_t L = 0;
    std::vector<ScheduleSequence> sequences; // sequences[g-1] is v_g

    std::int64_t size() const noexcept { return static_cast<std::int64_t>(sequences.size()); }

    /// 1-based access matching the construction's numbering v_1..v_{p+1}.
    const ScheduleSequence& at(std::int64_t index) const;
};

/// Per-(sequence, frame length) quantities over one superframe of length lcm(T, L).
struct SuperframeView {
    std::int64_t period = 0;  // L
    std::int64_t t_frame = 0; // T
    std::int64_t beta = 0;
    std::int64_t weight = 0;  // w
    std::int64_t w_prime = 0;
    std::vector<std::int64_t> positions;     // sorted "1" positions in Z_beta
    std::vector<std::int64_t> distances;     // cyclic gap after each position, sums to beta
    std::vector<std::int64_t> one_positions; // position mod T

    /// The first w distances, i.e. the gaps of a single period.
    std::span<const std::int64_t> period_distances() const;

    /// Multiplicity of every 1-position value.
    std::map<std::int64_t, std::int64_t> position_multiset() const;
};

struct MhuiReport {
    std::int64_t n_users = 0;
    std::int64_t min_weight = 0;
    bool weights_ok = false;
    std::int64_t max_cross_correlation = 0;
    std::int64_t pairs_checked = 0;
    bool pass = false;
};

std::int64_t gcd64(std::int64_t a, std::int64_t b);
std::int64_t lcm64(std::int64_t a, std::int64_t b);
bool is_prime(std::int64_t n);
std::int64_t smallest_prime_geq(std::int64_t n);

/// The unique t in Z_{pq} with t = a (mod p) and t = b (mod q); requires gcd(p,q)=1.
std::int64_t crt_combine(std::int64_t a, std::int64_t p, std::int64_t b, std::int64_t q);

SequenceFamily crt_construct(std::int64_t p, std::int64_t q);

std::int64_t cross_correlation(const ScheduleSequence& a, const ScheduleSequence& b, std::int64_t tau);

/// H(tau) for every tau in Z_L, by counting pairwise differences of the two characteristic sets.
std::vector<std::int64_t> cross_correlation_profile(const ScheduleSequence& a, const ScheduleSequence& b);

MhuiReport verify_mhui(std::span<const ScheduleSequence> sequences, std::int64_t n_users);

SuperframeView superframe_view(const ScheduleSequence& seq, std::int64_t t_frame);

/// Largest number of "1"s landing in a single frame of the superframe.
std::int64_t max_ones_per_frame(const ScheduleSequence& seq, std::int64_t t_frame);

nlohmann::json to_json(const SequenceFamily& family);
SequenceFamily family_from_json(const nlohmann::json& doc);

} // namespace aoiseq
