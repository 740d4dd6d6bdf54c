#pragma once

#include "aoiseq/analytics.hpp"
#include "aoiseq/bigint.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace aoiseq {

struct SequenceScheme {};

struct SlottedAloha {
    Rational p_t;
};

struct FramedAloha {
    std::int64_t w_fa = 1;
};

using SchemeConfig = std::variant<SequenceScheme, SlottedAloha, FramedAloha>;

struct UniformFull {};

struct UniformRange {
    std::int64_t hi = 0; // inclusive
};

struct Geometric {
    double p_stop = 0.01;
};

using OffsetDistribution = std::variant<UniformFull, UniformRange, Geometric>;

enum class Engine {
    Exact, // sequence scheme: steady-state superframe per run; ALOHA schemes always use slots
    Slot,
};

struct SimulationOptions {
    Engine engine = Engine::Exact;
    std::int64_t warmup_superframes = 3;
    std::int64_t measure_superframes = 10;
    // ALOHA horizon in units of N*T slots
    std::int64_t aloha_warmup = 3;
    std::int64_t aloha_measure = 10;
    bool aligned_frames = false; // ALOHA only: every user's frames start at slot 0
    std::int64_t chunks = 256;
};

struct AoiStats {
    std::vector<double> per_user_mean;
    std::vector<std::int64_t> per_user_samples;
    double pooled_mean = 0;
    double std_error = 0;
    std::int64_t run_count = 0;
    std::uint64_t seed = 0;
    std::int64_t no_drop = 0; // (run, user) pairs without any AoI drop
};

std::string scheme_name(const SchemeConfig& scheme);
std::string dist_name(const OffsetDistribution& dist);

/// "uniform", "range:<hi>" or "geom:<p>".
OffsetDistribution parse_distribution(const std::string& text);

void validate_scheme(const SchemeConfig& scheme, const Scenario& scenario);

Rational duty_factor(const SchemeConfig& scheme, const Scenario& scenario);

/// Independent stream for run `run` of a simulation seeded with `seed`.
std::mt19937_64 run_rng(std::uint64_t seed, std::uint64_t run);

AoiStats run_simulation(const Scenario& scenario, const SchemeConfig& scheme, const OffsetDistribution& dist,
                        std::int64_t runs, std::uint64_t seed, const SimulationOptions& options = {});

/// Instantaneous AoI of one user over the whole slot-engine horizon of one run.
std::vector<std::int64_t> simulate_trace(const Scenario& scenario, const SchemeConfig& scheme,
                                         const OffsetDistribution& dist, std::uint64_t seed, std::int64_t run,
                                         std::size_t user, const SimulationOptions& options = {});

} // namespace aoiseq
