#pragma once

#include "aoiseq/optimizer.hpp"
#include "aoiseq/simulator.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace aoiseq {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string str() const;
};

/// Fixed-point, locale-free; "inf" for infinities.
std::string format_number(double value, int decimals = 6);

std::uint64_t fnv1a(std::string_view text);
std::string hex64(std::uint64_t value);

struct SimulateRequest {
    Scenario scenario;
    SchemeConfig scheme;
    OffsetDistribution dist;
    std::int64_t runs = 1;
    std::uint64_t seed = 0;
    SimulationOptions options;
};

/// Canonical text of every knob that influences a simulation result.
std::string canonical_config(const SimulateRequest& request);

CsvTable simulation_table(const SimulateRequest& request, const AoiStats& stats);
nlohmann::json simulation_metadata(const SimulateRequest& request, const AoiStats& stats);

CsvTable selection_table(std::int64_t n_users, std::int64_t t_frame, const SelectionResult& selection);
CsvTable sweep_table(const FramedAlohaSweep& sweep);

struct RecipeOptions {
    std::int64_t runs = 0;       // 0 = recipe default
    std::int64_t sweep_runs = 0; // 0 = default_sweep_runs(N)
    std::uint64_t seed = 1;
};

std::vector<std::string> recipe_names();
CsvTable run_recipe(const std::string& name, const RecipeOptions& options = {});

struct ValidationCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

using CheckSink = std::function<void(const ValidationCheck&)>;

/// Closed forms vs event enumeration vs offset oracle on small families, plus exact event counts.
/// Returns the number of failed checks.
std::int64_t run_validation(const CheckSink& sink);

} // namespace aoiseq
