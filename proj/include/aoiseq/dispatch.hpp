#pragma once

#include "aoiseq/analytics.hpp"
#include "aoiseq/oracle.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace aoiseq {

enum class Method {
    Coprime,      // gcd(T, L) = 1 closed form
    OnePerFrame,  // at most one "1" per frame closed form
    EventEnum,
    Oracle,
};

const char* to_string(Method method) noexcept;

struct AnalyzeOptions {
    std::int64_t max_event_weight = 20;
    std::int64_t oracle_budget = default_oracle_budget;
};

struct AnalysisResult {
    double value = 0;
    Method method = Method::Coprime;
    double upper_bound = 0;
    std::int64_t beta = 0;
    std::vector<std::string> skipped; // why earlier methods did not apply
};

/// Average AoI of the user on `seq_index`, using the cheapest exact method whose precondition holds.
AnalysisResult analyze(const Scenario& scenario, std::int64_t seq_index, const AnalyzeOptions& options = {});

/// Scenario for `analyze`: N users on distinct sequences that include v_{seq_index}.
Scenario analysis_scenario(std::int64_t n_users, std::int64_t t_frame, const SequenceFamily& family,
                           std::int64_t seq_index);

} // namespace aoiseq
