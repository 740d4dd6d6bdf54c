#include "aoiseq/dispatch.hpp"
#include "aoiseq/error.hpp"

#include <algorithm>

namespace aoiseq {

const char* to_string(Method method) noexcept
{
    switch (method) {
    case Method::Coprime:
        return "coprime_closed_form";
    case Method::OnePerFrame:
        return "one_per_frame_closed_form";
    case Method::EventEnum:
        return "event_enumeration";
    case Method::Oracle:
        return "offset_oracle";
    }
    return "unknown";
}

Scenario analysis_scenario(std::int64_t n_users, std::int64_t t_frame, const SequenceFamily& family,
                           std::int64_t seq_index)
{
    if (seq_index < 1 || seq_index > family.size())
        throw Error(ErrorCode::InvalidArgument, "sequence index outside 1.." + std::to_string(family.size()));
    if (n_users > family.size())
        throw Error(ErrorCode::InvalidArgument, "analysis needs N <= p+1 distinct sequences");
    auto scenario = make_scenario(n_users, t_frame, family);
    if (std::ranges::find(scenario.assignment, seq_index) == scenario.assignment.end())
        scenario.assignment.front() = seq_index;
    return scenario;
}

AnalysisResult analyze(const Scenario& scenario, std::int64_t seq_index, const AnalyzeOptions& options)
{
    scenario.validate();
    const auto& seq = scenario.family.at(seq_index);
    const std::int64_t T = scenario.t_frame;
    const std::int64_t L = scenario.period();
    if (T > L)
        throw Error(ErrorCode::PreconditionViolated, "analysis covers T <= L only");

    AnalysisResult result;
    result.beta = scenario.beta();
    result.upper_bound = aoi_upper_bound(T, result.beta);
    const auto view = superframe_view(seq, T);

    if (gcd64(T, L) == 1) {
        result.method = Method::Coprime;
        result.value = avg_aoi_coprime(scenario, view);
        return result;
    }
    result.skipped.push_back("coprime: gcd(T, L) = " + std::to_string(gcd64(T, L)));

    if (const auto most = max_ones_per_frame(seq, T); most <= 1) {
        result.method = Method::OnePerFrame;
        result.value = avg_aoi_one_per_frame(scenario, view);
        return result;
    } else {
        result.skipped.push_back("one-per-frame: a frame holds " + std::to_string(most) + " ones");
    }

    if (seq.weight() <= options.max_event_weight) {
        result.method = Method::EventEnum;
        result.value = avg_aoi_event_enum(scenario, seq, options.max_event_weight);
        return result;
    }
    result.skipped.push_back("event enumeration: w = " + std::to_string(seq.weight()) + " > " +
                             std::to_string(options.max_event_weight));

    const auto user = std::ranges::find(scenario.assignment, seq_index) - scenario.assignment.begin();
    if (user == static_cast<std::ptrdiff_t>(scenario.assignment.size()))
        throw Error(ErrorCode::PreconditionViolated, "no user is assigned the analysed sequence");
    try {
        const auto oracle = oracle_avg_aoi(scenario, static_cast<std::size_t>(user), options.oracle_budget);
        result.method = Method::Oracle;
        result.value = oracle.value();
        return result;
    } catch (const Error& e) {
        if (e.code() != ErrorCode::BudgetExceeded)
            throw;
        std::string reasons;
        for (const auto& s : result.skipped)
            reasons += s + "; ";
        throw Error(ErrorCode::InfeasibleSize, "no applicable method: " + reasons + "oracle: " + e.what());
    }
}

} // namespace aoiseq
