#include "aoiseq/analytics.hpp"
#include "aoiseq/dispatch.hpp"
#include "aoiseq/error.hpp"
#include "aoiseq/experiments.hpp"
#include "aoiseq/optimizer.hpp"
#include "aoiseq/oracle.hpp"
#include "aoiseq/sequences.hpp"
#include "aoiseq/simulator.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

using namespace aoiseq;

namespace {

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::InvalidArgument, "cannot open '" + path + "' for writing");
    out << text;
}

void emit(const std::string& out_path, const std::string& text)
{
    if (out_path.empty())
        std::fwrite(text.data(), 1, text.size(), stdout);
    else
        write_text(out_path, text);
}

std::int64_t resolve_q(std::int64_t n, std::int64_t t, std::optional<std::int64_t> q)
{
    return q ? *q : select_parameters(n, t).q;
}

SequenceFamily family_for(std::int64_t n, std::int64_t t, std::optional<std::int64_t> p, std::optional<std::int64_t> q)
{
    const std::int64_t prime = p ? *p : smallest_prime_geq(n);
    if (!q && !p)
        return crt_construct(prime, resolve_q(n, t, q));
    return crt_construct(prime, q ? *q : 2 * prime - 1);
}

struct ConstructArgs {
    std::int64_t n = 0, t = 0;
    std::optional<std::int64_t> q;
    std::string out;
};

struct VerifyArgs {
    std::string family;
    std::optional<std::int64_t> n;
};

struct AnalyzeArgs {
    std::int64_t n = 0, t = 0, q = 0, seq = 2;
    std::optional<std::int64_t> p;
    std::int64_t max_weight = 20;
    std::int64_t budget = default_oracle_budget;
};

struct OracleArgs {
    std::int64_t n = 0, t = 0, p = 0, q = 0, seq = 0;
    std::int64_t budget = default_oracle_budget;
};

struct SimulateArgs {
    std::string scheme = "seq";
    std::int64_t n = 0, t = 0;
    std::optional<std::int64_t> p, q, wfa, fixed_users;
    std::string pt;
    std::string dist = "uniform";
    std::int64_t runs = 10000;
    std::uint64_t seed = 1;
    std::string engine = "exact";
    bool aligned = false;
    std::string out;
};

struct CompareArgs {
    std::string recipe;
    std::int64_t runs = 0, sweep_runs = 0;
    std::uint64_t seed = 1;
    std::string out;
};

struct OptimizeArgs {
    std::int64_t n = 0, t = 0;
    std::int64_t runs = 0;
    std::uint64_t seed = 1;
    std::int64_t w_limit = 0;
    std::string out;
};

int cmd_construct(const ConstructArgs& a)
{
    const std::int64_t p = smallest_prime_geq(a.n);
    const auto family = crt_construct(p, resolve_q(a.n, a.t, a.q));
    const std::string doc = to_json(family).dump(2) + "\n";
    const std::string summary = fmt::format("p={} q={} L={} w={} duty_factor=1/{}\n", family.p, family.q, family.L,
                                            family.w, family.q);
    if (a.out.empty()) {
        std::fputs(doc.c_str(), stdout);
        std::fputs(summary.c_str(), stderr);
    } else {
        write_text(a.out, doc);
        std::fputs(summary.c_str(), stdout);
    }
    return 0;
}

int cmd_verify(const VerifyArgs& a)
{
    std::ifstream in(a.family);
    if (!in)
        throw Error(ErrorCode::InvalidArgument, "cannot read '" + a.family + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
    const auto family = family_from_json(doc);
    const auto report = verify_mhui(family.sequences, a.n ? *a.n : family.w);
    fmt::print("sequences={} L={} N={} min_weight={} max_cross_correlation={} pairs={} result={}\n",
               family.size(), family.L, report.n_users, report.min_weight, report.max_cross_correlation,
               report.pairs_checked, report.pass ? "MHUI" : "NOT_MHUI");
    return report.pass ? 0 : 1;
}

int cmd_analyze(const AnalyzeArgs& a)
{
    const std::int64_t p = a.p ? *a.p : smallest_prime_geq(a.n);
    const auto family = crt_construct(p, a.q);
    const auto scenario = analysis_scenario(a.n, a.t, family, a.seq);
    const auto result = analyze(scenario, a.seq, AnalyzeOptions{a.max_weight, a.budget});
    fmt::print("N={} T={} p={} q={} L={} beta={} sequence=v{}\n", a.n, a.t, p, a.q, family.L, result.beta, a.seq);
    for (const auto& reason : result.skipped)
        fmt::print("skipped: {}\n", reason);
    fmt::print("method={}\naoi={}\nupper_bound={}\n", to_string(result.method), format_number(result.value, 6),
               format_number(result.upper_bound, 1));
    return 0;
}

int cmd_oracle(const OracleArgs& a)
{
    const auto family = crt_construct(a.p, a.q);
    auto scenario = make_scenario(a.n, a.t, family);
    std::size_t user = 0;
    if (a.seq != 0) {
        scenario = analysis_scenario(a.n, a.t, family, a.seq);
        user = static_cast<std::size_t>(std::ranges::find(scenario.assignment, a.seq) - scenario.assignment.begin());
    }
    const auto result = oracle_avg_aoi(scenario, user, a.budget);
    const auto counts = oracle_event_counts(scenario, user, a.budget);
    fmt::print("N={} T={} p={} q={} L={} sequence=v{} offset_vectors={} no_drop={}\n", a.n, a.t, a.p, a.q, family.L,
               scenario.assignment[user], result.vectors, result.no_drop);
    fmt::print("aoi={}\naoi_exact={}\n", format_number(result.value(), 12), to_string(result.average));
    for (const auto& [r, m] : counts)
        fmt::print("M_{}={}\n", r, m.str());
    return 0;
}

int cmd_simulate(const SimulateArgs& a)
{
    SimulateRequest request;
    if (a.scheme == "seq") {
        request.scheme = SequenceScheme{};
    } else if (a.scheme == "slotted") {
        request.scheme = SlottedAloha{a.pt.empty() ? Rational(1, a.n) : parse_rational(a.pt)};
    } else if (a.scheme == "framed") {
        if (!a.wfa)
            throw Error(ErrorCode::InvalidArgument, "framed scheme needs --wfa");
        request.scheme = FramedAloha{*a.wfa};
    } else {
        throw Error(ErrorCode::InvalidArgument, "unknown scheme '" + a.scheme + "'");
    }
    if (a.scheme == "seq") {
        const auto family = family_for(a.n, a.t, a.p, a.q);
        if (a.fixed_users) {
            const auto base = *a.fixed_users;
            if (base < 1 || base > a.n || base > family.size())
                throw Error(ErrorCode::InvalidArgument, "--fixed-users must lie in [1, min(N, p+1)]");
            request.scenario = make_scenario(base, a.t, family);
            request.scenario.n_users = a.n;
            request.scenario.assignment.resize(static_cast<std::size_t>(a.n), 0);
            request.scenario.validate();
        } else {
            request.scenario = make_scenario(a.n, a.t, family);
        }
    } else {
        request.scenario = aloha_scenario(a.n, a.t);
    }
    request.dist = parse_distribution(a.dist);
    request.runs = a.runs;
    request.seed = a.seed;
    if (a.engine == "slot")
        request.options.engine = Engine::Slot;
    else if (a.engine != "exact")
        throw Error(ErrorCode::InvalidArgument, "engine must be exact or slot");
    request.options.aligned_frames = a.aligned;

    const auto stats = run_simulation(request.scenario, request.scheme, request.dist, request.runs, request.seed,
                                      request.options);
    emit(a.out, simulation_table(request, stats).str());
    if (!a.out.empty())
        write_text(a.out + ".meta.json", simulation_metadata(request, stats).dump(2) + "\n");
    return 0;
}

int cmd_compare(const CompareArgs& a)
{
    emit(a.out, run_recipe(a.recipe, RecipeOptions{a.runs, a.sweep_runs, a.seed}).str());
    return 0;
}

int cmd_optimize(const OptimizeArgs& a)
{
    const auto selection = select_parameters(a.n, a.t);
    const std::int64_t runs = a.runs > 0 ? a.runs : default_sweep_runs(a.n);
    const auto sweep = optimize_framed_aloha(a.n, a.t, runs, a.seed, a.w_limit);
    emit(a.out, selection_table(a.n, a.t, selection).str() + "\n" + sweep_table(sweep).str());
    return 0;
}

int cmd_validate(bool verbose)
{
    std::int64_t total = 0;
    const auto failures = run_validation([&](const ValidationCheck& check) {
        ++total;
        if (verbose || !check.passed)
            fmt::print("{} {} ({})\n", check.passed ? "PASS" : "FAIL", check.name, check.detail);
    });
    fmt::print("{} checks, {} failed\n", total, failures);
    return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Age-of-information toolkit for CRT protocol sequences"};
    app.require_subcommand(1);

    ConstructArgs construct;
    auto* c = app.add_subcommand("construct", "build a CRT sequence family");
    c->add_option("--n", construct.n, "number of users")->required();
    c->add_option("--t", construct.t, "frame length")->required();
    c->add_option("--q", construct.q, "second CRT modulus (default: parameter selection)");
    c->add_option("--out", construct.out, "write the family JSON here");

    VerifyArgs verify;
    auto* v = app.add_subcommand("verify", "check the MHUI property of a family document");
    v->add_option("--family", verify.family, "family JSON")->required();
    v->add_option("--n", verify.n, "number of users (default: w)");

    AnalyzeArgs analyze_args;
    auto* an = app.add_subcommand("analyze", "exact average AoI of one sequence");
    an->add_option("--n", analyze_args.n)->required();
    an->add_option("--t", analyze_args.t)->required();
    an->add_option("--q", analyze_args.q)->required();
    an->add_option("--seq", analyze_args.seq, "sequence index g of v_g")->required();
    an->add_option("--p", analyze_args.p, "prime (default: smallest prime >= N)");
    an->add_option("--max-weight", analyze_args.max_weight, "largest w for event enumeration");
    an->add_option("--budget", analyze_args.budget, "oracle offset-vector budget");

    OracleArgs oracle_args;
    auto* o = app.add_subcommand("oracle", "brute force over all offset vectors");
    o->add_option("--n", oracle_args.n)->required();
    o->add_option("--t", oracle_args.t)->required();
    o->add_option("--p", oracle_args.p)->required();
    o->add_option("--q", oracle_args.q)->required();
    o->add_option("--seq", oracle_args.seq, "sequence of the observed user (default: user 1)");
    o->add_option("--budget", oracle_args.budget);

    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "Monte Carlo AoI");
    s->add_option("--scheme", sim.scheme, "seq, slotted or framed")->check(CLI::IsMember({"seq", "slotted", "framed"}));
    s->add_option("--n", sim.n)->required();
    s->add_option("--t", sim.t)->required();
    s->add_option("--p", sim.p);
    s->add_option("--q", sim.q);
    s->add_option("--pt", sim.pt, "slotted ALOHA probability, e.g. 1/7 (default 1/N)");
    s->add_option("--wfa", sim.wfa, "framed ALOHA slots per frame");
    s->add_option("--fixed-users", sim.fixed_users, "users with a fixed sequence; the rest draw from the whole family");
    s->add_option("--dist", sim.dist, "uniform, range:<hi> or geom:<p>");
    s->add_option("--runs", sim.runs);
    s->add_option("--seed", sim.seed)->required();
    s->add_option("--engine", sim.engine, "exact or slot");
    s->add_flag("--aligned", sim.aligned, "ALOHA frames start together");
    s->add_option("--out", sim.out, "CSV path; a .meta.json sidecar is written next to it");

    CompareArgs cmp;
    auto* cp = app.add_subcommand("compare", "canned experiment recipes");
    cp->add_option("recipe", cmp.recipe)->required()->check(CLI::IsMember(recipe_names()));
    cp->add_option("--runs", cmp.runs);
    cp->add_option("--sweep-runs", cmp.sweep_runs);
    cp->add_option("--seed", cmp.seed);
    cp->add_option("--out", cmp.out);

    OptimizeArgs opt;
    auto* op = app.add_subcommand("optimize", "parameter selection and framed-ALOHA sweep");
    op->add_option("--n", opt.n)->required();
    op->add_option("--t", opt.t)->required();
    op->add_option("--runs", opt.runs, "runs per sweep candidate");
    op->add_option("--seed", opt.seed);
    op->add_option("--wlimit", opt.w_limit, "largest w_fa to try (default T)");
    op->add_option("--out", opt.out);

    bool verbose = false;
    auto* va = app.add_subcommand("validate", "oracle-equivalence suite");
    va->add_flag("--verbose", verbose);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*c)
            return cmd_construct(construct);
        if (*v)
            return cmd_verify(verify);
        if (*an)
            return cmd_analyze(analyze_args);
        if (*o)
            return cmd_oracle(oracle_args);
        if (*s)
            return cmd_simulate(sim);
        if (*cp)
            return cmd_compare(cmp);
        if (*op)
            return cmd_optimize(opt);
        if (*va)
            return cmd_validate(verbose);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
