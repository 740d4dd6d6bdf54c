#include "aoiseq/experiments.hpp"
#include "aoiseq/dispatch.hpp"
#include "aoiseq/error.hpp"
#include "aoiseq/oracle.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>

namespace aoiseq {

std::string CsvTable::str() const
{
    std::string out;
    auto emit = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i)
                out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    emit(header);
    for (const auto& row : rows)
        emit(row);
    return out;
}

std::string format_number(double value, int decimals)
{
    if (std::isinf(value))
        return value > 0 ? "inf" : "-inf";
    if (std::isnan(value))
        return "nan";
    return fmt::format("{:.{}f}", value, decimals);
}

std::uint64_t fnv1a(std::string_view text)
{
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::string hex64(std::uint64_t value)
{
    return fmt::format("{:016x}", value);
}

namespace {

std::string scheme_setting(const SchemeConfig& scheme)
{
    if (const auto* s = std::get_if<SlottedAloha>(&scheme))
        return "p_t=" + to_string(s->p_t);
    if (const auto* f = std::get_if<FramedAloha>(&scheme))
        return "w_fa=" + std::to_string(f->w_fa);
    return "-";
}

std::string join_ints(const std::vector<std::int64_t>& values)
{
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i)
        out += (i ? ";" : "") + std::to_string(values[i]);
    return out;
}

std::string engine_name(Engine engine)
{
    return engine == Engine::Exact ? "exact" : "slot";
}

} // namespace

std::string canonical_config(const SimulateRequest& r)
{
    const auto& s = r.scenario;
    const auto& o = r.options;
    return fmt::format("scheme={};setting={};N={};T={};p={};q={};dist={};runs={};seed={};assignment={};pool={};"
                       "engine={};warmup={};measure={};aloha_warmup={};aloha_measure={};aligned={};chunks={}",
                       scheme_name(r.scheme), scheme_setting(r.scheme), s.n_users, s.t_frame, s.family.p, s.family.q,
                       dist_name(r.dist), r.runs, r.seed, join_ints(s.assignment), join_ints(s.reuse_pool),
                       engine_name(o.engine), o.warmup_superframes, o.measure_superframes, o.aloha_warmup,
                       o.aloha_measure, o.aligned_frames ? 1 : 0, o.chunks);
}

CsvTable simulation_table(const SimulateRequest& request, const AoiStats& stats)
{
    CsvTable table;
    table.header = {"scheme", "N", "T", "L", "q", "dist", "runs", "seed", "per_user_mean", "pooled_mean",
                    "std_error", "duty_factor", "no_drop", "config_hash"};
    std::string per_user;
    for (std::size_t i = 0; i < stats.per_user_mean.size(); ++i)
        per_user += (i ? ";" : "") + format_number(stats.per_user_mean[i]);
    const auto& s = request.scenario;
    const bool sequence = std::holds_alternative<SequenceScheme>(request.scheme);
    table.rows.push_back({scheme_name(request.scheme), std::to_string(s.n_users), std::to_string(s.t_frame),
                          sequence ? std::to_string(s.period()) : "-", sequence ? std::to_string(s.family.q) : "-",
                          sequence ? dist_name(request.dist) : "uniform_phase", std::to_string(request.runs),
                          std::to_string(request.seed), per_user, format_number(stats.pooled_mean),
                          format_number(stats.std_error), to_string(duty_factor(request.scheme, s)),
                          std::to_string(stats.no_drop), hex64(fnv1a(canonical_config(request)))});
    return table;
}

nlohmann::json simulation_metadata(const SimulateRequest& request, const AoiStats& stats)
{
    const auto& s = request.scenario;
    const auto& o = request.options;
    nlohmann::json doc;
    doc["config_hash"] = hex64(fnv1a(canonical_config(request)));
    doc["canonical_config"] = canonical_config(request);
    doc["scheme"] = scheme_name(request.scheme);
    doc["scheme_setting"] = scheme_setting(request.scheme);
    doc["n_users"] = s.n_users;
    doc["t_frame"] = s.t_frame;
    doc["family"] = {{"p", s.family.p}, {"q", s.family.q}, {"w", s.family.w}, {"L", s.family.L}};
    doc["assignment"] = s.assignment;
    doc["reuse_pool"] = s.reuse_pool;
    doc["runs"] = request.runs;
    doc["seed"] = request.seed;
    doc["duty_factor"] = to_string(duty_factor(request.scheme, s));
    doc["offset_distribution"] = dist_name(request.dist);
    doc["geometric_offsets"] = "failures before first success, reduced mod L";
    doc["frame_anchoring"] = "each user's frames start at its own offset";
    doc["aloha_frame_phase"] = o.aligned_frames ? "aligned at slot 0" : "uniform in Z_T per user";
    doc["slotted_aloha_packets"] = "transmits the current frame's packet with probability p_t every slot";
    doc["engine"] = engine_name(o.engine);
    doc["warmup_superframes"] = o.warmup_superframes;
    doc["measure_superframes"] = o.measure_superframes;
    doc["aloha_warmup_NT"] = o.aloha_warmup;
    doc["aloha_measure_NT"] = o.aloha_measure;
    doc["initial_age"] = "T";
    doc["rng"] = "mt19937_64 per run, seeded by splitmix64(seed, run)";
    doc["no_drop_pairs"] = stats.no_drop;
    doc["pooled_mean"] = stats.pooled_mean;
    doc["std_error"] = stats.std_error;
    return doc;
}

CsvTable selection_table(std::int64_t n_users, std::int64_t t_frame, const SelectionResult& sel)
{
    CsvTable table;
    table.header = {"N", "T", "p", "q", "w", "L", "pool", "a_q2p", "a_qT", "decision", "duty_factor"};
    table.rows.push_back({std::to_string(n_users), std::to_string(t_frame), std::to_string(sel.p),
                          std::to_string(sel.q), std::to_string(sel.w), std::to_string(sel.p * sel.q),
                          join_ints(sel.chosen_pool), sel.a_q2p ? format_number(*sel.a_q2p) : "-",
                          sel.a_qT ? format_number(*sel.a_qT) : "-", to_string(sel.decision_reason),
                          to_string(Rational(1, sel.q))});
    return table;
}

CsvTable sweep_table(const FramedAlohaSweep& sweep)
{
    CsvTable table;
    table.header = {"N", "T", "w_fa", "duty_factor", "pooled_mean", "std_error", "no_drop", "runs", "seed", "best"};
    for (const auto& row : sweep.rows)
        table.rows.push_back({std::to_string(sweep.n_users), std::to_string(sweep.t_frame), std::to_string(row.w_fa),
                              to_string(row.duty), format_number(row.stats.pooled_mean),
                              format_number(row.stats.std_error), std::to_string(row.stats.no_drop),
                              std::to_string(sweep.runs), std::to_string(sweep.seed),
                              row.w_fa == sweep.best_w ? "1" : "0"});
    return table;
}

namespace {

std::int64_t pick(std::int64_t requested, std::int64_t fallback)
{
    return requested > 0 ? requested : fallback;
}

CsvTable recipe_table2()
{
    CsvTable table;
    table.header = {"T", "q", "L", "sequence", "method", "aoi", "duty_factor", "upper_bound"};
    for (std::int64_t T : {20, 30, 40, 50, 60}) {
        for (std::int64_t q : {std::int64_t{13}, T}) {
            const auto scenario = make_scenario(7, T, crt_construct(7, q));
            for (std::int64_t g : {2, 8}) {
                const auto r = analyze(scenario, g);
                table.rows.push_back({std::to_string(T), std::to_string(q), std::to_string(scenario.period()),
                                      "v" + std::to_string(g), to_string(r.method), format_number(r.value, 4),
                                      to_string(Rational(1, q)), format_number(r.upper_bound, 1)});
            }
        }
    }
    return table;
}

double analytic_pooled(const Scenario& scenario)
{
    double total = 0;
    for (auto g : scenario.assignment)
        total += analyze(scenario, g).value;
    return total / static_cast<double>(scenario.assignment.size());
}

CsvTable recipe_fig4(const RecipeOptions& opt)
{
    CsvTable table;
    table.header = {"q", "T", "L", "analytic_mean", "simulated_mean", "std_error", "runs", "seed"};
    const std::int64_t runs = pick(opt.runs, 10000);
    for (std::int64_t q : {21, 30}) {
        const auto scenario = make_scenario(10, 30, crt_construct(11, q));
        const auto stats = run_simulation(scenario, SequenceScheme{}, UniformFull{}, runs, opt.seed);
        table.rows.push_back({std::to_string(q), "30", std::to_string(scenario.period()),
                              format_number(analytic_pooled(scenario), 4), format_number(stats.pooled_mean, 4),
                              format_number(stats.std_error, 4), std::to_string(runs), std::to_string(opt.seed)});
    }
    return table;
}

CsvTable recipe_fig5(const RecipeOptions& opt)
{
    CsvTable table;
    table.header = {"q", "T", "L", "dist", "simulated_mean", "std_error", "runs", "seed"};
    const std::int64_t runs = pick(opt.runs, 10000);
    for (std::int64_t q : {21, 30}) {
        const auto scenario = make_scenario(10, 30, crt_construct(11, q));
        const std::vector<OffsetDistribution> dists = {UniformFull{}, UniformRange{scenario.period() / 4}, Geometric{0.01}};
        for (const auto& dist : dists) {
            const auto stats = run_simulation(scenario, SequenceScheme{}, dist, runs, opt.seed);
            table.rows.push_back({std::to_string(q), "30", std::to_string(scenario.period()), dist_name(dist),
                                  format_number(stats.pooled_mean, 4), format_number(stats.std_error, 4),
                                  std::to_string(runs), std::to_string(opt.seed)});
        }
    }
    return table;
}

struct SchemeRowContext {
    CsvTable* table;
    std::int64_t runs;
    std::int64_t sweep_runs;
    std::uint64_t seed;
};

void add_scheme_row(const SchemeRowContext& ctx, const Scenario& scenario, const std::string& label,
                    const SchemeConfig& scheme, std::int64_t L)
{
    const auto stats = run_simulation(scenario, scheme, UniformFull{}, ctx.runs, ctx.seed);
    ctx.table->rows.push_back({std::to_string(scenario.n_users), std::to_string(scenario.t_frame),
                               L > 0 ? std::to_string(L) : "-", label, scheme_setting(scheme),
                               to_string(duty_factor(scheme, scenario)), format_number(stats.pooled_mean, 4),
                               format_number(stats.std_error, 4), std::to_string(ctx.runs), std::to_string(ctx.seed)});
}

std::vector<std::string> scheme_header()
{
    return {"N", "T", "L", "scheme", "setting", "duty_factor", "aoi", "std_error", "runs", "seed"};
}

// seq, SA*, FA*, and optionally the baselines throttled to the sequence duty factor
void compare_schemes(const SchemeRowContext& ctx, const Scenario& seq_scenario, std::int64_t w_limit, bool same_duty)
{
    const std::int64_t N = seq_scenario.n_users;
    const std::int64_t T = seq_scenario.t_frame;
    add_scheme_row(ctx, seq_scenario, "seq", SequenceScheme{}, seq_scenario.period());

    const auto aloha = aloha_scenario(N, T);
    add_scheme_row(ctx, aloha, "SA*", SlottedAloha{Rational(1, N)}, 0);
    const auto sweep = optimize_framed_aloha(N, T, pick(ctx.sweep_runs, default_sweep_runs(N)), ctx.seed, w_limit);
    add_scheme_row(ctx, aloha, "FA*", FramedAloha{sweep.best_w}, 0);
    if (!same_duty)
        return;
    const Rational f_s(seq_scenario.weight(), seq_scenario.period());
    add_scheme_row(ctx, aloha, "SA^s", SlottedAloha{f_s}, 0);
    const auto w_s = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::llround(to_double(f_s * T))));
    add_scheme_row(ctx, aloha, "FA^s", FramedAloha{w_s}, 0);
}

CsvTable recipe_fig6(const RecipeOptions& opt)
{
    CsvTable table;
    table.header = scheme_header();
    const SchemeRowContext ctx{&table, pick(opt.runs, 2000), opt.sweep_runs, opt.seed};
    for (std::int64_t N : {7, 11, 13, 17, 19, 23})
        compare_schemes(ctx, make_scenario(N, 50, crt_construct(N, 50)), 0, true);
    return table;
}

CsvTable recipe_fig7(const RecipeOptions& opt)
{
    CsvTable table;
    table.header = scheme_header();
    const SchemeRowContext ctx{&table, pick(opt.runs, 100), pick(opt.sweep_runs, 10), opt.seed};
    for (std::int64_t T : {100, 200, 300, 400, 500, 600}) {
        const std::int64_t q = std::max<std::int64_t>(T, 2 * 53 - 1);
        compare_schemes(ctx, make_scenario(50, T, crt_construct(53, q)), std::min<std::int64_t>(T, 3 * T / 50 + 2), true);
    }
    return table;
}

CsvTable recipe_fig8(const RecipeOptions& opt)
{
    CsvTable table;
    table.header = scheme_header();
    const SchemeRowContext ctx{&table, pick(opt.runs, 2000), opt.sweep_runs, opt.seed};
    const auto family = crt_construct(23, 50);
    for (std::int64_t N = 23; N <= 30; ++N) {
        auto scenario = make_scenario(23, 50, family);
        scenario.n_users = N;
        scenario.assignment.resize(static_cast<std::size_t>(N), 0);
        scenario.validate();
        compare_schemes(ctx, scenario, 0, false);
    }
    return table;
}

} // namespace

std::vector<std::string> recipe_names()
{
    return {"table2", "fig4", "fig5", "fig6", "fig7", "fig8"};
}

CsvTable run_recipe(const std::string& name, const RecipeOptions& options)
{
    if (name == "table2")
        return recipe_table2();
    if (name == "fig4")
        return recipe_fig4(options);
    if (name == "fig5")
        return recipe_fig5(options);
    if (name == "fig6")
        return recipe_fig6(options);
    if (name == "fig7")
        return recipe_fig7(options);
    if (name == "fig8")
        return recipe_fig8(options);
    std::string known;
    for (const auto& n : recipe_names())
        known += (known.empty() ? "" : ", ") + n;
    throw Error(ErrorCode::InvalidArgument, "unknown recipe '" + name + "' (known: " + known + ")");
}

namespace {

bool close_rel(double a, double b, double tol = 1e-9)
{
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

} // namespace

std::int64_t run_validation(const CheckSink& sink)
{
    std::int64_t failures = 0;
    auto report = [&](std::string name, bool ok, std::string detail) {
        if (!ok)
            ++failures;
        sink(ValidationCheck{std::move(name), ok, std::move(detail)});
    };

    const std::vector<std::pair<std::int64_t, std::int64_t>> families = {{2, 3}, {3, 5}, {3, 7}};
    for (auto [p, q] : families) {
        const auto family = crt_construct(p, q);
        const std::int64_t L = family.L;
        const auto mhui = verify_mhui(family.sequences, p);
        report(fmt::format("mhui p={} q={}", p, q), mhui.pass, fmt::format("max H = {}", mhui.max_cross_correlation));

        for (std::int64_t T = 1; T < L; ++T) {
            for (std::int64_t g = 1; g <= family.size(); ++g) {
                const auto scenario = analysis_scenario(p, T, family, g);
                const auto user = std::ranges::find(scenario.assignment, g) - scenario.assignment.begin();
                const auto& seq = family.at(g);
                const auto view = superframe_view(seq, T);
                const double enumerated = avg_aoi_event_enum(scenario, seq);
                const double oracle = oracle_avg_aoi(scenario, static_cast<std::size_t>(user)).value();
                const std::string tag = fmt::format("p={} q={} T={} v{}", p, q, T, g);
                report("enum=oracle " + tag, close_rel(enumerated, oracle),
                       fmt::format("{:.12f} vs {:.12f}", enumerated, oracle));
                if (gcd64(T, L) == 1) {
                    const double closed = avg_aoi_coprime(scenario, view);
                    report("coprime " + tag, close_rel(closed, oracle), fmt::format("{:.12f} vs {:.12f}", closed, oracle));
                }
                if (g >= 2 && (T <= p || T == q)) {
                    const double closed = avg_aoi_one_per_frame(scenario, view);
                    report("one-per-frame " + tag, close_rel(closed, oracle),
                           fmt::format("{:.12f} vs {:.12f}", closed, oracle));
                }
            }
        }
    }

    const auto family = crt_construct(3, 5);
    for (std::int64_t N : {2, 3}) {
        auto scenario = make_scenario(N, 4, family);
        const auto counts = oracle_event_counts(scenario, 0);
        bool exact = !counts.contains(0);
        Rational total = 0;
        for (std::int64_t r = 1; r <= family.w; ++r) {
            const BigInt predicted = binomial(family.w, r) * event_offset_count(r, N, family.w, family.L);
            const BigInt observed = counts.contains(r) ? counts.at(r) : BigInt(0);
            exact = exact && predicted == observed;
            total += binomial(family.w, r) * event_probability(r, N, family.w, family.L);
        }
        report(fmt::format("event counts N={} (3,5)", N), exact && total == 1, "exact rational comparison");
    }
    return failures;
}

} // namespace aoiseq
