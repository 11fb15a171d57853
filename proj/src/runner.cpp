#include "orlicz/runner.hpp"

#include "orlicz/acceptance.hpp"
#include "orlicz/errors.hpp"
#include "orlicz/moser.hpp"
#include "orlicz/scalar.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <future>

namespace orlicz {
namespace {

namespace fs = std::filesystem;

constexpr const char* kModule = "cli_harness";
constexpr const char* kVersion = "1.0.0";

Json header(const RunConfig& cfg) {
    return Json{{"schema_version", kReportSchemaVersion}, {"kind", std::string(run_kind_id(cfg.kind))}};
}

Json check_nfunction(const RunConfig& cfg, const fs::path& out) {
    const NFunction nf = build_nfunction(*cfg.nfunction);
    const auto grid = default_index_grid();
    Json rep = header(cfg);
    rep["nfunction"] = nfunction_json(nf);
    const ConditionReport cond = check_conditions(nf, grid);
    rep["conditions"] = to_json(cond);
    try {
        rep["indices"] = to_json(simonenko_indices(nf, grid));
    } catch (const PreconditionError&) {
        rep["indices"] = nullptr;
    }
    rep["delta2_constant"] = delta2_constant(nf, 1e-8, 1e8);
    rep["phi_at_one"] = nf.phi_at_one();
    rep["bigphi_at_one"] = nf.bigphi_at_one();
    rep["ell_star"] = nf.ell() < nf.dim() ? Json(nf.ell_star()) : Json(nullptr);
    rep["em_star"] = nf.em() < nf.dim() ? Json(nf.em_star()) : Json(nullptr);

    PlotTable plot{{"t", "phi", "big_phi", "index_ratio"}, {}};
    for (const double t : scalar::log_grid(1e-4, 1e4, 65)) {
        plot.rows.push_back({t, nf.phi(t), nf.big_phi(t), index_ratio(nf, t)});
    }
    write_plot_csv(out / "plotdata.csv", plot);
    return rep;
}

Json solve(const RunConfig& cfg, const fs::path& out) {
    const NFunction nf = build_nfunction(*cfg.nfunction);
    const auto mesh = build_mesh(*cfg.domain);
    const ProblemSpec problem = build_problem(cfg, mesh, nf);
    const auto [u, report] = solve_dirichlet(problem, cfg.solver);

    Json rep = header(cfg);
    rep["nfunction"] = nfunction_json(nf);
    rep["mesh"] = mesh_json(*mesh);
    rep["rhs"] = cfg.rhs->kind;
    rep["solve"] = to_json(report);
    rep["sup_norm"] = report.sup_norm;
    rep["norms"] = to_json(norm_report(u, nf, {1.0, 2.0, std::numeric_limits<double>::infinity()}));
    rep["positive"] = positivity_check(u, 0.0);

    write_field_csv(out / "field.csv", u);
    PlotTable plot{{"level", "iteration", "eps", "energy", "residual", "step"}, {}};
    for (const auto& r : report.log) {
        plot.rows.push_back({static_cast<double>(r.level), static_cast<double>(r.iteration), r.eps, r.energy,
                             r.residual, r.step});
    }
    write_plot_csv(out / "plotdata.csv", plot);
    return rep;
}

Json truncate_sequence(const RunConfig& cfg, const fs::path& out) {
    const NFunction nf = build_nfunction(*cfg.nfunction);
    const auto mesh = build_mesh(*cfg.domain);
    const ProblemSpec problem = build_problem(cfg, mesh, nf);
    const auto chain = orlicz::truncated_sequence(problem, cfg.levels, cfg.solver);

    std::vector<Field> fields;
    Json levels = Json::array();
    PlotTable plot{{"n", "sup_norm", "newton_iterations", "residual"}, {}};
    bool positive = true;
    for (std::size_t i = 0; i < chain.size(); ++i) {
        const auto& [u, r] = chain[i];
        fields.push_back(u);
        positive = positive && positivity_check(u, 0.0);
        levels.push_back(Json{{"n", cfg.levels[i]},
                              {"sup_norm", r.sup_norm},
                              {"newton_iterations", r.newton_iterations},
                              {"residual_dual_norm", r.residual_dual_norm},
                              {"converged", r.converged}});
        plot.rows.push_back({static_cast<double>(cfg.levels[i]), r.sup_norm, static_cast<double>(r.newton_iterations),
                             r.residual_dual_norm});
    }
    const double tol = 1e-8 * sup_norm(fields.back());

    Json rep = header(cfg);
    rep["nfunction"] = nfunction_json(nf);
    rep["mesh"] = mesh_json(*mesh);
    rep["rhs"] = cfg.rhs->kind;
    rep["levels"] = levels;
    rep["monotone_tol"] = tol;
    rep["monotone"] = monotonicity_check(fields, tol);
    rep["positive"] = positive;

    write_field_csv(out / "field.csv", fields.back());
    write_plot_csv(out / "plotdata.csv", plot);
    return rep;
}

double source_lq_norm(const ProblemSpec& problem, double q) {
    const Mesh& mesh = *problem.mesh();
    const auto& f_q = problem.source_at_quadrature();
    const int nq = mesh.quadrature_size();
    double scale = 0.0;
    for (double v : f_q) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return 0.0;
    double sum = 0.0;
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        const auto qps = mesh.quadrature(e);
        for (int k = 0; k < nq; ++k) {
            sum += qps[static_cast<std::size_t>(k)].weight *
                   std::pow(std::abs(f_q[e * static_cast<std::size_t>(nq) + static_cast<std::size_t>(k)]) / scale, q);
        }
    }
    return scale * std::pow(sum, 1.0 / q);
}

Json moser_bound(const RunConfig& cfg, const fs::path& out) {
    const NFunction nf = build_nfunction(*cfg.nfunction);
    const auto mesh = build_mesh(*cfg.domain);
    const ProblemSpec problem = build_problem(cfg, mesh, nf);
    const MoserSpec& ms = *cfg.moser;
    const int N = mesh->dimension();

    const auto [u, solve_rep] = solve_dirichlet(problem, cfg.solver);
    const auto first = orlicz::truncated_sequence(problem, {cfg.levels.front()}, cfg.solver);
    const Field& u1 = first.front().first;

    const bool em_branch = ms.branch == IndexSelector::em;
    const double exponent = em_branch ? nf.em() : nf.ell();
    MoserInputs in;
    in.q = ms.q;
    in.ell = nf.ell();
    in.em = nf.em();
    in.dim_N = N;
    in.norm_f_q = source_lq_norm(problem, ms.q);
    in.omega_measure = mesh->total_measure();
    in.norm_u1_L1 = lp_norm(u1, 1.0);
    in.bigphi_at_one = nf.bigphi_at_one();
    in.mu = ms.mu.value_or(talenti_constant(exponent, N));
    const double beta1 = ms.q / (ms.q - 1.0) * (exponent - 1.0);
    in.F1 = beta1 * std::log(lp_norm(u, beta1));

    Json rep = header(cfg);
    rep["nfunction"] = nfunction_json(nf);
    rep["mesh"] = mesh_json(*mesh);
    rep["rhs"] = cfg.rhs->kind;
    rep["inputs"] = Json{{"q", in.q},
                         {"ell", in.ell},
                         {"em", in.em},
                         {"dim_N", in.dim_N},
                         {"norm_f_q", in.norm_f_q},
                         {"omega_measure", in.omega_measure},
                         {"norm_u1_L1", in.norm_u1_L1},
                         {"truncation_level", cfg.levels.front()},
                         {"bigphi_at_one", in.bigphi_at_one},
                         {"mu", in.mu},
                         {"mu_source", ms.mu ? "config" : "talenti"},
                         {"F1", in.F1}};

    MoserReport bound;
    if (em_branch) {
        const EquivalenceReport eq = equivalence_check(nf, NFunction::power(nf.em(), nf.dim()), default_index_grid(), 1.0);
        rep["equivalence"] = to_json(eq);
        bound = homog_apriori_bound_m(in, eq, ms.k_max);
    } else {
        bound = homog_apriori_bound(in, ms.k_max);
    }
    const Json bound_json = to_json(bound);
    for (const auto& [key, value] : bound_json.items()) rep[key] = value;
    rep["solution"] = Json{{"sup_norm", solve_rep.sup_norm},
                           {"converged", solve_rep.converged},
                           {"residual_dual_norm", solve_rep.residual_dual_norm}};
    rep["dominates"] = verify_bound(u, bound);

    if (ms.ladder_q) {
        LadderReport ladder = subcrit_ladder(exponent, N, *ms.ladder_q);
        const std::vector<double> masses = mesh->lumped_masses();
        Eigen::VectorXd a = problem.load();
        for (Eigen::Index i = 0; i < a.size(); ++i) a[i] /= masses[static_cast<std::size_t>(i)];
        ladder.k_cutoff = cutoff_k(Field(mesh, a), ms.cutoff_s, exponent, N, nf.phi_at_one(),
                                   talenti_constant(exponent, N));
        const double base = lp_norm(u, sobolev_exponent(exponent, N));
        const CritBound crit = crit_linf_bound(ms.crit_k, ladder.r, exponent, base);
        ladder.product_bound = crit.bound;
        rep["ladder"] = to_json(ladder);
        rep["crit"] = to_json(crit);
        rep["crit_dominates"] = verify_bound(u, crit);
    }

    write_field_csv(out / "field.csv", u);
    PlotTable plot{{"k", "beta", "beta_star", "lambda", "F", "ratio"}, {}};
    for (std::size_t k = 0; k < bound.beta.size(); ++k) {
        plot.rows.push_back({static_cast<double>(k + 1), bound.beta[k], bound.beta_star[k], bound.lambda[k], bound.F[k],
                             bound.ratio[k]});
    }
    write_plot_csv(out / "plotdata.csv", plot);
    return rep;
}

Json verify(const RunConfig& cfg, const fs::path& out) {
    const VerifySpec& v = *cfg.verify;
    const std::vector<double> values = read_field_values(v.field);
    double sup = 0.0;
    for (double x : values) sup = std::max(sup, std::abs(x));
    const Json bound_report = read_json(v.bound);
    double bound = 0.0;
    std::string source;
    if (bound_report.contains("linf_bound") && bound_report["linf_bound"].is_number()) {
        bound = bound_report["linf_bound"].get<double>();
        source = "linf_bound";
    } else if (bound_report.contains("crit") && bound_report["crit"].contains("bound")) {
        bound = bound_report["crit"]["bound"].get<double>();
        source = "crit.bound";
    } else {
        throw ValidationError(kModule, "verify.bound: report has no linf_bound");
    }
    Json rep = header(cfg);
    rep["field"] = v.field.filename().string();
    rep["bound_report"] = v.bound.filename().string();
    rep["bound_key"] = source;
    rep["sup_norm"] = sup;
    rep["bound"] = bound;
    rep["dominates"] = sup <= bound;
    write_plot_csv(out / "plotdata.csv", PlotTable{{"sup_norm", "bound"}, {{sup, bound}}});
    return rep;
}

Json suite(const RunConfig& cfg, const fs::path& out, Json& timing) {
    Json rep = header(cfg);
    Json criteria = Json::array();
    Json seconds = Json::array();
    bool all_passed = true;
    PlotTable plot{{"id", "passed"}, {}};
    if (cfg.suite.acceptance) {
        for (const auto& r : run_acceptance()) {
            criteria.push_back(Json{{"id", r.id}, {"name", r.name}, {"passed", r.ok()}});
            seconds.push_back(Json{{"id", r.id}, {"seconds", r.seconds}, {"budget_seconds", r.budget_seconds},
                                   {"detail", r.detail}});
            plot.rows.push_back({static_cast<double>(r.id), r.ok() ? 1.0 : 0.0});
            all_passed = all_passed && r.ok();
        }
    }

    Json entries = Json::array();
    const auto& list = cfg.suite.entries;
    std::vector<RunOutcome> outcomes(list.size());
    for (std::size_t start = 0; start < list.size(); start += static_cast<std::size_t>(cfg.suite.jobs)) {
        std::vector<std::future<RunOutcome>> batch;
        const std::size_t stop = std::min(list.size(), start + static_cast<std::size_t>(cfg.suite.jobs));
        for (std::size_t i = start; i < stop; ++i) {
            const fs::path dir = out / "entries" / (std::to_string(i) + "_" + list[i].stem().string());
            batch.push_back(std::async(std::launch::async, [path = list[i], dir] {
                return run_config_file(path, std::nullopt, dir);
            }));
        }
        for (std::size_t i = start; i < stop; ++i) outcomes[i] = batch[i - start].get();
    }
    for (std::size_t i = 0; i < list.size(); ++i) {
        const auto& o = outcomes[i];
        Json entry{{"config", list[i].filename().string()},
                   {"status", static_cast<int>(o.status)},
                   {"out_dir", fs::relative(o.out_dir, out).generic_string()}};
        if (o.error) entry["error_code"] = (*o.error)["code"];
        entries.push_back(entry);
        all_passed = all_passed && o.status == ExitStatus::ok;
    }
    rep["criteria"] = criteria;
    rep["entries"] = entries;
    rep["all_passed"] = all_passed;
    timing["criteria"] = seconds;
    write_plot_csv(out / "plotdata.csv", plot);
    return rep;
}

std::string utc_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void remove_if_present(const fs::path& p) {
    std::error_code ec;
    fs::remove(p, ec);
}

Json error_json(const std::string& code, const std::string& message, std::string_view kind) {
    return Json{{"schema_version", kReportSchemaVersion},
                {"kind", "error"},
                {"run_kind", std::string(kind)},
                {"code", code},
                {"message", message}};
}

RunOutcome persist_error(const fs::path& out_dir, ExitStatus status, const std::string& code,
                         const std::string& message, std::string_view kind) {
    RunOutcome outcome;
    outcome.status = status;
    outcome.out_dir = out_dir;
    outcome.error = error_json(code, message, kind);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (!ec) {
        remove_if_present(out_dir / "report.json");
        try {
            write_json(out_dir / "error.json", *outcome.error);
        } catch (const Error&) {
        }
    }
    return outcome;
}

}  // namespace

fs::path resolve_output_dir(const RunConfig& config, const std::optional<fs::path>& explicit_dir) {
    if (explicit_dir) return *explicit_dir;
    if (config.output) return *config.output;
    const std::string stem = config.source.empty() ? std::string(run_kind_id(config.kind)) : config.source.stem().string();
    if (const char* root = std::getenv("ORLICZ_LAB_OUT"); root && *root) return fs::path(root) / stem;
    return fs::path("orlicz_out") / stem;
}

Json run_pipeline(const RunConfig& config, const fs::path& out_dir) {
    Json timing;
    switch (config.kind) {
        case RunKind::check_nfunction: return check_nfunction(config, out_dir);
        case RunKind::solve: return solve(config, out_dir);
        case RunKind::truncate_sequence: return truncate_sequence(config, out_dir);
        case RunKind::moser_bound: return moser_bound(config, out_dir);
        case RunKind::verify: return verify(config, out_dir);
        case RunKind::suite: return suite(config, out_dir, timing);
    }
    throw InternalError(kModule, "unhandled run kind");
}

RunOutcome run(const RunConfig& config, const fs::path& out_dir) {
    const std::string_view kind = run_kind_id(config.kind);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        RunOutcome o = persist_error(out_dir, ExitStatus::failure, "cli_harness.resource",
                                     "cannot create output directory " + out_dir.string(), kind);
        return o;
    }
    const std::string started = utc_now();
    const auto t0 = std::chrono::steady_clock::now();
    RunOutcome outcome;
    outcome.out_dir = out_dir;
    Json timing = Json::object();
    try {
        outcome.report = config.kind == RunKind::suite ? suite(config, out_dir, timing) : run_pipeline(config, out_dir);
    } catch (const Error& e) {
        return persist_error(out_dir, ExitStatus::failure, e.code(), e.what(), kind);
    } catch (const std::exception& e) {
        return persist_error(out_dir, ExitStatus::failure, "cli_harness.internal", e.what(), kind);
    }
    remove_if_present(out_dir / "error.json");
    write_json(out_dir / "report.json", outcome.report);

    Json meta{{"kind", std::string(kind)},
              {"config", config.source.empty() ? "" : fs::absolute(config.source).string()},
              {"version", kVersion},
              {"started_utc", started},
              {"wall_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}};
    for (const auto& [k, v] : timing.items()) meta[k] = v;
    write_json(out_dir / "metadata.json", meta);

    if (config.kind == RunKind::suite && !outcome.report.value("all_passed", false)) {
        outcome.status = ExitStatus::criteria_failed;
    }
    return outcome;
}

RunOutcome run_config_file(const fs::path& path, std::optional<RunKind> expected_kind,
                           const std::optional<fs::path>& explicit_dir) {
    RunConfig config;
    try {
        config = parse_config(path, expected_kind);
    } catch (const Error& e) {
        RunConfig fallback;
        fallback.source = path;
        if (expected_kind) fallback.kind = *expected_kind;
        const std::string_view kind = expected_kind ? run_kind_id(*expected_kind) : std::string_view("unknown");
        return persist_error(resolve_output_dir(fallback, explicit_dir), ExitStatus::parse_error, e.code(), e.what(),
                             kind);
    }
    return run(config, resolve_output_dir(config, explicit_dir));
}

}  // namespace orlicz
