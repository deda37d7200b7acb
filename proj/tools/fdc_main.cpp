// fdc: fully-discrete control experiments for the 1-D heat equation.
//
// Subcommands: identities | control | semilinear | decay-study | audit.
// Every artifact is a pure function of (config, seed); timing goes to stderr.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fdc/audit.hpp"
#include "fdc/calculus.hpp"
#include "fdc/config.hpp"
#include "fdc/hum.hpp"
#include "fdc/identities.hpp"
#include "fdc/reports.hpp"
#include "fdc/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPropertyFailure = 1;
constexpr int kExitBadInput = 2;

struct CommonOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    int threads = 1;
};

fdc::ExperimentConfig load_config(const CommonOpts& opts) {
    auto cfg = fdc::ExperimentConfig::load(opts.config_path);
    if (opts.seed) cfg.seed = *opts.seed;
    if (opts.out_dir) cfg.output_dir = *opts.out_dir;
    return cfg;
}

fs::path prepare_out_dir(const fdc::ExperimentConfig& cfg) {
    fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    return dir;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw fdc::contract_error("cannot write " + path.string());
    out << text;
}

json run_header(const fdc::ExperimentConfig& cfg, const std::string& command) {
    return json{{"command", command},
                {"seed", cfg.seed},
                {"rng", fdc::Rng::name()},
                {"config", cfg.config_path_note}};
}

int cmd_identities(const CommonOpts& opts, const std::string& inject_break) {
    const auto cfg = load_config(opts);
    const auto dir = prepare_out_dir(cfg);

    const auto result = fdc::run_identity_suite(cfg.id_space_sizes, cfg.id_time_sizes,
                                                cfg.id_trials_per_grid, cfg.seed,
                                                cfg.id_tolerance, inject_break);
    json report = to_json(result);
    report["run"] = run_header(cfg, "identities");
    write_text(dir / "identities.json", report.dump(2) + "\n");

    for (const auto& rec : result.records)
        std::cout << (rec.pass ? "ok   " : "FAIL ") << to_string(rec.id)
                  << "  max_residual=" << fdc::format_g17(rec.max_residual)
                  << "  trials=" << rec.trials << "\n";
    if (!result.all_pass()) {
        for (const auto& rec : result.records)
            if (!rec.pass)
                std::cerr << "FAIL identity=" << to_string(rec.id)
                          << " residual=" << fdc::format_g17(rec.max_residual)
                          << " tolerance=" << fdc::format_g17(result.tolerance) << "\n";
        return kExitPropertyFailure;
    }
    return kExitOk;
}

int cmd_control(const CommonOpts& opts) {
    const auto cfg = load_config(opts);
    const auto dir = prepare_out_dir(cfg);

    const auto gc = fdc::resolve_single_grids(cfg);
    const auto problem = fdc::make_problem(cfg, gc.mesh, gc.grid);
    const auto sol = (cfg.T >= 1.0) ? fdc::solve_hum_long_horizon(problem)
                                    : fdc::solve_hum(problem);

    json report = to_json(sol);
    report["run"] = run_header(cfg, "control");
    write_text(dir / "control_report.json", report.dump(2) + "\n");

    std::ostringstream traj;
    fdc::write_trajectory_csv(traj, sol.y, sol.v);
    write_text(dir / "trajectory.csv", traj.str());

    for (const auto& w : sol.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << "|g| = " << sol.norm_g << "  |v| = " << sol.norm_v
              << "  |y^M| = " << sol.norm_yM << "  phi(h) = " << sol.phi_h
              << "  cg_iterations = " << sol.cg_iterations << "\n";
    return kExitOk;
}

int cmd_semilinear(const CommonOpts& opts) {
    const auto cfg = load_config(opts);
    if (cfg.nonlinearity.kind == fdc::NonlinearitySpec::Kind::None)
        throw fdc::contract_error("semilinear: config carries no nonlinearity");
    const auto dir = prepare_out_dir(cfg);

    const auto gc = fdc::resolve_single_grids(cfg);
    const auto problem = fdc::make_problem(cfg, gc.mesh, gc.grid);
    const auto sol = fdc::solve_semilinear(problem);

    json report = to_json(sol);
    report["run"] = run_header(cfg, "semilinear");
    write_text(dir / "semilinear_report.json", report.dump(2) + "\n");

    std::ostringstream traj;
    fdc::write_trajectory_csv(traj, sol.y, sol.v);
    write_text(dir / "trajectory.csv", traj.str());

    for (const auto& w : sol.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << "picard_iterations = " << sol.picard_iterations.value_or(0)
              << "  converged = " << (sol.picard_converged.value_or(false) ? "yes" : "no")
              << "  |y^M| = " << sol.norm_yM << "\n";
    return sol.picard_converged.value_or(false) ? kExitOk : kExitPropertyFailure;
}

int cmd_decay_study(const CommonOpts& opts) {
    const auto cfg = load_config(opts);
    const auto dir = prepare_out_dir(cfg);

    const auto rows = fdc::run_decay_study(cfg, opts.threads);
    std::ostringstream csv;
    fdc::write_decay_csv(csv, rows);
    write_text(dir / "decay.csv", csv.str());

    // Companion report with the full per-row ledger so every CSV row can be
    // re-checked against the coupling conditions.
    json row_reports = json::array();
    fdc::CalibrationConfig wcfg = cfg.weights;
    wcfg.theta_exp = cfg.theta_exp;
    for (const auto& row : rows) {
        const auto ledger =
            fdc::calibrate(cfg.T, row.h, row.dt, cfg.potential.norm_inf_hint(), wcfg);
        row_reports.push_back(json{{"h", row.h},
                                   {"ratio", row.ratio},
                                   {"norm_v_over_norm_g", row.norm_v / row.norm_g},
                                   {"cg_iterations", row.cg_iterations},
                                   {"ledger", to_json(ledger)}});
    }
    json report{{"run", run_header(cfg, "decay-study")}, {"rows", row_reports}};
    write_text(dir / "decay_report.json", report.dump(2) + "\n");

    for (const auto& row : rows)
        std::cerr << "h = " << row.h << "  M = " << static_cast<int>(std::llround(cfg.T / row.dt))
                  << "  wall = " << row.wall_seconds << " s\n";
    std::cout << csv.str();
    return kExitOk;
}

int cmd_audit(const CommonOpts& opts) {
    const auto cfg = load_config(opts);
    const auto dir = prepare_out_dir(cfg);

    const auto gc = fdc::resolve_single_grids(cfg);
    auto problem = fdc::make_problem(cfg, gc.mesh, gc.grid);
    const auto ledger = fdc::calibrate(problem);
    const auto weights = fdc::make_weight_system(gc.mesh, gc.grid, cfg.omega, ledger);
    const auto a = problem.a;

    // Weighted-estimate audit over Gaussian-seeded adjoint trajectories; the
    // forward variant runs on the time-reversed field of each sample.
    fdc::Rng rng(cfg.seed);
    std::vector<fdc::SpaceField> seeds;
    for (int s = 0; s < cfg.audit_samples; ++s) {
        fdc::SpaceField q_T(gc.mesh, fdc::SpacePlacement::PrimalInterior);
        for (int i = 0; i < q_T.size(); ++i) q_T[i] = rng.normal();
        seeds.push_back(std::move(q_T));
    }

    // Samples are independent; evaluate on a pool and aggregate in index
    // order so the artifacts do not depend on the thread count.
    struct SampleResult {
        fdc::CarlemanReport report;
        double forward_mismatch = 0.0;
    };
    auto evaluate = [&](const fdc::SpaceField& q_T) {
        const auto q = fdc::solve_adjoint(q_T, a);
        SampleResult res;
        res.report = fdc::carleman_sides(q, weights, ledger, cfg.omega, fdc::AuditMode::Backward);

        fdc::GridFunction rev(gc.mesh, gc.grid, fdc::SpacePlacement::PrimalInterior,
                              fdc::TimePlacement::PrimalClosed);
        for (int n = 0; n <= gc.grid.steps; ++n) rev.set_slice(n, q.slice(gc.grid.steps - n));
        const auto fwd = fdc::carleman_sides(rev, weights, ledger, cfg.omega, fdc::AuditMode::Forward);
        for (auto [b, f] : {std::pair{res.report.lhs_time, fwd.lhs_time},
                            {res.report.lhs_grad_dual, fwd.lhs_grad_dual},
                            {res.report.lhs_grad_avg, fwd.lhs_grad_avg},
                            {res.report.lhs_zero_order, fwd.lhs_zero_order},
                            {res.report.rhs_source, fwd.rhs_source},
                            {res.report.rhs_local, fwd.rhs_local}})
            res.forward_mismatch = std::max(res.forward_mismatch, std::abs(b - f) / (1.0 + std::abs(b)));
        return res;
    };

    std::vector<SampleResult> results(seeds.size());
    if (opts.threads <= 1) {
        for (std::size_t k = 0; k < seeds.size(); ++k) results[k] = evaluate(seeds[k]);
    } else {
        std::vector<std::future<SampleResult>> futs;
        futs.reserve(seeds.size());
        for (const auto& q_T : seeds)
            futs.push_back(std::async(std::launch::async, evaluate, std::cref(q_T)));
        for (std::size_t k = 0; k < seeds.size(); ++k) results[k] = futs[k].get();
    }

    std::vector<fdc::CarlemanReport> reports;
    double max_forward_mismatch = 0.0;
    bool all_finite = true;
    for (auto& res : results) {
        max_forward_mismatch = std::max(max_forward_mismatch, res.forward_mismatch);
        for (double term : {res.report.lhs_time, res.report.lhs_grad_dual, res.report.lhs_grad_avg,
                            res.report.lhs_zero_order, res.report.rhs_source, res.report.rhs_local,
                            res.report.rhs_endpoint_first, res.report.rhs_endpoint_last})
            all_finite = all_finite && std::isfinite(term);
        reports.push_back(std::move(res.report));
    }

    std::vector<double> ratios;
    for (const auto& r : reports)
        if (r.ratio()) ratios.push_back(*r.ratio());
    std::sort(ratios.begin(), ratios.end());
    const double max_ratio = ratios.empty() ? 0.0 : ratios.back();
    const double median_ratio = ratios.empty() ? 0.0 : ratios[ratios.size() / 2];
    const bool concentrated = ratios.empty() || max_ratio <= 10.0 * median_ratio;

    // Relaxed-observability estimate over eigenmode and Gaussian data.
    fdc::Rng obs_rng(cfg.seed + 1);
    const auto obs = fdc::estimate_observability(problem, cfg.audit_samples, obs_rng, cfg.audit_C1);

    // Weight-derivative convergence orders at a fixed interior instant.
    const double t_probe = 0.4 * cfg.T;
    const double x_probe = cfg.omega.a + 0.8 * cfg.omega.length();
    const auto orders = fdc::audit_weight_orders(weights, t_probe, x_probe, cfg.weight_order_h);

    std::ostringstream csv;
    fdc::write_carleman_csv(csv, reports);
    write_text(dir / "carleman.csv", csv.str());

    json order_rows = json::array();
    bool orders_ok = true;
    for (const auto& row : orders) {
        order_rows.push_back(to_json(row));
        orders_ok = orders_ok && row.order_coarse >= 1.9 && row.order_fine >= 1.9;
    }
    json summary{{"run", run_header(cfg, "audit")},
                 {"ledger", to_json(ledger)},
                 {"carleman", json{{"samples", static_cast<int>(reports.size())},
                                   {"max_ratio", max_ratio},
                                   {"median_ratio", median_ratio},
                                   {"concentration_threshold", 10.0},
                                   {"concentrated", concentrated},
                                   {"all_finite", all_finite},
                                   {"max_forward_mismatch", max_forward_mismatch}}},
                 {"observability", to_json(obs)},
                 {"weight_orders", order_rows}};
    write_text(dir / "audit_summary.json", summary.dump(2) + "\n");

    std::cout << "carleman: max/median ratio = " << max_ratio << " / " << median_ratio
              << "  forward mismatch = " << max_forward_mismatch << "\n"
              << "observability: max = " << obs.max_ratio << "  median = " << obs.median_ratio
              << "  reference constant = " << obs.reference_constant << "\n";
    for (const auto& row : orders)
        std::cout << "weight order " << row.residual << ": " << row.order_coarse << ", "
                  << row.order_fine << "\n";

    const bool ok = all_finite && concentrated && orders_ok && max_forward_mismatch <= 1e-10;
    if (!ok) std::cerr << "audit property failure (see audit_summary.json)\n";
    return ok ? kExitOk : kExitPropertyFailure;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fully-discrete control experiments for the 1-D heat equation"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string inject_break;

    auto add_common = [&](CLI::App* cmd, bool with_threads) {
        cmd->add_option("--config", opts.config_path, "experiment configuration (JSON)")
            ->required();
        cmd->add_option("--seed", opts.seed, "override the config RNG seed");
        cmd->add_option("--out", opts.out_dir, "override the config output directory");
        if (with_threads)
            cmd->add_option("--threads", opts.threads, "worker threads")->check(CLI::PositiveNumber);
    };

    auto* identities = app.add_subcommand("identities", "run the discrete-calculus identity suite");
    add_common(identities, false);
    identities->add_option("--inject-break", inject_break,
                           "testing hook: force the named identity to fail");

    auto* control = app.add_subcommand("control", "solve one penalized control instance");
    add_common(control, false);

    auto* semilinear = app.add_subcommand("semilinear", "solve the semilinear control instance");
    add_common(semilinear, false);

    auto* decay = app.add_subcommand("decay-study", "sweep the h-sequence and tabulate decay");
    add_common(decay, true);

    auto* audit = app.add_subcommand("audit", "weighted-estimate, observability and weight-order audits");
    add_common(audit, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(identities)) return cmd_identities(opts, inject_break);
        if (app.got_subcommand(control)) return cmd_control(opts);
        if (app.got_subcommand(semilinear)) return cmd_semilinear(opts);
        if (app.got_subcommand(decay)) return cmd_decay_study(opts);
        if (app.got_subcommand(audit)) return cmd_audit(opts);
    } catch (const fdc::infeasible_error& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const fdc::contract_error& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const fdc::convergence_error& e) {
        std::cerr << "no convergence: " << e.what() << "\n";
        return kExitPropertyFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    }
    return kExitBadInput;
}
