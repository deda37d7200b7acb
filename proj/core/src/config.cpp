#include "fdc/config.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <sstream>

#include <json.hpp>

#include "fdc/calculus.hpp"

namespace fdc {

using nlohmann::json;

double PotentialSpec::norm_inf_hint() const {
    switch (kind) {
        case Kind::Zero: return 0.0;
        case Kind::Constant: return std::abs(value);
        case Kind::Tabulated: {
            double m = 0.0;
            for (const auto& row : table)
                for (double x : row) m = std::max(m, std::abs(x));
            return m;
        }
    }
    return 0.0;
}

PotentialField PotentialSpec::build(const SpaceMesh& m, const TimeGrid& g) const {
    switch (kind) {
        case Kind::Zero: return PotentialField::zero(m, g);
        case Kind::Constant: return PotentialField::constant(value, m, g);
        case Kind::Tabulated: {
            if (static_cast<int>(table.size()) != g.steps)
                throw contract_error("potential table: need M rows, got " + std::to_string(table.size()));
            std::vector<double> vals;
            vals.reserve(static_cast<std::size_t>(m.interior) * static_cast<std::size_t>(g.steps));
            for (const auto& row : table) {
                if (static_cast<int>(row.size()) != m.interior)
                    throw contract_error("potential table: each row needs N entries");
                vals.insert(vals.end(), row.begin(), row.end());
            }
            return PotentialField(m, g, std::move(vals));
        }
    }
    return PotentialField::zero(m, g);
}

Nonlinearity NonlinearitySpec::build() const {
    switch (kind) {
        case Kind::None: return Nonlinearity::none();
        case Kind::Sin: return Nonlinearity::sine();
        case Kind::Table: return Nonlinearity::table(xs, ys);
    }
    return Nonlinearity::none();
}

SpaceField InitialDataSpec::build(const SpaceMesh& m) const {
    switch (kind) {
        case Kind::Zero: return SpaceField(m, SpacePlacement::PrimalInterior);
        case Kind::SineMix: {
            SpaceField g(m, SpacePlacement::PrimalInterior);
            for (const auto& [k, c] : modes) {
                const SpaceField mode = laplacian_eigenvector(m, k);
                for (int i = 0; i < g.size(); ++i) g[i] += c * mode[i];
            }
            return g;
        }
        case Kind::Tabulated: {
            if (static_cast<int>(values.size()) != m.interior)
                throw contract_error("initial_data table: need N entries");
            return SpaceField(m, SpacePlacement::PrimalInterior, values);
        }
    }
    return SpaceField(m, SpacePlacement::PrimalInterior);
}

namespace {

[[noreturn]] void bad_config(const std::string& what) {
    throw contract_error("config: " + what);
}

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        const bool known = std::any_of(allowed.begin(), allowed.end(),
                                       [&](const char* k) { return it.key() == k; });
        if (!known) bad_config("unknown key \"" + it.key() + "\" in " + where);
    }
}

} // namespace

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) bad_config("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    auto cfg = from_json_text(buf.str());
    cfg.config_path_note = path;
    return cfg;
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        bad_config(std::string("invalid JSON: ") + e.what());
    }

    check_keys(j, "top level",
               {"domain", "omega", "h", "grid", "h_sequence", "potential", "nonlinearity",
                "initial_data", "theta_exp", "penalty", "weights", "tolerances", "audit",
                "identities", "seed", "output_dir"});

    ExperimentConfig cfg;
    if (j.contains("domain")) {
        const auto& d = j.at("domain");
        check_keys(d, "domain", {"L", "T"});
        cfg.L = d.value("L", cfg.L);
        cfg.T = d.value("T", cfg.T);
        if (!(cfg.L > 0.0) || !(cfg.T > 0.0)) bad_config("domain.L and domain.T must be positive");
    }
    if (j.contains("omega")) {
        const auto& o = j.at("omega");
        if (!o.is_array() || o.size() != 2) bad_config("omega must be [a, b]");
        cfg.omega = Interval{o[0].get<double>(), o[1].get<double>()};
        if (!(cfg.omega.a < cfg.omega.b)) bad_config("omega must be nonempty");
    }
    if (j.contains("h")) {
        cfg.h = j.at("h").get<double>();
        if (!(*cfg.h > 0.0)) bad_config("h must be positive");
    }
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        check_keys(g, "grid", {"N", "M"});
        if (g.contains("N")) cfg.grid_N = g.at("N").get<int>();
        if (g.contains("M")) cfg.grid_M = g.at("M").get<int>();
    }
    if (j.contains("h_sequence")) {
        for (const auto& v : j.at("h_sequence")) {
            const double h = v.get<double>();
            if (!(h > 0.0)) bad_config("h_sequence entries must be positive");
            cfg.h_sequence.push_back(h);
        }
    }
    if (j.contains("potential")) {
        const auto& p = j.at("potential");
        check_keys(p, "potential", {"kind", "value", "values"});
        const std::string kind = p.value("kind", "zero");
        if (kind == "zero") {
            cfg.potential.kind = PotentialSpec::Kind::Zero;
        } else if (kind == "constant") {
            cfg.potential.kind = PotentialSpec::Kind::Constant;
            if (!p.contains("value")) bad_config("potential.constant needs \"value\"");
            cfg.potential.value = p.at("value").get<double>();
        } else if (kind == "tabulated") {
            cfg.potential.kind = PotentialSpec::Kind::Tabulated;
            if (!p.contains("values")) bad_config("potential.tabulated needs \"values\"");
            cfg.potential.table = p.at("values").get<std::vector<std::vector<double>>>();
        } else {
            bad_config("potential.kind must be zero|constant|tabulated");
        }
    }
    if (j.contains("nonlinearity")) {
        const auto& f = j.at("nonlinearity");
        check_keys(f, "nonlinearity", {"kind", "x", "y"});
        const std::string kind = f.value("kind", "none");
        if (kind == "none") {
            cfg.nonlinearity.kind = NonlinearitySpec::Kind::None;
        } else if (kind == "sin") {
            cfg.nonlinearity.kind = NonlinearitySpec::Kind::Sin;
        } else if (kind == "table") {
            cfg.nonlinearity.kind = NonlinearitySpec::Kind::Table;
            if (!f.contains("x") || !f.contains("y")) bad_config("nonlinearity.table needs \"x\" and \"y\"");
            cfg.nonlinearity.xs = f.at("x").get<std::vector<double>>();
            cfg.nonlinearity.ys = f.at("y").get<std::vector<double>>();
        } else {
            bad_config("nonlinearity.kind must be none|sin|table");
        }
    }
    if (j.contains("initial_data")) {
        const auto& g = j.at("initial_data");
        check_keys(g, "initial_data", {"kind", "modes", "values"});
        const std::string kind = g.value("kind", "sine_mix");
        if (kind == "zero") {
            cfg.initial_data.kind = InitialDataSpec::Kind::Zero;
        } else if (kind == "sine_mix") {
            cfg.initial_data.kind = InitialDataSpec::Kind::SineMix;
            if (g.contains("modes")) {
                cfg.initial_data.modes.clear();
                for (const auto& m : g.at("modes")) {
                    if (!m.is_array() || m.size() != 2) bad_config("initial_data.modes entries must be [k, c]");
                    cfg.initial_data.modes.emplace_back(m[0].get<int>(), m[1].get<double>());
                }
            }
        } else if (kind == "tabulated") {
            cfg.initial_data.kind = InitialDataSpec::Kind::Tabulated;
            if (!g.contains("values")) bad_config("initial_data.tabulated needs \"values\"");
            cfg.initial_data.values = g.at("values").get<std::vector<double>>();
        } else {
            bad_config("initial_data.kind must be zero|sine_mix|tabulated");
        }
    }
    if (j.contains("theta_exp")) {
        cfg.theta_exp = j.at("theta_exp").get<int>();
        if (cfg.theta_exp < 1 || cfg.theta_exp > 4) bad_config("theta_exp must lie in [1,4]");
    }
    if (j.contains("penalty")) {
        const auto& p = j.at("penalty");
        check_keys(p, "penalty", {"C2"});
        cfg.penalty_C2 = p.value("C2", cfg.penalty_C2);
        if (!(cfg.penalty_C2 > 0.0)) bad_config("penalty.C2 must be positive");
    }
    if (j.contains("weights")) {
        const auto& w = j.at("weights");
        check_keys(w, "weights", {"lambda", "eps0", "tau2", "delta1", "h0"});
        cfg.weights.lambda = w.value("lambda", cfg.weights.lambda);
        cfg.weights.eps0 = w.value("eps0", cfg.weights.eps0);
        cfg.weights.tau2 = w.value("tau2", cfg.weights.tau2);
        cfg.weights.delta1 = w.value("delta1", cfg.weights.delta1);
        cfg.weights.h0 = w.value("h0", cfg.weights.h0);
        if (!(cfg.weights.lambda >= 1.0)) bad_config("weights.lambda must be >= 1");
        if (!(cfg.weights.eps0 > 0.0) || !(cfg.weights.tau2 > 0.0) || !(cfg.weights.h0 > 0.0))
            bad_config("weights.eps0, weights.tau2 and weights.h0 must be positive");
        if (!(cfg.weights.delta1 > 0.0) || !(cfg.weights.delta1 < 0.5))
            bad_config("weights.delta1 must lie in (0, 1/2)");
    }
    if (j.contains("tolerances")) {
        const auto& t = j.at("tolerances");
        check_keys(t, "tolerances", {"cg_tol", "cg_max_iter", "fp_tol", "fp_max"});
        cfg.cg_tol = t.value("cg_tol", cfg.cg_tol);
        cfg.cg_max_iter = t.value("cg_max_iter", cfg.cg_max_iter);
        cfg.fp_tol = t.value("fp_tol", cfg.fp_tol);
        cfg.fp_max = t.value("fp_max", cfg.fp_max);
        if (!(cfg.cg_tol > 0.0) || !(cfg.fp_tol > 0.0) || cfg.cg_max_iter < 0 || cfg.fp_max < 1)
            bad_config("tolerances must be positive (cg_max_iter = 0 means 5N)");
    }
    if (j.contains("audit")) {
        const auto& a = j.at("audit");
        check_keys(a, "audit", {"samples", "C1", "weight_order_h"});
        cfg.audit_samples = a.value("samples", cfg.audit_samples);
        cfg.audit_C1 = a.value("C1", cfg.audit_C1);
        cfg.weight_order_h = a.value("weight_order_h", cfg.weight_order_h);
    }
    if (j.contains("identities")) {
        const auto& i = j.at("identities");
        check_keys(i, "identities", {"trials_per_grid", "space_sizes", "time_sizes", "tolerance"});
        cfg.id_trials_per_grid = i.value("trials_per_grid", cfg.id_trials_per_grid);
        if (i.contains("space_sizes")) cfg.id_space_sizes = i.at("space_sizes").get<std::vector<int>>();
        if (i.contains("time_sizes")) cfg.id_time_sizes = i.at("time_sizes").get<std::vector<int>>();
        cfg.id_tolerance = i.value("tolerance", cfg.id_tolerance);
    }
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
    return cfg;
}

GridChoice derive_grids(const ExperimentConfig& cfg, double h) {
    const double ratio = cfg.L / h;
    const int n_cells = static_cast<int>(std::llround(ratio));
    if (n_cells < 2 || std::abs(ratio - static_cast<double>(n_cells)) > 1e-9 * ratio)
        bad_config("h must divide L into at least two cells");

    GridChoice gc;
    gc.mesh = SpaceMesh::uniform(cfg.L, n_cells - 1);

    double a_norm = cfg.potential.norm_inf_hint();
    if (cfg.nonlinearity.kind != NonlinearitySpec::Kind::None)
        a_norm = std::max(a_norm, cfg.nonlinearity.build().lipschitz);

    CalibrationConfig wcfg = cfg.weights;
    wcfg.theta_exp = cfg.theta_exp;
    const PreCalibration pre = pre_calibrate(cfg.T, gc.mesh.h, a_norm, wcfg);
    gc.dt_cap = pre.dt_cap();
    const int M = std::max(1, static_cast<int>(std::ceil(cfg.T / gc.dt_cap * (1.0 - 1e-12))));
    gc.grid = TimeGrid::uniform(cfg.T, M);
    return gc;
}

GridChoice resolve_single_grids(const ExperimentConfig& cfg) {
    if (cfg.grid_N && cfg.grid_M) {
        GridChoice gc;
        gc.mesh = SpaceMesh::uniform(cfg.L, *cfg.grid_N);
        gc.grid = TimeGrid::uniform(cfg.T, *cfg.grid_M);
        gc.dt_cap = gc.grid.dt;
        return gc;
    }
    if (!cfg.h) bad_config("need either \"h\" or \"grid\": {N, M}");
    return derive_grids(cfg, *cfg.h);
}

ControlProblem make_problem(const ExperimentConfig& cfg, const SpaceMesh& mesh, const TimeGrid& grid) {
    ControlProblem p;
    p.mesh = mesh;
    p.grid = grid;
    p.omega = cfg.omega;
    p.a = cfg.potential.build(mesh, grid);
    p.f = cfg.nonlinearity.build();
    p.g = cfg.initial_data.build(mesh);
    p.theta_exp = cfg.theta_exp;
    p.penalty.C2 = cfg.penalty_C2;
    p.weights = cfg.weights;
    p.weights.theta_exp = cfg.theta_exp;
    p.cg_tol = cfg.cg_tol;
    p.cg_max_iter = cfg.cg_max_iter;
    p.fp_tol = cfg.fp_tol;
    p.fp_max = cfg.fp_max;
    return p;
}

std::vector<DecayStudyRow> run_decay_study(const ExperimentConfig& cfg, int threads) {
    if (cfg.h_sequence.empty()) bad_config("decay study needs a nonempty h_sequence");

    auto run_one = [&cfg](double h) {
        const auto t0 = std::chrono::steady_clock::now();
        const GridChoice gc = derive_grids(cfg, h);
        const ControlProblem p = make_problem(cfg, gc.mesh, gc.grid);
        const HUMSolution sol = solve_hum(p);
        DecayStudyRow row;
        row.h = gc.mesh.h;
        row.dt = gc.grid.dt;
        row.delta = sol.ledger.delta;
        row.tau = sol.ledger.tau;
        row.phi_h = sol.phi_h;
        row.norm_g = sol.norm_g;
        row.norm_v = sol.norm_v;
        row.norm_yM = sol.norm_yM;
        // zero data gives the zero control and a vacuous decay ratio
        row.ratio = (sol.norm_g > 0.0) ? sol.norm_yM / (std::sqrt(sol.phi_h) * sol.norm_g) : 0.0;
        row.cg_iterations = sol.cg_iterations;
        row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return row;
    };

    std::vector<double> hs = cfg.h_sequence;
    std::sort(hs.begin(), hs.end(), std::greater<double>());

    std::vector<DecayStudyRow> rows(hs.size());
    if (threads <= 1) {
        for (std::size_t k = 0; k < hs.size(); ++k) rows[k] = run_one(hs[k]);
    } else {
        std::vector<std::future<DecayStudyRow>> futs;
        futs.reserve(hs.size());
        for (double h : hs) futs.push_back(std::async(std::launch::async, run_one, h));
        for (std::size_t k = 0; k < hs.size(); ++k) rows[k] = futs[k].get(); // ordered merge
    }
    return rows;
}

} // namespace fdc
