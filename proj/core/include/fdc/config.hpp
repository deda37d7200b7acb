#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fdc/hum.hpp"
#include "fdc/mesh.hpp"
#include "fdc/solvers.hpp"

namespace fdc {

struct PotentialSpec {
    enum class Kind { Zero, Constant, Tabulated };
    Kind kind = Kind::Zero;
    double value = 0.0;
    std::vector<std::vector<double>> table; // M rows of N entries

    double norm_inf_hint() const;
    PotentialField build(const SpaceMesh& m, const TimeGrid& g) const;
};

struct NonlinearitySpec {
    enum class Kind { None, Sin, Table };
    Kind kind = Kind::None;
    std::vector<double> xs, ys;

    Nonlinearity build() const;
};

struct InitialDataSpec {
    enum class Kind { Zero, SineMix, Tabulated };
    Kind kind = Kind::SineMix;
    std::vector<std::pair<int, double>> modes = {{1, 1.0}}; // (k, coefficient)
    std::vector<double> values;

    SpaceField build(const SpaceMesh& m) const;
};

/// One experiment description, loadable from a strict JSON file: unknown keys
/// are rejected so a typo in a parameter name cannot silently change the
/// calibration. Schema documented in README.md.
struct ExperimentConfig {
    double L = 1.0;
    double T = 0.5;
    Interval omega{0.3, 0.8};

    std::optional<double> h;           // single-instance mesh size
    std::optional<int> grid_N;         // explicit grid override
    std::optional<int> grid_M;
    std::vector<double> h_sequence;    // decay study

    PotentialSpec potential;
    NonlinearitySpec nonlinearity;
    InitialDataSpec initial_data;

    int theta_exp = 4;
    double penalty_C2 = 0.05;
    CalibrationConfig weights{};       // overridden by shipped configs

    double cg_tol = 1e-10;
    int cg_max_iter = 0;
    double fp_tol = 1e-8;
    int fp_max = 50;

    int audit_samples = 50;
    double audit_C1 = 1.0;
    double weight_order_h = 0.025;

    int id_trials_per_grid = 25;
    std::vector<int> id_space_sizes = {3, 8, 31};
    std::vector<int> id_time_sizes = {2, 9, 40};
    double id_tolerance = 1e-12;

    std::uint64_t seed = 1;
    std::string output_dir = "out";
    std::string config_path_note; // provenance for report headers

    static ExperimentConfig load(const std::string& path);
    static ExperimentConfig from_json_text(const std::string& text);
};

/// Mesh/grid pair for a given h: N from L/h (must be integral), M from the
/// dt rule dt = T/M <= min{T^-2 h^{4/theta}, (4|a|)^-1, delta T/2}.
struct GridChoice {
    SpaceMesh mesh;
    TimeGrid grid;
    double dt_cap = 0.0;
};

GridChoice derive_grids(const ExperimentConfig& cfg, double h);

/// Assemble the control problem on explicit grids.
ControlProblem make_problem(const ExperimentConfig& cfg, const SpaceMesh& mesh, const TimeGrid& grid);

/// Resolve the single-instance grids: explicit grid_N/grid_M when given,
/// otherwise derived from cfg.h.
GridChoice resolve_single_grids(const ExperimentConfig& cfg);

struct DecayStudyRow {
    double h = 0.0;
    double dt = 0.0;
    double delta = 0.0;
    double tau = 0.0;
    double phi_h = 0.0;
    double norm_g = 0.0;
    double norm_v = 0.0;
    double norm_yM = 0.0;
    double ratio = 0.0; // |y^M| / (sqrt(phi) |g|)
    int cg_iterations = 0;
    double wall_seconds = 0.0; // log-only; never serialized into artifacts
};

/// Run the h-sequence, optionally on a worker pool; rows come back sorted by
/// decreasing h regardless of scheduling.
std::vector<DecayStudyRow> run_decay_study(const ExperimentConfig& cfg, int threads);

} // namespace fdc
