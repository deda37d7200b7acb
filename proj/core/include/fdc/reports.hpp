#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "fdc/audit.hpp"
#include "fdc/config.hpp"
#include "fdc/hum.hpp"
#include "fdc/identities.hpp"

namespace fdc {

/// 17 significant digits: round-trip exact for doubles.
std::string format_g17(double v);

nlohmann::json to_json(const ParameterLedger& led);
nlohmann::json to_json(const HUMSolution& sol);
nlohmann::json to_json(const CarlemanReport& rep);
nlohmann::json to_json(const ObservabilityReport& rep);
nlohmann::json to_json(const WeightOrderRow& row);
nlohmann::json to_json(const IdentitySuiteResult& res);

/// Trajectory dump, one row per (instant, point): n, t_n, x_i, y, v. The v
/// column holds the control applied on the step leaving t_n (blank at t_M).
void write_trajectory_csv(std::ostream& os, const GridFunction& y, const GridFunction& v);

/// Fixed columns: h, dt, delta, tau, phi_h, norm_g, norm_v, norm_yM, ratio,
/// cg_iterations. Timing stays out of the artifact (determinism contract).
void write_decay_csv(std::ostream& os, const std::vector<DecayStudyRow>& rows);

/// One row per sample with every term and the ratio ("undefined" on 0/0).
void write_carleman_csv(std::ostream& os, const std::vector<CarlemanReport>& reports);

} // namespace fdc
