#include "fdc/reports.hpp"

#include <cstdio>
#include <ostream>

namespace fdc {

using nlohmann::json;

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json to_json(const ParameterLedger& led) {
    return json{{"T", led.T},
                {"h", led.h},
                {"dt", led.dt},
                {"a_norm", led.a_norm},
                {"tau", led.tau},
                {"h1", led.h1},
                {"delta", led.delta},
                {"dt_max", led.dt_max},
                {"theta_exp", led.config.theta_exp},
                {"eps0", led.config.eps0},
                {"tau2", led.config.tau2},
                {"delta1", led.config.delta1},
                {"lambda", led.config.lambda},
                {"h0", led.config.h0},
                {"conditions",
                 json{{"space", json{{"lhs", led.cond_space_lhs}, {"rhs", led.config.eps0}}},
                      {"time", json{{"lhs", led.cond_time_lhs}, {"rhs", led.config.eps0}}},
                      {"dt_theta", json{{"lhs", led.dt}, {"rhs", led.delta * led.T / 2.0}}}}},
                {"feasible", led.feasible()}};
}

json to_json(const HUMSolution& sol) {
    json j{{"phi_h", sol.phi_h},
           {"norm_g", sol.norm_g},
           {"norm_v", sol.norm_v},
           {"norm_yM", sol.norm_yM},
           {"norm_q_hat_T", sol.norm_q_hat_T},
           {"functional_value", sol.functional_value},
           {"cg_iterations", sol.cg_iterations},
           {"cg_residual", sol.cg_residual},
           {"ledger", to_json(sol.ledger)},
           {"warnings", sol.warnings}};
    if (sol.phase_split) {
        j["phase_split"] = *sol.phase_split;
        j["norm_y_phase1"] = *sol.norm_y_phase1;
        j["decay_factor"] = *sol.decay_factor;
    }
    if (sol.picard_iterations) {
        j["picard_iterations"] = *sol.picard_iterations;
        j["picard_converged"] = *sol.picard_converged;
        j["picard_history"] = sol.picard_history;
    }
    return j;
}

json to_json(const CarlemanReport& rep) {
    json j{{"mode", to_string(rep.mode)},
           {"lambda", rep.lambda},
           {"log_scale", rep.log_scale},
           {"lhs_time", rep.lhs_time},
           {"lhs_grad_dual", rep.lhs_grad_dual},
           {"lhs_grad_avg", rep.lhs_grad_avg},
           {"lhs_zero_order", rep.lhs_zero_order},
           {"rhs_source", rep.rhs_source},
           {"rhs_local", rep.rhs_local},
           {"rhs_endpoint_first", rep.rhs_endpoint_first},
           {"rhs_endpoint_last", rep.rhs_endpoint_last},
           {"lhs_total", rep.lhs_total()},
           {"rhs_total", rep.rhs_total()},
           {"ledger", to_json(rep.ledger)}};
    const auto r = rep.ratio();
    if (r)
        j["ratio"] = *r;
    else
        j["ratio"] = "undefined";
    return j;
}

json to_json(const ObservabilityReport& rep) {
    json samples = json::array();
    for (const auto& s : rep.samples) samples.push_back(json{{"kind", s.kind}, {"ratio", s.ratio}});
    return json{{"n_samples", rep.n_samples},
                {"max_ratio", rep.max_ratio},
                {"median_ratio", rep.median_ratio},
                {"reference_constant", rep.reference_constant},
                {"penalty", rep.penalty},
                {"ledger", to_json(rep.ledger)},
                {"samples", samples}};
}

json to_json(const WeightOrderRow& row) {
    return json{{"residual", row.residual},
                {"h", row.h},
                {"value_h", row.value_h},
                {"value_h2", row.value_h2},
                {"value_h4", row.value_h4},
                {"order_coarse", row.order_coarse},
                {"order_fine", row.order_fine}};
}

json to_json(const IdentitySuiteResult& res) {
    json records = json::array();
    for (const auto& r : res.records)
        records.push_back(json{{"identity", to_string(r.id)},
                               {"max_residual", r.max_residual},
                               {"trials", r.trials},
                               {"pass", r.pass}});
    return json{{"tolerance", res.tolerance}, {"all_pass", res.all_pass()}, {"records", records}};
}

void write_trajectory_csv(std::ostream& os, const GridFunction& y, const GridFunction& v) {
    os << "n,t,x,y,v\n";
    const int M = y.grid().steps;
    const int N = y.space_size();
    for (int n = 0; n <= M; ++n) {
        for (int i = 0; i < N; ++i) {
            os << n << ',' << format_g17(y.grid().primal(n)) << ','
               << format_g17(y.mesh().primal(i + 1)) << ',' << format_g17(y.at(n, i)) << ',';
            if (n < M) os << format_g17(v.at(n, i));
            os << '\n';
        }
    }
}

void write_decay_csv(std::ostream& os, const std::vector<DecayStudyRow>& rows) {
    os << "h,dt,delta,tau,phi_h,norm_g,norm_v,norm_yM,ratio,cg_iterations\n";
    for (const auto& r : rows) {
        os << format_g17(r.h) << ',' << format_g17(r.dt) << ',' << format_g17(r.delta) << ','
           << format_g17(r.tau) << ',' << format_g17(r.phi_h) << ',' << format_g17(r.norm_g) << ','
           << format_g17(r.norm_v) << ',' << format_g17(r.norm_yM) << ',' << format_g17(r.ratio)
           << ',' << r.cg_iterations << '\n';
    }
}

void write_carleman_csv(std::ostream& os, const std::vector<CarlemanReport>& reports) {
    os << "sample,mode,log_scale,lhs_time,lhs_grad_dual,lhs_grad_avg,lhs_zero_order,"
          "rhs_source,rhs_local,rhs_endpoint_first,rhs_endpoint_last,lhs_total,rhs_total,ratio\n";
    int k = 0;
    for (const auto& r : reports) {
        os << k++ << ',' << to_string(r.mode) << ',' << format_g17(r.log_scale) << ','
           << format_g17(r.lhs_time) << ',' << format_g17(r.lhs_grad_dual) << ','
           << format_g17(r.lhs_grad_avg) << ',' << format_g17(r.lhs_zero_order) << ','
           << format_g17(r.rhs_source) << ',' << format_g17(r.rhs_local) << ','
           << format_g17(r.rhs_endpoint_first) << ',' << format_g17(r.rhs_endpoint_last) << ','
           << format_g17(r.lhs_total()) << ',' << format_g17(r.rhs_total()) << ',';
        const auto ratio = r.ratio();
        if (ratio)
            os << format_g17(*ratio);
        else
            os << "undefined";
        os << '\n';
    }
}

} // namespace fdc
