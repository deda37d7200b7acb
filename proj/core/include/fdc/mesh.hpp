#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fdc/errors.hpp"

namespace fdc {

/// Open interval (a,b). Membership is strict on both sides, matching the
/// indicator 1_omega with omega open.
struct Interval {
    double a = 0.0;
    double b = 0.0;
    bool contains(double x) const { return a < x && x < b; }
    double length() const { return b - a; }
    double midpoint() const { return 0.5 * (a + b); }
};

/// Uniform space grid on Omega = (0,L): N interior points x_i = i*h with
/// h = L/(N+1). The staggered (dual) points sit at the cell midpoints
/// x_{i+1/2}, i in [0,N].
struct SpaceMesh {
    double length = 1.0;    // L
    int interior = 1;       // N
    double h = 0.5;         // L/(N+1)

    static SpaceMesh uniform(double L, int N) {
        if (!(L > 0.0)) throw contract_error("SpaceMesh: L must be positive");
        if (N < 1) throw contract_error("SpaceMesh: need at least one interior point");
        SpaceMesh m;
        m.length = L;
        m.interior = N;
        m.h = L / static_cast<double>(N + 1);
        return m;
    }

    double primal(int i) const { return static_cast<double>(i) * h; }      // i in [0, N+1]
    double dual(int i) const { return (static_cast<double>(i) + 0.5) * h; } // x_{i+1/2}, i in [0, N]

    bool operator==(const SpaceMesh& o) const {
        return length == o.length && interior == o.interior;
    }
};

/// Uniform time grid on [0,T]: nodes t_n = n*dt, dt = T/M. The staggered
/// points t_{n+1/2} include one exterior instant t_{M+1/2} = T + dt/2.
struct TimeGrid {
    double horizon = 1.0;   // T
    int steps = 1;          // M
    double dt = 1.0;        // T/M

    static TimeGrid uniform(double T, int M) {
        if (!(T > 0.0)) throw contract_error("TimeGrid: T must be positive");
        if (M < 1) throw contract_error("TimeGrid: need at least one step");
        TimeGrid g;
        g.horizon = T;
        g.steps = M;
        g.dt = T / static_cast<double>(M);
        return g;
    }

    double primal(int n) const { return static_cast<double>(n) * dt; }       // n in [0, M]
    double dual(int n) const { return (static_cast<double>(n) + 0.5) * dt; } // t_{n+1/2}, n in [0, M]

    bool operator==(const TimeGrid& o) const {
        return horizon == o.horizon && steps == o.steps;
    }
};

enum class SpacePlacement {
    PrimalInterior,     // x_1..x_N            (N values)
    PrimalWithBoundary, // x_0..x_{N+1}        (N+2 values)
    Dual,               // x_{1/2}..x_{N+1/2}  (N+1 values)
};

enum class TimePlacement {
    Primal,        // t_1..t_M           (M values)
    PrimalClosed,  // t_0..t_M           (M+1 values)
    Dual,          // t_{1/2}..t_{M-1/2} (M values)
    DualExtended,  // t_{1/2}..t_{M+1/2} (M+1 values)
    SingleInstant, // one stored instant
};

const char* to_string(SpacePlacement p);
const char* to_string(TimePlacement p);

int space_count(SpacePlacement p, const SpaceMesh& m);
int time_count(TimePlacement p, const TimeGrid& g);

/// Coordinate of storage slot k under placement p.
double space_coord(SpacePlacement p, const SpaceMesh& m, int k);
/// Instant of storage slot k under placement p (SingleInstant has none).
double time_coord(TimePlacement p, const TimeGrid& g, int k);

/// A discrete function of space at one instant, tagged with its placement.
struct SpaceField {
    SpaceMesh mesh;
    SpacePlacement placement = SpacePlacement::PrimalInterior;
    std::vector<double> v;

    SpaceField() = default;
    SpaceField(SpaceMesh m, SpacePlacement p)
        : mesh(m), placement(p), v(static_cast<std::size_t>(space_count(p, m)), 0.0) {}
    SpaceField(SpaceMesh m, SpacePlacement p, std::vector<double> values);

    static SpaceField sample(SpaceMesh m, SpacePlacement p, const std::function<double(double)>& f);

    int size() const { return static_cast<int>(v.size()); }
    double coord(int k) const { return space_coord(placement, mesh, k); }
    double& operator[](int k) { return v[static_cast<std::size_t>(k)]; }
    double operator[](int k) const { return v[static_cast<std::size_t>(k)]; }
};

/// A discrete function of time, tagged with its placement.
struct TimeSeries {
    TimeGrid grid;
    TimePlacement placement = TimePlacement::Primal;
    std::vector<double> v;

    TimeSeries() = default;
    TimeSeries(TimeGrid g, TimePlacement p)
        : grid(g), placement(p), v(static_cast<std::size_t>(time_count(p, g)), 0.0) {}
    TimeSeries(TimeGrid g, TimePlacement p, std::vector<double> values);

    static TimeSeries sample(TimeGrid g, TimePlacement p, const std::function<double(double)>& f);

    int size() const { return static_cast<int>(v.size()); }
    double coord(int k) const { return time_coord(placement, grid, k); }
    double& operator[](int k) { return v[static_cast<std::size_t>(k)]; }
    double operator[](int k) const { return v[static_cast<std::size_t>(k)]; }
};

/// A fully-discrete field: one space slice per stored instant, time-major.
class GridFunction {
public:
    GridFunction() = default;
    GridFunction(SpaceMesh m, TimeGrid g, SpacePlacement sp, TimePlacement tp)
        : mesh_(m), grid_(g), sp_(sp), tp_(tp),
          v_(static_cast<std::size_t>(space_count(sp, m)) * static_cast<std::size_t>(time_count(tp, g)), 0.0) {}

    static GridFunction sample(SpaceMesh m, TimeGrid g, SpacePlacement sp, TimePlacement tp,
                               const std::function<double(double, double)>& f_tx);

    const SpaceMesh& mesh() const { return mesh_; }
    const TimeGrid& grid() const { return grid_; }
    SpacePlacement space_placement() const { return sp_; }
    TimePlacement time_placement() const { return tp_; }

    int space_size() const { return space_count(sp_, mesh_); }
    int time_size() const { return time_count(tp_, grid_); }

    double at(int t, int x) const { return v_[idx(t, x)]; }
    double& at(int t, int x) { return v_[idx(t, x)]; }

    std::span<const double> slice(int t) const {
        return {v_.data() + idx(t, 0), static_cast<std::size_t>(space_size())};
    }
    SpaceField slice_field(int t) const;
    void set_slice(int t, std::span<const double> values);

    std::vector<double>& raw() { return v_; }
    const std::vector<double>& raw() const { return v_; }

private:
    std::size_t idx(int t, int x) const {
        return static_cast<std::size_t>(t) * static_cast<std::size_t>(space_size()) + static_cast<std::size_t>(x);
    }

    SpaceMesh mesh_;
    TimeGrid grid_;
    SpacePlacement sp_ = SpacePlacement::PrimalInterior;
    TimePlacement tp_ = TimePlacement::SingleInstant;
    std::vector<double> v_;
};

// --- discrete integrals, inner products, norms -----------------------------

/// Sum h*u_i over the stored points (primal interior or dual placements).
double integral_space(const SpaceField& u);
/// Sum dt*u^n over the primal instants t_1..t_M, resp. dt*u^{n+1/2} over
/// t_{1/2}..t_{M-1/2}. PrimalClosed series integrate over t_1..t_M (t_0 is
/// excluded by definition); DualExtended over t_{1/2}..t_{M-1/2}.
double integral_time(const TimeSeries& u);

double inner_product_L2(const SpaceField& u, const SpaceField& v);
double norm_L2(const SpaceField& u);
double norm_Linf(const SpaceField& u);
/// L2 norm restricted to points strictly inside omega.
double norm_L2_restricted(const SpaceField& u, const Interval& omega);

/// Space-time inner product: time integral (per the time placement) of the
/// instantaneous L2 pairings.
double inner_product_Q(const GridFunction& u, const GridFunction& v);
double norm_L2_Q(const GridFunction& u);
double norm_L2_Q_restricted(const GridFunction& u, const Interval& omega);
double norm_Linf_Q(const GridFunction& u);

} // namespace fdc
