#pragma once

// Fixed-step RK4 integration of geodesics and of parallel transport along
// parametrized base curves.

#include <optional>
#include <ostream>
#include <vector>

#include "finslerkit/batch.hpp"
#include "finslerkit/sampling.hpp"
#include "finslerkit/spray.hpp"

namespace fk {

struct IntegratorConfig {
    double step = 1e-3;
    long max_steps = 10'000'000;
    double drift_tol = 1e-6;
    std::optional<Box> chart;   // base-point box; leaving it is an error
    double collapse_ratio = 1e-10;  // |y| below this times |y0| is a fiber collapse
    int record_every = 1;
};

struct Trajectory {
    std::vector<double> t;
    std::vector<ChartPoint> states;
};

// x' = y, y' = -2 G(x, y) from v0 over [0, t_end].
Trajectory integrate_geodesic(const Spray& s, const ChartPoint& v0, double t_end, const IntegratorConfig& cfg = {});

// Base curve c(t) given by n expressions in t.
struct Curve {
    std::vector<Expr> components;
    double t0 = 0.0;
    double t1 = 1.0;

    static Curve parse(const std::vector<std::string>& texts, double t0 = 0.0, double t1 = 1.0);
    Curve reversed() const { return Curve{components, t1, t0}; }
    std::vector<double> position(double t) const;
    std::vector<double> velocity(double t) const;
};

// v' = -N^i_j(c, v) c'^j from v0 at c(t0); returns v at c(t1).
std::vector<double> parallel_transport(const Spray& s, const Curve& curve, const std::vector<double>& v0,
                                       const IntegratorConfig& cfg = {});
std::vector<double> parallel_transport(const Spray& s, const Connection& c, const Curve& curve,
                                       const std::vector<double>& v0, const IntegratorConfig& cfg = {});

// max over trajectories and recorded states of |P(state) - P(v0)|
double check_geodesic_invariance(const ScalarField& P, const Spray& s, const std::vector<ChartPoint>& starts,
                                 double t_end, const IntegratorConfig& cfg = {}, Exec exec = Exec::Parallel);

// Columns t, x1..xn, y1..yn.
void write_csv(std::ostream& out, const Trajectory& trajectory);

}  // namespace fk
