#include "finslerkit/flows.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

namespace fk {

namespace {

using State = std::vector<double>;

double norm(const std::vector<double>& v, std::size_t begin, std::size_t end) {
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) s += v[i] * v[i];
    return std::sqrt(s);
}

ChartPoint to_point(const State& u, int n) {
    return ChartPoint(State(u.begin(), u.begin() + n), State(u.begin() + n, u.end()));
}

State axpy(const State& u, double a, const State& k) {
    State r(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) r[i] = u[i] + a * k[i];
    return r;
}

long step_count(double span, const IntegratorConfig& cfg) {
    if (!(cfg.step > 0.0)) throw ConfigError("integrator step must be positive");
    const long steps = std::max(1L, std::lround(std::abs(span) / cfg.step));
    if (steps > cfg.max_steps) throw ConfigError("integration interval needs more than the configured maximum steps");
    return steps;
}

}  // namespace

Trajectory integrate_geodesic(const Spray& s, const ChartPoint& v0, double t_end, const IntegratorConfig& cfg) {
    const int n = s.dimension();
    if (v0.dimension() != n) throw DomainError("initial vector dimension does not match the spray");
    const long steps = step_count(t_end, cfg);
    const double h = t_end / static_cast<double>(steps);
    const double y0 = norm(v0.coordinates(), static_cast<std::size_t>(n), static_cast<std::size_t>(2 * n));

    auto rhs = [&](const State& u, double t) {
        if (cfg.chart && !cfg.chart->contains(State(u.begin(), u.begin() + n))) {
            std::ostringstream msg;
            msg << "geodesic left the chart box at t = " << t;
            throw IntegrationError(msg.str());
        }
        if (!(norm(u, static_cast<std::size_t>(n), u.size()) > cfg.collapse_ratio * y0)) {
            std::ostringstream msg;
            msg << "fiber collapse (y -> 0) at t = " << t;
            throw IntegrationError(msg.str());
        }
        EvalContext ctx(to_point(u, n), 8);
        State k(u.size());
        for (int i = 0; i < n; ++i) {
            k[static_cast<std::size_t>(i)] = u[static_cast<std::size_t>(n + i)];
            k[static_cast<std::size_t>(n + i)] = -2.0 * ctx.value(s.G(i));
        }
        return k;
    };

    Trajectory traj;
    State u = v0.coordinates();
    traj.t.push_back(0.0);
    traj.states.push_back(v0);
    for (long k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * h;
        const State k1 = rhs(u, t);
        const State k2 = rhs(axpy(u, h / 2, k1), t + h / 2);
        const State k3 = rhs(axpy(u, h / 2, k2), t + h / 2);
        const State k4 = rhs(axpy(u, h, k3), t + h);
        for (std::size_t i = 0; i < u.size(); ++i) u[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        for (double v : u) {
            if (!std::isfinite(v)) throw IntegrationError("geodesic integration produced a non-finite state");
        }
        if ((k + 1) % cfg.record_every == 0 || k + 1 == steps) {
            rhs(u, t + h);  // chart and collapse checks at the recorded state
            traj.t.push_back(static_cast<double>(k + 1) * h);
            traj.states.push_back(to_point(u, n));
        }
    }
    return traj;
}

Curve Curve::parse(const std::vector<std::string>& texts, double t0, double t1) {
    Curve c;
    for (const auto& t : texts) c.components.push_back(parse_curve(t));
    c.t0 = t0;
    c.t1 = t1;
    return c;
}

std::vector<double> Curve::position(double t) const {
    std::vector<double> x;
    for (const auto& e : components) x.push_back(eval_curve(e, t));
    return x;
}

std::vector<double> Curve::velocity(double t) const {
    std::vector<double> v;
    for (const auto& e : components) v.push_back(lift_curve(e, t, 1).coefficient(1));
    return v;
}

std::vector<double> parallel_transport(const Spray& s, const Curve& curve, const std::vector<double>& v0,
                                       const IntegratorConfig& cfg) {
    return parallel_transport(s, connection(s), curve, v0, cfg);
}

std::vector<double> parallel_transport(const Spray& s, const Connection& c, const Curve& curve,
                                       const std::vector<double>& v0, const IntegratorConfig& cfg) {
    const int n = s.dimension();
    if (static_cast<int>(curve.components.size()) != n || static_cast<int>(v0.size()) != n) {
        throw DomainError("transport: curve and vector dimensions must match the spray");
    }
    const double vnorm0 = norm(v0, 0, v0.size());
    if (!(vnorm0 > 0.0)) throw DomainError("transport: initial vector must be nonzero");
    const long steps = step_count(curve.t1 - curve.t0, cfg);
    const double h = (curve.t1 - curve.t0) / static_cast<double>(steps);

    auto rhs = [&](const State& v, double t) {
        const State x = curve.position(t);
        if (cfg.chart && !cfg.chart->contains(x)) {
            std::ostringstream msg;
            msg << "transport curve left the chart box at t = " << t;
            throw IntegrationError(msg.str());
        }
        if (!(norm(v, 0, v.size()) > cfg.collapse_ratio * vnorm0)) {
            std::ostringstream msg;
            msg << "fiber collapse during transport at t = " << t;
            throw IntegrationError(msg.str());
        }
        const State xd = curve.velocity(t);
        EvalContext ctx(ChartPoint(x, v), 8);
        State k(static_cast<std::size_t>(n), 0.0);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (c.N(i, j).is_zero()) continue;
                k[static_cast<std::size_t>(i)] -= ctx.value(c.N(i, j)) * xd[static_cast<std::size_t>(j)];
            }
        }
        return k;
    };

    State v = v0;
    for (long k = 0; k < steps; ++k) {
        const double t = curve.t0 + static_cast<double>(k) * h;
        const State k1 = rhs(v, t);
        const State k2 = rhs(axpy(v, h / 2, k1), t + h / 2);
        const State k3 = rhs(axpy(v, h / 2, k2), t + h / 2);
        const State k4 = rhs(axpy(v, h, k3), t + h);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    for (double x : v) {
        if (!std::isfinite(x)) throw IntegrationError("transport produced a non-finite vector");
    }
    return v;
}

double check_geodesic_invariance(const ScalarField& P, const Spray& s, const std::vector<ChartPoint>& starts,
                                 double t_end, const IntegratorConfig& cfg, Exec exec) {
    const auto drifts = map_points(starts, [&](const ChartPoint& v0) {
        const Trajectory traj = integrate_geodesic(s, v0, t_end, cfg);
        EvalContext c0(v0, 8);
        const double p0 = c0.value(P);
        double drift = 0.0;
        for (const auto& st : traj.states) {
            EvalContext ctx(st, 8);
            drift = std::max(drift, std::abs(ctx.value(P) - p0));
        }
        return drift;
    }, exec);
    double worst = 0.0;
    for (double d : drifts) worst = std::max(worst, d);
    return worst;
}

void write_csv(std::ostream& out, const Trajectory& trajectory) {
    if (trajectory.states.empty()) return;
    const int n = trajectory.states.front().dimension();
    out << "t";
    for (int i = 1; i <= n; ++i) out << ",x" << i;
    for (int i = 1; i <= n; ++i) out << ",y" << i;
    out << "\n" << std::setprecision(17);
    for (std::size_t k = 0; k < trajectory.states.size(); ++k) {
        out << trajectory.t[k];
        for (double v : trajectory.states[k].coordinates()) out << "," << v;
        out << "\n";
    }
}

}  // namespace fk
