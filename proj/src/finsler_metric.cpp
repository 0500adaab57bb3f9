#include "finslerkit/finsler_metric.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "finslerkit/batch.hpp"

namespace fk {

FinslerMetric::FinslerMetric(ScalarField F, int n) : n_(n), F_(std::move(F)) {
    E_ = 0.5 * (F_ * F_);
    g_ = FieldTensor(n, 2);
    std::vector<ScalarField> dE(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) dE[static_cast<std::size_t>(i)] = partial(E_, n + i);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            g_(i, j) = partial(dE[static_cast<std::size_t>(i)], n + j);
            g_(j, i) = g_(i, j);
        }
    }
    ginv_ = symbolic_inverse(g_);
    C_ = FieldTensor(n, 3);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            for (int k = j; k < n; ++k) {
                const ScalarField c = 0.5 * partial(g_(i, j), n + k);
                const int perms[6][3] = {{i, j, k}, {i, k, j}, {j, i, k}, {j, k, i}, {k, i, j}, {k, j, i}};
                for (const auto& q : perms) C_(q[0], q[1], q[2]) = c;
            }
        }
    }
}

FinslerMetric FinslerMetric::unchecked(ScalarField F, int n) { return FinslerMetric(std::move(F), n); }

FinslerMetric FinslerMetric::from_field(ScalarField F, int n, const std::vector<ChartPoint>& samples, double tol) {
    FinslerMetric m(std::move(F), n);
    validate_metric(m, samples, tol);
    return m;
}

FinslerMetric FinslerMetric::from_expr(const Expr& F, const std::vector<ChartPoint>& samples, double tol) {
    return from_field(ScalarField::from_expr(F), F.dimension(), samples, tol);
}

MetricValidation validate_metric(const FinslerMetric& m, const std::vector<ChartPoint>& samples, double tol) {
    MetricValidation v;
    v.min_F = INFINITY;
    v.min_det_ratio = INFINITY;
    const int n = m.dimension();
    const ScalarField euler = liouville(n)(m.F());
    for (std::size_t p = 0; p < samples.size(); ++p) {
        EvalContext ctx(samples[p], 4);
        const double F = ctx.value(m.F());
        if (!(F > 0.0)) {
            std::ostringstream msg;
            msg << "Finsler function is not positive at sample " << p << " (F = " << F << ")";
            throw RegularityError(msg.str());
        }
        v.min_F = std::min(v.min_F, F);
        const double h = relative_residual(ctx.value(euler), F);
        v.homogeneity_residual = std::max(v.homogeneity_residual, h);
        if (h >= tol) {
            std::ostringstream msg;
            msg << "Finsler function is not 1-homogeneous: residual " << h << " at sample " << p;
            throw HomogeneityError(msg.str());
        }
        Eigen::MatrixXd g(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) g(i, j) = ctx.value(m.g()(i, j));
        }
        const double scale = std::abs(g.trace()) / n;
        const double ratio = std::abs(g.determinant()) / std::pow(scale, n);
        v.min_det_ratio = std::min(v.min_det_ratio, ratio);
        if (!(ratio > 1e-10)) {
            std::ostringstream msg;
            msg << "metric tensor is singular at sample " << p << " (|det g| / scale^n = " << ratio << ")";
            throw RegularityError(msg.str());
        }
    }
    return v;
}

FieldTensor symbolic_inverse(const FieldTensor& A) {
    const int n = A.dimension();
    if (n == 1) {
        FieldTensor inv(1, 2);
        inv(0, 0) = ScalarField::constant(1.0) / A(0, 0);
        return inv;
    }
    if (n == 2) {
        const ScalarField det = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
        FieldTensor inv(2, 2);
        inv(0, 0) = A(1, 1) / det;
        inv(1, 1) = A(0, 0) / det;
        inv(0, 1) = -A(0, 1) / det;
        inv(1, 0) = -A(1, 0) / det;
        return inv;
    }
    std::vector<std::vector<ScalarField>> a(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) a[i].push_back(A(i, j));
        for (int j = 0; j < n; ++j) a[i].push_back(ScalarField::constant(i == j ? 1.0 : 0.0));
    }
    for (int c = 0; c < n; ++c) {
        const ScalarField pivot = a[c][c];
        for (int j = 0; j < 2 * n; ++j) a[c][j] = a[c][j] / pivot;
        for (int r = 0; r < n; ++r) {
            if (r == c || a[r][c].is_zero()) continue;
            const ScalarField factor = a[r][c];
            for (int j = 0; j < 2 * n; ++j) a[r][j] = a[r][j] - factor * a[c][j];
        }
    }
    FieldTensor inv(n, 2);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) inv(i, j) = a[i][n + j];
    }
    return inv;
}

Spray FinslerMetric::geodesic_spray() const {
    const int n = n_;
    std::vector<ScalarField> rhs(static_cast<std::size_t>(n));
    for (int l = 0; l < n; ++l) {
        const ScalarField dyl = partial(E_, n + l);
        ScalarField r = -partial(E_, l);
        for (int k = 0; k < n; ++k) r = r + ScalarField::coordinate(n + k) * partial(dyl, k);
        rhs[static_cast<std::size_t>(l)] = r;
    }
    std::vector<ScalarField> G;
    for (int i = 0; i < n; ++i) {
        ScalarField sum = ScalarField::constant(0.0);
        for (int l = 0; l < n; ++l) sum = sum + ginv_(i, l) * rhs[static_cast<std::size_t>(l)];
        G.push_back(0.5 * sum);
    }
    return Spray::unchecked(std::move(G));
}

ScalarField dd_J(const ScalarField& f, const VectorField& X, const VectorField& Y) {
    const VectorOneForm J = tangent_structure(X.dimension());
    return X(J.apply(Y)(f)) - Y(J.apply(X)(f)) - J.apply(lie_bracket(X, Y))(f);
}

std::vector<ScalarField> euler_lagrange_form(const FinslerMetric& m, const Spray& s) {
    const int n = m.dimension();
    const ScalarField L = m.E() - liouville(n)(m.E());
    std::vector<ScalarField> omega;
    for (int a = 0; a < 2 * n; ++a) {
        omega.push_back(dd_J(m.E(), s.field(), VectorField::coordinate(n, a)) - partial(L, a));
    }
    return omega;
}

FieldTensor landsberg_tensor(const FinslerMetric& m, const Spray& s) {
    const int n = m.dimension();
    const BerwaldTensors b = berwald_y_derivatives(s);
    FieldTensor L(n, 3);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                ScalarField sum = ScalarField::constant(0.0);
                for (int h = 0; h < n; ++h) sum = sum + b.G3(h, i, j, k) * partial(m.F(), n + h);
                L(i, j, k) = -0.5 * (m.F() * sum);
            }
        }
    }
    return L;
}

double cartan_norm(const FinslerMetric& m, EvalContext& ctx) {
    const int n = m.dimension();
    Eigen::MatrixXd ginv(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) ginv(i, j) = ctx.value(m.g_inverse()(i, j));
    }
    const Eigen::VectorXd c = evaluate(ctx, m.cartan());
    auto C = [&](int i, int j, int k) { return c[(i * n + j) * n + k]; };
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    for (int p = 0; p < n; ++p)
                        for (int q = 0; q < n; ++q) sum += ginv(i, l) * ginv(j, p) * ginv(k, q) * C(i, j, k) * C(l, p, q);
    return ctx.value(m.F()) * std::sqrt(std::max(sum, 0.0));
}

RiemannianTest is_riemannian(const FinslerMetric& m, const std::vector<ChartPoint>& samples, double tol, int order) {
    const auto norms = map_points(samples, [&](const ChartPoint& p) {
        EvalContext ctx(p, order);
        return cartan_norm(m, ctx);
    });
    RiemannianTest t;
    for (double v : norms) t.max_cartan_norm = std::max(t.max_cartan_norm, std::isnan(v) ? INFINITY : v);
    t.riemannian = t.max_cartan_norm < tol;
    return t;
}

std::map<std::string, double> metric_residuals(const FinslerMetric& m, const Spray& s,
                                               const std::vector<ChartPoint>& samples, int order) {
    const int n = m.dimension();
    const std::vector<ScalarField> omega = euler_lagrange_form(m, s);
    const ScalarField SF = s.field()(m.F());
    const Connection c = connection(s);
    std::vector<ScalarField> dhF;
    for (const auto& d : c.delta) dhF.push_back(d(m.F()));
    const Spray scaled = m.scaled(3.5).geodesic_spray();

    using Row = std::map<std::string, double>;
    const auto rows = map_points(samples, [&](const ChartPoint& p) {
        EvalContext ctx(p, order);
        Row r;
        const double F = ctx.value(m.F());
        // Each EL component is a difference of terms of size ~ E |y|^0..1;
        // normalize by the energy scale at the point.
        double el = 0.0;
        for (const auto& w : omega) el = std::max(el, std::abs(ctx.value(w)) / (1.0 + F * F));
        r["euler_lagrange"] = el;
        r["spray_preserves_F"] = std::abs(ctx.value(SF)) / (1.0 + F);
        double dh = 0.0;
        for (const auto& f : dhF) dh = std::max(dh, std::abs(ctx.value(f)) / (1.0 + F));
        r["horizontal_derivative_of_F"] = dh;

        Eigen::MatrixXd g(n, n), gi(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                g(i, j) = ctx.value(m.g()(i, j));
                gi(i, j) = ctx.value(m.g_inverse()(i, j));
            }
        }
        Eigen::Map<const Eigen::VectorXd> y(p.y().data(), n);
        r["metric_contracts_to_F2"] = relative_residual(y.dot(g * y), F * F);
        r["inverse_metric"] = relative_residual(Eigen::MatrixXd(gi * g), Eigen::MatrixXd::Identity(n, n));

        double sym = 0.0, cy = 0.0;
        const Eigen::VectorXd C = evaluate(ctx, m.cartan());
        auto at = [&](int i, int j, int k) { return C[(i * n + j) * n + k]; };
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                double contracted = 0.0;
                for (int k = 0; k < n; ++k) {
                    sym = std::max({sym, relative_residual(at(i, j, k), at(j, i, k)), relative_residual(at(i, j, k), at(i, k, j))});
                    contracted += at(i, j, k) * p.y()[static_cast<std::size_t>(k)];
                }
                cy = std::max(cy, std::abs(contracted) / (1.0 + g.cwiseAbs().maxCoeff()));
            }
        }
        r["cartan_symmetry"] = sym;
        r["cartan_annihilates_y"] = cy;
        double sc = 0.0;
        for (int i = 0; i < n; ++i) sc = std::max(sc, relative_residual(ctx.value(scaled.G(i)), ctx.value(s.G(i))));
        r["spray_scale_invariance"] = sc;
        return r;
    });
    Row worst;
    for (const auto& r : rows) {
        for (const auto& [name, value] : r) worst[name] = std::max(worst[name], std::isnan(value) ? INFINITY : value);
    }
    return worst;
}

}  // namespace fk
