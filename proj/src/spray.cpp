#include "finslerkit/spray.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "finslerkit/batch.hpp"

namespace fk {

Spray::Spray(std::vector<ScalarField> G) : G_(std::move(G)) {
    const int n = dimension();
    if (n <= 0) throw DomainError("a spray needs at least one coefficient");
    S_ = VectorField::zero(n);
    for (int i = 0; i < n; ++i) {
        S_[i] = ScalarField::coordinate(n + i);
        S_[n + i] = -2.0 * G_[static_cast<std::size_t>(i)];
    }
}

Spray Spray::unchecked(std::vector<ScalarField> G) { return Spray(std::move(G)); }

Spray Spray::flat(int n) { return Spray(std::vector<ScalarField>(static_cast<std::size_t>(n), ScalarField::constant(0.0))); }

Spray Spray::from_coefficients(std::vector<ScalarField> G, const std::vector<ChartPoint>& samples, double tol) {
    for (std::size_t i = 0; i < G.size(); ++i) {
        const HomogeneityReport rep = homogeneity_residual(G[i], 2.0, samples);
        if (rep.max_residual >= tol) {
            std::ostringstream msg;
            msg << "spray coefficient G" << (i + 1) << " is not 2-homogeneous: residual " << rep.max_residual
                << " at sample " << rep.worst_point;
            throw HomogeneityError(msg.str());
        }
    }
    return Spray(std::move(G));
}

Spray Spray::from_exprs(const std::vector<Expr>& exprs, const std::vector<ChartPoint>& samples, double tol) {
    std::vector<ScalarField> G;
    for (const auto& e : exprs) {
        if (e.dimension() != static_cast<int>(exprs.size())) {
            throw DomainError("spray needs one coefficient per dimension");
        }
        G.push_back(ScalarField::from_expr(e));
    }
    return from_coefficients(std::move(G), samples, tol);
}

HomogeneityReport homogeneity_residual(const ScalarField& f, double degree, const std::vector<ChartPoint>& samples,
                                       int order) {
    HomogeneityReport rep;
    if (samples.empty()) return rep;
    const ScalarField euler = liouville(samples.front().dimension())(f);
    for (std::size_t p = 0; p < samples.size(); ++p) {
        EvalContext ctx(samples[p], order);
        const double lhs = ctx.value(euler);
        const double rhs = degree * ctx.value(f);
        const double r = relative_residual(lhs, rhs);
        if (rep.worst_point < 0 || r > rep.max_residual) {
            rep.max_residual = r;
            rep.worst_point = static_cast<int>(p);
        }
    }
    return rep;
}

Connection connection(const Spray& s) {
    const int n = s.dimension();
    Connection c;
    c.n = n;
    c.N = FieldTensor(n, 2);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) c.N(i, j) = partial(s.G(i), n + j);
    }
    std::vector<VectorField> hcols;
    for (int i = 0; i < n; ++i) {
        VectorField d = VectorField::coordinate(n, i);
        for (int j = 0; j < n; ++j) d[n + j] = -c.N(j, i);
        c.delta.push_back(d);
        hcols.push_back(d);
    }
    for (int i = 0; i < n; ++i) hcols.push_back(VectorField::zero(n));
    c.h = VectorOneForm(std::move(hcols));
    c.v = VectorOneForm::identity(n) - c.h;
    return c;
}

Curvature curvature(const Spray& s, const Connection& c) {
    const int n = s.dimension();
    Curvature k;
    k.R = FieldTensor(n, 3);
    k.Phi = FieldTensor(n, 2);
    k.R_form = VectorTwoForm(n);
    for (int j = 0; j < n; ++j) {
        for (int l = j + 1; l < n; ++l) {
            VectorField value = VectorField::zero(n);
            for (int i = 0; i < n; ++i) {
                const ScalarField r = c.delta[static_cast<std::size_t>(j)](c.N(i, l)) -
                                      c.delta[static_cast<std::size_t>(l)](c.N(i, j));
                k.R(i, j, l) = r;
                k.R(i, l, j) = -r;
                value[n + i] = r;
            }
            k.R_form.set(j, l, value);
        }
    }
    const VectorField& S = s.field();
    std::vector<VectorField> cols;
    for (int j = 0; j < n; ++j) {
        VectorField col = VectorField::zero(n);
        for (int i = 0; i < n; ++i) {
            ScalarField phi = 2.0 * partial(s.G(i), j) - S(c.N(i, j));
            for (int m = 0; m < n; ++m) phi = phi - c.N(i, m) * c.N(m, j);
            k.Phi(i, j) = phi;
            col[n + i] = phi;
        }
        cols.push_back(col);
    }
    for (int j = 0; j < n; ++j) cols.push_back(VectorField::zero(n));
    k.Phi_form = VectorOneForm(std::move(cols));
    return k;
}

BerwaldTensors berwald_y_derivatives(const Spray& s) {
    const int n = s.dimension();
    BerwaldTensors b{FieldTensor(n, 2), FieldTensor(n, 3), FieldTensor(n, 4)};
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            b.G1(i, j) = partial(s.G(i), n + j);
            for (int k = 0; k < n; ++k) {
                // Symmetric by construction: reuse the sorted-index field.
                if (k < j) {
                    b.G2(i, j, k) = b.G2(i, k, j);
                } else {
                    b.G2(i, j, k) = partial(b.G1(i, j), n + k);
                }
            }
        }
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                for (int l = 0; l < n; ++l) {
                    std::array<int, 3> idx{j, k, l};
                    std::sort(idx.begin(), idx.end());
                    if (idx == std::array<int, 3>{j, k, l}) {
                        b.G3(i, j, k, l) = partial(b.G2(i, j, k), n + l);
                    } else {
                        b.G3(i, j, k, l) = b.G3(i, idx[0], idx[1], idx[2]);
                    }
                }
            }
        }
    }
    return b;
}

double relative_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DomainError("relative_residual: shape mismatch");
    if (a.size() == 0) return 0.0;
    const double scale = 1.0 + std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
    const double r = (a - b).cwiseAbs().maxCoeff() / scale;
    return std::isnan(r) ? INFINITY : r;
}

std::map<std::string, double> structure_residuals(const Spray& s, const std::vector<ChartPoint>& samples, int order) {
    const int n = s.dimension();
    const Connection c = connection(s);
    const Curvature k = curvature(s, c);
    const BerwaldTensors b = berwald_y_derivatives(s);
    const VectorOneForm J = tangent_structure(n);
    const VectorField& S = s.field();
    const VectorField C = liouville(n);
    const VectorField JS = J.apply(S);
    const VectorField CS = lie_bracket(C, S);
    const VectorOneForm JSb = fn_bracket_vf(J, S);
    const VectorTwoForm JPhi = fn_bracket_11(J, k.Phi_form);
    const VectorTwoForm JJ = fn_bracket_11(J, J);
    const VectorTwoForm hh = fn_bracket_11(c.h, c.h);
    const Eigen::MatrixXd Id = Eigen::MatrixXd::Identity(2 * n, 2 * n);

    using Row = std::map<std::string, double>;
    const auto rows = map_points(samples, [&](const ChartPoint& p) {
        EvalContext ctx(p, order);
        Row r;
        const Eigen::MatrixXd H = evaluate(ctx, c.h);
        const Eigen::MatrixXd V = evaluate(ctx, c.v);
        const Eigen::VectorXd Sv = evaluate(ctx, S);
        r["h_plus_v_identity"] = relative_residual(Eigen::MatrixXd(H + V), Id);
        r["h_idempotent"] = relative_residual(Eigen::MatrixXd(H * H), H);
        r["v_idempotent"] = relative_residual(Eigen::MatrixXd(V * V), V);
        r["hv_zero"] = std::max(relative_residual(Eigen::MatrixXd(H * V), Eigen::MatrixXd::Zero(2 * n, 2 * n)),
                                relative_residual(Eigen::MatrixXd(V * H), Eigen::MatrixXd::Zero(2 * n, 2 * n)));
        r["h_of_spray"] = relative_residual(Eigen::VectorXd(H * Sv), Sv);
        r["h_from_j_bracket_s"] =
            relative_residual(Eigen::MatrixXd(0.5 * (Id + evaluate(ctx, JSb))), H);
        r["j_of_spray"] = relative_residual(evaluate(ctx, JS), evaluate(ctx, C));
        r["liouville_bracket"] = relative_residual(evaluate(ctx, CS), Sv);

        double anti = 0.0, phi = 0.0, three_r = 0.0, jj = 0.0, hh_r = 0.0;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                double ry = 0.0;
                for (int l = 0; l < n; ++l) {
                    const double rijl = ctx.value(k.R(i, j, l));
                    anti = std::max(anti, relative_residual(rijl, -ctx.value(k.R(i, l, j))));
                    ry += rijl * p.y()[static_cast<std::size_t>(l)];
                }
                phi = std::max(phi, relative_residual(ctx.value(k.Phi(i, j)), ry));
            }
        }
        for (int a = 0; a < 2 * n; ++a) {
            for (int bb = a + 1; bb < 2 * n; ++bb) {
                const Eigen::VectorXd lhs = evaluate(ctx, JPhi.on_coordinates(a, bb));
                const Eigen::VectorXd rhs = -3.0 * evaluate(ctx, k.R_form.on_coordinates(a, bb));
                three_r = std::max(three_r, relative_residual(lhs, rhs));
                jj = std::max(jj, relative_residual(evaluate(ctx, JJ.on_coordinates(a, bb)), Eigen::VectorXd::Zero(2 * n)));
            }
        }
        for (int j = 0; j < n; ++j) {
            for (int l = j + 1; l < n; ++l) {
                const auto& dj = c.delta[static_cast<std::size_t>(j)];
                const auto& dl = c.delta[static_cast<std::size_t>(l)];
                hh_r = std::max(hh_r, relative_residual(evaluate(ctx, hh.apply(dj, dl)),
                                                        Eigen::VectorXd(-2.0 * evaluate(ctx, k.R_form.apply(dj, dl)))));
            }
        }
        r["r_antisymmetry"] = anti;
        r["phi_is_spray_contraction_of_r"] = phi;
        r["three_r_is_j_bracket_phi"] = three_r;
        r["j_bracket_j_zero"] = jj;
        r["h_bracket_h_is_minus_two_r"] = hh_r;

        const VectorField Cf = C;
        double hom = 0.0;
        auto ladder = [&](const ScalarField& f, double deg) {
            hom = std::max(hom, relative_residual(ctx.value(Cf(f)), deg * ctx.value(f)));
        };
        for (int i = 0; i < n; ++i) {
            ladder(s.G(i), 2.0);
            for (int j = 0; j < n; ++j) {
                ladder(c.N(i, j), 1.0);
                ladder(k.Phi(i, j), 2.0);
                for (int l = 0; l < n; ++l) ladder(b.G2(i, j, l), 0.0);
            }
        }
        r["homogeneity_ladder"] = hom;
        return r;
    });

    Row worst;
    for (const auto& r : rows) {
        for (const auto& [name, value] : r) worst[name] = std::max(worst[name], value);
    }
    return worst;
}

}  // namespace fk
