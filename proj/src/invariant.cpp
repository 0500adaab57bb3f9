#include "finslerkit/invariant.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "finslerkit/batch.hpp"

namespace fk {

InvariantCandidate::InvariantCandidate(ScalarField P, double degree, double floor)
    : P_(std::move(P)), k_(degree), floor_(floor) {
    if (k_ == 0.0 || !std::isfinite(k_)) throw PreconditionError("invariant candidate needs a nonzero homogeneity degree");
}

void InvariantCandidate::validate(const std::vector<ChartPoint>& samples, double tol, int order) const {
    if (samples.empty()) return;
    const ScalarField euler = liouville(samples.front().dimension())(P_);
    for (std::size_t p = 0; p < samples.size(); ++p) {
        EvalContext ctx(samples[p], order);
        const double value = ctx.value(P_);
        if (!(std::abs(value) > floor_)) {
            std::ostringstream msg;
            msg << "invariant candidate is trivial at sample " << p << " (|P| = " << std::abs(value) << ")";
            throw PreconditionError(msg.str());
        }
        const double r = relative_residual(ctx.value(euler), k_ * value);
        if (r >= tol) {
            std::ostringstream msg;
            msg << "invariant candidate is not " << k_ << "-homogeneous: residual " << r << " at sample " << p;
            throw HomogeneityError(msg.str());
        }
    }
}

PDistributions build_p_distributions(const InvariantCandidate& P, const Spray& s) {
    return build_p_distributions(P, s, connection(s));
}

PDistributions build_p_distributions(const InvariantCandidate& P, const Spray& s, const Connection& c) {
    const int n = s.dimension();
    PDistributions pd{n, P, {}, {}, {}, {}, {}};
    const ScalarField kP = P.degree() * P.P();
    const VectorField C = liouville(n);
    for (int i = 0; i < n; ++i) {
        const ScalarField r = partial(P.P(), n + i) / kP;
        pd.ratio.push_back(r);
        pd.h.push_back(c.delta[static_cast<std::size_t>(i)] - r * s.field());
        pd.v.push_back(VectorField::coordinate(n, n + i) - r * C);
    }
    // d_J P(X) = (JX)(P) has components dP/dy^b on the x-slots; d_v P(X) =
    // (vX)(P) has the components of v^T dP.
    std::vector<ScalarField> dJ(static_cast<std::size_t>(2 * n), ScalarField::constant(0.0));
    std::vector<ScalarField> dv(static_cast<std::size_t>(2 * n), ScalarField::constant(0.0));
    for (int b = 0; b < 2 * n; ++b) {
        if (b < n) dJ[static_cast<std::size_t>(b)] = pd.ratio[static_cast<std::size_t>(b)];
        ScalarField sum = ScalarField::constant(0.0);
        for (int i = 0; i < n; ++i) sum = sum + c.v(n + i, b) * pd.ratio[static_cast<std::size_t>(i)];
        dv[static_cast<std::size_t>(b)] = sum;
    }
    pd.hP = c.h - tensor(dJ, s.field());
    pd.vP = c.v - tensor(dv, C);
    return pd;
}

Eigen::MatrixXd evaluate(EvalContext& ctx, const std::vector<VectorField>& fields) {
    const int rows = fields.empty() ? 0 : fields.front().size();
    Eigen::MatrixXd M(rows, static_cast<Eigen::Index>(fields.size()));
    for (std::size_t j = 0; j < fields.size(); ++j) M.col(static_cast<Eigen::Index>(j)) = evaluate(ctx, fields[j]);
    return M;
}

double check_s_invariance(const InvariantCandidate& P, const Spray& s, const std::vector<ChartPoint>& samples,
                          int order) {
    const ScalarField SP = s.field()(P.P());
    double worst = 0.0;
    for (const auto& p : samples) {
        EvalContext ctx(p, order);
        const double r = std::abs(ctx.value(SP)) / (1.0 + std::abs(ctx.value(P.P())));
        worst = std::max(worst, std::isnan(r) ? INFINITY : r);
    }
    return worst;
}

InvolutivityReport check_involutive(const PDistributions& pd, const std::vector<ChartPoint>& samples, int order,
                                    double rank_tol) {
    InvolutivityReport rep;
    const int n = pd.n;
    struct Pair {
        int i, j;
        VectorField bracket, closed;
    };
    std::vector<Pair> pairs;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const auto& vi = pd.v[static_cast<std::size_t>(i)];
            const auto& vj = pd.v[static_cast<std::size_t>(j)];
            pairs.push_back({i, j, lie_bracket(vi, vj),
                             pd.ratio[static_cast<std::size_t>(i)] * vj - pd.ratio[static_cast<std::size_t>(j)] * vi});
        }
    }
    for (const auto& p : samples) {
        EvalContext ctx(p, order);
        const Eigen::MatrixXd base = evaluate(ctx, pd.v);
        const int base_rank = numeric_rank(base, rank_tol).rank;
        for (const auto& pr : pairs) {
            const Eigen::VectorXd b = evaluate(ctx, pr.bracket);
            rep.closed_form_residual = std::max(rep.closed_form_residual, relative_residual(b, evaluate(ctx, pr.closed)));
            Eigen::MatrixXd aug(base.rows(), base.cols() + 1);
            aug << base, b;
            rep.max_rank_increase = std::max(rep.max_rank_increase, numeric_rank(aug, rank_tol).rank - base_rank);
        }
    }
    return rep;
}

DecompositionReport check_decompositions(const PDistributions& pd, const Spray& s, const ChartPoint& point, int order,
                                         double rank_tol) {
    const int n = pd.n;
    EvalContext ctx(point, order);
    DecompositionReport rep;
    const Eigen::MatrixXd H = evaluate(ctx, pd.h);
    const Eigen::MatrixXd V = evaluate(ctx, pd.v);
    const Eigen::VectorXd S = evaluate(ctx, s.field());
    const Eigen::VectorXd C = evaluate(ctx, liouville(n));
    const Eigen::MatrixXd HB = orthonormal_basis(H, rank_tol);
    const Eigen::MatrixXd VB = orthonormal_basis(V, rank_tol);
    rep.rank_HP = static_cast<int>(HB.cols());
    rep.rank_VP = static_cast<int>(VB.cols());
    Eigen::MatrixXd all(2 * n, HB.cols() + VB.cols() + 2);
    all << HB, S, VB, C;
    const RankInfo full = numeric_rank(all, rank_tol);
    rep.full_rank = full.rank;
    rep.singular_values = full.singular_values;
    Eigen::MatrixXd vc(2 * n, VB.cols() + 1);
    vc << VB, C;
    rep.liouville_outside_VP = numeric_rank(vc, rank_tol).rank > rep.rank_VP;
    Eigen::MatrixXd hs(2 * n, HB.cols() + 1);
    hs << HB, S;
    rep.spray_outside_HP = numeric_rank(hs, rank_tol).rank > rep.rank_HP;
    return rep;
}

double check_dr_p(const InvariantCandidate& P, const Spray& s, const Curvature& k,
                  const std::vector<ChartPoint>& samples, int order) {
    const int n = s.dimension();
    std::vector<ScalarField> terms;
    for (int j = 0; j < n; ++j) {
        for (int l = j + 1; l < n; ++l) {
            ScalarField sum = ScalarField::constant(0.0);
            for (int i = 0; i < n; ++i) sum = sum + k.R(i, j, l) * partial(P.P(), n + i);
            terms.push_back(sum);
        }
    }
    double worst = 0.0;
    for (const auto& p : samples) {
        EvalContext ctx(p, order);
        const double scale = 1.0 + std::abs(ctx.value(P.P()));
        for (const auto& t : terms) {
            const double r = std::abs(ctx.value(t)) / scale;
            worst = std::max(worst, std::isnan(r) ? INFINITY : r);
        }
    }
    return worst;
}

DegreeEstimate homogeneity_degree(const ScalarField& P, const std::vector<ChartPoint>& samples, double floor) {
    if (samples.empty()) throw PreconditionError("homogeneity degree needs samples");
    const ScalarField euler = liouville(samples.front().dimension())(P);
    std::vector<double> ratios, values, eulers;
    for (const auto& p : samples) {
        EvalContext ctx(p, 1);
        const double v = ctx.value(P);
        if (!(std::abs(v) > floor)) throw PreconditionError("homogeneity degree: |P| below the nondegeneracy floor");
        values.push_back(v);
        eulers.push_back(ctx.value(euler));
        ratios.push_back(eulers.back() / v);
    }
    std::vector<double> sorted = ratios;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t m = sorted.size();
    DegreeEstimate est;
    est.degree = m % 2 == 1 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
    for (std::size_t i = 0; i < m; ++i) {
        est.residual = std::max(est.residual, std::abs(eulers[i] - est.degree * values[i]) / (1.0 + std::abs(values[i])));
    }
    return est;
}

LemmaReport lemma_suite(const InvariantCandidate& P, const Spray& s, const std::vector<ChartPoint>& samples, int order,
                        double rank_tol) {
    const int n = s.dimension();
    const Connection c = connection(s);
    const PDistributions pd = build_p_distributions(P, s, c);
    const PDistributions pd2 = build_p_distributions(P.scaled(2.0), s, c);
    const VectorOneForm J = tangent_structure(n);
    const VectorField C = liouville(n);
    std::vector<VectorField> Jh;
    std::vector<ScalarField> vP, dP;
    for (int i = 0; i < n; ++i) {
        Jh.push_back(J.apply(pd.h[static_cast<std::size_t>(i)]));
        vP.push_back(pd.v[static_cast<std::size_t>(i)](P.P()));
        dP.push_back(c.delta[static_cast<std::size_t>(i)](P.P()));
    }
    VectorField yh = VectorField::zero(n), yv = VectorField::zero(n);
    for (int i = 0; i < n; ++i) {
        yh = yh + ScalarField::coordinate(n + i) * pd.h[static_cast<std::size_t>(i)];
        yv = yv + ScalarField::coordinate(n + i) * pd.v[static_cast<std::size_t>(i)];
    }
    std::vector<VectorField> kernel = c.delta;
    kernel.push_back(C);
    std::vector<VectorField> vP_kernel, hP_kernel;
    for (const auto& X : kernel) vP_kernel.push_back(pd.vP.apply(X));
    for (int i = 0; i < n; ++i) hP_kernel.push_back(pd.hP.apply(VectorField::coordinate(n, n + i)));
    hP_kernel.push_back(pd.hP.apply(s.field()));
    std::vector<VectorField> vP_on_coords, hP_on_delta;
    for (int i = 0; i < n; ++i) {
        vP_on_coords.push_back(pd.vP.apply(VectorField::coordinate(n, n + i)));
        hP_on_delta.push_back(pd.hP.apply(c.delta[static_cast<std::size_t>(i)]));
    }

    struct Row {
        std::map<std::string, double> r;
        DecompositionReport d;
        bool scaled_same = true;
    };
    const auto rows = map_points(samples, [&](const ChartPoint& p) {
        EvalContext ctx(p, order);
        Row row;
        auto& r = row.r;
        const double Pv = std::abs(ctx.value(P.P()));
        double vp = 0.0, dp = 0.0, jh = 0.0, ker = 0.0, gen = 0.0;
        for (int i = 0; i < n; ++i) {
            vp = std::max(vp, std::abs(ctx.value(vP[static_cast<std::size_t>(i)])) / (1.0 + Pv));
            dp = std::max(dp, std::abs(ctx.value(dP[static_cast<std::size_t>(i)])) / (1.0 + Pv));
            jh = std::max(jh, relative_residual(evaluate(ctx, Jh[static_cast<std::size_t>(i)]),
                                                evaluate(ctx, pd.v[static_cast<std::size_t>(i)])));
            gen = std::max({gen,
                            relative_residual(evaluate(ctx, vP_on_coords[static_cast<std::size_t>(i)]),
                                              evaluate(ctx, pd.v[static_cast<std::size_t>(i)])),
                            relative_residual(evaluate(ctx, hP_on_delta[static_cast<std::size_t>(i)]),
                                              evaluate(ctx, pd.h[static_cast<std::size_t>(i)]))});
        }
        for (const auto& X : vP_kernel) ker = std::max(ker, relative_residual(evaluate(ctx, X), Eigen::VectorXd::Zero(2 * n)));
        double hker = 0.0;
        for (const auto& X : hP_kernel) hker = std::max(hker, relative_residual(evaluate(ctx, X), Eigen::VectorXd::Zero(2 * n)));
        r["v_generators_annihilate_P"] = vp;
        r["horizontal_annihilates_P"] = dp;
        r["J_maps_h_generators_to_v_generators"] = jh;
        r["endomorphisms_reproduce_generators"] = gen;
        r["y_contracts_h_generators"] = relative_residual(evaluate(ctx, yh), Eigen::VectorXd::Zero(2 * n));
        r["y_contracts_v_generators"] = relative_residual(evaluate(ctx, yv), Eigen::VectorXd::Zero(2 * n));
        r["vP_kernel_contains_H_and_C"] = ker;
        r["hP_kernel_contains_V_and_S"] = hker;
        row.d = check_decompositions(pd, s, p, order, rank_tol);
        EvalContext ctx2(p, order);
        row.scaled_same = evaluate(ctx, pd.v) == evaluate(ctx2, pd2.v) && evaluate(ctx, pd.h) == evaluate(ctx2, pd2.h);
        return row;
    });

    LemmaReport rep;
    rep.min_rank_VP = rep.min_rank_HP = rep.min_full_rank = 1 << 20;
    for (const auto& row : rows) {
        for (const auto& [name, value] : row.r) rep.residuals[name] = std::max(rep.residuals[name], value);
        rep.min_rank_VP = std::min(rep.min_rank_VP, row.d.rank_VP);
        rep.max_rank_VP = std::max(rep.max_rank_VP, row.d.rank_VP);
        rep.min_rank_HP = std::min(rep.min_rank_HP, row.d.rank_HP);
        rep.max_rank_HP = std::max(rep.max_rank_HP, row.d.rank_HP);
        rep.min_full_rank = std::min(rep.min_full_rank, row.d.full_rank);
        rep.liouville_outside_VP = rep.liouville_outside_VP && row.d.liouville_outside_VP;
        rep.spray_outside_HP = rep.spray_outside_HP && row.d.spray_outside_HP;
        rep.scaled_generators_identical = rep.scaled_generators_identical && row.scaled_same;
    }
    const InvolutivityReport inv = check_involutive(pd, samples, order, rank_tol);
    rep.residuals["involutivity_closed_form"] = inv.closed_form_residual;
    rep.residuals["involutivity_rank_increase"] = inv.max_rank_increase;
    return rep;
}

}  // namespace fk
