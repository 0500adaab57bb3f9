#include "finslerkit/holonomy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fk {

namespace {

struct Candidate {
    VectorField field;
    int slack;  // consecutive generations that stayed inside the span
};

}  // namespace

ClosureResult closure_rank(const Spray& s, const ChartPoint& point, const ClosureOptions& options) {
    return closure_rank(s, connection(s), point, options);
}

ClosureResult closure_rank(const Spray& s, const Connection& c, const ChartPoint& point, const ClosureOptions& options) {
    const int n = s.dimension();
    const int dim = 2 * n;
    EvalContext ctx(point, options.order);
    ClosureResult res{point, {}, {}, Eigen::MatrixXd(dim, 0), {}, 0, 0, 0, 0, false, false, 0.0, {}, {}, {}};

    auto append = [&](const VectorField& X, int depth) {
        res.fields.push_back(X);
        res.field_depth.push_back(depth);
        Eigen::MatrixXd grown(dim, res.generators.cols() + 1);
        grown << res.generators, evaluate(ctx, X);
        res.generators = std::move(grown);
    };

    std::vector<Candidate> frontier;
    for (const auto& d : c.delta) {
        append(d, 0);
        frontier.push_back({d, 0});
    }
    RankInfo info = numeric_rank(res.generators, options.rank_tol);
    res.rank_sequence.push_back(info.rank);
    res.horizontal_rank = info.rank;

    int depth = 0;
    while (!frontier.empty() && info.rank < dim) {
        if (depth == options.max_depth) {
            res.depth_cap_reached = true;
            break;
        }
        ++depth;
        std::vector<Candidate> next;
        for (const auto& parent : frontier) {
            for (const auto& d : c.delta) {
                const VectorField B = lie_bracket(d, parent.field);
                if (B.is_zero()) continue;
                const int before = info.rank;
                append(B, depth);
                info = numeric_rank(res.generators, options.rank_tol);
                if (info.rank > before) {
                    next.push_back({B, 0});
                } else if (parent.slack + 1 <= 1) {
                    next.push_back({B, parent.slack + 1});
                }
            }
        }
        frontier = std::move(next);
        if (info.rank > res.rank_sequence.back()) res.stabilization_depth = depth;
        res.rank_sequence.push_back(info.rank);
    }

    res.final_rank = info.rank;
    res.singular_values = info.singular_values;
    res.rank_margin = info.margin;
    res.unstable = info.unstable;
    res.span_basis = orthonormal_basis(res.generators, options.rank_tol);
    const Eigen::MatrixXd V = evaluate(ctx, c.v);
    const Eigen::MatrixXd projected = V * res.span_basis;
    // Vertical components of a unit basis are either O(1) or rounding noise.
    Eigen::MatrixXd kept(dim, 0);
    for (Eigen::Index j = 0; j < projected.cols(); ++j) {
        if (projected.col(j).norm() > 1e-10) {
            Eigen::MatrixXd grown(dim, kept.cols() + 1);
            grown << kept, projected.col(j);
            kept = std::move(grown);
        }
    }
    res.vertical_basis = orthonormal_basis(kept, options.rank_tol);
    res.vertical_rank = static_cast<int>(res.vertical_basis.cols());
    return res;
}

HolonomySummary holonomy_analysis(const Spray& s, const std::vector<ChartPoint>& samples, const ClosureOptions& options,
                                  Exec exec) {
    const Connection c = connection(s);
    HolonomySummary sum;
    sum.per_point = map_points(samples, [&](const ChartPoint& p) { return closure_rank(s, c, p, options); }, exec);
    if (sum.per_point.empty()) return sum;
    sum.rank_sequence = sum.per_point.front().rank_sequence;
    for (const auto& r : sum.per_point) {
        sum.final_rank = std::max(sum.final_rank, r.final_rank);
        sum.vertical_rank = std::max(sum.vertical_rank, r.vertical_rank);
        sum.regular = sum.regular && r.final_rank == sum.per_point.front().final_rank;
        sum.any_unstable = sum.any_unstable || r.unstable;
        sum.depth_cap_reached = sum.depth_cap_reached || r.depth_cap_reached;
    }
    sum.ms_estimate = 2 * s.dimension() - sum.final_rank;
    return sum;
}

InclusionResult check_vhol_in_vp(const Spray& s, const InvariantCandidate& P, const ChartPoint& point,
                                 const ClosureOptions& options, double invariance_tol) {
    const Connection c = connection(s);
    const ClosureResult closure = closure_rank(s, c, point, options);
    EvalContext ctx(point, options.order);
    const double scale = 1.0 + std::abs(ctx.value(P.P()));
    for (std::size_t k = 0; k < closure.fields.size(); ++k) {
        const double r = std::abs(ctx.value(closure.fields[k](P.P()))) / scale;
        if (!(r < invariance_tol)) {
            std::ostringstream msg;
            msg << "candidate is not holonomy invariant: holonomy field " << k << " (depth " << closure.field_depth[k]
                << ") gives residual " << r;
            throw PreconditionError(msg.str());
        }
    }
    const PDistributions pd = build_p_distributions(P, s, c);
    const Eigen::MatrixXd VP = orthonormal_basis(evaluate(ctx, pd.v), options.rank_tol);
    InclusionResult res;
    res.rank_vhol = closure.vertical_rank;
    res.rank_vp = static_cast<int>(VP.cols());
    for (Eigen::Index j = 0; j < closure.vertical_basis.cols(); ++j) {
        res.residual = std::max(res.residual, span_residual(VP, closure.vertical_basis.col(j)));
    }
    for (Eigen::Index j = 0; j < VP.cols(); ++j) {
        res.reverse_residual = std::max(res.reverse_residual, span_residual(closure.vertical_basis, VP.col(j)));
    }
    Eigen::MatrixXd aug(VP.rows(), VP.cols() + closure.vertical_basis.cols());
    aug << VP, closure.vertical_basis;
    res.included = numeric_rank(aug, options.rank_tol).rank == res.rank_vp;
    res.equal = res.included && res.rank_vhol == res.rank_vp;
    return res;
}

IntersectionResult intersect_vf(const Spray& s, const std::vector<FinslerMetric>& metrics, const ChartPoint& point,
                                const std::vector<ChartPoint>& samples, const ClosureOptions& options,
                                double spray_tol) {
    if (metrics.empty()) throw PreconditionError("V_F intersection needs at least one metric");
    const int n = s.dimension();
    std::vector<Spray> sprays;
    for (const auto& m : metrics) sprays.push_back(m.geodesic_spray());
    std::vector<ChartPoint> check = samples;
    check.push_back(point);
    for (std::size_t k = 0; k < metrics.size(); ++k) {
        for (std::size_t p = 0; p < check.size(); ++p) {
            EvalContext ctx(check[p], options.order);
            for (int i = 0; i < n; ++i) {
                const double r = relative_residual(ctx.value(sprays[k].G(i)), ctx.value(s.G(i)));
                if (!(r < spray_tol)) {
                    std::ostringstream msg;
                    msg << "metric " << k << " does not generate the given spray: G" << (i + 1) << " residual " << r;
                    throw PreconditionError(msg.str());
                }
            }
        }
    }
    const Connection c = connection(s);
    EvalContext ctx(point, options.order);
    IntersectionResult res;
    std::vector<Eigen::MatrixXd> spans;
    for (const auto& m : metrics) {
        const PDistributions pd = build_p_distributions(InvariantCandidate(m.F(), 1.0), s, c);
        const Eigen::MatrixXd V = evaluate(ctx, pd.v);
        res.vf_ranks.push_back(numeric_rank(V, options.rank_tol).rank);
        spans.push_back(V);
    }
    res.intersection_basis = intersect_subspaces(spans, 2 * n, options.rank_tol);
    res.intersection_rank = static_cast<int>(res.intersection_basis.cols());
    res.vhol_rank = closure_rank(s, c, point, options).vertical_rank;
    res.matches_vhol = res.intersection_rank == res.vhol_rank;
    return res;
}

}  // namespace fk
