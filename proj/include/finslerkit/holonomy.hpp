#pragma once

// Pointwise rank of the holonomy distribution: the span of the horizontal
// fields delta_i and their iterated brackets.

#include <vector>

#include "finslerkit/batch.hpp"
#include "finslerkit/finsler_metric.hpp"
#include "finslerkit/invariant.hpp"

namespace fk {

struct ClosureOptions {
    int max_depth = 4;
    int order = 8;
    double rank_tol = 1e-8;
};

struct ClosureResult {
    ChartPoint point;
    std::vector<VectorField> fields;   // every generated field, in generation order
    std::vector<int> field_depth;
    Eigen::MatrixXd generators;        // evaluated fields as columns
    std::vector<int> rank_sequence;    // rank after each depth, starting at depth 0
    int final_rank = 0;
    int horizontal_rank = 0;
    int vertical_rank = 0;
    int stabilization_depth = 0;
    bool depth_cap_reached = false;
    bool unstable = false;
    double rank_margin = 0.0;
    Eigen::VectorXd singular_values;
    Eigen::MatrixXd span_basis;        // orthonormal, 2n x final_rank
    Eigen::MatrixXd vertical_basis;    // orthonormal basis of v(span), 2n x vertical_rank

    int ms_estimate() const { return static_cast<int>(generators.rows()) - final_rank; }
};

ClosureResult closure_rank(const Spray& s, const Connection& c, const ChartPoint& point,
                           const ClosureOptions& options = {});
ClosureResult closure_rank(const Spray& s, const ChartPoint& point, const ClosureOptions& options = {});

struct HolonomySummary {
    std::vector<ClosureResult> per_point;
    std::vector<int> rank_sequence;  // at the first sample
    int final_rank = 0;              // maximum over samples
    int vertical_rank = 0;
    int ms_estimate = 0;
    bool regular = true;             // identical final rank at every sample
    bool any_unstable = false;
    bool depth_cap_reached = false;
};

HolonomySummary holonomy_analysis(const Spray& s, const std::vector<ChartPoint>& samples,
                                  const ClosureOptions& options = {}, Exec exec = Exec::Parallel);

struct InclusionResult {
    bool included = false;
    bool equal = false;            // equal ranks and inclusion both ways
    double residual = 0.0;         // worst distance of a V_Hol basis vector from V_P
    double reverse_residual = 0.0; // worst distance of a V_P basis vector from V_Hol
    int rank_vhol = 0;
    int rank_vp = 0;
};

// V_Hol contained in V_P at the point. Throws PreconditionError when P is
// not annihilated by the horizontal fields and the closure fields.
InclusionResult check_vhol_in_vp(const Spray& s, const InvariantCandidate& P, const ChartPoint& point,
                                 const ClosureOptions& options = {}, double invariance_tol = 1e-8);

struct IntersectionResult {
    std::vector<int> vf_ranks;
    int intersection_rank = 0;
    int vhol_rank = 0;
    bool matches_vhol = false;
    Eigen::MatrixXd intersection_basis;
};

// Intersection of the V_F of metrics sharing the geodesic spray s. Throws
// PreconditionError for an empty list or a metric whose spray differs from s
// at any sample.
IntersectionResult intersect_vf(const Spray& s, const std::vector<FinslerMetric>& metrics, const ChartPoint& point,
                                const std::vector<ChartPoint>& samples, const ClosureOptions& options = {},
                                double spray_tol = 1e-8);

}  // namespace fk
