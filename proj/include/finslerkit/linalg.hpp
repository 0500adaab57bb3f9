#pragma once

// Small dense numerics on evaluated generator matrices. Every rank decision
// normalizes columns to unit length first, since generators mix x- and
// y-scales, and then thresholds singular values relative to the largest.

#include <vector>

#include <Eigen/Dense>

namespace fk {

struct RankInfo {
    int rank = 0;
    Eigen::VectorXd singular_values;  // of the column-normalized matrix, descending
    // Smallest ratio sigma_k / (tol * sigma_max) over the singular values on
    // either side of the threshold; values near 1 mean the decision is fragile.
    double margin = 0.0;
    bool unstable = false;
};

// Drops columns with norm <= rel_floor times the largest column norm and
// scales the rest to unit length.
Eigen::MatrixXd normalize_columns(const Eigen::MatrixXd& M, double rel_floor = 0.0);

RankInfo numeric_rank(const Eigen::MatrixXd& M, double rel_tol = 1e-8);

// Orthonormal basis of the numerical column span.
Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& M, double rel_tol = 1e-8);

// Orthonormal basis of {v : A v = 0} (columns), with threshold relative to
// the largest singular value of A, or absolute when A is zero.
Eigen::MatrixXd null_space(const Eigen::MatrixXd& A, double rel_tol = 1e-8);

// Distance of v / |v| from the span of the columns of `basis` (orthonormal).
double span_residual(const Eigen::MatrixXd& basis, const Eigen::VectorXd& v);

// Intersection of subspaces of R^m given by (not necessarily orthonormal)
// spanning sets: the common null space of the stacked projectors onto their
// orthogonal complements.
Eigen::MatrixXd intersect_subspaces(const std::vector<Eigen::MatrixXd>& spans, int ambient, double rel_tol = 1e-8);

}  // namespace fk
