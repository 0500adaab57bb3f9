#include "finslerkit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "finslerkit/errors.hpp"

namespace fk {

Eigen::MatrixXd normalize_columns(const Eigen::MatrixXd& M, double rel_floor) {
    double largest = 0.0;
    for (Eigen::Index j = 0; j < M.cols(); ++j) largest = std::max(largest, M.col(j).norm());
    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
        const double norm = M.col(j).norm();
        if (norm > 0.0 && norm > rel_floor * largest) keep.push_back(j);
    }
    Eigen::MatrixXd out(M.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) {
        out.col(static_cast<Eigen::Index>(k)) = M.col(keep[k]) / M.col(keep[k]).norm();
    }
    return out;
}

RankInfo numeric_rank(const Eigen::MatrixXd& M, double rel_tol) {
    RankInfo info;
    const Eigen::MatrixXd N = normalize_columns(M, rel_tol);
    if (N.cols() == 0 || N.rows() == 0) return info;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(N);
    info.singular_values = svd.singularValues();
    const double smax = info.singular_values[0];
    const double threshold = rel_tol * smax;
    double margin = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < info.singular_values.size(); ++k) {
        const double s = info.singular_values[k];
        if (s > threshold) {
            ++info.rank;
            margin = std::min(margin, s / threshold);
        } else if (s > 0.0) {
            margin = std::min(margin, threshold / s);
        }
    }
    info.margin = margin;
    info.unstable = margin < 100.0;
    return info;
}

Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& M, double rel_tol) {
    const Eigen::MatrixXd N = normalize_columns(M, rel_tol);
    if (N.cols() == 0) return Eigen::MatrixXd(M.rows(), 0);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(N, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    Eigen::Index r = 0;
    while (r < s.size() && s[r] > rel_tol * s[0]) ++r;
    return svd.matrixU().leftCols(r);
}

Eigen::MatrixXd null_space(const Eigen::MatrixXd& A, double rel_tol) {
    const Eigen::Index m = A.cols();
    if (A.rows() == 0) return Eigen::MatrixXd::Identity(m, m);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double threshold = s.size() > 0 && s[0] > 0.0 ? rel_tol * s[0] : rel_tol;
    Eigen::Index r = 0;
    while (r < s.size() && s[r] > threshold) ++r;
    return svd.matrixV().rightCols(m - r);
}

double span_residual(const Eigen::MatrixXd& basis, const Eigen::VectorXd& v) {
    const double norm = v.norm();
    if (norm == 0.0) return 0.0;
    const Eigen::VectorXd u = v / norm;
    if (basis.cols() == 0) return 1.0;
    return (u - basis * (basis.transpose() * u)).norm();
}

Eigen::MatrixXd intersect_subspaces(const std::vector<Eigen::MatrixXd>& spans, int ambient, double rel_tol) {
    if (spans.empty()) throw PreconditionError("subspace intersection needs at least one subspace");
    Eigen::MatrixXd stacked(0, ambient);
    for (const auto& span : spans) {
        if (span.rows() != ambient) throw DomainError("subspace dimension mismatch");
        const Eigen::MatrixXd Q = orthonormal_basis(span, rel_tol);
        const Eigen::MatrixXd P = Eigen::MatrixXd::Identity(ambient, ambient) - Q * Q.transpose();
        Eigen::MatrixXd grown(stacked.rows() + ambient, ambient);
        grown << stacked, P;
        stacked = std::move(grown);
    }
    // Complement projectors have singular values 0 or 1, so an absolute
    // threshold is the meaningful one here.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    Eigen::Index r = 0;
    while (r < s.size() && s[r] > std::sqrt(rel_tol)) ++r;
    return svd.matrixV().rightCols(ambient - r);
}

}  // namespace fk
