#pragma once

#include <map>
#include <string>
#include <vector>

#include "finslerkit/spray.hpp"

namespace fk {

struct MetricValidation {
    double min_F = 0.0;
    double homogeneity_residual = 0.0;
    double min_det_ratio = 0.0;  // |det g| / (tr g / n)^n
};

class FinslerMetric {
public:
    FinslerMetric() = default;

    // Checks positivity, 1-homogeneity and regularity at the samples.
    static FinslerMetric from_field(ScalarField F, int n, const std::vector<ChartPoint>& samples, double tol = 1e-8);
    static FinslerMetric from_expr(const Expr& F, const std::vector<ChartPoint>& samples, double tol = 1e-8);
    static FinslerMetric unchecked(ScalarField F, int n);

    int dimension() const { return n_; }
    const ScalarField& F() const { return F_; }
    const ScalarField& E() const { return E_; }
    const FieldTensor& g() const { return g_; }
    const FieldTensor& g_inverse() const { return ginv_; }
    const FieldTensor& cartan() const { return C_; }

    FinslerMetric scaled(double c) const { return unchecked(c * F_, n_); }

    // G^i = 1/2 g^{il} (y^k d_k dy_l E - d_l E)
    Spray geodesic_spray() const;

private:
    FinslerMetric(ScalarField F, int n);

    int n_ = 0;
    ScalarField F_;
    ScalarField E_;
    FieldTensor g_;
    FieldTensor ginv_;
    FieldTensor C_;
};

MetricValidation validate_metric(const FinslerMetric& m, const std::vector<ChartPoint>& samples, double tol = 1e-8);

// Inverse of a symmetric matrix of fields by elimination without pivoting.
FieldTensor symbolic_inverse(const FieldTensor& A);

// dd_J f (X, Y) = X(JY f) - Y(JX f) - (J[X, Y]) f
ScalarField dd_J(const ScalarField& f, const VectorField& X, const VectorField& Y);

// Components of i_S dd_J E - d(E - C E) on the coordinate fields.
std::vector<ScalarField> euler_lagrange_form(const FinslerMetric& m, const Spray& s);

// L_ijk = -1/2 F G^h_{ijk} dF/dy^h
FieldTensor landsberg_tensor(const FinslerMetric& m, const Spray& s);

// F |C|_g, the g-norm of the Cartan tensor made 0-homogeneous.
double cartan_norm(const FinslerMetric& m, EvalContext& ctx);

struct RiemannianTest {
    bool riemannian = false;
    double max_cartan_norm = 0.0;
};

RiemannianTest is_riemannian(const FinslerMetric& m, const std::vector<ChartPoint>& samples, double tol = 1e-7,
                             int order = 8);

// Max residuals of the metric identities (Euler-Lagrange form, S(F), g y y =
// F^2, g^{-1} g = Id, Cartan symmetry and C(y) = 0, d_h F = 0).
std::map<std::string, double> metric_residuals(const FinslerMetric& m, const Spray& s,
                                               const std::vector<ChartPoint>& samples, int order = 8);

}  // namespace fk
