#pragma once

// Sprays S = y^i d_i - 2 G^i d/dy^i and their canonical geometry.

#include <map>
#include <string>
#include <vector>

#include "finslerkit/forms.hpp"
#include "finslerkit/tensor.hpp"

namespace fk {

struct HomogeneityReport {
    double max_residual = 0.0;
    int worst_point = -1;
};

class Spray {
public:
    Spray() = default;

    // Validates 2-homogeneity C(G^i) = 2 G^i at every sample; throws
    // HomogeneityError naming the worst point otherwise.
    static Spray from_coefficients(std::vector<ScalarField> G, const std::vector<ChartPoint>& samples,
                                   double tol = 1e-8);
    static Spray from_exprs(const std::vector<Expr>& exprs, const std::vector<ChartPoint>& samples,
                            double tol = 1e-8);
    static Spray unchecked(std::vector<ScalarField> G);
    static Spray flat(int n);

    int dimension() const { return static_cast<int>(G_.size()); }
    const ScalarField& G(int i) const { return G_[static_cast<std::size_t>(i)]; }
    const std::vector<ScalarField>& coefficients() const { return G_; }
    const VectorField& field() const { return S_; }

private:
    explicit Spray(std::vector<ScalarField> G);

    std::vector<ScalarField> G_;
    VectorField S_;
};

HomogeneityReport homogeneity_residual(const ScalarField& f, double degree, const std::vector<ChartPoint>& samples,
                                       int order = 8);

struct Connection {
    int n = 0;
    FieldTensor N;                    // N(i, j) = dG^i/dy^j
    std::vector<VectorField> delta;   // delta_i = d_i - N^j_i d/dy^j
    VectorOneForm h;
    VectorOneForm v;
};

Connection connection(const Spray& s);

struct Curvature {
    FieldTensor R;       // R(i, j, k) = R^i_{jk} = delta_j N^i_k - delta_k N^i_j
    FieldTensor Phi;     // Phi(i, j) = 2 d_j G^i - S(N^i_j) - N^i_k N^k_j
    VectorTwoForm R_form;
    VectorOneForm Phi_form;
};

Curvature curvature(const Spray& s, const Connection& c);

struct BerwaldTensors {
    FieldTensor G1;  // G^i_j
    FieldTensor G2;  // G^i_{jk}
    FieldTensor G3;  // G^i_{jkl}
};

BerwaldTensors berwald_y_derivatives(const Spray& s);

// Max relative residual of each structural identity over the samples.
std::map<std::string, double> structure_residuals(const Spray& s, const std::vector<ChartPoint>& samples,
                                                  int order = 8);

double relative_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace fk
