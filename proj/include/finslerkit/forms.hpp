#pragma once

// Vector-valued 1- and 2-forms on the slit tangent bundle, stored by their
// action on coordinate fields, plus the Froelicher-Nijenhuis brackets used by
// the spray identities.

#include <vector>

#include <Eigen/Dense>

#include "finslerkit/field.hpp"

namespace fk {

// L = L^a_b d_a (x) du^b; column b is L(d_b).
class VectorOneForm {
public:
    VectorOneForm() = default;
    explicit VectorOneForm(std::vector<VectorField> columns);

    static VectorOneForm zero(int n);
    static VectorOneForm identity(int n);

    int dimension() const { return static_cast<int>(columns_.size()) / 2; }
    int size() const { return static_cast<int>(columns_.size()); }
    const VectorField& column(int b) const { return columns_[static_cast<std::size_t>(b)]; }
    const ScalarField& operator()(int a, int b) const { return columns_[static_cast<std::size_t>(b)][a]; }

    VectorField apply(const VectorField& X) const;

    friend VectorOneForm operator+(const VectorOneForm& K, const VectorOneForm& L);
    friend VectorOneForm operator-(const VectorOneForm& K, const VectorOneForm& L);
    friend VectorOneForm operator*(double s, const VectorOneForm& L);
    // Composition (K o L)(X) = K(L(X)).
    friend VectorOneForm compose(const VectorOneForm& K, const VectorOneForm& L);

private:
    std::vector<VectorField> columns_;
};

// omega (x) X : Y -> omega(Y) X, with the 1-form given by its components.
VectorOneForm tensor(const std::vector<ScalarField>& one_form, const VectorField& X);

// Skew-symmetric vector 2-form, stored as T(d_a, d_b).
class VectorTwoForm {
public:
    VectorTwoForm() = default;
    explicit VectorTwoForm(int n);

    int dimension() const { return n_; }
    const VectorField& on_coordinates(int a, int b) const { return values_[static_cast<std::size_t>(a * 2 * n_ + b)]; }
    // Sets T(d_a, d_b) and T(d_b, d_a) = -T(d_a, d_b).
    void set(int a, int b, const VectorField& value);

    VectorField apply(const VectorField& X, const VectorField& Y) const;

private:
    int n_ = 0;
    std::vector<VectorField> values_;
};

// Almost-tangent structure J = d/dy^i (x) dx^i.
VectorOneForm tangent_structure(int n);

// [L, X](Y) = [L Y, X] - L [Y, X]
VectorOneForm fn_bracket_vf(const VectorOneForm& L, const VectorField& X);

// Bracket of two vector 1-forms, evaluated on coordinate pairs.
VectorTwoForm fn_bracket_11(const VectorOneForm& K, const VectorOneForm& L);

Eigen::MatrixXd evaluate(EvalContext& ctx, const VectorOneForm& L);

}  // namespace fk
