#pragma once

// Truncated multivariate Taylor arithmetic.
//
// A TaylorScalar of order d in m variables stores the coefficients
// c_alpha = (d^alpha f)(p) / alpha! for every multi-index |alpha| <= d.
// Multi-indices are enumerated by total degree first, so the coefficient table
// of order d is a prefix of the table of any higher order, and truncation is a
// resize. All operations are "graded causal": a coefficient of degree k only
// reads coefficients of degree <= k, which makes truncation of an order d+1
// result bitwise equal to the order d result.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "finslerkit/chart_point.hpp"
#include "finslerkit/expr.hpp"

namespace fk {

using MultiIndex = std::vector<int>;

class MultiIndexTable {
public:
    struct ProductTerm {
        std::uint32_t lhs;
        std::uint32_t rhs;
    };

    MultiIndexTable(int nvars, int order);

    int nvars() const { return nvars_; }
    int order() const { return order_; }
    std::size_t size() const { return degree_.size(); }

    // Number of coefficients of total degree <= d (d <= order()).
    std::size_t size_up_to(int d) const { return degree_start_[d + 1]; }

    const int* exponents(std::size_t i) const { return &exponents_[i * nvars_]; }
    int degree(std::size_t i) const { return degree_[i]; }

    // Index of the multi-index, or -1 when its degree exceeds order().
    long index_of(std::span<const int> alpha) const;
    long index_of_unit(int var) const { return order_ >= 1 ? static_cast<long>(1 + var) : -1; }

    // Index of alpha_i + e_var, or -1 past the table.
    long raised(int var, std::size_t i) const { return raised_[static_cast<std::size_t>(var) * size() + i]; }

    // Pairs (i, j) with alpha_i + alpha_j = alpha_k, grouped by k.
    std::span<const ProductTerm> product_terms(std::size_t k) const {
        return {product_terms_.data() + product_start_[k], product_terms_.data() + product_start_[k + 1]};
    }

private:
    std::uint64_t key(const int* alpha) const;

    int nvars_;
    int order_;
    std::vector<int> exponents_;
    std::vector<int> degree_;
    std::vector<std::size_t> degree_start_;
    std::vector<long> raised_;
    std::vector<ProductTerm> product_terms_;
    std::vector<std::size_t> product_start_;
    std::vector<std::pair<std::uint64_t, std::uint32_t>> sorted_keys_;
};

// Shared, immutable, thread-safe registry of index tables.
const MultiIndexTable& multi_index_table(int nvars, int order);

class TaylorScalar {
public:
    TaylorScalar() = default;

    static TaylorScalar constant(int nvars, int order, double value);
    // The coordinate function u_var expanded at `value`.
    static TaylorScalar variable(int nvars, int order, int var, double value);

    int nvars() const { return table_ ? table_->nvars() : 0; }
    int order() const { return order_; }
    std::size_t size() const { return coeffs_.size(); }

    double value() const { return coeffs_[0]; }
    double coefficient(std::size_t i) const { return coeffs_[i]; }
    double coefficient(std::span<const int> alpha) const;
    std::span<const double> coefficients() const { return coeffs_; }
    const MultiIndexTable& table() const { return *table_; }

    // alpha! * coefficient(alpha), i.e. the partial derivative d^alpha f(p).
    double partial(std::span<const int> alpha) const;

    TaylorScalar truncated(int order) const;

    // d/du_var; the result has order() - 1.
    TaylorScalar derivative(int var) const;

    TaylorScalar operator-() const;
    TaylorScalar& operator+=(const TaylorScalar& other);
    TaylorScalar& operator-=(const TaylorScalar& other);
    TaylorScalar& operator*=(double s);

    friend TaylorScalar operator+(TaylorScalar a, const TaylorScalar& b) { return a += b; }
    friend TaylorScalar operator-(TaylorScalar a, const TaylorScalar& b) { return a -= b; }
    friend TaylorScalar operator*(TaylorScalar a, double s) { return a *= s; }
    friend TaylorScalar operator*(double s, TaylorScalar a) { return a *= s; }
    friend TaylorScalar operator*(const TaylorScalar& a, const TaylorScalar& b);
    friend TaylorScalar operator/(const TaylorScalar& a, const TaylorScalar& b);

    friend TaylorScalar sqrt(const TaylorScalar& a);
    friend TaylorScalar exp(const TaylorScalar& a);
    friend TaylorScalar log(const TaylorScalar& a);
    friend TaylorScalar sin(const TaylorScalar& a);
    friend TaylorScalar cos(const TaylorScalar& a);
    friend TaylorScalar tan(const TaylorScalar& a);
    friend TaylorScalar atan(const TaylorScalar& a);
    friend TaylorScalar pow_int(const TaylorScalar& a, long k);
    friend TaylorScalar pow_real(const TaylorScalar& a, double r);
    // exp(b log a), requires a > 0.
    friend TaylorScalar pow_general(const TaylorScalar& a, const TaylorScalar& b);

    // f(a) given the univariate Taylor coefficients f^(k)(a0)/k!, k = 0..order().
    friend TaylorScalar compose(const TaylorScalar& a, std::span<const double> univariate);

private:
    TaylorScalar(const MultiIndexTable* table, int order, std::vector<double> coeffs)
        : table_(table), order_(order), coeffs_(std::move(coeffs)) {}

    static TaylorScalar zeros_like(const TaylorScalar& a, int order);

    const MultiIndexTable* table_ = nullptr;
    int order_ = 0;
    std::vector<double> coeffs_;
};

// Factorial of a multi-index.
double multi_factorial(std::span<const int> alpha);

// Exact Taylor expansion of a chart expression at `point` in the 2n chart
// variables (x^1..x^n, y^1..y^n).
TaylorScalar lift(const Expr& expr, const ChartPoint& point, int order);

// Expansion of a curve expression in its single variable t.
TaylorScalar lift_curve(const Expr& expr, double t, int order);

}  // namespace fk
