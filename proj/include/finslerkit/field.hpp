#pragma once

// Scalar and vector fields on the slit tangent bundle as differentiable
// programs. A field is an immutable DAG of nodes; evaluation at a chart point
// produces a TaylorScalar of any requested order, and derivative nodes simply
// request one more order from their operand. An EvalContext memoizes node
// results for one point, so shared subexpressions are evaluated once.

#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "finslerkit/chart_point.hpp"
#include "finslerkit/expr.hpp"
#include "finslerkit/taylor.hpp"

namespace fk {

class EvalContext;

class FieldNode {
public:
    virtual ~FieldNode() = default;
    virtual TaylorScalar compute(EvalContext& ctx, int order) const = 0;
    virtual std::optional<double> constant_value() const { return std::nullopt; }
};

class ScalarField {
public:
    ScalarField() : ScalarField(constant(0.0)) {}
    explicit ScalarField(std::shared_ptr<const FieldNode> node) : node_(std::move(node)) {}

    static ScalarField constant(double value);
    // Chart coordinate u_var of (x^1..x^n, y^1..y^n).
    static ScalarField coordinate(int var);
    static ScalarField from_expr(const Expr& expr);

    const std::shared_ptr<const FieldNode>& node() const { return node_; }
    std::optional<double> constant_value() const { return node_->constant_value(); }
    bool is_zero() const {
        const auto c = constant_value();
        return c && *c == 0.0;
    }
    bool same_node(const ScalarField& other) const { return node_ == other.node_; }

private:
    std::shared_ptr<const FieldNode> node_;
};

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(const ScalarField& a, const ScalarField& b);
ScalarField operator/(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a);
ScalarField operator*(double s, const ScalarField& a);
inline ScalarField operator*(const ScalarField& a, double s) { return s * a; }
inline ScalarField operator+(const ScalarField& a, double s) { return a + ScalarField::constant(s); }
inline ScalarField operator-(const ScalarField& a, double s) { return a - ScalarField::constant(s); }
inline ScalarField operator/(const ScalarField& a, double s) { return a / ScalarField::constant(s); }

ScalarField sqrt(const ScalarField& a);
ScalarField exp(const ScalarField& a);
ScalarField log(const ScalarField& a);
ScalarField pow_int(const ScalarField& a, long k);
ScalarField pow_real(const ScalarField& a, double r);

// d/du_var f
ScalarField partial(const ScalarField& f, int var);

// Evaluates fields at a single point with memoization. Not thread-safe; use
// one context per thread.
class EvalContext {
public:
    EvalContext(ChartPoint point, int max_order);

    const ChartPoint& point() const { return point_; }
    int dimension() const { return point_.dimension(); }
    int nvars() const { return 2 * point_.dimension(); }
    int max_order() const { return max_order_; }

    TaylorScalar taylor(const ScalarField& f, int order);
    double value(const ScalarField& f) { return taylor(f, 0).value(); }

private:
    struct Entry {
        std::shared_ptr<const FieldNode> owner;
        TaylorScalar value;
    };

    ChartPoint point_;
    int max_order_;
    std::unordered_map<const FieldNode*, Entry> memo_;
};

// 2n components: the first n along d/dx^i, the last n along d/dy^i.
class VectorField {
public:
    VectorField() = default;
    explicit VectorField(std::vector<ScalarField> components) : components_(std::move(components)) {}

    static VectorField zero(int n);
    // d/du_var
    static VectorField coordinate(int n, int var);

    int dimension() const { return static_cast<int>(components_.size()) / 2; }
    int size() const { return static_cast<int>(components_.size()); }
    const ScalarField& operator[](int a) const { return components_[static_cast<std::size_t>(a)]; }
    ScalarField& operator[](int a) { return components_[static_cast<std::size_t>(a)]; }
    const std::vector<ScalarField>& components() const { return components_; }
    bool is_zero() const;
    bool same_components(const VectorField& other) const;

    // X(f) = X^b d_b f
    ScalarField operator()(const ScalarField& f) const;

private:
    std::vector<ScalarField> components_;
};

VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a);
VectorField operator*(const ScalarField& f, const VectorField& X);
VectorField operator*(double s, const VectorField& X);

// [X,Y]^a = X(Y^a) - Y(X^a)
VectorField lie_bracket(const VectorField& X, const VectorField& Y);

// Liouville field C = y^i d/dy^i.
VectorField liouville(int n);

Eigen::VectorXd evaluate(EvalContext& ctx, const VectorField& X);

// Max over components of |a - b| / (1 + largest |component| of a and b).
double relative_residual(const Eigen::VectorXd& a, const Eigen::VectorXd& b);
double relative_residual(double a, double b);

}  // namespace fk
