#include "finslerkit/field.hpp"

#include <algorithm>
#include <cmath>

namespace fk {

namespace {

class ConstantNode final : public FieldNode {
public:
    explicit ConstantNode(double value) : value_(value) {}
    TaylorScalar compute(EvalContext& ctx, int order) const override {
        return TaylorScalar::constant(ctx.nvars(), order, value_);
    }
    std::optional<double> constant_value() const override { return value_; }

private:
    double value_;
};

class CoordinateNode final : public FieldNode {
public:
    explicit CoordinateNode(int var) : var_(var) {}
    TaylorScalar compute(EvalContext& ctx, int order) const override {
        if (var_ >= ctx.nvars()) throw DomainError("coordinate field index exceeds chart dimension");
        return TaylorScalar::variable(ctx.nvars(), order, var_, ctx.point().coordinate(var_));
    }
    int var() const { return var_; }

private:
    int var_;
};

class ExprFieldNode final : public FieldNode {
public:
    explicit ExprFieldNode(Expr expr) : expr_(std::move(expr)) {}
    TaylorScalar compute(EvalContext& ctx, int order) const override { return lift(expr_, ctx.point(), order); }

private:
    Expr expr_;
};

enum class Op { Add, Sub, Mul, Div };

class BinaryNode final : public FieldNode {
public:
    BinaryNode(Op op, ScalarField a, ScalarField b) : op_(op), a_(std::move(a)), b_(std::move(b)) {}
    TaylorScalar compute(EvalContext& ctx, int order) const override {
        const TaylorScalar a = ctx.taylor(a_, order);
        const TaylorScalar b = ctx.taylor(b_, order);
        switch (op_) {
            case Op::Add: return a + b;
            case Op::Sub: return a - b;
            case Op::Mul: return a * b;
            case Op::Div: return a / b;
        }
        return a;
    }

private:
    Op op_;
    ScalarField a_;
    ScalarField b_;
};

enum class Fn { Neg, Sqrt, Exp, Log, PowInt, PowReal };

class UnaryNode final : public FieldNode {
public:
    UnaryNode(Fn fn, ScalarField a, double parameter = 0.0) : fn_(fn), a_(std::move(a)), parameter_(parameter) {}
    TaylorScalar compute(EvalContext& ctx, int order) const override {
        const TaylorScalar a = ctx.taylor(a_, order);
        switch (fn_) {
            case Fn::Neg: return -a;
            case Fn::Sqrt: return sqrt(a);
            case Fn::Exp: return exp(a);
            case Fn::Log: return log(a);
            case Fn::PowInt: return pow_int(a, static_cast<long>(parameter_));
            case Fn::PowReal: return pow_real(a, parameter_);
        }
        return a;
    }

private:
    Fn fn_;
    ScalarField a_;
    double parameter_;
};

class PartialNode final : public FieldNode {
public:
    PartialNode(ScalarField f, int var) : f_(std::move(f)), var_(var) {}
    TaylorScalar compute(EvalContext& ctx, int order) const override {
        return ctx.taylor(f_, order + 1).derivative(var_);
    }

private:
    ScalarField f_;
    int var_;
};

template <typename NodeT, typename... Args>
ScalarField make(Args&&... args) {
    return ScalarField(std::make_shared<const NodeT>(std::forward<Args>(args)...));
}

}  // namespace

ScalarField ScalarField::constant(double value) { return make<ConstantNode>(value); }

ScalarField ScalarField::coordinate(int var) { return make<CoordinateNode>(var); }

ScalarField ScalarField::from_expr(const Expr& expr) {
    if (expr.root().kind == ExprKind::Constant) return constant(expr.root().value);
    return make<ExprFieldNode>(expr);
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
    const auto ca = a.constant_value();
    const auto cb = b.constant_value();
    if (ca && cb) return ScalarField::constant(*ca + *cb);
    if (ca && *ca == 0.0) return b;
    if (cb && *cb == 0.0) return a;
    return make<BinaryNode>(Op::Add, a, b);
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
    const auto ca = a.constant_value();
    const auto cb = b.constant_value();
    if (ca && cb) return ScalarField::constant(*ca - *cb);
    if (cb && *cb == 0.0) return a;
    if (ca && *ca == 0.0) return -b;
    if (a.same_node(b)) return ScalarField::constant(0.0);
    return make<BinaryNode>(Op::Sub, a, b);
}

ScalarField operator*(const ScalarField& a, const ScalarField& b) {
    const auto ca = a.constant_value();
    const auto cb = b.constant_value();
    if (ca && cb) return ScalarField::constant(*ca * *cb);
    if ((ca && *ca == 0.0) || (cb && *cb == 0.0)) return ScalarField::constant(0.0);
    if (ca && *ca == 1.0) return b;
    if (cb && *cb == 1.0) return a;
    if (ca && *ca == -1.0) return -b;
    if (cb && *cb == -1.0) return -a;
    return make<BinaryNode>(Op::Mul, a, b);
}

ScalarField operator/(const ScalarField& a, const ScalarField& b) {
    const auto ca = a.constant_value();
    const auto cb = b.constant_value();
    if (cb && *cb == 0.0) throw SingularDivisionError("division by the zero field");
    if (ca && *ca == 0.0) return ScalarField::constant(0.0);
    if (ca && cb) return ScalarField::constant(*ca / *cb);
    if (cb && *cb == 1.0) return a;
    return make<BinaryNode>(Op::Div, a, b);
}

ScalarField operator-(const ScalarField& a) {
    if (const auto c = a.constant_value()) return ScalarField::constant(-*c);
    return make<UnaryNode>(Fn::Neg, a);
}

ScalarField operator*(double s, const ScalarField& a) { return ScalarField::constant(s) * a; }

ScalarField sqrt(const ScalarField& a) { return make<UnaryNode>(Fn::Sqrt, a); }
ScalarField exp(const ScalarField& a) { return make<UnaryNode>(Fn::Exp, a); }
ScalarField log(const ScalarField& a) { return make<UnaryNode>(Fn::Log, a); }

ScalarField pow_int(const ScalarField& a, long k) {
    if (k == 0) return ScalarField::constant(1.0);
    if (k == 1) return a;
    return make<UnaryNode>(Fn::PowInt, a, static_cast<double>(k));
}

ScalarField pow_real(const ScalarField& a, double r) { return make<UnaryNode>(Fn::PowReal, a, r); }

ScalarField partial(const ScalarField& f, int var) {
    if (f.constant_value()) return ScalarField::constant(0.0);
    if (const auto* coord = dynamic_cast<const CoordinateNode*>(f.node().get())) {
        return ScalarField::constant(coord->var() == var ? 1.0 : 0.0);
    }
    return make<PartialNode>(f, var);
}

// ---------------------------------------------------------------------------

EvalContext::EvalContext(ChartPoint point, int max_order) : point_(std::move(point)), max_order_(max_order) {}

TaylorScalar EvalContext::taylor(const ScalarField& f, int order) {
    if (order > max_order_) {
        throw OrderBudgetError("order budget exhausted: derivative order " + std::to_string(order) +
                               " requested, configured maximum is " + std::to_string(max_order_));
    }
    const FieldNode* key = f.node().get();
    if (auto it = memo_.find(key); it != memo_.end() && it->second.value.order() >= order) {
        if (it->second.value.order() == order) return it->second.value;
        return it->second.value.truncated(order);
    }
    TaylorScalar result = f.node()->compute(*this, order);
    memo_.insert_or_assign(key, Entry{f.node(), result});
    return result;
}

// ---------------------------------------------------------------------------

VectorField VectorField::zero(int n) {
    return VectorField(std::vector<ScalarField>(static_cast<std::size_t>(2 * n), ScalarField::constant(0.0)));
}

VectorField VectorField::coordinate(int n, int var) {
    VectorField X = zero(n);
    X[var] = ScalarField::constant(1.0);
    return X;
}

bool VectorField::is_zero() const {
    return std::all_of(components_.begin(), components_.end(), [](const ScalarField& c) { return c.is_zero(); });
}

bool VectorField::same_components(const VectorField& other) const {
    if (size() != other.size()) return false;
    for (int a = 0; a < size(); ++a) {
        const auto ca = (*this)[a].constant_value();
        const auto cb = other[a].constant_value();
        if (ca && cb) {
            if (*ca != *cb) return false;
        } else if (!(*this)[a].same_node(other[a])) {
            return false;
        }
    }
    return true;
}

ScalarField VectorField::operator()(const ScalarField& f) const {
    ScalarField sum = ScalarField::constant(0.0);
    for (int b = 0; b < size(); ++b) {
        if ((*this)[b].is_zero()) continue;
        sum = sum + (*this)[b] * partial(f, b);
    }
    return sum;
}

namespace {

void check_same_size(const VectorField& a, const VectorField& b) {
    if (a.size() != b.size()) throw DomainError("vector fields of different dimensions");
}

}  // namespace

VectorField operator+(const VectorField& a, const VectorField& b) {
    check_same_size(a, b);
    VectorField r = a;
    for (int i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

VectorField operator-(const VectorField& a, const VectorField& b) {
    check_same_size(a, b);
    VectorField r = a;
    for (int i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

VectorField operator-(const VectorField& a) {
    VectorField r = a;
    for (int i = 0; i < a.size(); ++i) r[i] = -a[i];
    return r;
}

VectorField operator*(const ScalarField& f, const VectorField& X) {
    VectorField r = X;
    for (int i = 0; i < X.size(); ++i) r[i] = f * X[i];
    return r;
}

VectorField operator*(double s, const VectorField& X) { return ScalarField::constant(s) * X; }

VectorField lie_bracket(const VectorField& X, const VectorField& Y) {
    check_same_size(X, Y);
    if (X.same_components(Y)) return VectorField::zero(X.dimension());
    VectorField result = VectorField::zero(X.dimension());
    for (int a = 0; a < X.size(); ++a) result[a] = X(Y[a]) - Y(X[a]);
    return result;
}

VectorField liouville(int n) {
    VectorField C = VectorField::zero(n);
    for (int i = 0; i < n; ++i) C[n + i] = ScalarField::coordinate(n + i);
    return C;
}

Eigen::VectorXd evaluate(EvalContext& ctx, const VectorField& X) {
    Eigen::VectorXd v(X.size());
    for (int a = 0; a < X.size(); ++a) v[a] = ctx.value(X[a]);
    return v;
}

double relative_residual(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (a.size() != b.size()) throw DomainError("relative_residual: size mismatch");
    if (a.size() == 0) return 0.0;
    const double scale = 1.0 + std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
    const double r = (a - b).cwiseAbs().maxCoeff() / scale;
    return std::isnan(r) ? INFINITY : r;
}

double relative_residual(double a, double b) {
    const double r = std::abs(a - b) / (1.0 + std::max(std::abs(a), std::abs(b)));
    return std::isnan(r) ? INFINITY : r;
}

}  // namespace fk
