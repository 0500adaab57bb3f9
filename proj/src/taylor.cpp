#include "finslerkit/taylor.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "finslerkit/real_ops.hpp"

namespace fk {

// ---------------------------------------------------------------------------
// MultiIndexTable
// ---------------------------------------------------------------------------

MultiIndexTable::MultiIndexTable(int nvars, int order) : nvars_(nvars), order_(order) {
    if (nvars < 1 || order < 0) throw OrderBudgetError("multi-index table: invalid size");

    // Enumerate by degree; within a degree, lexicographically descending in
    // the exponent vector. The enumeration of degree <= d never depends on order.
    std::vector<int> alpha(nvars, 0);
    degree_start_.push_back(0);
    for (int d = 0; d <= order; ++d) {
        // Generate all compositions of d into nvars parts, lexicographically descending.
        std::vector<int> current(nvars, 0);
        current[0] = d;
        while (true) {
            exponents_.insert(exponents_.end(), current.begin(), current.end());
            degree_.push_back(d);
            // Next composition in descending lexicographic order.
            int pivot = nvars - 2;
            while (pivot >= 0 && current[pivot] == 0) --pivot;
            if (pivot < 0) break;
            current[pivot] -= 1;
            int rest = 0;
            for (int v = pivot + 1; v < nvars; ++v) {
                rest += current[v];
                current[v] = 0;
            }
            current[pivot + 1] = rest + 1;
        }
        degree_start_.push_back(degree_.size());
    }

    const std::size_t n = size();
    sorted_keys_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) sorted_keys_.emplace_back(key(exponents(i)), static_cast<std::uint32_t>(i));
    std::sort(sorted_keys_.begin(), sorted_keys_.end());

    raised_.assign(static_cast<std::size_t>(nvars) * n, -1);
    std::vector<int> work(nvars);
    for (int v = 0; v < nvars; ++v) {
        for (std::size_t i = 0; i < n; ++i) {
            if (degree_[i] >= order) continue;
            std::copy(exponents(i), exponents(i) + nvars, work.begin());
            work[v] += 1;
            raised_[static_cast<std::size_t>(v) * n + i] = index_of(work);
        }
    }

    // Product pairs, grouped by result index in increasing order; inside a group
    // ordered by lhs index. Group contents do not depend on the table order.
    std::vector<std::vector<ProductTerm>> groups(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j_end = size_up_to(order - degree_[i]);
        for (std::size_t j = 0; j < j_end; ++j) {
            for (int v = 0; v < nvars; ++v) work[v] = exponents(i)[v] + exponents(j)[v];
            const long k = index_of(work);
            groups[static_cast<std::size_t>(k)].push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
        }
    }
    product_start_.push_back(0);
    for (auto& group : groups) {
        product_terms_.insert(product_terms_.end(), group.begin(), group.end());
        product_start_.push_back(product_terms_.size());
    }
}

std::uint64_t MultiIndexTable::key(const int* alpha) const {
    std::uint64_t k = 0;
    for (int v = 0; v < nvars_; ++v) k = k * static_cast<std::uint64_t>(order_ + 1) + static_cast<std::uint64_t>(alpha[v]);
    return k;
}

long MultiIndexTable::index_of(std::span<const int> alpha) const {
    if (static_cast<int>(alpha.size()) != nvars_) return -1;
    int total = 0;
    for (int a : alpha) {
        if (a < 0) return -1;
        total += a;
    }
    if (total > order_) return -1;
    const std::uint64_t k = key(alpha.data());
    const auto it = std::lower_bound(sorted_keys_.begin(), sorted_keys_.end(), std::make_pair(k, std::uint32_t{0}));
    if (it == sorted_keys_.end() || it->first != k) return -1;
    return it->second;
}

const MultiIndexTable& multi_index_table(int nvars, int order) {
    static std::mutex mutex;
    static std::map<int, std::vector<std::unique_ptr<MultiIndexTable>>> registry;
    std::lock_guard<std::mutex> lock(mutex);
    auto& tables = registry[nvars];
    if (!tables.empty() && tables.back()->order() >= order) return *tables.back();
    // Grow geometrically; older tables stay alive for scalars that still use them.
    const int capacity = std::max(order, tables.empty() ? 8 : tables.back()->order() + 2);
    tables.push_back(std::make_unique<MultiIndexTable>(nvars, capacity));
    return *tables.back();
}

double multi_factorial(std::span<const int> alpha) {
    double f = 1.0;
    for (int a : alpha) {
        for (int k = 2; k <= a; ++k) f *= k;
    }
    return f;
}

// ---------------------------------------------------------------------------
// TaylorScalar
// ---------------------------------------------------------------------------

TaylorScalar TaylorScalar::constant(int nvars, int order, double value) {
    const MultiIndexTable& table = multi_index_table(nvars, order);
    std::vector<double> c(table.size_up_to(order), 0.0);
    c[0] = value;
    return TaylorScalar(&table, order, std::move(c));
}

TaylorScalar TaylorScalar::variable(int nvars, int order, int var, double value) {
    TaylorScalar result = constant(nvars, order, value);
    if (order >= 1) result.coeffs_[static_cast<std::size_t>(result.table_->index_of_unit(var))] = 1.0;
    return result;
}

TaylorScalar TaylorScalar::zeros_like(const TaylorScalar& a, int order) {
    return TaylorScalar(a.table_, order, std::vector<double>(a.table_->size_up_to(order), 0.0));
}

double TaylorScalar::coefficient(std::span<const int> alpha) const {
    int total = 0;
    for (int a : alpha) total += a;
    if (total > order_) {
        throw OrderBudgetError("coefficient of degree " + std::to_string(total) + " exceeds truncation order " +
                               std::to_string(order_));
    }
    const long i = table_->index_of(alpha);
    if (i < 0) throw OrderBudgetError("invalid multi-index");
    return coeffs_[static_cast<std::size_t>(i)];
}

double TaylorScalar::partial(std::span<const int> alpha) const {
    return multi_factorial(alpha) * coefficient(alpha);
}

TaylorScalar TaylorScalar::truncated(int order) const {
    if (order > order_) {
        throw OrderBudgetError("cannot raise truncation order from " + std::to_string(order_) + " to " +
                               std::to_string(order));
    }
    std::vector<double> c(coeffs_.begin(), coeffs_.begin() + static_cast<std::ptrdiff_t>(table_->size_up_to(order)));
    return TaylorScalar(table_, order, std::move(c));
}

TaylorScalar TaylorScalar::derivative(int var) const {
    if (order_ < 1) throw OrderBudgetError("derivative of an order-0 Taylor model");
    TaylorScalar result = zeros_like(*this, order_ - 1);
    for (std::size_t i = 0; i < result.coeffs_.size(); ++i) {
        const long up = table_->raised(var, i);
        result.coeffs_[i] = (table_->exponents(i)[var] + 1) * coeffs_[static_cast<std::size_t>(up)];
    }
    return result;
}

namespace {

// Brings two operands to a common order (the smaller one).
void align(TaylorScalar& a, TaylorScalar& b) {
    if (a.order() > b.order()) a = a.truncated(b.order());
    if (b.order() > a.order()) b = b.truncated(a.order());
}

void check_compatible(const TaylorScalar& a, const TaylorScalar& b) {
    if (a.nvars() != b.nvars()) throw DomainError("Taylor operands have different variable counts");
}

}  // namespace

TaylorScalar TaylorScalar::operator-() const {
    TaylorScalar result(*this);
    for (double& c : result.coeffs_) c = -c;
    return result;
}

TaylorScalar& TaylorScalar::operator+=(const TaylorScalar& other) {
    check_compatible(*this, other);
    if (other.order_ < order_) *this = truncated(other.order_);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
    return *this;
}

TaylorScalar& TaylorScalar::operator-=(const TaylorScalar& other) {
    check_compatible(*this, other);
    if (other.order_ < order_) *this = truncated(other.order_);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
    return *this;
}

TaylorScalar& TaylorScalar::operator*=(double s) {
    for (double& c : coeffs_) c *= s;
    return *this;
}

TaylorScalar operator*(const TaylorScalar& a_in, const TaylorScalar& b_in) {
    check_compatible(a_in, b_in);
    TaylorScalar a = a_in;
    TaylorScalar b = b_in;
    align(a, b);
    const MultiIndexTable& table = a.table_->order() >= b.table_->order() ? *a.table_ : *b.table_;
    TaylorScalar result(&table, a.order_, std::vector<double>(a.coeffs_.size(), 0.0));
    for (std::size_t k = 0; k < result.coeffs_.size(); ++k) {
        double sum = 0.0;
        for (const auto& term : table.product_terms(k)) sum += a.coeffs_[term.lhs] * b.coeffs_[term.rhs];
        result.coeffs_[k] = sum;
    }
    return result;
}

TaylorScalar operator/(const TaylorScalar& a_in, const TaylorScalar& b_in) {
    check_compatible(a_in, b_in);
    TaylorScalar a = a_in;
    TaylorScalar b = b_in;
    align(a, b);
    const double b0 = b.coeffs_[0];
    if (!(std::abs(b0) > real_ops::kSingularDivisor)) {
        throw SingularDivisionError("division by a Taylor model with vanishing value");
    }
    const MultiIndexTable& table = a.table_->order() >= b.table_->order() ? *a.table_ : *b.table_;
    TaylorScalar result(&table, a.order_, std::vector<double>(a.coeffs_.size(), 0.0));
    for (std::size_t k = 0; k < result.coeffs_.size(); ++k) {
        double sum = a.coeffs_[k];
        for (const auto& term : table.product_terms(k)) {
            if (term.rhs == 0) continue;
            sum -= result.coeffs_[term.lhs] * b.coeffs_[term.rhs];
        }
        result.coeffs_[k] = sum / b0;
    }
    return result;
}

TaylorScalar compose(const TaylorScalar& a, std::span<const double> univariate) {
    const int d = a.order_;
    // u~ = a - a0 has no constant term; Horner in u~.
    TaylorScalar shifted = a;
    shifted.coeffs_[0] = 0.0;
    TaylorScalar result = TaylorScalar::zeros_like(a, d);
    result.coeffs_[0] = univariate[static_cast<std::size_t>(d)];
    for (int k = d - 1; k >= 0; --k) {
        result = result * shifted;
        result.coeffs_[0] += univariate[static_cast<std::size_t>(k)];
    }
    return result;
}

namespace {

std::vector<double> power_series(double a0, double r, double c0, int d) {
    std::vector<double> c(static_cast<std::size_t>(d) + 1);
    c[0] = c0;
    for (int k = 1; k <= d; ++k) c[k] = c[k - 1] * (r - k + 1) / (k * a0);
    return c;
}

}  // namespace

TaylorScalar sqrt(const TaylorScalar& a) {
    const double a0 = a.value();
    if (a0 < 0.0 || (a0 == 0.0 && a.order() > 0)) throw DomainError("sqrt at a non-positive value");
    if (a.order() == 0) return TaylorScalar::constant(a.nvars(), 0, std::sqrt(a0));
    return compose(a, power_series(a0, 0.5, std::sqrt(a0), a.order()));
}

TaylorScalar exp(const TaylorScalar& a) {
    const int d = a.order();
    std::vector<double> c(static_cast<std::size_t>(d) + 1);
    c[0] = std::exp(a.value());
    if (!std::isfinite(c[0])) throw DomainError("exp overflow");
    for (int k = 1; k <= d; ++k) c[k] = c[k - 1] / k;
    return compose(a, c);
}

TaylorScalar log(const TaylorScalar& a) {
    const double a0 = a.value();
    if (!(a0 > 0.0)) throw DomainError("log of a non-positive value");
    const int d = a.order();
    std::vector<double> c(static_cast<std::size_t>(d) + 1);
    c[0] = std::log(a0);
    double inv_pow = 1.0;
    for (int k = 1; k <= d; ++k) {
        inv_pow /= a0;
        c[k] = ((k % 2) ? 1.0 : -1.0) * inv_pow / k;
    }
    return compose(a, c);
}

namespace {

std::vector<double> trig_series(double a0, int d, bool cosine) {
    const double s = std::sin(a0);
    const double co = std::cos(a0);
    const double cycle_sin[4] = {s, co, -s, -co};
    std::vector<double> c(static_cast<std::size_t>(d) + 1);
    double factorial = 1.0;
    for (int k = 0; k <= d; ++k) {
        if (k > 0) factorial *= k;
        c[k] = cycle_sin[(k + (cosine ? 1 : 0)) % 4] / factorial;
    }
    return c;
}

}  // namespace

TaylorScalar sin(const TaylorScalar& a) { return compose(a, trig_series(a.value(), a.order(), false)); }

TaylorScalar cos(const TaylorScalar& a) { return compose(a, trig_series(a.value(), a.order(), true)); }

TaylorScalar tan(const TaylorScalar& a) {
    const int d = a.order();
    std::vector<double> c(static_cast<std::size_t>(d) + 1, 0.0);
    c[0] = std::tan(a.value());
    if (!std::isfinite(c[0]) || std::abs(std::cos(a.value())) <= real_ops::kSingularDivisor) {
        throw DomainError("tan at a pole");
    }
    // tan' = 1 + tan^2
    for (int k = 0; k < d; ++k) {
        double sum = k == 0 ? 1.0 : 0.0;
        for (int i = 0; i <= k; ++i) sum += c[i] * c[k - i];
        c[k + 1] = sum / (k + 1);
    }
    return compose(a, c);
}

TaylorScalar atan(const TaylorScalar& a) {
    const int d = a.order();
    const double a0 = a.value();
    // atan' (a0 + t) = 1 / (b0 + b1 t + t^2)
    const double b0 = 1.0 + a0 * a0;
    const double b1 = 2.0 * a0;
    std::vector<double> q(static_cast<std::size_t>(std::max(d, 1)), 0.0);
    if (!q.empty()) q[0] = 1.0 / b0;
    for (std::size_t k = 1; k < q.size(); ++k) {
        q[k] = -(b1 * q[k - 1] + (k >= 2 ? q[k - 2] : 0.0)) / b0;
    }
    std::vector<double> c(static_cast<std::size_t>(d) + 1, 0.0);
    c[0] = std::atan(a0);
    for (int k = 1; k <= d; ++k) c[k] = q[k - 1] / k;
    return compose(a, c);
}

TaylorScalar pow_int(const TaylorScalar& a, long k) {
    const TaylorScalar one = TaylorScalar::constant(a.nvars(), a.order(), 1.0);
    if (k >= 0) return real_ops::int_pow_positive(a, k, one);
    return one / real_ops::int_pow_positive(a, -k, one);
}

TaylorScalar pow_real(const TaylorScalar& a, double r) {
    const double a0 = a.value();
    if (!(a0 > 0.0)) throw DomainError("non-integer power requires a positive base");
    return compose(a, power_series(a0, r, std::pow(a0, r), a.order()));
}

TaylorScalar pow_general(const TaylorScalar& a, const TaylorScalar& b) {
    if (!(a.value() > 0.0)) throw DomainError("non-integer power requires a positive base");
    return exp(b * log(a));
}

// ---------------------------------------------------------------------------
// Lifting expressions
// ---------------------------------------------------------------------------

namespace {

template <typename VariableFn>
TaylorScalar lift_node(const ExprNode& node, int nvars, int order, const VariableFn& variable) {
    try {
        switch (node.kind) {
            case ExprKind::Constant:
                return TaylorScalar::constant(nvars, order, node.value);
            case ExprKind::Variable:
                return variable(node);
            case ExprKind::Unary:
                return -lift_node(*node.children[0], nvars, order, variable);
            case ExprKind::Binary:
            case ExprKind::Call: {
                const bool is_power = (node.kind == ExprKind::Binary && node.op == BinaryOp::Pow) ||
                                      (node.kind == ExprKind::Call && node.fn == Function::Pow);
                if (is_power) {
                    const TaylorScalar base = lift_node(*node.children[0], nvars, order, variable);
                    const ExprNode& exponent = *node.children[1];
                    long k = 0;
                    if (constant_integer_exponent(exponent, k)) return pow_int(base, k);
                    if (is_constant_subtree(exponent)) {
                        return pow_real(base, lift_node(exponent, nvars, 0, variable).value());
                    }
                    return pow_general(base, lift_node(exponent, nvars, order, variable));
                }
                if (node.kind == ExprKind::Binary) {
                    const TaylorScalar a = lift_node(*node.children[0], nvars, order, variable);
                    const TaylorScalar b = lift_node(*node.children[1], nvars, order, variable);
                    switch (node.op) {
                        case BinaryOp::Add: return a + b;
                        case BinaryOp::Sub: return a - b;
                        case BinaryOp::Mul: return a * b;
                        case BinaryOp::Div: return a / b;
                        case BinaryOp::Pow: break;
                    }
                    break;
                }
                const TaylorScalar a = lift_node(*node.children[0], nvars, order, variable);
                switch (node.fn) {
                    case Function::Sqrt: return sqrt(a);
                    case Function::Exp: return exp(a);
                    case Function::Log: return log(a);
                    case Function::Sin: return sin(a);
                    case Function::Cos: return cos(a);
                    case Function::Tan: return tan(a);
                    case Function::Atan: return atan(a);
                    case Function::Pow: break;
                }
                break;
            }
        }
    } catch (const SingularDivisionError& e) {
        if (std::string(e.what()).find(" at offset ") != std::string::npos) throw;
        throw SingularDivisionError(std::string(e.what()) + " at offset " + std::to_string(node.span.begin));
    } catch (const DomainError& e) {
        if (std::string(e.what()).find(" at offset ") != std::string::npos) throw;
        throw DomainError(std::string(e.what()) + " at offset " + std::to_string(node.span.begin));
    }
    throw DomainError("malformed expression node");
}

}  // namespace

TaylorScalar lift(const Expr& expr, const ChartPoint& point, int order) {
    if (order < 0) throw OrderBudgetError("lift: negative order");
    const int n = expr.dimension();
    if (point.dimension() != n) {
        throw DomainError("lift: point dimension " + std::to_string(point.dimension()) +
                          " does not match expression dimension " + std::to_string(n));
    }
    const int nvars = 2 * n;
    return lift_node(expr.root(), nvars, order, [&](const ExprNode& node) {
        if (node.var == VarKind::T) throw DomainError("parameter t has no value at a chart point");
        const int var = node.var == VarKind::X ? node.index : n + node.index;
        return TaylorScalar::variable(nvars, order, var, point.coordinate(var));
    });
}

TaylorScalar lift_curve(const Expr& expr, double t, int order) {
    return lift_node(expr.root(), 1, order, [&](const ExprNode& node) {
        if (node.var != VarKind::T) throw DomainError("curve expressions may only use the parameter t");
        return TaylorScalar::variable(1, order, 0, t);
    });
}

}  // namespace fk
