#pragma once

// Coordinate expression language.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?          right associative
//   primary := number | variable | func '(' expr (',' expr)* ')' | '(' expr ')'
//
// Variables are x1..xn and y1..yn (1-based), plus the curve parameter t when
// enabled. Functions: sqrt exp log sin cos tan atan (one argument), pow (two).

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "finslerkit/chart_point.hpp"

namespace fk {

enum class ExprKind { Constant, Variable, Unary, Binary, Call };
enum class VarKind { X, Y, T };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };
enum class Function { Sqrt, Exp, Log, Sin, Cos, Tan, Atan, Pow };

struct SourceSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
};

struct ExprNode;
using ExprNodePtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    ExprKind kind = ExprKind::Constant;
    double value = 0.0;                 // Constant
    VarKind var = VarKind::X;           // Variable
    int index = 0;                      // Variable, 0-based
    BinaryOp op = BinaryOp::Add;        // Binary
    Function fn = Function::Sqrt;       // Call
    std::vector<ExprNodePtr> children;  // Unary (negation): 1, Binary: 2, Call: arity
    SourceSpan span;
};

struct ParseOptions {
    int dimension = 1;
    bool allow_chart_variables = true;
    bool allow_parameter = false;
};

// Immutable parsed expression. Cheap to copy; safe to share across threads.
class Expr {
public:
    Expr() = default;
    Expr(ExprNodePtr root, int dimension, std::string source)
        : root_(std::move(root)), dimension_(dimension), source_(std::move(source)) {}

    const ExprNode& root() const { return *root_; }
    const ExprNodePtr& root_ptr() const { return root_; }
    int dimension() const { return dimension_; }
    const std::string& source() const { return source_; }
    bool empty() const { return root_ == nullptr; }

private:
    ExprNodePtr root_;
    int dimension_ = 0;
    std::string source_;
};

Expr parse(std::string_view text, int dimension);
Expr parse(std::string_view text, const ParseOptions& options);

// Curve component c^i(t): only the parameter t may appear.
Expr parse_curve(std::string_view text);

double eval_real(const Expr& expr, const ChartPoint& point);
double eval_curve(const Expr& expr, double t);

// Shortest round-trip text form; parse(to_string(e)) is structurally equal to e.
std::string to_string(const Expr& expr);

// Structural equality, ignoring source spans.
bool structurally_equal(const ExprNode& a, const ExprNode& b);

// True when no variable occurs in the subtree.
bool is_constant_subtree(const ExprNode& node);

// For a power node's exponent: the exponent value when it is a variable-free
// integer, used to choose repeated multiplication over exp(b log a).
bool constant_integer_exponent(const ExprNode& exponent, long& out);

const char* function_name(Function fn);

}  // namespace fk
