#include "finslerkit/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <functional>

#include "finslerkit/real_ops.hpp"

namespace fk {

namespace {

struct FunctionInfo {
    const char* name;
    Function fn;
    int arity;
};

constexpr FunctionInfo kFunctions[] = {
    {"sqrt", Function::Sqrt, 1}, {"exp", Function::Exp, 1}, {"log", Function::Log, 1},
    {"sin", Function::Sin, 1},   {"cos", Function::Cos, 1}, {"tan", Function::Tan, 1},
    {"atan", Function::Atan, 1}, {"pow", Function::Pow, 2},
};

class Parser {
public:
    Parser(std::string_view text, const ParseOptions& options) : text_(text), options_(options) {}

    ExprNodePtr parse_all() {
        skip_space();
        if (pos_ >= text_.size()) throw ParseError(pos_, "empty expression");
        ExprNodePtr node = parse_expr();
        skip_space();
        if (pos_ < text_.size()) {
            throw ParseError(pos_, std::string("expected operator or end of input, found '") + text_[pos_] + "'");
        }
        return node;
    }

private:
    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool peek(char c) {
        skip_space();
        return pos_ < text_.size() && text_[pos_] == c;
    }

    static ExprNodePtr make_binary(BinaryOp op, ExprNodePtr lhs, ExprNodePtr rhs) {
        auto node = std::make_shared<ExprNode>();
        node->kind = ExprKind::Binary;
        node->op = op;
        node->span = {lhs->span.begin, rhs->span.end};
        node->children = {std::move(lhs), std::move(rhs)};
        return node;
    }

    ExprNodePtr parse_expr() {
        ExprNodePtr lhs = parse_term();
        while (true) {
            if (peek('+')) {
                ++pos_;
                lhs = make_binary(BinaryOp::Add, lhs, parse_term());
            } else if (peek('-')) {
                ++pos_;
                lhs = make_binary(BinaryOp::Sub, lhs, parse_term());
            } else {
                return lhs;
            }
        }
    }

    ExprNodePtr parse_term() {
        ExprNodePtr lhs = parse_unary();
        while (true) {
            if (peek('*')) {
                ++pos_;
                lhs = make_binary(BinaryOp::Mul, lhs, parse_unary());
            } else if (peek('/')) {
                ++pos_;
                lhs = make_binary(BinaryOp::Div, lhs, parse_unary());
            } else {
                return lhs;
            }
        }
    }

    ExprNodePtr parse_unary() {
        skip_space();
        if (peek('-')) {
            const std::size_t start = pos_++;
            ExprNodePtr operand = parse_unary();
            auto node = std::make_shared<ExprNode>();
            node->kind = ExprKind::Unary;
            node->span = {start, operand->span.end};
            node->children = {std::move(operand)};
            return node;
        }
        if (peek('+')) {
            ++pos_;
            return parse_unary();
        }
        return parse_power();
    }

    ExprNodePtr parse_power() {
        ExprNodePtr base = parse_primary();
        if (peek('^')) {
            ++pos_;
            ExprNodePtr exponent = parse_unary();
            return make_binary(BinaryOp::Pow, base, exponent);
        }
        return base;
    }

    ExprNodePtr parse_primary() {
        skip_space();
        if (pos_ >= text_.size()) {
            throw ParseError(pos_, "unexpected end of input, expected number, variable, function call or '('");
        }
        const char c = text_[pos_];
        if (c == '(') {
            const std::size_t start = pos_++;
            ExprNodePtr inner = parse_expr();
            if (!peek(')')) throw ParseError(pos_, "expected ')'");
            ++pos_;
            auto node = std::make_shared<ExprNode>(*inner);
            node->span = {start, pos_};
            return node;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
        throw ParseError(pos_, std::string("expected number, variable, function call or '(', found '") + c + "'");
    }

    ExprNodePtr parse_number() {
        const std::size_t start = pos_;
        std::size_t end = pos_;
        while (end < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[end])) || text_[end] == '.')) ++end;
        if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
            std::size_t exp_end = end + 1;
            if (exp_end < text_.size() && (text_[exp_end] == '+' || text_[exp_end] == '-')) ++exp_end;
            if (exp_end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[exp_end]))) {
                while (exp_end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[exp_end]))) ++exp_end;
                end = exp_end;
            } else {
                throw ParseError(exp_end, "expected exponent digits");
            }
        }
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + end, value);
        if (ec != std::errc() || ptr != text_.data() + end) throw ParseError(start, "malformed number");
        pos_ = end;
        auto node = std::make_shared<ExprNode>();
        node->kind = ExprKind::Constant;
        node->value = value;
        node->span = {start, end};
        return node;
    }

    ExprNodePtr parse_identifier() {
        const std::size_t start = pos_;
        std::size_t end = pos_;
        while (end < text_.size() && std::isalpha(static_cast<unsigned char>(text_[end]))) ++end;
        const std::string_view letters = text_.substr(start, end - start);
        std::size_t digits_end = end;
        while (digits_end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[digits_end]))) ++digits_end;

        for (const auto& info : kFunctions) {
            if (letters == info.name && digits_end == end) {
                pos_ = end;
                return parse_call(start, info);
            }
        }

        if ((letters == "x" || letters == "y") && digits_end > end) {
            if (!options_.allow_chart_variables) {
                throw ParseError(start, "chart variable '" + std::string(text_.substr(start, digits_end - start)) +
                                            "' not allowed here, expected the parameter t");
            }
            int index = 0;
            std::from_chars(text_.data() + end, text_.data() + digits_end, index);
            if (index < 1 || index > options_.dimension) {
                throw ParseError(start, "variable '" + std::string(text_.substr(start, digits_end - start)) +
                                            "' out of range for dimension " + std::to_string(options_.dimension));
            }
            pos_ = digits_end;
            auto node = std::make_shared<ExprNode>();
            node->kind = ExprKind::Variable;
            node->var = letters == "x" ? VarKind::X : VarKind::Y;
            node->index = index - 1;
            node->span = {start, digits_end};
            return node;
        }
        if (letters == "t" && digits_end == end && options_.allow_parameter) {
            pos_ = end;
            auto node = std::make_shared<ExprNode>();
            node->kind = ExprKind::Variable;
            node->var = VarKind::T;
            node->span = {start, end};
            return node;
        }
        throw ParseError(start, "unknown identifier '" + std::string(text_.substr(start, digits_end - start)) + "'");
    }

    ExprNodePtr parse_call(std::size_t start, const FunctionInfo& info) {
        if (!peek('(')) throw ParseError(pos_, std::string("expected '(' after function '") + info.name + "'");
        ++pos_;
        std::vector<ExprNodePtr> args;
        args.push_back(parse_expr());
        while (peek(',')) {
            ++pos_;
            args.push_back(parse_expr());
        }
        if (!peek(')')) throw ParseError(pos_, "expected ',' or ')'");
        ++pos_;
        if (static_cast<int>(args.size()) != info.arity) {
            throw ParseError(start, std::string("function '") + info.name + "' expects " + std::to_string(info.arity) +
                                        " argument(s), got " + std::to_string(args.size()));
        }
        auto node = std::make_shared<ExprNode>();
        node->kind = ExprKind::Call;
        node->fn = info.fn;
        node->children = std::move(args);
        node->span = {start, pos_};
        return node;
    }

    std::string_view text_;
    ParseOptions options_;
    std::size_t pos_ = 0;
};

using VariableLookup = std::function<double(const ExprNode&)>;

double eval_node(const ExprNode& node, const VariableLookup& lookup);

double checked(double value, const ExprNode& node, const char* what) {
    if (!std::isfinite(value)) {
        throw DomainError(std::string(what) + " produced a non-finite value at offset " +
                          std::to_string(node.span.begin));
    }
    return value;
}

double eval_power(const ExprNode& node, double base, const ExprNode& exponent_node, double exponent) {
    long k = 0;
    if (constant_integer_exponent(exponent_node, k)) {
        if (k < 0 && base == 0.0) {
            throw SingularDivisionError("negative integer power of zero at offset " + std::to_string(node.span.begin));
        }
        return checked(real_ops::int_pow(base, k), node, "power");
    }
    if (!(base > 0.0)) {
        throw DomainError("non-integer power requires a positive base at offset " + std::to_string(node.span.begin));
    }
    if (is_constant_subtree(exponent_node)) return checked(std::pow(base, exponent), node, "power");
    return checked(std::exp(exponent * std::log(base)), node, "power");
}

double eval_node(const ExprNode& node, const VariableLookup& lookup) {
    switch (node.kind) {
        case ExprKind::Constant:
            return node.value;
        case ExprKind::Variable:
            return lookup(node);
        case ExprKind::Unary:
            return -eval_node(*node.children[0], lookup);
        case ExprKind::Binary: {
            const double a = eval_node(*node.children[0], lookup);
            const double b = eval_node(*node.children[1], lookup);
            switch (node.op) {
                case BinaryOp::Add: return checked(a + b, node, "addition");
                case BinaryOp::Sub: return checked(a - b, node, "subtraction");
                case BinaryOp::Mul: return checked(a * b, node, "multiplication");
                case BinaryOp::Div:
                    if (std::abs(b) <= real_ops::kSingularDivisor) {
                        throw SingularDivisionError("division by zero at offset " + std::to_string(node.span.begin));
                    }
                    return checked(a / b, node, "division");
                case BinaryOp::Pow: return eval_power(node, a, *node.children[1], b);
            }
            break;
        }
        case ExprKind::Call: {
            const double a = eval_node(*node.children[0], lookup);
            switch (node.fn) {
                case Function::Sqrt:
                    if (a < 0.0) throw DomainError("sqrt of negative value at offset " + std::to_string(node.span.begin));
                    return std::sqrt(a);
                case Function::Exp: return checked(std::exp(a), node, "exp");
                case Function::Log:
                    if (!(a > 0.0)) throw DomainError("log of non-positive value at offset " + std::to_string(node.span.begin));
                    return std::log(a);
                case Function::Sin: return std::sin(a);
                case Function::Cos: return std::cos(a);
                case Function::Tan: return checked(std::tan(a), node, "tan");
                case Function::Atan: return std::atan(a);
                case Function::Pow: {
                    const double b = eval_node(*node.children[1], lookup);
                    return eval_power(node, a, *node.children[1], b);
                }
            }
            break;
        }
    }
    throw DomainError("malformed expression node");
}

// Binding strength used by the printer.
int precedence(const ExprNode& node) {
    switch (node.kind) {
        case ExprKind::Binary:
            switch (node.op) {
                case BinaryOp::Add:
                case BinaryOp::Sub: return 1;
                case BinaryOp::Mul:
                case BinaryOp::Div: return 2;
                case BinaryOp::Pow: return 4;
            }
            return 0;
        case ExprKind::Unary: return 3;
        default: return 5;
    }
}

void print_node(const ExprNode& node, std::string& out);

void print_wrapped(const ExprNode& node, bool wrap, std::string& out) {
    if (wrap) out += '(';
    print_node(node, out);
    if (wrap) out += ')';
}

void print_node(const ExprNode& node, std::string& out) {
    switch (node.kind) {
        case ExprKind::Constant: {
            char buffer[64];
            const auto result = std::to_chars(buffer, buffer + sizeof(buffer), node.value);
            out.append(buffer, result.ptr);
            return;
        }
        case ExprKind::Variable:
            if (node.var == VarKind::T) {
                out += 't';
            } else {
                out += node.var == VarKind::X ? 'x' : 'y';
                out += std::to_string(node.index + 1);
            }
            return;
        case ExprKind::Unary:
            out += '-';
            print_wrapped(*node.children[0], precedence(*node.children[0]) < 3, out);
            return;
        case ExprKind::Binary: {
            const ExprNode& lhs = *node.children[0];
            const ExprNode& rhs = *node.children[1];
            const int p = precedence(node);
            if (node.op == BinaryOp::Pow) {
                // Base must be a primary; exponent may be a unary or another power.
                print_wrapped(lhs, precedence(lhs) < 5, out);
                out += '^';
                print_wrapped(rhs, precedence(rhs) < 3, out);
                return;
            }
            print_wrapped(lhs, precedence(lhs) < p, out);
            switch (node.op) {
                case BinaryOp::Add: out += " + "; break;
                case BinaryOp::Sub: out += " - "; break;
                case BinaryOp::Mul: out += '*'; break;
                case BinaryOp::Div: out += '/'; break;
                case BinaryOp::Pow: break;
            }
            print_wrapped(rhs, precedence(rhs) <= p, out);
            return;
        }
        case ExprKind::Call:
            out += function_name(node.fn);
            out += '(';
            for (std::size_t i = 0; i < node.children.size(); ++i) {
                if (i) out += ", ";
                print_node(*node.children[i], out);
            }
            out += ')';
            return;
    }
}

}  // namespace

const char* function_name(Function fn) {
    for (const auto& info : kFunctions) {
        if (info.fn == fn) return info.name;
    }
    return "?";
}

Expr parse(std::string_view text, int dimension) {
    ParseOptions options;
    options.dimension = dimension;
    return parse(text, options);
}

Expr parse(std::string_view text, const ParseOptions& options) {
    if (options.dimension < 1) throw ParseError(0, "dimension must be positive");
    Parser parser(text, options);
    return Expr(parser.parse_all(), options.dimension, std::string(text));
}

Expr parse_curve(std::string_view text) {
    ParseOptions options;
    options.dimension = 1;
    options.allow_chart_variables = false;
    options.allow_parameter = true;
    return parse(text, options);
}

double eval_real(const Expr& expr, const ChartPoint& point) {
    if (point.dimension() != expr.dimension()) {
        throw DomainError("eval_real: point dimension " + std::to_string(point.dimension()) +
                          " does not match expression dimension " + std::to_string(expr.dimension()));
    }
    return eval_node(expr.root(), [&](const ExprNode& node) {
        if (node.var == VarKind::T) throw DomainError("parameter t has no value at a chart point");
        return node.var == VarKind::X ? point.x()[node.index] : point.y()[node.index];
    });
}

double eval_curve(const Expr& expr, double t) {
    return eval_node(expr.root(), [&](const ExprNode& node) {
        if (node.var != VarKind::T) throw DomainError("curve expressions may only use the parameter t");
        return t;
    });
}

std::string to_string(const Expr& expr) {
    std::string out;
    print_node(expr.root(), out);
    return out;
}

bool structurally_equal(const ExprNode& a, const ExprNode& b) {
    if (a.kind != b.kind || a.children.size() != b.children.size()) return false;
    switch (a.kind) {
        case ExprKind::Constant:
            if (a.value != b.value) return false;
            break;
        case ExprKind::Variable:
            if (a.var != b.var || a.index != b.index) return false;
            break;
        case ExprKind::Binary:
            if (a.op != b.op) return false;
            break;
        case ExprKind::Call:
            if (a.fn != b.fn) return false;
            break;
        case ExprKind::Unary: break;
    }
    for (std::size_t i = 0; i < a.children.size(); ++i) {
        if (!structurally_equal(*a.children[i], *b.children[i])) return false;
    }
    return true;
}

bool is_constant_subtree(const ExprNode& node) {
    if (node.kind == ExprKind::Variable) return false;
    for (const auto& child : node.children) {
        if (!is_constant_subtree(*child)) return false;
    }
    return true;
}

bool constant_integer_exponent(const ExprNode& exponent, long& out) {
    if (!is_constant_subtree(exponent)) return false;
    double value = 0.0;
    try {
        value = eval_node(exponent, [](const ExprNode&) -> double { return 0.0; });
    } catch (const DomainError&) {
        return false;
    }
    if (value != std::floor(value) || std::abs(value) > 1 << 20) return false;
    out = static_cast<long>(value);
    return true;
}

}  // namespace fk
