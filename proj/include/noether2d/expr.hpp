#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "noether2d/dual.hpp"
#include "noether2d/errors.hpp"

namespace noether2d {

// Small name -> value environment used for expression evaluation.  Lookup is
// linear; environments in this project hold at most four entries
// (t | x,y,t | xbar,ybar).
template <class Num>
class Bindings {
public:
    Bindings() = default;
    Bindings(std::initializer_list<std::pair<std::string, Num>> items) {
        for (auto& it : items) set(it.first, it.second);
    }

    Bindings& set(std::string name, Num value) {
        for (auto& it : items_) {
            if (it.first == name) {
                it.second = value;
                return *this;
            }
        }
        items_.emplace_back(std::move(name), value);
        return *this;
    }

    const Num* find(std::string_view name) const {
        for (const auto& it : items_) {
            if (it.first == name) return &it.second;
        }
        return nullptr;
    }

    const std::vector<std::pair<std::string, Num>>& items() const { return items_; }

private:
    std::vector<std::pair<std::string, Num>> items_;
};

namespace detail {

enum class NodeKind { Number, Variable, Add, Sub, Mul, Div, Neg, Pow, Call };

enum class Func { Sin, Cos, Tan, Exp, Ln, Sqrt, Atan };

const char* func_name(Func f);

struct ExprNode;
using NodePtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    NodeKind kind;
    double number = 0.0;    // Number value, or Pow exponent
    std::string name;       // Variable name
    Func func = Func::Sin;  // Call target
    NodePtr a, b;           // children
};

NodePtr make_number(double v);
NodePtr make_variable(std::string name);
NodePtr make_binary(NodeKind kind, NodePtr a, NodePtr b);
NodePtr make_neg(NodePtr a);
NodePtr make_pow(NodePtr base, double exponent);
NodePtr make_call(Func f, NodePtr a);

[[noreturn]] void throw_eval_domain(const std::string& what,
                                    const std::vector<std::pair<std::string, double>>& env);

template <class Num>
std::vector<std::pair<std::string, double>> env_values(const Bindings<Num>& env) {
    std::vector<std::pair<std::string, double>> out;
    out.reserve(env.items().size());
    for (const auto& it : env.items()) out.emplace_back(it.first, scalar_value(it.second));
    return out;
}

inline bool integral_exponent(double c) { return c == std::floor(c) && std::abs(c) < 1e15; }

template <class Num>
Num eval_node(const ExprNode& n, const Bindings<Num>& env) {
    using std::atan;
    using std::cos;
    using std::exp;
    using std::log;
    using std::pow;
    using std::sin;
    using std::sqrt;
    using std::tan;
    switch (n.kind) {
        case NodeKind::Number:
            return Num(n.number);
        case NodeKind::Variable: {
            const Num* v = env.find(n.name);
            if (!v) throw_eval_domain("unbound variable '" + n.name + "'", env_values(env));
            return *v;
        }
        case NodeKind::Add:
            return eval_node(*n.a, env) + eval_node(*n.b, env);
        case NodeKind::Sub:
            return eval_node(*n.a, env) - eval_node(*n.b, env);
        case NodeKind::Mul:
            return eval_node(*n.a, env) * eval_node(*n.b, env);
        case NodeKind::Div: {
            Num num = eval_node(*n.a, env);
            Num den = eval_node(*n.b, env);
            if (scalar_value(den) == 0.0)
                throw_eval_domain("division by zero", env_values(env));
            return num / den;
        }
        case NodeKind::Neg:
            return -eval_node(*n.a, env);
        case NodeKind::Pow: {
            Num base = eval_node(*n.a, env);
            const double c = n.number;
            const double bv = scalar_value(base);
            if (!integral_exponent(c) && bv < 0.0)
                throw_eval_domain("negative base with non-integer exponent", env_values(env));
            if (bv == 0.0 && c < 0.0)
                throw_eval_domain("zero base with negative exponent", env_values(env));
            return pow(base, c);
        }
        case NodeKind::Call: {
            Num arg = eval_node(*n.a, env);
            const double av = scalar_value(arg);
            switch (n.func) {
                case Func::Sin: return sin(arg);
                case Func::Cos: return cos(arg);
                case Func::Tan: return tan(arg);
                case Func::Exp: return exp(arg);
                case Func::Ln:
                    if (av <= 0.0) throw_eval_domain("ln of non-positive value", env_values(env));
                    return log(arg);
                case Func::Sqrt:
                    if (av < 0.0) throw_eval_domain("sqrt of negative value", env_values(env));
                    return sqrt(arg);
                case Func::Atan: return atan(arg);
            }
            break;
        }
    }
    throw ExprEvalError("corrupt expression node");
}

}  // namespace detail

// Immutable symbolic expression over named real variables.  Supports exact
// differentiation, conservative simplification, printing and evaluation over
// double or Dual3.  Shared subtrees are never mutated, so concurrent
// evaluation from multiple threads is safe.
class Expr {
public:
    Expr() : node_(detail::make_number(0.0)) {}

    static Expr number(double v) { return Expr(detail::make_number(v)); }
    static Expr variable(std::string name) {
        return Expr(detail::make_variable(std::move(name)));
    }

    template <class Num>
    Num eval(const Bindings<Num>& env) const {
        return detail::eval_node<Num>(*node_, env);
    }
    double operator()(const Bindings<double>& env) const { return eval(env); }

    Expr derivative(std::string_view var) const;
    Expr simplified() const;
    std::string str() const;

    // Sorted list of distinct variable names appearing in the expression.
    std::vector<std::string> variables() const;
    bool depends_on(std::string_view var) const;
    bool is_zero() const;  // structurally the constant 0

    // Composition operators build unsimplified trees.
    friend Expr operator+(const Expr& a, const Expr& b) {
        return Expr(detail::make_binary(detail::NodeKind::Add, a.node_, b.node_));
    }
    friend Expr operator-(const Expr& a, const Expr& b) {
        return Expr(detail::make_binary(detail::NodeKind::Sub, a.node_, b.node_));
    }
    friend Expr operator*(const Expr& a, const Expr& b) {
        return Expr(detail::make_binary(detail::NodeKind::Mul, a.node_, b.node_));
    }
    friend Expr operator/(const Expr& a, const Expr& b) {
        return Expr(detail::make_binary(detail::NodeKind::Div, a.node_, b.node_));
    }
    friend Expr operator-(const Expr& a) { return Expr(detail::make_neg(a.node_)); }

    static Expr pow(const Expr& base, double exponent) {
        return Expr(detail::make_pow(base.node_, exponent));
    }
    static Expr call(detail::Func f, const Expr& arg) {
        return Expr(detail::make_call(f, arg.node_));
    }

    const detail::NodePtr& node() const { return node_; }
    explicit Expr(detail::NodePtr node) : node_(std::move(node)) {}

private:
    detail::NodePtr node_;
};

// Parses the expression grammar: +, -, *, /, unary -, ^ with constant
// (rational) exponent, function calls sin/cos/tan/exp/ln/sqrt/atan,
// parentheses, decimal literals, identifiers as variables.  Throws
// ExprParseError with the byte offset of the failure.
Expr parse_expression(std::string_view source);

// Spec-style free function aliases.
inline Expr differentiate(const Expr& e, std::string_view var) { return e.derivative(var); }
inline Expr simplify(const Expr& e) { return e.simplified(); }
inline double evaluate(const Expr& e, const Bindings<double>& env) { return e.eval(env); }

}  // namespace noether2d
