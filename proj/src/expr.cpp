#include "noether2d/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>

namespace noether2d {
namespace detail {

const char* func_name(Func f) {
    switch (f) {
        case Func::Sin: return "sin";
        case Func::Cos: return "cos";
        case Func::Tan: return "tan";
        case Func::Exp: return "exp";
        case Func::Ln: return "ln";
        case Func::Sqrt: return "sqrt";
        case Func::Atan: return "atan";
    }
    return "?";
}

NodePtr make_number(double v) {
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::Number;
    n->number = v;
    return n;
}

NodePtr make_variable(std::string name) {
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::Variable;
    n->name = std::move(name);
    return n;
}

NodePtr make_binary(NodeKind kind, NodePtr a, NodePtr b) {
    auto n = std::make_shared<ExprNode>();
    n->kind = kind;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr make_neg(NodePtr a) {
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::Neg;
    n->a = std::move(a);
    return n;
}

NodePtr make_pow(NodePtr base, double exponent) {
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::Pow;
    n->number = exponent;
    n->a = std::move(base);
    return n;
}

NodePtr make_call(Func f, NodePtr a) {
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::Call;
    n->func = f;
    n->a = std::move(a);
    return n;
}

void throw_eval_domain(const std::string& what,
                       const std::vector<std::pair<std::string, double>>& env) {
    std::ostringstream os;
    os << what << " [";
    bool first = true;
    for (const auto& it : env) {
        if (!first) os << ", ";
        first = false;
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", it.second);
        os << it.first << "=" << buf;
    }
    os << "]";
    throw ExprEvalError(os.str());
}

namespace {

bool is_number(const NodePtr& n, double v) {
    return n->kind == NodeKind::Number && n->number == v;
}

// Shortest decimal string that parses back to exactly the same double.
std::string shortest_double(double v) {
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

//----------------------------- printing -------------------------------//

int precedence(const ExprNode& n) {
    switch (n.kind) {
        case NodeKind::Add:
        case NodeKind::Sub: return 1;
        case NodeKind::Mul:
        case NodeKind::Div: return 2;
        case NodeKind::Neg: return 3;
        case NodeKind::Pow: return 4;
        default: return 5;
    }
}

void print_node(const ExprNode& n, std::string& out);

void print_child(const ExprNode& child, int min_prec, std::string& out) {
    const bool parens = precedence(child) < min_prec ||
                        (child.kind == NodeKind::Number && child.number < 0 && min_prec > 1);
    if (parens) out += '(';
    print_node(child, out);
    if (parens) out += ')';
}

void print_node(const ExprNode& n, std::string& out) {
    switch (n.kind) {
        case NodeKind::Number:
            out += shortest_double(n.number);
            return;
        case NodeKind::Variable:
            out += n.name;
            return;
        case NodeKind::Add:
            print_child(*n.a, 1, out);
            out += " + ";
            print_child(*n.b, 2, out);
            return;
        case NodeKind::Sub:
            print_child(*n.a, 1, out);
            out += " - ";
            print_child(*n.b, 2, out);
            return;
        case NodeKind::Mul:
            print_child(*n.a, 2, out);
            out += "*";
            print_child(*n.b, 3, out);
            return;
        case NodeKind::Div:
            print_child(*n.a, 2, out);
            out += "/";
            print_child(*n.b, 3, out);
            return;
        case NodeKind::Neg:
            out += "-";
            print_child(*n.a, 3, out);
            return;
        case NodeKind::Pow: {
            print_child(*n.a, 5, out);
            out += "^";
            const std::string e = shortest_double(n.number);
            const bool parens = e.find_first_of("+e") != std::string::npos && n.number != 0 &&
                                std::floor(n.number) != n.number;
            if (parens) out += '(';
            out += e;
            if (parens) out += ')';
            return;
        }
        case NodeKind::Call:
            out += func_name(n.func);
            out += '(';
            print_node(*n.a, out);
            out += ')';
            return;
    }
}

//---------------------------- differentiation ----------------------------//

NodePtr zero() { return make_number(0.0); }

NodePtr d_add(NodePtr a, NodePtr b) {
    if (is_number(a, 0)) return b;
    if (is_number(b, 0)) return a;
    return make_binary(NodeKind::Add, std::move(a), std::move(b));
}
NodePtr d_sub(NodePtr a, NodePtr b) {
    if (is_number(b, 0)) return a;
    if (is_number(a, 0)) return make_neg(std::move(b));
    return make_binary(NodeKind::Sub, std::move(a), std::move(b));
}
NodePtr d_mul(NodePtr a, NodePtr b) {
    if (is_number(a, 0) || is_number(b, 0)) return zero();
    if (is_number(a, 1)) return b;
    if (is_number(b, 1)) return a;
    return make_binary(NodeKind::Mul, std::move(a), std::move(b));
}
NodePtr d_div(NodePtr a, NodePtr b) {
    if (is_number(a, 0)) return zero();
    if (is_number(b, 1)) return a;
    return make_binary(NodeKind::Div, std::move(a), std::move(b));
}
NodePtr d_pow(NodePtr a, double c) {
    if (c == 0.0) return make_number(1.0);
    if (c == 1.0) return a;
    return make_pow(std::move(a), c);
}

NodePtr diff_node(const NodePtr& n, std::string_view var) {
    switch (n->kind) {
        case NodeKind::Number:
            return zero();
        case NodeKind::Variable:
            return make_number(n->name == var ? 1.0 : 0.0);
        case NodeKind::Add:
            return d_add(diff_node(n->a, var), diff_node(n->b, var));
        case NodeKind::Sub:
            return d_sub(diff_node(n->a, var), diff_node(n->b, var));
        case NodeKind::Mul:
            return d_add(d_mul(diff_node(n->a, var), n->b),
                         d_mul(n->a, diff_node(n->b, var)));
        case NodeKind::Div:
            return d_sub(d_div(diff_node(n->a, var), n->b),
                         d_div(d_mul(n->a, diff_node(n->b, var)), make_pow(n->b, 2.0)));
        case NodeKind::Neg: {
            NodePtr da = diff_node(n->a, var);
            if (is_number(da, 0)) return da;
            return make_neg(std::move(da));
        }
        case NodeKind::Pow: {
            NodePtr da = diff_node(n->a, var);
            if (n->number == 0.0 || is_number(da, 0)) return zero();
            return d_mul(d_mul(make_number(n->number), d_pow(n->a, n->number - 1.0)),
                         std::move(da));
        }
        case NodeKind::Call: {
            NodePtr da = diff_node(n->a, var);
            if (is_number(da, 0)) return da;
            switch (n->func) {
                case Func::Sin:
                    return d_mul(make_call(Func::Cos, n->a), std::move(da));
                case Func::Cos:
                    return make_neg(d_mul(make_call(Func::Sin, n->a), std::move(da)));
                case Func::Tan:
                    return d_div(std::move(da), make_pow(make_call(Func::Cos, n->a), 2.0));
                case Func::Exp:
                    return d_mul(make_call(Func::Exp, n->a), std::move(da));
                case Func::Ln:
                    return d_div(std::move(da), n->a);
                case Func::Sqrt:
                    return d_div(std::move(da),
                                 d_mul(make_number(2.0), make_call(Func::Sqrt, n->a)));
                case Func::Atan:
                    return d_div(std::move(da),
                                 d_add(make_number(1.0), make_pow(n->a, 2.0)));
            }
            break;
        }
    }
    throw ExprEvalError("corrupt expression node");
}

//------------------------------ simplify -------------------------------//

// Constant-fold a node whose children are numbers, when safe and finite.
NodePtr try_fold(const NodePtr& n) {
    auto num = [](const NodePtr& p) { return p->kind == NodeKind::Number; };
    double r = 0.0;
    switch (n->kind) {
        case NodeKind::Add:
            if (!num(n->a) || !num(n->b)) return nullptr;
            r = n->a->number + n->b->number;
            break;
        case NodeKind::Sub:
            if (!num(n->a) || !num(n->b)) return nullptr;
            r = n->a->number - n->b->number;
            break;
        case NodeKind::Mul:
            if (!num(n->a) || !num(n->b)) return nullptr;
            r = n->a->number * n->b->number;
            break;
        case NodeKind::Div:
            if (!num(n->a) || !num(n->b) || n->b->number == 0.0) return nullptr;
            r = n->a->number / n->b->number;
            break;
        case NodeKind::Neg:
            if (!num(n->a)) return nullptr;
            r = -n->a->number;
            break;
        case NodeKind::Pow: {
            if (!num(n->a)) return nullptr;
            const double b = n->a->number;
            if ((b < 0 && !integral_exponent(n->number)) || (b == 0 && n->number < 0))
                return nullptr;
            r = std::pow(b, n->number);
            break;
        }
        case NodeKind::Call: {
            if (!num(n->a)) return nullptr;
            const double a = n->a->number;
            switch (n->func) {
                case Func::Sin: r = std::sin(a); break;
                case Func::Cos: r = std::cos(a); break;
                case Func::Tan: r = std::tan(a); break;
                case Func::Exp: r = std::exp(a); break;
                case Func::Ln:
                    if (a <= 0) return nullptr;
                    r = std::log(a);
                    break;
                case Func::Sqrt:
                    if (a < 0) return nullptr;
                    r = std::sqrt(a);
                    break;
                case Func::Atan: r = std::atan(a); break;
            }
            break;
        }
        default:
            return nullptr;
    }
    if (!std::isfinite(r)) return nullptr;
    return make_number(r);
}

struct Term {
    double coefficient;
    NodePtr factor;  // nullptr for the pure-constant term
    std::string key;
};

void flatten_sum(const NodePtr& n, double sign, std::vector<std::pair<double, NodePtr>>& out) {
    if (n->kind == NodeKind::Add) {
        flatten_sum(n->a, sign, out);
        flatten_sum(n->b, sign, out);
    } else if (n->kind == NodeKind::Sub) {
        flatten_sum(n->a, sign, out);
        flatten_sum(n->b, -sign, out);
    } else if (n->kind == NodeKind::Neg) {
        flatten_sum(n->a, -sign, out);
    } else {
        out.emplace_back(sign, n);
    }
}

// Split a product term into (numeric coefficient, residual factor).
std::pair<double, NodePtr> split_coefficient(const NodePtr& n) {
    if (n->kind == NodeKind::Number) return {n->number, nullptr};
    if (n->kind == NodeKind::Mul) {
        if (n->a->kind == NodeKind::Number) return {n->a->number, n->b};
        if (n->b->kind == NodeKind::Number) return {n->b->number, n->a};
    }
    return {1.0, n};
}

NodePtr simplify_node(const NodePtr& n);

NodePtr collect_terms(const NodePtr& n) {
    std::vector<std::pair<double, NodePtr>> raw;
    flatten_sum(n, 1.0, raw);
    if (raw.size() < 2) return nullptr;

    double constant = 0.0;
    std::vector<Term> terms;
    for (auto& [sign, node] : raw) {
        auto [coef, factor] = split_coefficient(node);
        coef *= sign;
        if (!factor) {
            constant += coef;
            continue;
        }
        std::string key;
        print_node(*factor, key);
        bool merged = false;
        for (auto& t : terms) {
            if (t.key == key) {
                t.coefficient += coef;
                merged = true;
                break;
            }
        }
        if (!merged) terms.push_back(Term{coef, factor, std::move(key)});
    }

    NodePtr result;
    for (const auto& t : terms) {
        if (t.coefficient == 0.0) continue;
        NodePtr piece;
        if (t.coefficient == 1.0)
            piece = t.factor;
        else if (t.coefficient == -1.0)
            piece = make_neg(t.factor);
        else
            piece = make_binary(NodeKind::Mul, make_number(t.coefficient), t.factor);
        result = result ? make_binary(NodeKind::Add, std::move(result), std::move(piece))
                        : std::move(piece);
    }
    if (constant != 0.0 || !result) {
        NodePtr c = make_number(constant);
        result = result ? make_binary(NodeKind::Add, std::move(result), std::move(c))
                        : std::move(c);
    }
    return result;
}

NodePtr simplify_node(const NodePtr& n) {
    NodePtr s;
    switch (n->kind) {
        case NodeKind::Number:
        case NodeKind::Variable:
            return n;
        case NodeKind::Neg:
            s = make_neg(simplify_node(n->a));
            if (s->a->kind == NodeKind::Neg) return s->a->a;
            break;
        case NodeKind::Pow:
            s = make_pow(simplify_node(n->a), n->number);
            if (n->number == 1.0) return s->a;
            if (n->number == 0.0) return make_number(1.0);
            break;
        case NodeKind::Call:
            s = make_call(n->func, simplify_node(n->a));
            break;
        default:
            s = make_binary(n->kind, simplify_node(n->a), simplify_node(n->b));
            break;
    }

    if (NodePtr folded = try_fold(s)) return folded;

    switch (s->kind) {
        case NodeKind::Add:
            if (is_number(s->a, 0)) return s->b;
            if (is_number(s->b, 0)) return s->a;
            break;
        case NodeKind::Sub:
            if (is_number(s->b, 0)) return s->a;
            if (is_number(s->a, 0)) return simplify_node(make_neg(s->b));
            break;
        case NodeKind::Mul:
            if (is_number(s->a, 0) || is_number(s->b, 0)) return make_number(0.0);
            if (is_number(s->a, 1)) return s->b;
            if (is_number(s->b, 1)) return s->a;
            break;
        case NodeKind::Div:
            if (is_number(s->b, 1)) return s->a;
            break;
        default:
            break;
    }

    if (s->kind == NodeKind::Add || s->kind == NodeKind::Sub) {
        if (NodePtr collected = collect_terms(s)) {
            std::string before, after;
            print_node(*s, before);
            print_node(*collected, after);
            if (after != before) return collected;
        }
    }
    return s;
}

//------------------------------- parser --------------------------------//

struct Parser {
    std::string_view src;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
    }
    bool at_end() {
        skip_ws();
        return pos >= src.size();
    }
    char peek() {
        skip_ws();
        return pos < src.size() ? src[pos] : '\0';
    }
    bool consume(char c) {
        if (peek() == c) {
            ++pos;
            return true;
        }
        return false;
    }

    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        for (;;) {
            const char c = peek();
            if (c == '+' || c == '-') {
                ++pos;
                NodePtr rhs = parse_term();
                lhs = make_binary(c == '+' ? NodeKind::Add : NodeKind::Sub, std::move(lhs),
                                  std::move(rhs));
            } else {
                return lhs;
            }
        }
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_unary();
        for (;;) {
            const char c = peek();
            if (c == '*' || c == '/') {
                ++pos;
                NodePtr rhs = parse_unary();
                lhs = make_binary(c == '*' ? NodeKind::Mul : NodeKind::Div, std::move(lhs),
                                  std::move(rhs));
            } else {
                return lhs;
            }
        }
    }

    NodePtr parse_unary() {
        if (consume('-')) return make_neg(parse_unary());
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_primary();
        skip_ws();
        if (pos < src.size() && src[pos] == '^') {
            const std::size_t caret = pos;
            ++pos;
            NodePtr exponent = parse_unary();
            if (!subtree_constant(exponent))
                throw ExprParseError("exponent must be a constant", caret);
            double value;
            try {
                value = eval_node<double>(*exponent, Bindings<double>{});
            } catch (const ExprEvalError&) {
                throw ExprParseError("exponent is not evaluable", caret);
            }
            return make_pow(std::move(base), value);
        }
        return base;
    }

    static bool subtree_constant(const NodePtr& n) {
        if (n->kind == NodeKind::Variable) return false;
        if (n->a && !subtree_constant(n->a)) return false;
        if (n->b && !subtree_constant(n->b)) return false;
        return true;
    }

    NodePtr parse_primary() {
        skip_ws();
        if (pos >= src.size()) throw ExprParseError("expected expression", pos);
        const char c = src[pos];

        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = src.data() + pos;
            char* end = nullptr;
            const double v = std::strtod(begin, &end);
            if (end == begin) throw ExprParseError("invalid number", pos);
            pos += static_cast<std::size_t>(end - begin);
            return make_number(v);
        }

        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos;
            while (pos < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
                ++pos;
            std::string name(src.substr(start, pos - start));
            skip_ws();
            if (pos < src.size() && src[pos] == '(') {
                Func f;
                if (name == "sin") f = Func::Sin;
                else if (name == "cos") f = Func::Cos;
                else if (name == "tan") f = Func::Tan;
                else if (name == "exp") f = Func::Exp;
                else if (name == "ln") f = Func::Ln;
                else if (name == "sqrt") f = Func::Sqrt;
                else if (name == "atan") f = Func::Atan;
                else throw ExprParseError("unknown function '" + name + "'", start);
                ++pos;  // '('
                NodePtr arg = parse_expr();
                if (!consume(')')) throw ExprParseError("expected ')'", pos);
                return make_call(f, std::move(arg));
            }
            return make_variable(std::move(name));
        }

        if (c == '(') {
            ++pos;
            NodePtr inner = parse_expr();
            if (!consume(')')) throw ExprParseError("expected ')'", pos);
            return inner;
        }

        throw ExprParseError(std::string("unexpected character '") + c + "'", pos);
    }
};

void collect_variables(const NodePtr& n, std::vector<std::string>& out) {
    if (n->kind == NodeKind::Variable) out.push_back(n->name);
    if (n->a) collect_variables(n->a, out);
    if (n->b) collect_variables(n->b, out);
}

}  // namespace
}  // namespace detail

Expr Expr::derivative(std::string_view var) const {
    return Expr(detail::diff_node(node_, var));
}

Expr Expr::simplified() const { return Expr(detail::simplify_node(node_)); }

std::string Expr::str() const {
    std::string out;
    detail::print_node(*node_, out);
    return out;
}

std::vector<std::string> Expr::variables() const {
    std::vector<std::string> names;
    detail::collect_variables(node_, names);
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    return names;
}

bool Expr::depends_on(std::string_view var) const {
    for (const auto& v : variables())
        if (v == var) return true;
    return false;
}

bool Expr::is_zero() const {
    return node_->kind == detail::NodeKind::Number && node_->number == 0.0;
}

Expr parse_expression(std::string_view source) {
    detail::Parser p{source};
    detail::NodePtr root = p.parse_expr();
    if (!p.at_end()) throw ExprParseError("unexpected trailing input", p.pos);
    return Expr(std::move(root));
}

}  // namespace noether2d
