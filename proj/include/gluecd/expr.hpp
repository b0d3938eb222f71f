#pragma once

// Arithmetic expressions over chart coordinates x1..x4.
//
// Grammar (documented in the README):
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := '-' factor | base ('^' factor)?
//   base   := number | coordinate | function '(' expr ')' | '(' expr ')'
// Functions: sin cos tan exp log sqrt sinh cosh.

#include <cctype>
#include <memory>
#include <string>

#include "gluecd/common.hpp"

namespace gluecd {

enum class NodeKind { Num, Coord, Neg, Add, Sub, Mul, Div, Pow, Fun };

enum class FunKind { Sin, Cos, Tan, Exp, Log, Sqrt, Sinh, Cosh };

struct ExprNode {
    NodeKind kind;
    double num = 0.0;    // Num
    int coord = 0;       // Coord, zero-based
    FunKind fun = FunKind::Sin;
    std::shared_ptr<const ExprNode> a, b;
};

using ExprPtr = std::shared_ptr<const ExprNode>;

inline const char* fun_name(FunKind f) {
    switch (f) {
        case FunKind::Sin: return "sin";
        case FunKind::Cos: return "cos";
        case FunKind::Tan: return "tan";
        case FunKind::Exp: return "exp";
        case FunKind::Log: return "log";
        case FunKind::Sqrt: return "sqrt";
        case FunKind::Sinh: return "sinh";
        case FunKind::Cosh: return "cosh";
    }
    return "?";
}

namespace detail {

struct Parser {
    const std::string& s;
    int arity;
    std::size_t pos = 0;

    void skip() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    char peek() {
        skip();
        return pos < s.size() ? s[pos] : '\0';
    }

    [[noreturn]] void fail(const std::string& what) { throw ParseError(what, pos); }

    ExprPtr make(ExprNode n) { return std::make_shared<const ExprNode>(std::move(n)); }

    ExprPtr number() {
        const std::size_t start = pos;
        while (pos < s.size() && (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.')) ++pos;
        if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
            std::size_t ep = pos + 1;
            if (ep < s.size() && (s[ep] == '+' || s[ep] == '-')) ++ep;
            if (ep < s.size() && std::isdigit(static_cast<unsigned char>(s[ep]))) {
                pos = ep;
                while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
            }
        }
        try {
            return make({.kind = NodeKind::Num, .num = std::stod(s.substr(start, pos - start))});
        } catch (const std::exception&) {
            pos = start;
            fail("malformed number");
        }
    }

    ExprPtr identifier() {
        const std::size_t start = pos;
        while (pos < s.size() &&
               (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
            ++pos;
        const std::string name = s.substr(start, pos - start);
        if (name.size() == 2 && name[0] == 'x' && name[1] >= '1' && name[1] <= '9') {
            const int idx = name[1] - '0';
            if (idx > arity) {
                pos = start;
                fail("coordinate " + name + " exceeds arity " + std::to_string(arity));
            }
            return make({.kind = NodeKind::Coord, .coord = idx - 1});
        }
        static const std::pair<const char*, FunKind> funs[] = {
            {"sin", FunKind::Sin},   {"cos", FunKind::Cos},  {"tan", FunKind::Tan},
            {"exp", FunKind::Exp},   {"log", FunKind::Log},  {"sqrt", FunKind::Sqrt},
            {"sinh", FunKind::Sinh}, {"cosh", FunKind::Cosh}};
        for (const auto& [fname, fk] : funs) {
            if (name == fname) {
                if (peek() != '(') fail("expected '(' after function " + name);
                ++pos;
                ExprPtr arg = expr();
                if (peek() != ')') fail("expected ')'");
                ++pos;
                return make({.kind = NodeKind::Fun, .fun = fk, .a = arg});
            }
        }
        pos = start;
        fail("unknown identifier '" + name + "'");
    }

    ExprPtr base() {
        const char c = peek();
        if (c == '(') {
            ++pos;
            ExprPtr e = expr();
            if (peek() != ')') fail("expected ')'");
            ++pos;
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        fail("syntax error");
    }

    ExprPtr factor() {
        if (peek() == '-') {
            ++pos;
            ExprPtr inner = factor();
            // fold literal negation so print -> parse round-trips to the same tree
            if (inner->kind == NodeKind::Num)
                return make({.kind = NodeKind::Num, .num = -inner->num});
            return make({.kind = NodeKind::Neg, .a = inner});
        }
        ExprPtr b = base();
        if (peek() == '^') {
            ++pos;
            ExprPtr e = factor();
            return make({.kind = NodeKind::Pow, .a = b, .b = e});
        }
        return b;
    }

    ExprPtr term() {
        ExprPtr lhs = factor();
        for (;;) {
            const char c = peek();
            if (c != '*' && c != '/') return lhs;
            ++pos;
            ExprPtr rhs = factor();
            lhs = make({.kind = c == '*' ? NodeKind::Mul : NodeKind::Div, .a = lhs, .b = rhs});
        }
    }

    ExprPtr expr() {
        ExprPtr lhs = term();
        for (;;) {
            const char c = peek();
            if (c != '+' && c != '-') return lhs;
            ++pos;
            ExprPtr rhs = term();
            lhs = make({.kind = c == '+' ? NodeKind::Add : NodeKind::Sub, .a = lhs, .b = rhs});
        }
    }
};

inline double eval_node(const ExprNode& n, const Point& x) {
    switch (n.kind) {
        case NodeKind::Num: return n.num;
        case NodeKind::Coord: return x[static_cast<std::size_t>(n.coord)];
        case NodeKind::Neg: return -eval_node(*n.a, x);
        case NodeKind::Add: return eval_node(*n.a, x) + eval_node(*n.b, x);
        case NodeKind::Sub: return eval_node(*n.a, x) - eval_node(*n.b, x);
        case NodeKind::Mul: return eval_node(*n.a, x) * eval_node(*n.b, x);
        case NodeKind::Div: {
            const double d = eval_node(*n.b, x);
            if (d == 0.0) throw EvalError("division by zero");
            return eval_node(*n.a, x) / d;
        }
        case NodeKind::Pow: {
            const double b = eval_node(*n.a, x);
            const double e = eval_node(*n.b, x);
            if (b > 0.0) return std::pow(b, e);
            if (b == 0.0) {
                if (e < 0.0) throw EvalError("0 raised to a negative power");
                return e == 0.0 ? 1.0 : 0.0;
            }
            if (e == std::floor(e)) return std::pow(b, e);
            throw EvalError("negative base with non-integer exponent");
        }
        case NodeKind::Fun: {
            const double v = eval_node(*n.a, x);
            switch (n.fun) {
                case FunKind::Sin: return std::sin(v);
                case FunKind::Cos: return std::cos(v);
                case FunKind::Tan: return std::tan(v);
                case FunKind::Exp: return std::exp(v);
                case FunKind::Log:
                    if (v <= 0.0) throw EvalError("log of non-positive value");
                    return std::log(v);
                case FunKind::Sqrt:
                    if (v < 0.0) throw EvalError("sqrt of negative value");
                    return std::sqrt(v);
                case FunKind::Sinh: return std::sinh(v);
                case FunKind::Cosh: return std::cosh(v);
            }
        }
    }
    throw Error("corrupt expression node");
}

inline void print_node(const ExprNode& n, std::string& out) {
    switch (n.kind) {
        case NodeKind::Num: out += format_double(n.num); return;
        case NodeKind::Coord:
            out += 'x';
            out += static_cast<char>('1' + n.coord);
            return;
        case NodeKind::Neg:
            out += "(-";
            print_node(*n.a, out);
            out += ')';
            return;
        case NodeKind::Add:
        case NodeKind::Sub:
        case NodeKind::Mul:
        case NodeKind::Div:
        case NodeKind::Pow: {
            const char op = n.kind == NodeKind::Add   ? '+'
                            : n.kind == NodeKind::Sub ? '-'
                            : n.kind == NodeKind::Mul ? '*'
                            : n.kind == NodeKind::Div ? '/'
                                                      : '^';
            out += '(';
            print_node(*n.a, out);
            out += ' ';
            out += op;
            out += ' ';
            print_node(*n.b, out);
            out += ')';
            return;
        }
        case NodeKind::Fun:
            out += fun_name(n.fun);
            out += '(';
            print_node(*n.a, out);
            out += ')';
            return;
    }
}

inline bool equal_nodes(const ExprNode& a, const ExprNode& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case NodeKind::Num: return a.num == b.num;
        case NodeKind::Coord: return a.coord == b.coord;
        case NodeKind::Neg: return equal_nodes(*a.a, *b.a);
        case NodeKind::Fun: return a.fun == b.fun && equal_nodes(*a.a, *b.a);
        default: return equal_nodes(*a.a, *b.a) && equal_nodes(*a.b, *b.b);
    }
}

}  // namespace detail

// A parsed scalar expression over x1..x(arity).  Immutable; evaluation is a
// pure tree walk, so identical inputs give bit-identical outputs.
class ScalarField {
  public:
    ScalarField() = default;
    ScalarField(ExprPtr root, int arity) : root_(std::move(root)), arity_(arity) {}

    int arity() const { return arity_; }
    const ExprPtr& root() const { return root_; }
    bool valid() const { return root_ != nullptr; }

    double value(const Point& x) const { return detail::eval_node(*root_, x); }

    std::string print() const {
        std::string out;
        detail::print_node(*root_, out);
        return out;
    }

    bool same_tree(const ScalarField& other) const {
        return arity_ == other.arity_ && detail::equal_nodes(*root_, *other.root_);
    }

  private:
    ExprPtr root_;
    int arity_ = 0;
};

inline ScalarField parse_field(const std::string& text, int arity) {
    if (arity < 1 || arity > kMaxDim)
        throw ValidationError("arity must be between 1 and " + std::to_string(kMaxDim));
    if (text.empty()) throw ParseError("empty expression", 0);
    detail::Parser p{text, arity};
    ExprPtr root = p.expr();
    p.skip();
    if (p.pos != text.size()) p.fail("unexpected trailing input");
    return ScalarField(std::move(root), arity);
}

inline ScalarField constant_field(double v, int arity) {
    return ScalarField(std::make_shared<const ExprNode>(ExprNode{.kind = NodeKind::Num, .num = v}),
                       arity);
}

}  // namespace gluecd
