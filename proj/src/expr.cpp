#include "hcif/expr.hpp"

#include <array>
#include <cassert>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <system_error>
#include <utility>

namespace hcif {

struct Expr::Node {
    ExprKind kind = ExprKind::boolean;
    bool truth = true;
    double value = 0.0;
    VarRef ref;
    std::vector<Expr> children;
};

namespace {

std::shared_ptr<const Expr::Node> literal_node(bool truth)
{
    static const auto true_node = [] {
        auto n = std::make_shared<Expr::Node>();
        n->truth = true;
        return std::shared_ptr<const Expr::Node>(n);
    }();
    static const auto false_node = [] {
        auto n = std::make_shared<Expr::Node>();
        n->truth = false;
        return std::shared_ptr<const Expr::Node>(n);
    }();
    return truth ? true_node : false_node;
}

} // namespace

std::string to_string(const VarRef& ref)
{
    std::string s = ref.name;
    if (ref.dotted)
        s += '\'';
    if (ref.stepped)
        s += '+';
    return s;
}

bool is_comparison(ExprKind kind)
{
    switch (kind) {
    case ExprKind::eq:
    case ExprKind::ne:
    case ExprKind::lt:
    case ExprKind::le:
    case ExprKind::gt:
    case ExprKind::ge:
        return true;
    default:
        return false;
    }
}

bool is_arithmetic(ExprKind kind)
{
    switch (kind) {
    case ExprKind::number:
    case ExprKind::variable:
    case ExprKind::negate:
    case ExprKind::exp:
    case ExprKind::add:
    case ExprKind::subtract:
    case ExprKind::multiply:
        return true;
    default:
        return false;
    }
}

bool is_unary(ExprKind kind)
{
    return kind == ExprKind::negate || kind == ExprKind::logical_not || kind == ExprKind::exp;
}

bool is_binary(ExprKind kind)
{
    return kind >= ExprKind::add;
}

Expr::Expr() : node_(literal_node(true)) {}

Expr::Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expr Expr::boolean(bool value)
{
    return Expr(literal_node(value));
}

Expr Expr::number(double value)
{
    auto n = std::make_shared<Node>();
    n->kind = ExprKind::number;
    n->value = value;
    return Expr(std::move(n));
}

Expr Expr::variable(VarRef ref)
{
    auto n = std::make_shared<Node>();
    n->kind = ExprKind::variable;
    n->ref = std::move(ref);
    return Expr(std::move(n));
}

Expr Expr::unary(ExprKind kind, Expr operand)
{
    if (!is_unary(kind))
        throw std::invalid_argument("Expr::unary: not a unary operator");
    if (kind == ExprKind::negate && operand.kind() == ExprKind::number)
        return number(-operand.number_value());
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->children.push_back(std::move(operand));
    return Expr(std::move(n));
}

Expr Expr::binary(ExprKind kind, Expr lhs, Expr rhs)
{
    if (!is_binary(kind))
        throw std::invalid_argument("Expr::binary: not a binary operator");
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->children.push_back(std::move(lhs));
    n->children.push_back(std::move(rhs));
    return Expr(std::move(n));
}

ExprKind Expr::kind() const { return node_->kind; }
bool Expr::bool_value() const { return node_->truth; }
double Expr::number_value() const { return node_->value; }
const VarRef& Expr::var() const { return node_->ref; }
const Expr& Expr::operand() const { return node_->children.at(0); }
const Expr& Expr::lhs() const { return node_->children.at(0); }
const Expr& Expr::rhs() const { return node_->children.at(1); }

bool Expr::is_true() const { return kind() == ExprKind::boolean && bool_value(); }
bool Expr::is_false() const { return kind() == ExprKind::boolean && !bool_value(); }

bool operator==(const Expr& a, const Expr& b)
{
    if (a.node_ == b.node_)
        return true;
    const auto& x = *a.node_;
    const auto& y = *b.node_;
    if (x.kind != y.kind)
        return false;
    switch (x.kind) {
    case ExprKind::boolean:
        return x.truth == y.truth;
    case ExprKind::number:
        return x.value == y.value;
    case ExprKind::variable:
        return x.ref == y.ref;
    default:
        return x.children == y.children;
    }
}

namespace {

void flatten_conjuncts(const Expr& e, std::vector<Expr>& out)
{
    if (e.kind() == ExprKind::logical_and) {
        flatten_conjuncts(e.lhs(), out);
        flatten_conjuncts(e.rhs(), out);
    } else {
        out.push_back(e);
    }
}

} // namespace

std::vector<Expr> conjuncts(const Expr& e)
{
    std::vector<Expr> out;
    flatten_conjuncts(e, out);
    return out;
}

Expr conj(std::span<const Expr> parts)
{
    std::vector<Expr> kept;
    for (const auto& part : parts) {
        for (auto& c : conjuncts(part)) {
            if (c.is_false())
                return Expr::boolean(false);
            if (c.is_true())
                continue;
            bool seen = false;
            for (const auto& k : kept)
                seen = seen || k == c;
            if (!seen)
                kept.push_back(std::move(c));
        }
    }
    if (kept.empty())
        return Expr::boolean(true);
    Expr acc = kept.front();
    for (std::size_t i = 1; i < kept.size(); ++i)
        acc = Expr::binary(ExprKind::logical_and, acc, kept[i]);
    return acc;
}

Expr conj(const Expr& a, const Expr& b)
{
    const std::array<Expr, 2> parts{a, b};
    return conj(parts);
}

namespace {

template <typename LeafFn>
Expr rebuild(const Expr& e, LeafFn&& leaf)
{
    switch (e.kind()) {
    case ExprKind::boolean:
    case ExprKind::number:
    case ExprKind::variable:
        return leaf(e);
    case ExprKind::negate:
    case ExprKind::logical_not:
    case ExprKind::exp:
        return Expr::unary(e.kind(), rebuild(e.operand(), leaf));
    default:
        return Expr::binary(e.kind(), rebuild(e.lhs(), leaf), rebuild(e.rhs(), leaf));
    }
}

template <typename Fn>
void visit_leaves(const Expr& e, Fn&& fn)
{
    switch (e.kind()) {
    case ExprKind::boolean:
    case ExprKind::number:
    case ExprKind::variable:
        fn(e);
        return;
    case ExprKind::negate:
    case ExprKind::logical_not:
    case ExprKind::exp:
        visit_leaves(e.operand(), fn);
        return;
    default:
        visit_leaves(e.lhs(), fn);
        visit_leaves(e.rhs(), fn);
    }
}

} // namespace

Expr to_stepped(const Expr& e)
{
    return rebuild(e, [](const Expr& leaf) {
        if (leaf.kind() != ExprKind::variable)
            return leaf;
        VarRef ref = leaf.var();
        ref.stepped = true;
        return Expr::variable(std::move(ref));
    });
}

Expr map_numbers(const Expr& e, double (*f)(double))
{
    return rebuild(e, [f](const Expr& leaf) {
        if (leaf.kind() != ExprKind::number)
            return leaf;
        return Expr::number(f(leaf.number_value()));
    });
}

void collect_variables(const Expr& e, std::set<VarRef>& out)
{
    visit_leaves(e, [&](const Expr& leaf) {
        if (leaf.kind() == ExprKind::variable)
            out.insert(leaf.var());
    });
}

bool mentions_stepped(const Expr& e)
{
    bool found = false;
    visit_leaves(e, [&](const Expr& leaf) {
        found = found || (leaf.kind() == ExprKind::variable && leaf.var().stepped);
    });
    return found;
}

bool is_variable_free(const Expr& e)
{
    bool found = false;
    visit_leaves(e, [&](const Expr& leaf) { found = found || leaf.kind() == ExprKind::variable; });
    return !found;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

int precedence(ExprKind kind)
{
    switch (kind) {
    case ExprKind::logical_or:
        return 1;
    case ExprKind::logical_and:
        return 2;
    case ExprKind::logical_not:
        return 3;
    case ExprKind::eq:
    case ExprKind::ne:
    case ExprKind::lt:
    case ExprKind::le:
    case ExprKind::gt:
    case ExprKind::ge:
        return 4;
    case ExprKind::add:
    case ExprKind::subtract:
        return 5;
    case ExprKind::multiply:
        return 6;
    case ExprKind::negate:
        return 7;
    default:
        return 8;
    }
}

const char* symbol(ExprKind kind)
{
    switch (kind) {
    case ExprKind::add: return "+";
    case ExprKind::subtract: return "-";
    case ExprKind::multiply: return "*";
    case ExprKind::eq: return "=";
    case ExprKind::ne: return "!=";
    case ExprKind::lt: return "<";
    case ExprKind::le: return "<=";
    case ExprKind::gt: return ">";
    case ExprKind::ge: return ">=";
    case ExprKind::logical_and: return "and";
    case ExprKind::logical_or: return "or";
    default: return "?";
    }
}

std::string format_number(double v)
{
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    assert(ec == std::errc());
    return std::string(buf.data(), end);
}

int effective_precedence(const Expr& e)
{
    // A negative literal prints with a leading minus, so it binds like negation.
    if (e.kind() == ExprKind::number && (e.number_value() < 0 || (e.number_value() == 0 && std::signbit(e.number_value()))))
        return precedence(ExprKind::negate);
    return precedence(e.kind());
}

void print(const Expr& e, std::string& out);

void print_child(const Expr& child, int min_prec, std::string& out)
{
    if (effective_precedence(child) < min_prec) {
        out += '(';
        print(child, out);
        out += ')';
    } else {
        print(child, out);
    }
}

void print(const Expr& e, std::string& out)
{
    switch (e.kind()) {
    case ExprKind::boolean:
        out += e.bool_value() ? "true" : "false";
        return;
    case ExprKind::number:
        out += format_number(e.number_value());
        return;
    case ExprKind::variable:
        out += to_string(e.var());
        return;
    case ExprKind::negate:
        out += '-';
        print_child(e.operand(), precedence(ExprKind::negate), out);
        return;
    case ExprKind::logical_not:
        out += "not ";
        print_child(e.operand(), precedence(ExprKind::logical_not), out);
        return;
    case ExprKind::exp:
        out += "exp(";
        print(e.operand(), out);
        out += ')';
        return;
    default:
        break;
    }
    const int prec = precedence(e.kind());
    // Comparisons do not chain, so both operands need strictly higher precedence.
    const bool chained = is_comparison(e.kind());
    print_child(e.lhs(), chained ? prec + 1 : prec, out);
    out += ' ';
    out += symbol(e.kind());
    out += ' ';
    print_child(e.rhs(), prec + 1, out);
}

} // namespace

std::string to_string(const Expr& e)
{
    std::string out;
    print(e, out);
    return out;
}

} // namespace hcif
