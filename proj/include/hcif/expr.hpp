#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace hcif {

// A variable occurrence in one of its name forms: x, x' (derivative),
// x+ and x'+ (value after an action).
struct VarRef {
    std::string name;
    bool dotted = false;
    bool stepped = false;

    friend auto operator<=>(const VarRef&, const VarRef&) = default;
    friend bool operator==(const VarRef&, const VarRef&) = default;
};

std::string to_string(const VarRef& ref);

enum class ExprKind : std::uint8_t {
    boolean,
    number,
    variable,
    negate,
    logical_not,
    exp,
    add,
    subtract,
    multiply,
    eq,
    ne,
    lt,
    le,
    gt,
    ge,
    logical_and,
    logical_or,
};

[[nodiscard]] bool is_comparison(ExprKind kind);
[[nodiscard]] bool is_arithmetic(ExprKind kind);
[[nodiscard]] bool is_unary(ExprKind kind);
[[nodiscard]] bool is_binary(ExprKind kind);

/// Immutable predicate/term tree. Copies share structure.
class Expr {
public:
    /// The literal `true`.
    Expr();

    static Expr boolean(bool value);
    static Expr number(double value);
    static Expr variable(VarRef ref);
    /// Negating a numeric literal folds into the literal.
    static Expr unary(ExprKind kind, Expr operand);
    static Expr binary(ExprKind kind, Expr lhs, Expr rhs);

    [[nodiscard]] ExprKind kind() const;
    [[nodiscard]] bool bool_value() const;
    [[nodiscard]] double number_value() const;
    [[nodiscard]] const VarRef& var() const;
    [[nodiscard]] const Expr& operand() const;
    [[nodiscard]] const Expr& lhs() const;
    [[nodiscard]] const Expr& rhs() const;

    [[nodiscard]] bool is_true() const;
    [[nodiscard]] bool is_false() const;

    friend bool operator==(const Expr& a, const Expr& b);

    struct Node;

private:
    explicit Expr(std::shared_ptr<const Node> node);
    std::shared_ptr<const Node> node_;
};

/// Conjunction with light normalisation: `true` operands vanish, a `false`
/// operand absorbs the whole conjunction and structurally repeated conjuncts
/// are dropped. The result is left-nested.
Expr conj(const Expr& a, const Expr& b);
Expr conj(std::span<const Expr> parts);

/// Top-level conjuncts of `e` (a non-conjunction yields itself).
std::vector<Expr> conjuncts(const Expr& e);

/// Rename every plain or dotted variable to its stepped form.
Expr to_stepped(const Expr& e);

void collect_variables(const Expr& e, std::set<VarRef>& out);
[[nodiscard]] bool mentions_stepped(const Expr& e);
[[nodiscard]] bool is_variable_free(const Expr& e);

/// Rewrite every numeric literal via `f` (used by mutation tooling).
Expr map_numbers(const Expr& e, double (*f)(double));

/// Surface syntax rendering; parses back to a structurally equal tree.
std::string to_string(const Expr& e);

} // namespace hcif
