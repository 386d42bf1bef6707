#include "hcif/predicates.hpp"

#include "hcif/errors.hpp"

#include <cmath>

namespace hcif {

namespace {

struct Value {
    bool is_bool = false;
    double number = 0.0;
    bool truth = false;
};

Value number_value(double v) { return {false, v, false}; }
Value bool_value(bool b) { return {true, 0.0, b}; }

class Scope {
public:
    Scope(const Valuation& current, const Valuation* next) : current_(current), next_(next) {}

    [[nodiscard]] double lookup(const VarRef& ref) const
    {
        const VarKey key(ref.name, ref.dotted);
        if (!ref.stepped)
            return current_.at(key);
        if (next_ == nullptr)
            throw UnboundVariable(to_string(ref));
        return next_->at(key);
    }

private:
    const Valuation& current_;
    const Valuation* next_;
};

Value eval(const Expr& e, const Scope& scope);

double eval_number(const Expr& e, const Scope& scope)
{
    const Value v = eval(e, scope);
    if (v.is_bool)
        throw SortError("expected a number: " + to_string(e));
    return v.number;
}

bool eval_bool(const Expr& e, const Scope& scope)
{
    const Value v = eval(e, scope);
    if (!v.is_bool)
        throw SortError("expected a predicate: " + to_string(e));
    return v.truth;
}

Value eval(const Expr& e, const Scope& scope)
{
    switch (e.kind()) {
    case ExprKind::boolean:
        return bool_value(e.bool_value());
    case ExprKind::number:
        return number_value(e.number_value());
    case ExprKind::variable:
        return number_value(scope.lookup(e.var()));
    case ExprKind::negate:
        return number_value(-eval_number(e.operand(), scope));
    case ExprKind::exp:
        return number_value(std::exp(eval_number(e.operand(), scope)));
    case ExprKind::logical_not:
        return bool_value(!eval_bool(e.operand(), scope));
    case ExprKind::add:
        return number_value(eval_number(e.lhs(), scope) + eval_number(e.rhs(), scope));
    case ExprKind::subtract:
        return number_value(eval_number(e.lhs(), scope) - eval_number(e.rhs(), scope));
    case ExprKind::multiply:
        return number_value(eval_number(e.lhs(), scope) * eval_number(e.rhs(), scope));
    case ExprKind::logical_and:
        return bool_value(eval_bool(e.lhs(), scope) && eval_bool(e.rhs(), scope));
    case ExprKind::logical_or:
        return bool_value(eval_bool(e.lhs(), scope) || eval_bool(e.rhs(), scope));
    case ExprKind::eq:
    case ExprKind::ne: {
        const Value l = eval(e.lhs(), scope);
        const Value r = eval(e.rhs(), scope);
        if (l.is_bool != r.is_bool)
            throw SortError("mixed-sort equality: " + to_string(e));
        const bool same = l.is_bool ? l.truth == r.truth : l.number == r.number;
        return bool_value(e.kind() == ExprKind::eq ? same : !same);
    }
    case ExprKind::lt:
        return bool_value(eval_number(e.lhs(), scope) < eval_number(e.rhs(), scope));
    case ExprKind::le:
        return bool_value(eval_number(e.lhs(), scope) <= eval_number(e.rhs(), scope));
    case ExprKind::gt:
        return bool_value(eval_number(e.lhs(), scope) > eval_number(e.rhs(), scope));
    case ExprKind::ge:
        return bool_value(eval_number(e.lhs(), scope) >= eval_number(e.rhs(), scope));
    }
    throw SortError("unknown expression kind");
}

bool is_stepped_variable(const Expr& e)
{
    return e.kind() == ExprKind::variable && e.var().stepped;
}

// (a, b) with e == a*x + b, when e is affine in the plain variable x.
std::optional<std::pair<double, double>> affine_in(const Expr& e, const std::string& x)
{
    using Affine = std::optional<std::pair<double, double>>;
    switch (e.kind()) {
    case ExprKind::number:
        return std::pair{0.0, e.number_value()};
    case ExprKind::variable: {
        const auto& ref = e.var();
        if (ref.name == x && !ref.dotted && !ref.stepped)
            return std::pair{1.0, 0.0};
        return std::nullopt;
    }
    case ExprKind::negate: {
        auto inner = affine_in(e.operand(), x);
        if (!inner)
            return std::nullopt;
        return std::pair{-inner->first, -inner->second};
    }
    case ExprKind::exp: {
        auto inner = affine_in(e.operand(), x);
        if (!inner || inner->first != 0.0)
            return std::nullopt;
        return std::pair{0.0, std::exp(inner->second)};
    }
    case ExprKind::add:
    case ExprKind::subtract: {
        Affine l = affine_in(e.lhs(), x);
        Affine r = affine_in(e.rhs(), x);
        if (!l || !r)
            return std::nullopt;
        const double sign = e.kind() == ExprKind::add ? 1.0 : -1.0;
        return std::pair{l->first + sign * r->first, l->second + sign * r->second};
    }
    case ExprKind::multiply: {
        Affine l = affine_in(e.lhs(), x);
        Affine r = affine_in(e.rhs(), x);
        if (!l || !r)
            return std::nullopt;
        if (l->first == 0.0)
            return std::pair{l->second * r->first, l->second * r->second};
        if (r->first == 0.0)
            return std::pair{r->second * l->first, r->second * l->second};
        return std::nullopt;
    }
    default:
        return std::nullopt;
    }
}

std::optional<std::pair<std::string, Ode>> as_ode(const Expr& conjunct, const Declarations& decls)
{
    if (conjunct.kind() != ExprKind::eq)
        return std::nullopt;
    auto try_side = [&](const Expr& derivative, const Expr& rhs) -> std::optional<std::pair<std::string, Ode>> {
        if (derivative.kind() != ExprKind::variable)
            return std::nullopt;
        const auto& ref = derivative.var();
        if (!ref.dotted || ref.stepped || !decls.is_continuous(ref.name))
            return std::nullopt;
        auto coeffs = affine_in(rhs, ref.name);
        if (!coeffs)
            return std::nullopt;
        return std::pair{ref.name, Ode{coeffs->first, coeffs->second}};
    };
    if (auto ode = try_side(conjunct.lhs(), conjunct.rhs()))
        return ode;
    return try_side(conjunct.rhs(), conjunct.lhs());
}

} // namespace

bool satisfies(const Valuation& sigma, const Expr& e)
{
    return eval_bool(e, Scope(sigma, nullptr));
}

bool satisfies(const Valuation& sigma, const SteppedValuation& next, const Expr& e)
{
    return eval_bool(e, Scope(sigma, &next.values));
}

double evaluate_number(const Valuation& sigma, const Expr& e)
{
    return eval_number(e, Scope(sigma, nullptr));
}

std::optional<std::pair<VarKey, double>> constant_binding(const Expr& conjunct, const Declarations& decls)
{
    if (conjunct.kind() != ExprKind::eq)
        return std::nullopt;
    auto try_side = [&](const Expr& var, const Expr& value) -> std::optional<std::pair<VarKey, double>> {
        if (var.kind() != ExprKind::variable || var.var().stepped || !is_variable_free(value))
            return std::nullopt;
        const auto& ref = var.var();
        if (ref.dotted && !decls.is_continuous(ref.name))
            return std::nullopt;
        const Value v = eval(value, Scope(Valuation{}, nullptr));
        if (v.is_bool)
            return std::nullopt;
        return std::pair{VarKey(ref.name, ref.dotted), v.number};
    };
    if (auto b = try_side(conjunct.lhs(), conjunct.rhs()))
        return b;
    return try_side(conjunct.rhs(), conjunct.lhs());
}

ResetPlan analyse_reset(const Expr& r)
{
    ResetPlan plan;
    for (const auto& c : conjuncts(r)) {
        if (c.is_true())
            continue;
        if (c.is_false()) {
            plan.unsatisfiable = true;
            continue;
        }
        if (!mentions_stepped(c)) {
            plan.conditions.push_back(c);
            continue;
        }
        if (c.kind() == ExprKind::eq) {
            if (is_stepped_variable(c.lhs()) && !mentions_stepped(c.rhs())) {
                plan.assignments.push_back({VarKey(c.lhs().var().name, c.lhs().var().dotted), c.rhs()});
                continue;
            }
            if (is_stepped_variable(c.rhs()) && !mentions_stepped(c.lhs())) {
                plan.assignments.push_back({VarKey(c.rhs().var().name, c.rhs().var().dotted), c.lhs()});
                continue;
            }
        }
        throw UnsupportedReset(to_string(c));
    }
    return plan;
}

std::optional<ResetOutcome> apply_reset(const Valuation& sigma, const ResetPlan& plan, const Declarations& decls)
{
    if (plan.unsatisfiable)
        return std::nullopt;
    for (const auto& cond : plan.conditions)
        if (!satisfies(sigma, cond))
            return std::nullopt;

    ResetOutcome out{sigma, {}};
    for (const auto& [target, value] : plan.assignments) {
        const double v = evaluate_number(sigma, value);
        if (out.written.count(target) != 0) {
            if (out.next.at(target) != v)
                return std::nullopt;
            continue;
        }
        out.next.set(target, v);
        out.written.insert(target);
    }
    for (const auto& d : decls.all()) {
        if (d.kind != VarKind::discrete)
            continue;
        const VarKey derivative = VarKey::derivative(d.name);
        if (out.written.count(derivative) != 0 && out.next.at(derivative) != 0.0)
            return std::nullopt;
        if (sigma.contains(VarKey(d.name)) || sigma.contains(derivative))
            out.next.set(derivative, 0.0);
    }
    return out;
}

std::vector<Valuation> solve_reset(const Valuation& sigma, const Expr& r, const Declarations& decls)
{
    auto outcome = apply_reset(sigma, analyse_reset(r), decls);
    if (!outcome)
        return {};
    return {std::move(outcome->next)};
}

FlowSpec extract_flow_spec(const Expr& tcp, const Declarations& decls)
{
    FlowSpec spec;
    for (const auto& c : conjuncts(tcp)) {
        if (c.is_true())
            continue;
        if (auto ode = as_ode(c, decls)) {
            auto [it, inserted] = spec.odes.emplace(ode->first, ode->second);
            if (!inserted && !(it->second == ode->second))
                throw InconsistentDynamics(ode->first);
            continue;
        }
        spec.constraints.push_back(c);
    }
    return spec;
}

double ode_solution(const Ode& ode, double x0, double s)
{
    if (ode.a == 0.0)
        return x0 + ode.b * s;
    const double rest = -ode.b / ode.a;
    return rest + (x0 - rest) * std::exp(ode.a * s);
}

std::size_t interval_count(double t, double delta)
{
    if (!(delta > 0.0) || !std::isfinite(delta))
        throw InvalidDuration("sample step must be positive");
    if (!(t >= 0.0) || !std::isfinite(t))
        throw InvalidDuration("duration must be non-negative");
    const double ratio = t / delta;
    const double n = std::round(ratio);
    if (std::fabs(n * delta - t) > 1e-9 * std::max(1.0, t))
        throw InvalidDuration("duration " + std::to_string(t) + " is not a multiple of the sample step " +
                              std::to_string(delta));
    return static_cast<std::size_t>(n);
}

double Trajectory::time_at(std::size_t k) const
{
    if (k + 1 == samples.size())
        return duration;
    return static_cast<double>(k) * step;
}

std::optional<Trajectory>
flow(const Valuation& start, const Expr& tcp, double t, double delta, const Declarations& decls)
{
    const std::size_t n = interval_count(t, delta);
    Trajectory rho{t, delta, {}};
    rho.samples.reserve(n + 1);
    rho.samples.push_back(start);
    if (n == 0)
        return rho;

    const FlowSpec spec = extract_flow_spec(tcp, decls);
    for (std::size_t k = 1; k <= n; ++k) {
        const double s = k == n ? t : static_cast<double>(k) * delta;
        Valuation sample = start;
        for (const auto& d : decls.all()) {
            const VarKey plain(d.name);
            const auto x0 = start.find(plain);
            if (!x0)
                continue;
            const VarKey derivative = VarKey::derivative(d.name);
            auto ode = d.kind == VarKind::continuous ? spec.odes.find(d.name) : spec.odes.end();
            if (ode == spec.odes.end()) {
                sample.set(derivative, 0.0);
                continue;
            }
            const double x = ode_solution(ode->second, *x0, s);
            sample.set(plain, x);
            sample.set(derivative, ode->second.a * x + ode->second.b);
        }
        rho.samples.push_back(std::move(sample));
    }
    for (std::size_t k = 0; k < n; ++k)
        for (const auto& c : spec.constraints)
            if (!satisfies(rho.samples[k], c))
                return std::nullopt;
    return rho;
}

} // namespace hcif
