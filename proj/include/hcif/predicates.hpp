#pragma once

#include "hcif/expr.hpp"
#include "hcif/valuation.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace hcif {

// ---------------------------------------------------------------------------
// Satisfaction

/// Truth of `e` under `sigma`. Stepped occurrences are unbound here.
/// Throws UnboundVariable, SortError.
[[nodiscard]] bool satisfies(const Valuation& sigma, const Expr& e);

/// Truth of `e` under sigma extended with the stepped entries of `next`.
[[nodiscard]] bool satisfies(const Valuation& sigma, const SteppedValuation& next, const Expr& e);

/// Numeric value of an arithmetic term.
[[nodiscard]] double evaluate_number(const Valuation& sigma, const Expr& e);

/// `x = c` or `c = x` with `c` variable-free; yields the binding when `x` is a
/// plain variable or the derivative of a continuous one.
[[nodiscard]] std::optional<std::pair<VarKey, double>>
constant_binding(const Expr& conjunct, const Declarations& decls);

// ---------------------------------------------------------------------------
// Resets

struct Assignment {
    VarKey target;
    Expr value;
};

/// A reset predicate decomposed into functional assignments `x+ = e` and
/// conditions over the current valuation.
struct ResetPlan {
    std::vector<Assignment> assignments;
    std::vector<Expr> conditions;
    bool unsatisfiable = false;
};

/// Throws UnsupportedReset when `r` falls outside the functional fragment.
[[nodiscard]] ResetPlan analyse_reset(const Expr& r);

struct ResetOutcome {
    Valuation next;
    std::set<VarKey> written;
};

/// Unassigned entries keep their value; derivatives of discrete variables are 0.
[[nodiscard]] std::optional<ResetOutcome>
apply_reset(const Valuation& sigma, const ResetPlan& plan, const Declarations& decls);

/// All sigma' with sigma u sigma'+ |= r. Empty or a singleton.
[[nodiscard]] std::vector<Valuation>
solve_reset(const Valuation& sigma, const Expr& r, const Declarations& decls);

// ---------------------------------------------------------------------------
// Flows

/// x' = a*x + b
struct Ode {
    double a = 0.0;
    double b = 0.0;

    friend bool operator==(const Ode&, const Ode&) = default;
};

struct FlowSpec {
    std::map<std::string, Ode> odes;
    /// Conjuncts checked pointwise along the trajectory.
    std::vector<Expr> constraints;
};

/// Split a tcp predicate into per-variable ODEs and pointwise constraints.
/// Throws InconsistentDynamics on two different ODEs for one variable.
[[nodiscard]] FlowSpec extract_flow_spec(const Expr& tcp, const Declarations& decls);

/// Closed-form value at time `s` of the solution starting at `x0`.
[[nodiscard]] double ode_solution(const Ode& ode, double x0, double s);

/// Number of intervals n with t = n*delta. Throws InvalidDuration.
[[nodiscard]] std::size_t interval_count(double t, double delta);

/// Variable trajectory sampled at k*delta, k = 0..n.
struct Trajectory {
    double duration = 0.0;
    double step = 0.0;
    std::vector<Valuation> samples;

    [[nodiscard]] double time_at(std::size_t k) const;
};

/// The deterministic trajectory of `tcp` from `start` over [0, t], or nullopt
/// when a pointwise conjunct fails at some sample in [0, t). Continuous
/// variables without an ODE are held constant.
[[nodiscard]] std::optional<Trajectory>
flow(const Valuation& start, const Expr& tcp, double t, double delta, const Declarations& decls);

} // namespace hcif
