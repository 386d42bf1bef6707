#pragma once

#include "hcif/model.hpp"
#include "hcif/predicates.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace hcif {

/// 2^-5 unless HCIF_DELTA holds a positive number.
[[nodiscard]] double default_delta();
/// {0.125, 0.5, 1, 2}
[[nodiscard]] std::vector<double> default_durations();

struct State {
    CompositionPtr term;
    Valuation valuation;
};

/// Sampled (rho, theta, omega) over [0, duration].
struct TrajectoryBundle {
    double duration = 0.0;
    double step = 0.0;
    std::vector<Valuation> rho;
    std::vector<ActionSet> theta;
    std::vector<bool> omega;

    [[nodiscard]] std::size_t size() const { return rho.size(); }
    [[nodiscard]] double time_at(std::size_t k) const;
};

struct ActionLabel {
    std::string action;
};

struct EnvLabel {
    bool terminating = false;
};

using Label = std::variant<ActionLabel, EnvLabel, TrajectoryBundle>;

struct Transition {
    Label label;
    State target;
};

struct EnabledEdge {
    const Edge* edge = nullptr;
    Valuation next;
    std::set<VarKey> written;
};

struct EnvStep {
    bool terminating = false;
    CompositionPtr target;
};

struct ActionStep {
    std::string action;
    CompositionPtr target;
    Valuation next;
    /// Entries fixed by the step: reset assignments plus values bound while
    /// entering substructures.
    std::set<VarKey> written;
};

struct TimeStep {
    TrajectoryBundle bundle;
    CompositionPtr target;
};

enum class Rule : std::uint8_t {
    atomic_action_enter,
    atomic_action_plain,
    atomic_action_inner,
    atomic_time_nested,
    atomic_time_leaf,
    atomic_env_nested,
    atomic_env_leaf,
    postfix_action_enter,
    postfix_action_plain,
    postfix_action_inner,
    postfix_time,
    postfix_env,
    parallel_action_sync,
    parallel_action_interleave,
    parallel_time,
    parallel_env,
};

inline constexpr std::size_t rule_count = 16;

[[nodiscard]] const char* rule_name(Rule rule);

struct RuleTally {
    std::array<std::uint64_t, rule_count> fired{};

    void record(Rule rule) { ++fired[static_cast<std::size_t>(rule)]; }
    [[nodiscard]] std::uint64_t count(Rule rule) const { return fired[static_cast<std::size_t>(rule)]; }
    void merge(const RuleTally& other);
};

struct EngineOptions {
    double delta = default_delta();
    /// When entering a substructure after an action, bind variables that the
    /// step has not written to the constants required by `x = c` conjuncts of
    /// the chosen initial locations.
    bool bind_entry_init = true;
    RuleTally* tally = nullptr;
};

/// theta01 = (theta0 n theta1) u (theta0 \ S) u (theta1 \ S)
[[nodiscard]] ActionSet combine_parallel_guards(const ActionSet& theta0, const ActionSet& theta1, const ActionSet& sync);

/// Transition relations of the hybrid transition system induced by a model.
class Semantics {
public:
    explicit Semantics(Declarations decls, EngineOptions options = {});

    [[nodiscard]] const Declarations& declarations() const { return decls_; }
    [[nodiscard]] const EngineOptions& options() const { return options_; }

    /// Edges of `automaton` whose source is initial under sigma, whose guard
    /// holds and whose reset has a solution.
    [[nodiscard]] std::vector<EnabledEdge> enabled_edges(const AtomicAutomaton& automaton, const Valuation& sigma) const;

    [[nodiscard]] std::vector<EnvStep> env_successors(const CompositionPtr& p, const Valuation& sigma) const;
    [[nodiscard]] std::vector<ActionStep> action_successors(const CompositionPtr& p, const Valuation& sigma) const;
    [[nodiscard]] std::vector<TimeStep> time_successors(const CompositionPtr& p, const Valuation& sigma, double t) const;
    [[nodiscard]] std::vector<TimeStep>
    time_successors(const CompositionPtr& p, const Valuation& sigma, double t, double delta) const;

    /// Some environment transition of p under sigma is labelled true.
    [[nodiscard]] bool can_terminate(const CompositionPtr& p, const Valuation& sigma) const;

    /// Action, environment and time transitions, the latter for every duration.
    [[nodiscard]] std::vector<Transition>
    successors(const State& state, const std::vector<double>& durations) const;

private:
    struct Entry {
        bool terminating = false;
        CompositionPtr term;
        Valuation valuation;
        std::set<VarKey> bound;
    };

    void record(Rule rule) const;

    std::vector<Entry> initialize(const CompositionPtr& p, const Valuation& sigma, const std::set<VarKey>* fixed,
                                  bool count = true) const;
    std::vector<ActionStep> take_edge(const AtomicAutomaton& automaton, const EnabledEdge& step, bool postfix) const;
    void guards_and_termination(const Composition& q, const Valuation& at, ActionSet& theta, bool& omega) const;
    void tally_time(const Composition& source, const Composition& target) const;

    Declarations decls_;
    EngineOptions options_;
};

} // namespace hcif
