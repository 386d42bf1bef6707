#pragma once

#include "hcif/model.hpp"
#include "hcif/sos.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace hcif {

struct GameConfig {
    std::size_t depth = 6;
    std::vector<double> durations = default_durations();
    double delta = default_delta();
    std::vector<Valuation> initial_valuations;
    /// Absolute tolerance for valuation matching.
    double tolerance = 1e-9;
};

enum class Side { left, right };

struct GameStep {
    Side attacker = Side::left;
    Transition move;
    /// Absent on the final step: the defender has no matching transition.
    std::optional<Transition> response;
};

struct EquivalentUpToBound {
    std::size_t depth = 0;
    std::size_t pairs = 0;
};

struct Distinguished {
    Valuation initial;
    std::vector<GameStep> trace;
    std::string reason;
};

using Verdict = std::variant<EquivalentUpToBound, Distinguished>;

[[nodiscard]] inline bool equivalent(const Verdict& v) { return std::holds_alternative<EquivalentUpToBound>(v); }

/// Labels equal up to tolerance: action names, env booleans, or durations with
/// rho within tolerance, theta equal as sets and omega equal at every sample.
[[nodiscard]] bool labels_match(const Label& a, const Label& b, double tolerance);
[[nodiscard]] bool transitions_match(const Transition& a, const Transition& b, double tolerance);

[[nodiscard]] std::string describe(const Label& label);
[[nodiscard]] std::string describe(const GameStep& step);

/// Bounded stateless-bisimulation game between p and q over decls, played
/// from every initial valuation of cfg.
[[nodiscard]] Verdict bounded_bisim(const CompositionPtr& p, const CompositionPtr& q, const Declarations& decls,
                                    const GameConfig& cfg);

/// Re-executes a distinguishing trace; true when every recorded move and
/// response is reproduced and the final move is unmatched.
[[nodiscard]] bool replay(const CompositionPtr& p, const CompositionPtr& q, const Declarations& decls,
                          const GameConfig& cfg, const Distinguished& verdict);

/// A one-hole context: `hole ||_S other`, `other ||_S hole` or `hole : parent`.
struct Context {
    enum class Kind { parallel_left, parallel_right, postfix };

    Kind kind = Kind::parallel_left;
    ActionSet sync;
    CompositionPtr other;
    std::optional<AtomicAutomaton> parent;

    [[nodiscard]] CompositionPtr apply(const CompositionPtr& hole) const;
    [[nodiscard]] std::string describe() const;
};

struct CongruenceReport {
    /// bounded_bisim(p, q) held, so the contexts are meaningful.
    bool precondition = false;
    Verdict base;
    std::vector<Verdict> verdicts;
};

[[nodiscard]] CongruenceReport check_congruence_sample(const CompositionPtr& p, const CompositionPtr& q,
                                                       const std::vector<Context>& contexts,
                                                       const Declarations& decls, const GameConfig& cfg);

} // namespace hcif
