#pragma once

#include "hcif/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hcif {

/// (v, w) with w absent (bottom) when v carries no substructure.
struct FlatLocation {
    std::string outer;
    std::optional<std::string> inner;

    friend bool operator==(const FlatLocation&, const FlatLocation&) = default;
};

/// "outer.inner", or just "outer" when inner is bottom.
[[nodiscard]] std::string flat_name(const FlatLocation& location);

/// Location set of the flattened automaton, in definition order.
[[nodiscard]] std::vector<FlatLocation> flat_locations(const AtomicAutomaton& alpha);

struct FlattenOptions {
    /// Drop edges that can never fire; see prune().
    bool prune = false;
};

/// Flattening of an automaton of depth at most 2 whose substructures are
/// flat atomic automata. Throws FlattenError("not depth-2 atomic").
[[nodiscard]] AtomicAutomaton flatten_depth2(const AtomicAutomaton& alpha, FlattenOptions options = {});

/// Flat automaton for alpha ||_S beta. Throws FlattenError on non-flat input.
[[nodiscard]] AtomicAutomaton product(const AtomicAutomaton& alpha, const ActionSet& sync, const AtomicAutomaton& beta,
                                      FlattenOptions options = {});

/// Recursive hierarchy elimination. Throws FlattenError on postfix terms.
[[nodiscard]] AtomicAutomaton eliminate(const Composition& p, FlattenOptions options = {});

/// Removes edges whose guard is the literal false, and edges whose reset is the
/// literal false when a kept edge shares their source, guard and action (so
/// guard trajectories are unchanged).
[[nodiscard]] AtomicAutomaton prune(const AtomicAutomaton& alpha);

} // namespace hcif
