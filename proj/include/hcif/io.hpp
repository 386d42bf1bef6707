#pragma once

#include "hcif/sos.hpp"
#include "hcif/syntax.hpp"

#include "json.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hcif {

[[nodiscard]] nlohmann::json to_json(const Valuation& sigma);
[[nodiscard]] nlohmann::json to_json(const ActionSet& actions);
/// Active-location tree of a term: automaton name, pinned location and the
/// active substructure or parallel components.
[[nodiscard]] nlohmann::json location_tree(const Composition& p);
[[nodiscard]] nlohmann::json to_json(const TrajectoryBundle& bundle);

/// One trace line: step, kind, payload, pre/post valuations and the post tree.
[[nodiscard]] nlohmann::json trace_record(std::size_t step, const State& pre, const Transition& transition);

struct SimulationOptions {
    std::size_t steps = 20;
    std::vector<double> durations = default_durations();
    double delta = default_delta();
    std::uint64_t seed = 0;
    /// When set, choices are listed on `prompt` and read from `choices`.
    std::istream* choices = nullptr;
    std::ostream* prompt = nullptr;
};

/// Writes one JSON line per step to `out`; returns the number of steps taken.
std::size_t simulate(const ModelFile& model, const Valuation& initial, const SimulationOptions& options,
                     std::ostream& out);

/// Guard and termination trajectories of every delay of length `horizon`
/// from `initial`, one JSON line per sample.
void enabled_at(const ModelFile& model, const Valuation& initial, double horizon, double delta, std::ostream& out);

/// Graphviz rendering with one cluster per automaton and per substructure.
[[nodiscard]] std::string to_dot(const ModelFile& model);

} // namespace hcif
