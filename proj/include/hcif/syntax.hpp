#pragma once

#include "hcif/model.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace hcif {

struct ModelFile {
    Declarations declarations;
    CompositionPtr root;
};

/// Throws SyntaxError with line and column of the offending token.
[[nodiscard]] ModelFile parse_model(std::string_view text);
[[nodiscard]] Expr parse_predicate(std::string_view text);

/// Reads, parses and validates a model; diagnostics are raised as one Error.
[[nodiscard]] ModelFile load_model(const std::filesystem::path& path);

/// Surface syntax; parse_model(print_model(m)) is structurally equal to m.
/// Throws Error for postfix terms, which have no surface form.
[[nodiscard]] std::string print_model(const ModelFile& model);
[[nodiscard]] std::string print_composition(const Composition& p);

[[nodiscard]] bool structurally_equal(const AtomicAutomaton& a, const AtomicAutomaton& b);
[[nodiscard]] bool structurally_equal(const Composition& a, const Composition& b);
[[nodiscard]] bool structurally_equal(const ModelFile& a, const ModelFile& b);

/// Every automaton definition in the term, keyed by name (first wins).
[[nodiscard]] std::map<std::string, AtomicAutomaton> named_automata(const Composition& p);

/// Zero valuation overridden by the `x = c` conjuncts of the first location
/// with a non-false init in each top-level automaton.
[[nodiscard]] Valuation default_initial_valuation(const ModelFile& model);

/// One valuation per non-blank line, e.g. `T = 25, n = 0`; unmentioned
/// variables keep their value in `base`. `#` and `//` start comments.
[[nodiscard]] std::vector<Valuation> parse_sigma_file(std::string_view text, const Declarations& decls,
                                                      const Valuation& base);

} // namespace hcif
