#pragma once

#include "hcif/expr.hpp"
#include "hcif/valuation.hpp"

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace hcif {

using ActionSet = std::set<std::string>;

class Composition;
using CompositionPtr = std::shared_ptr<const Composition>;

struct Location {
    std::string name;
    Expr init = Expr::boolean(false);
    Expr tcp = Expr::boolean(true);
    Expr term = Expr::boolean(false);
    /// Substructure h(v); null when the location is not in the domain of h.
    CompositionPtr sub;
};

struct Edge {
    std::string source;
    Expr guard;
    std::string action;
    Expr reset;
    std::string target;
};

/// An atomic hierarchical hybrid automaton (V, init, tcp, E, term, h),
/// optionally pinned to one location. Pinning shares the definition.
class AtomicAutomaton {
public:
    AtomicAutomaton(std::string name, std::vector<Location> locations, std::vector<Edge> edges);

    [[nodiscard]] const std::string& name() const;
    [[nodiscard]] const std::vector<Location>& locations() const;
    [[nodiscard]] const std::vector<Edge>& edges() const;
    [[nodiscard]] const std::optional<std::string>& pinned() const { return pinned_; }

    [[nodiscard]] const Location* find(const std::string& location) const;
    /// Edges whose source is `location`.
    [[nodiscard]] std::vector<const Edge*> outgoing(const std::string& location) const;
    /// init(v), or the truth value of v = pinned when pinned.
    [[nodiscard]] Expr effective_init(const Location& location) const;
    [[nodiscard]] bool is_flat() const;

    /// alpha[v]. Throws UnknownLocation.
    [[nodiscard]] AtomicAutomaton pin(const std::string& location) const;
    [[nodiscard]] AtomicAutomaton unpinned() const;

    /// Identity of the shared definition (pinning preserves it).
    [[nodiscard]] const void* identity() const { return body_.get(); }

private:
    struct Body;
    std::shared_ptr<const Body> body_;
    std::optional<std::string> pinned_;
};

AtomicAutomaton pin(const AtomicAutomaton& automaton, const std::string& location);

/// p ::= alpha | p:alpha | p ||_S p
class Composition {
public:
    struct Atomic {
        AtomicAutomaton automaton;
    };
    struct Postfix {
        CompositionPtr child;
        AtomicAutomaton parent;
    };
    struct Parallel {
        CompositionPtr left;
        ActionSet sync;
        CompositionPtr right;
    };
    using Node = std::variant<Atomic, Postfix, Parallel>;

    explicit Composition(Node node);

    [[nodiscard]] const Node& node() const { return node_; }
    [[nodiscard]] const Atomic* as_atomic() const { return std::get_if<Atomic>(&node_); }
    [[nodiscard]] const Postfix* as_postfix() const { return std::get_if<Postfix>(&node_); }
    [[nodiscard]] const Parallel* as_parallel() const { return std::get_if<Parallel>(&node_); }

    /// Identity key over shared definitions and pinned locations; equal keys
    /// denote the same term.
    [[nodiscard]] const std::string& key() const { return key_; }

private:
    Node node_;
    std::string key_;
};

CompositionPtr make_atomic(AtomicAutomaton automaton);
CompositionPtr make_postfix(CompositionPtr child, AtomicAutomaton parent);
CompositionPtr make_parallel(CompositionPtr left, ActionSet sync, CompositionPtr right);

/// Nesting depth; flat automata have depth 1.
[[nodiscard]] std::size_t depth(const Composition& p);
[[nodiscard]] std::size_t depth(const AtomicAutomaton& a);

/// Every atomic node of the term, postfix children included, is pinned.
[[nodiscard]] bool fully_initialized(const Composition& p);

/// Compact rendering, e.g. `Clock[Cold]:Thermostat[On]`.
[[nodiscard]] std::string describe(const Composition& p);

struct Diagnostic {
    std::string rule;
    std::string where;
    std::string message;
};

std::string to_string(const Diagnostic& d);

/// Empty iff the model is well formed over `decls`.
[[nodiscard]] std::vector<Diagnostic> validate(const Composition& model, const Declarations& decls);

} // namespace hcif
