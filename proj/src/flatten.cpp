#include "hcif/flatten.hpp"

#include "hcif/errors.hpp"

#include <set>

namespace hcif {

std::string flat_name(const FlatLocation& location)
{
    return location.inner ? location.outer + "." + *location.inner : location.outer;
}

namespace {

const AtomicAutomaton* flat_sub(const Location& loc)
{
    if (!loc.sub)
        return nullptr;
    const auto* at = loc.sub->as_atomic();
    if (at == nullptr || !at->automaton.is_flat())
        throw FlattenError("not depth-2 atomic: substructure of " + loc.name + " is not a flat automaton");
    return &at->automaton;
}

void require_flat(const AtomicAutomaton& a)
{
    if (!a.is_flat())
        throw FlattenError("automaton " + a.name() + " is not flat");
}

void require_unique(const std::vector<Location>& locations)
{
    std::set<std::string> seen;
    for (const auto& loc : locations)
        if (!seen.insert(loc.name).second)
            throw FlattenError("flattened location name clash: " + loc.name);
}

struct Side {
    std::string name;
    Expr predicate;
};

} // namespace

std::vector<FlatLocation> flat_locations(const AtomicAutomaton& alpha)
{
    std::vector<FlatLocation> out;
    for (const auto& loc : alpha.locations()) {
        const AtomicAutomaton* inner = flat_sub(loc);
        if (inner == nullptr) {
            out.push_back({loc.name, std::nullopt});
            continue;
        }
        for (const auto& w : inner->locations())
            out.push_back({loc.name, w.name});
    }
    return out;
}

AtomicAutomaton flatten_depth2(const AtomicAutomaton& alpha, FlattenOptions options)
{
    std::vector<Location> locations;
    for (const auto& loc : alpha.locations()) {
        const AtomicAutomaton* inner = flat_sub(loc);
        const Expr init = alpha.effective_init(loc);
        if (inner == nullptr) {
            locations.push_back({loc.name, init, loc.tcp, loc.term, nullptr});
            continue;
        }
        for (const auto& w : inner->locations()) {
            locations.push_back({flat_name({loc.name, w.name}), conj(init, inner->effective_init(w)),
                                 conj(loc.tcp, w.tcp), conj(loc.term, w.term), nullptr});
        }
    }
    require_unique(locations);

    // Exit side of a location: (flat name, term'(w)); entry side: (flat name, init'(w)).
    auto exits = [&](const Location& v) {
        std::vector<Side> out;
        const AtomicAutomaton* inner = flat_sub(v);
        if (inner == nullptr)
            return std::vector<Side>{{v.name, Expr::boolean(true)}};
        for (const auto& w : inner->locations())
            out.push_back({flat_name({v.name, w.name}), w.term});
        return out;
    };
    auto entries = [&](const Location& v) {
        std::vector<Side> out;
        const AtomicAutomaton* inner = flat_sub(v);
        if (inner == nullptr)
            return std::vector<Side>{{v.name, Expr::boolean(true)}};
        for (const auto& w : inner->locations())
            out.push_back({flat_name({v.name, w.name}), inner->effective_init(w)});
        return out;
    };

    std::vector<Edge> edges;
    for (const auto& e : alpha.edges()) {
        const Location* v0 = alpha.find(e.source);
        const Location* v1 = alpha.find(e.target);
        if (v0 == nullptr)
            throw UnknownLocation(e.source);
        if (v1 == nullptr)
            throw UnknownLocation(e.target);
        for (const auto& from : exits(*v0))
            for (const auto& to : entries(*v1))
                edges.push_back({from.name, conj(from.predicate, e.guard), e.action,
                                 conj(e.reset, to_stepped(to.predicate)), to.name});
    }
    for (const auto& loc : alpha.locations()) {
        const AtomicAutomaton* inner = flat_sub(loc);
        if (inner == nullptr)
            continue;
        for (const auto& e : inner->edges())
            edges.push_back({flat_name({loc.name, e.source}), e.guard, e.action, e.reset,
                             flat_name({loc.name, e.target})});
    }

    AtomicAutomaton out(alpha.name(), std::move(locations), std::move(edges));
    return options.prune ? prune(out) : out;
}

AtomicAutomaton product(const AtomicAutomaton& alpha, const ActionSet& sync, const AtomicAutomaton& beta,
                        FlattenOptions options)
{
    require_flat(alpha);
    require_flat(beta);
    auto name = [](const std::string& v, const std::string& u) { return v + "__" + u; };

    std::vector<Location> locations;
    for (const auto& v : alpha.locations())
        for (const auto& u : beta.locations())
            locations.push_back({name(v.name, u.name), conj(alpha.effective_init(v), beta.effective_init(u)),
                                 conj(v.tcp, u.tcp), conj(v.term, u.term), nullptr});
    require_unique(locations);

    std::vector<Edge> edges;
    for (const auto& e : alpha.edges()) {
        if (sync.count(e.action) != 0)
            continue;
        for (const auto& u : beta.locations())
            edges.push_back({name(e.source, u.name), e.guard, e.action, e.reset, name(e.target, u.name)});
    }
    for (const auto& e : beta.edges()) {
        if (sync.count(e.action) != 0)
            continue;
        for (const auto& v : alpha.locations())
            edges.push_back({name(v.name, e.source), e.guard, e.action, e.reset, name(v.name, e.target)});
    }
    for (const auto& e0 : alpha.edges()) {
        if (sync.count(e0.action) == 0)
            continue;
        for (const auto& e1 : beta.edges())
            if (e1.action == e0.action)
                edges.push_back({name(e0.source, e1.source), conj(e0.guard, e1.guard), e0.action,
                                 conj(e0.reset, e1.reset), name(e0.target, e1.target)});
    }

    AtomicAutomaton out(alpha.name() + "_" + beta.name(), std::move(locations), std::move(edges));
    return options.prune ? prune(out) : out;
}

AtomicAutomaton eliminate(const Composition& p, FlattenOptions options)
{
    if (p.as_postfix() != nullptr)
        throw FlattenError("auxiliary operator in source model");
    if (const auto* par = p.as_parallel())
        return product(eliminate(*par->left, options), par->sync, eliminate(*par->right, options), options);

    const AtomicAutomaton& alpha = p.as_atomic()->automaton;
    if (alpha.is_flat())
        return options.prune ? prune(alpha) : alpha;

    std::vector<Location> locations = alpha.locations();
    for (auto& loc : locations)
        if (loc.sub)
            loc.sub = make_atomic(eliminate(*loc.sub, options));
    AtomicAutomaton lowered(alpha.name(), std::move(locations), alpha.edges());
    if (alpha.pinned())
        lowered = lowered.pin(*alpha.pinned());
    return flatten_depth2(lowered, options);
}

AtomicAutomaton prune(const AtomicAutomaton& alpha)
{
    std::vector<Edge> live;
    for (const auto& e : alpha.edges())
        if (!e.guard.is_false() && !e.reset.is_false())
            live.push_back(e);
    std::vector<Edge> kept;
    for (const auto& e : alpha.edges()) {
        if (e.guard.is_false())
            continue;
        if (e.reset.is_false()) {
            bool covered = false;
            for (const auto& other : live)
                covered = covered ||
                          (other.source == e.source && other.action == e.action && other.guard == e.guard);
            if (covered)
                continue;
        }
        kept.push_back(e);
    }
    AtomicAutomaton out(alpha.name(), alpha.locations(), std::move(kept));
    if (alpha.pinned())
        out = out.pin(*alpha.pinned());
    return out;
}

} // namespace hcif
