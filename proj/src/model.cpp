#include "hcif/model.hpp"

#include "hcif/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <unordered_map>

namespace hcif {

struct AtomicAutomaton::Body {
    std::string name;
    std::vector<Location> locations;
    std::vector<Edge> edges;
    std::unordered_map<std::string, std::size_t> index;
    std::vector<std::vector<std::size_t>> outgoing;
};

AtomicAutomaton::AtomicAutomaton(std::string name, std::vector<Location> locations, std::vector<Edge> edges)
{
    auto body = std::make_shared<Body>();
    body->name = std::move(name);
    body->locations = std::move(locations);
    body->edges = std::move(edges);
    body->outgoing.resize(body->locations.size());
    for (std::size_t i = 0; i < body->locations.size(); ++i)
        body->index.emplace(body->locations[i].name, i);
    for (std::size_t e = 0; e < body->edges.size(); ++e) {
        auto it = body->index.find(body->edges[e].source);
        if (it != body->index.end())
            body->outgoing[it->second].push_back(e);
    }
    body_ = std::move(body);
}

const std::string& AtomicAutomaton::name() const { return body_->name; }
const std::vector<Location>& AtomicAutomaton::locations() const { return body_->locations; }
const std::vector<Edge>& AtomicAutomaton::edges() const { return body_->edges; }

const Location* AtomicAutomaton::find(const std::string& location) const
{
    auto it = body_->index.find(location);
    return it == body_->index.end() ? nullptr : &body_->locations[it->second];
}

std::vector<const Edge*> AtomicAutomaton::outgoing(const std::string& location) const
{
    std::vector<const Edge*> out;
    auto it = body_->index.find(location);
    if (it == body_->index.end())
        return out;
    for (std::size_t e : body_->outgoing[it->second])
        out.push_back(&body_->edges[e]);
    return out;
}

Expr AtomicAutomaton::effective_init(const Location& location) const
{
    if (pinned_)
        return Expr::boolean(location.name == *pinned_);
    return location.init;
}

bool AtomicAutomaton::is_flat() const
{
    return std::none_of(body_->locations.begin(), body_->locations.end(),
                        [](const Location& l) { return l.sub != nullptr; });
}

AtomicAutomaton AtomicAutomaton::pin(const std::string& location) const
{
    if (find(location) == nullptr)
        throw UnknownLocation(location);
    AtomicAutomaton copy = *this;
    copy.pinned_ = location;
    return copy;
}

AtomicAutomaton AtomicAutomaton::unpinned() const
{
    AtomicAutomaton copy = *this;
    copy.pinned_.reset();
    return copy;
}

AtomicAutomaton pin(const AtomicAutomaton& automaton, const std::string& location)
{
    return automaton.pin(location);
}

namespace {

std::string atomic_key(const AtomicAutomaton& a)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%p", a.identity());
    std::string key = a.name();
    key += '@';
    key += buf;
    if (a.pinned()) {
        key += '[';
        key += *a.pinned();
        key += ']';
    }
    return key;
}

std::string join(const ActionSet& actions)
{
    std::string out;
    for (const auto& a : actions) {
        if (!out.empty())
            out += ',';
        out += a;
    }
    return out;
}

} // namespace

Composition::Composition(Node node) : node_(std::move(node))
{
    if (const auto* a = as_atomic()) {
        key_ = atomic_key(a->automaton);
    } else if (const auto* p = as_postfix()) {
        key_ = "(" + p->child->key() + ":" + atomic_key(p->parent) + ")";
    } else {
        const auto& par = std::get<Parallel>(node_);
        key_ = "(" + par.left->key() + " ||{" + join(par.sync) + "} " + par.right->key() + ")";
    }
}

CompositionPtr make_atomic(AtomicAutomaton automaton)
{
    return std::make_shared<const Composition>(Composition::Atomic{std::move(automaton)});
}

CompositionPtr make_postfix(CompositionPtr child, AtomicAutomaton parent)
{
    return std::make_shared<const Composition>(Composition::Postfix{std::move(child), std::move(parent)});
}

CompositionPtr make_parallel(CompositionPtr left, ActionSet sync, CompositionPtr right)
{
    return std::make_shared<const Composition>(
        Composition::Parallel{std::move(left), std::move(sync), std::move(right)});
}

std::size_t depth(const AtomicAutomaton& a)
{
    std::size_t deepest = 0;
    for (const auto& loc : a.locations())
        if (loc.sub)
            deepest = std::max(deepest, depth(*loc.sub));
    return 1 + deepest;
}

std::size_t depth(const Composition& p)
{
    if (const auto* a = p.as_atomic())
        return depth(a->automaton);
    if (const auto* post = p.as_postfix())
        return std::max(depth(*post->child) + 1, depth(post->parent));
    const auto* par = p.as_parallel();
    return std::max(depth(*par->left), depth(*par->right));
}

bool fully_initialized(const Composition& p)
{
    if (const auto* a = p.as_atomic())
        return a->automaton.pinned().has_value();
    if (const auto* post = p.as_postfix())
        return post->parent.pinned().has_value() && fully_initialized(*post->child);
    const auto* par = p.as_parallel();
    return fully_initialized(*par->left) && fully_initialized(*par->right);
}

namespace {

std::string describe_atomic(const AtomicAutomaton& a)
{
    return a.pinned() ? a.name() + "[" + *a.pinned() + "]" : a.name();
}

} // namespace

std::string describe(const Composition& p)
{
    if (const auto* a = p.as_atomic())
        return describe_atomic(a->automaton);
    if (const auto* post = p.as_postfix()) {
        std::string child = describe(*post->child);
        if (post->child->as_parallel())
            child = "(" + child + ")";
        return child + ":" + describe_atomic(post->parent);
    }
    const auto* par = p.as_parallel();
    return "(" + describe(*par->left) + " ||{" + join(par->sync) + "} " + describe(*par->right) + ")";
}

std::string to_string(const Diagnostic& d)
{
    return d.where + ": " + d.message + " [" + d.rule + "]";
}

// ---------------------------------------------------------------------------
// Validation

namespace {

enum class Sort { number, boolean };

// nullopt when ill-sorted; `problem` receives the offending subterm.
std::optional<Sort> sort_of(const Expr& e, std::string& problem)
{
    auto expect = [&](const Expr& sub, Sort want) {
        auto s = sort_of(sub, problem);
        if (!s)
            return false;
        if (*s != want) {
            problem = to_string(sub);
            return false;
        }
        return true;
    };
    switch (e.kind()) {
    case ExprKind::boolean:
        return Sort::boolean;
    case ExprKind::number:
    case ExprKind::variable:
        return Sort::number;
    case ExprKind::negate:
    case ExprKind::exp:
        return expect(e.operand(), Sort::number) ? std::optional(Sort::number) : std::nullopt;
    case ExprKind::logical_not:
        return expect(e.operand(), Sort::boolean) ? std::optional(Sort::boolean) : std::nullopt;
    case ExprKind::add:
    case ExprKind::subtract:
    case ExprKind::multiply:
        return expect(e.lhs(), Sort::number) && expect(e.rhs(), Sort::number) ? std::optional(Sort::number)
                                                                              : std::nullopt;
    case ExprKind::lt:
    case ExprKind::le:
    case ExprKind::gt:
    case ExprKind::ge:
        return expect(e.lhs(), Sort::number) && expect(e.rhs(), Sort::number) ? std::optional(Sort::boolean)
                                                                              : std::nullopt;
    case ExprKind::logical_and:
    case ExprKind::logical_or:
        return expect(e.lhs(), Sort::boolean) && expect(e.rhs(), Sort::boolean) ? std::optional(Sort::boolean)
                                                                                : std::nullopt;
    case ExprKind::eq:
    case ExprKind::ne: {
        auto l = sort_of(e.lhs(), problem);
        if (!l)
            return std::nullopt;
        if (!expect(e.rhs(), *l))
            return std::nullopt;
        return Sort::boolean;
    }
    }
    return std::nullopt;
}

class Validator {
public:
    explicit Validator(const Declarations& decls) : decls_(decls) {}

    std::vector<Diagnostic> run(const Composition& model)
    {
        std::set<std::string> seen;
        for (const auto& d : decls_.all())
            if (!seen.insert(d.name).second)
                report("unique-variables", d.name, "duplicate variable declaration");
        composition(model, "");
        return std::move(out_);
    }

private:
    void report(std::string rule, std::string where, std::string message)
    {
        out_.push_back({std::move(rule), std::move(where), std::move(message)});
    }

    void predicate(const Expr& e, const std::string& where, const std::string& role, bool allow_stepped)
    {
        std::string problem;
        auto sort = sort_of(e, problem);
        if (!sort)
            report("well-sorted", where, "ill-sorted " + role + " near '" + problem + "'");
        else if (*sort != Sort::boolean)
            report("well-sorted", where, role + " is not a predicate");

        std::set<VarRef> vars;
        collect_variables(e, vars);
        bool stepped_reported = false;
        for (const auto& v : vars) {
            if (decls_.find(v.name) == nullptr)
                report("declared-variables", where, "undeclared variable '" + v.name + "' in " + role);
            if (v.stepped && !allow_stepped && !stepped_reported) {
                report("no-stepped-variables", where, "stepped variable in " + role);
                stepped_reported = true;
            }
        }
    }

    void automaton(const AtomicAutomaton& a, const std::string& prefix)
    {
        const std::string path = prefix.empty() ? a.name() : prefix + "." + a.name();
        std::set<std::string> names;
        for (const auto& loc : a.locations()) {
            const std::string where = path + "." + loc.name;
            if (!names.insert(loc.name).second)
                report("unique-locations", where, "duplicate location");
            predicate(loc.init, where, "init", false);
            predicate(loc.tcp, where, "tcp", false);
            predicate(loc.term, where, "term", false);
            if (loc.sub)
                composition(*loc.sub, where);
        }
        for (const auto& e : a.edges()) {
            const std::string where = path + " edge " + e.source + " -> " + e.target + " (" + e.action + ")";
            if (a.find(e.source) == nullptr)
                report("edge-endpoints", where, "source '" + e.source + "' is not a location");
            if (a.find(e.target) == nullptr)
                report("edge-endpoints", where, "target '" + e.target + "' is not a location");
            predicate(e.guard, where, "guard", false);
            predicate(e.reset, where, "reset", true);
        }
        if (a.pinned() && a.find(*a.pinned()) == nullptr)
            report("pinned-location", path, "pinned location '" + *a.pinned() + "' is not a location");
    }

    void composition(const Composition& p, const std::string& prefix)
    {
        if (const auto* at = p.as_atomic()) {
            automaton(at->automaton, prefix);
        } else if (const auto* post = p.as_postfix()) {
            if (!post->parent.pinned())
                report("pinned-postfix", prefix.empty() ? post->parent.name() : prefix,
                       "postfix parent must be pinned");
            automaton(post->parent, prefix);
            composition(*post->child, prefix);
        } else {
            const auto* par = p.as_parallel();
            composition(*par->left, prefix);
            composition(*par->right, prefix);
        }
    }

    const Declarations& decls_;
    std::vector<Diagnostic> out_;
};

} // namespace

std::vector<Diagnostic> validate(const Composition& model, const Declarations& decls)
{
    return Validator(decls).run(model);
}

} // namespace hcif
