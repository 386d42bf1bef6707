#include "hcif/sos.hpp"

#include "hcif/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace hcif {

double default_delta()
{
    if (const char* env = std::getenv("HCIF_DELTA")) {
        char* end = nullptr;
        const double value = std::strtod(env, &end);
        if (end != env && *end == '\0' && value > 0.0 && std::isfinite(value))
            return value;
    }
    return 1.0 / 32.0;
}

std::vector<double> default_durations()
{
    return {0.125, 0.5, 1.0, 2.0};
}

double TrajectoryBundle::time_at(std::size_t k) const
{
    if (k + 1 == rho.size())
        return duration;
    return static_cast<double>(k) * step;
}

const char* rule_name(Rule rule)
{
    switch (rule) {
    case Rule::atomic_action_enter: return "atomic-action-enter";
    case Rule::atomic_action_plain: return "atomic-action-plain";
    case Rule::atomic_action_inner: return "atomic-action-inner";
    case Rule::atomic_time_nested: return "atomic-time-nested";
    case Rule::atomic_time_leaf: return "atomic-time-leaf";
    case Rule::atomic_env_nested: return "atomic-env-nested";
    case Rule::atomic_env_leaf: return "atomic-env-leaf";
    case Rule::postfix_action_enter: return "postfix-action-enter";
    case Rule::postfix_action_plain: return "postfix-action-plain";
    case Rule::postfix_action_inner: return "postfix-action-inner";
    case Rule::postfix_time: return "postfix-time";
    case Rule::postfix_env: return "postfix-env";
    case Rule::parallel_action_sync: return "parallel-action-sync";
    case Rule::parallel_action_interleave: return "parallel-action-interleave";
    case Rule::parallel_time: return "parallel-time";
    case Rule::parallel_env: return "parallel-env";
    }
    return "?";
}

void RuleTally::merge(const RuleTally& other)
{
    for (std::size_t i = 0; i < rule_count; ++i)
        fired[i] += other.fired[i];
}

ActionSet combine_parallel_guards(const ActionSet& theta0, const ActionSet& theta1, const ActionSet& sync)
{
    ActionSet out;
    for (const auto& a : theta0)
        if (theta1.count(a) != 0 || sync.count(a) == 0)
            out.insert(a);
    for (const auto& a : theta1)
        if (sync.count(a) == 0)
            out.insert(a);
    return out;
}

namespace {

const Location& pinned_location(const AtomicAutomaton& a)
{
    const Location* loc = a.pinned() ? a.find(*a.pinned()) : nullptr;
    if (loc == nullptr)
        throw Error("automaton " + a.name() + " is not pinned");
    return *loc;
}

bool initial_under(const AtomicAutomaton& a, const Location& loc, const Valuation& sigma)
{
    if (a.pinned())
        return loc.name == *a.pinned();
    return satisfies(sigma, loc.init);
}

Expr active_tcp(const Composition& q)
{
    if (const auto* at = q.as_atomic())
        return pinned_location(at->automaton).tcp;
    if (const auto* post = q.as_postfix())
        return conj(pinned_location(post->parent).tcp, active_tcp(*post->child));
    const auto* par = q.as_parallel();
    return conj(active_tcp(*par->left), active_tcp(*par->right));
}

std::set<VarKey> unite(std::set<VarKey> a, const std::set<VarKey>& b)
{
    a.insert(b.begin(), b.end());
    return a;
}

std::vector<EnabledEdge> enabled_from(const AtomicAutomaton& a, const Location& loc, const Valuation& sigma,
                                      const Declarations& decls)
{
    std::vector<EnabledEdge> out;
    for (const Edge* edge : a.outgoing(loc.name)) {
        if (!satisfies(sigma, edge->guard))
            continue;
        auto outcome = apply_reset(sigma, analyse_reset(edge->reset), decls);
        if (outcome)
            out.push_back({edge, std::move(outcome->next), std::move(outcome->written)});
    }
    return out;
}

} // namespace

Semantics::Semantics(Declarations decls, EngineOptions options)
    : decls_(std::move(decls)), options_(options)
{
}

void Semantics::record(Rule rule) const
{
    if (options_.tally != nullptr)
        options_.tally->record(rule);
}

std::vector<EnabledEdge> Semantics::enabled_edges(const AtomicAutomaton& automaton, const Valuation& sigma) const
{
    std::vector<EnabledEdge> out;
    for (const auto& loc : automaton.locations())
        if (initial_under(automaton, loc, sigma))
            for (auto& step : enabled_from(automaton, loc, sigma, decls_))
                out.push_back(std::move(step));
    return out;
}

std::vector<Semantics::Entry>
Semantics::initialize(const CompositionPtr& p, const Valuation& sigma, const std::set<VarKey>* fixed,
                      bool count) const
{
    auto note = [&](Rule rule) {
        if (count)
            record(rule);
    };
    std::vector<Entry> out;
    if (const auto* at = p->as_atomic()) {
        const AtomicAutomaton& a = at->automaton;
        for (const auto& loc : a.locations()) {
            if (a.pinned() && loc.name != *a.pinned())
                continue;
            const Expr init = a.effective_init(loc);
            Valuation here = sigma;
            std::set<VarKey> bound;
            if (fixed != nullptr) {
                for (const auto& c : conjuncts(init)) {
                    auto binding = constant_binding(c, decls_);
                    if (!binding || fixed->count(binding->first) != 0 || bound.count(binding->first) != 0)
                        continue;
                    here.set(binding->first, binding->second);
                    bound.insert(binding->first);
                }
            }
            if (!satisfies(here, init))
                continue;
            const bool terminating = satisfies(here, loc.term);
            AtomicAutomaton pinned = a.pin(loc.name);
            if (!loc.sub) {
                note(Rule::atomic_env_leaf);
                out.push_back({terminating, make_atomic(std::move(pinned)), std::move(here), std::move(bound)});
                continue;
            }
            std::set<VarKey> inner_fixed;
            if (fixed != nullptr)
                inner_fixed = unite(*fixed, bound);
            for (auto& e : initialize(loc.sub, here, fixed != nullptr ? &inner_fixed : nullptr, count)) {
                note(Rule::atomic_env_nested);
                out.push_back({terminating && e.terminating, make_postfix(e.term, pinned), std::move(e.valuation),
                               unite(bound, e.bound)});
            }
        }
    } else if (const auto* post = p->as_postfix()) {
        const Location& v = pinned_location(post->parent);
        for (auto& e : initialize(post->child, sigma, fixed, count)) {
            note(Rule::postfix_env);
            const bool terminating = e.terminating && satisfies(e.valuation, v.term);
            out.push_back({terminating, make_postfix(e.term, post->parent), std::move(e.valuation), std::move(e.bound)});
        }
    } else {
        const auto* par = p->as_parallel();
        for (auto& l : initialize(par->left, sigma, fixed, count)) {
            std::set<VarKey> right_fixed;
            if (fixed != nullptr)
                right_fixed = unite(*fixed, l.bound);
            for (auto& r : initialize(par->right, l.valuation, fixed != nullptr ? &right_fixed : nullptr, count)) {
                note(Rule::parallel_env);
                out.push_back({l.terminating && r.terminating, make_parallel(l.term, par->sync, r.term),
                               std::move(r.valuation), unite(l.bound, r.bound)});
            }
        }
    }
    return out;
}

std::vector<EnvStep> Semantics::env_successors(const CompositionPtr& p, const Valuation& sigma) const
{
    std::vector<EnvStep> out;
    for (auto& e : initialize(p, sigma, nullptr))
        out.push_back({e.terminating, std::move(e.term)});
    return out;
}

bool Semantics::can_terminate(const CompositionPtr& p, const Valuation& sigma) const
{
    const auto steps = initialize(p, sigma, nullptr);
    return std::any_of(steps.begin(), steps.end(), [](const Entry& e) { return e.terminating; });
}

std::vector<ActionStep> Semantics::take_edge(const AtomicAutomaton& automaton, const EnabledEdge& step, bool postfix) const
{
    std::vector<ActionStep> out;
    const Location* target = automaton.find(step.edge->target);
    if (target == nullptr)
        throw UnknownLocation(step.edge->target);
    AtomicAutomaton pinned = automaton.pin(target->name);
    if (!target->sub) {
        record(postfix ? Rule::postfix_action_plain : Rule::atomic_action_plain);
        out.push_back({step.edge->action, make_atomic(std::move(pinned)), step.next, step.written});
        return out;
    }
    const std::set<VarKey>* fixed = options_.bind_entry_init ? &step.written : nullptr;
    for (auto& e : initialize(target->sub, step.next, fixed)) {
        record(postfix ? Rule::postfix_action_enter : Rule::atomic_action_enter);
        out.push_back({step.edge->action, make_postfix(e.term, pinned), std::move(e.valuation),
                       unite(step.written, e.bound)});
    }
    return out;
}

namespace {

void append(std::vector<ActionStep>& out, std::vector<ActionStep>&& more)
{
    for (auto& s : more)
        out.push_back(std::move(s));
}

} // namespace

std::vector<ActionStep> Semantics::action_successors(const CompositionPtr& p, const Valuation& sigma) const
{
    std::vector<ActionStep> out;
    if (const auto* at = p->as_atomic()) {
        const AtomicAutomaton& a = at->automaton;
        for (const auto& loc : a.locations()) {
            if (!initial_under(a, loc, sigma))
                continue;
            bool may_leave = true;
            if (loc.sub) {
                may_leave = can_terminate(loc.sub, sigma);
                const AtomicAutomaton pinned = a.pin(loc.name);
                for (auto& s : action_successors(loc.sub, sigma)) {
                    record(Rule::atomic_action_inner);
                    out.push_back({std::move(s.action), make_postfix(s.target, pinned), std::move(s.next),
                                   std::move(s.written)});
                }
            }
            if (!may_leave)
                continue;
            for (const auto& step : enabled_from(a, loc, sigma, decls_))
                append(out, take_edge(a, step, false));
        }
    } else if (const auto* post = p->as_postfix()) {
        for (auto& s : action_successors(post->child, sigma)) {
            record(Rule::postfix_action_inner);
            out.push_back({std::move(s.action), make_postfix(s.target, post->parent), std::move(s.next),
                           std::move(s.written)});
        }
        if (can_terminate(post->child, sigma)) {
            const Location& v = pinned_location(post->parent);
            for (const auto& step : enabled_from(post->parent, v, sigma, decls_))
                append(out, take_edge(post->parent, step, true));
        }
    } else {
        const auto* par = p->as_parallel();
        const auto left = action_successors(par->left, sigma);
        const auto right = action_successors(par->right, sigma);
        std::vector<EnvStep> left_env;
        std::vector<EnvStep> right_env;
        bool left_env_done = false;
        bool right_env_done = false;

        for (const auto& l : left) {
            if (par->sync.count(l.action) != 0) {
                for (const auto& r : right) {
                    if (r.action != l.action)
                        continue;
                    Valuation merged = l.next;
                    bool clash = false;
                    for (const auto& key : r.written) {
                        const double value = r.next.at(key);
                        if (l.written.count(key) != 0 && l.next.at(key) != value) {
                            clash = true;
                            break;
                        }
                        merged.set(key, value);
                    }
                    if (clash)
                        continue;
                    record(Rule::parallel_action_sync);
                    out.push_back({l.action, make_parallel(l.target, par->sync, r.target), std::move(merged),
                                   unite(l.written, r.written)});
                }
                continue;
            }
            if (!right_env_done) {
                right_env = env_successors(par->right, sigma);
                right_env_done = true;
            }
            for (const auto& e : right_env) {
                record(Rule::parallel_action_interleave);
                out.push_back({l.action, make_parallel(l.target, par->sync, e.target), l.next, l.written});
            }
        }
        for (const auto& r : right) {
            if (par->sync.count(r.action) != 0)
                continue;
            if (!left_env_done) {
                left_env = env_successors(par->left, sigma);
                left_env_done = true;
            }
            for (const auto& e : left_env) {
                record(Rule::parallel_action_interleave);
                out.push_back({r.action, make_parallel(e.target, par->sync, r.target), r.next, r.written});
            }
        }
    }
    return out;
}

void Semantics::guards_and_termination(const Composition& q, const Valuation& at, ActionSet& theta, bool& omega) const
{
    if (const auto* atomic = q.as_atomic()) {
        const Location& v = pinned_location(atomic->automaton);
        theta.clear();
        for (const Edge* edge : atomic->automaton.outgoing(v.name))
            if (satisfies(at, edge->guard))
                theta.insert(edge->action);
        omega = satisfies(at, v.term);
        return;
    }
    if (const auto* post = q.as_postfix()) {
        bool inner_omega = false;
        guards_and_termination(*post->child, at, theta, inner_omega);
        const Location& v = pinned_location(post->parent);
        if (inner_omega)
            for (const Edge* edge : post->parent.outgoing(v.name))
                if (satisfies(at, edge->guard))
                    theta.insert(edge->action);
        omega = inner_omega && satisfies(at, v.term);
        return;
    }
    const auto* par = q.as_parallel();
    ActionSet left;
    ActionSet right;
    bool left_omega = false;
    bool right_omega = false;
    guards_and_termination(*par->left, at, left, left_omega);
    guards_and_termination(*par->right, at, right, right_omega);
    theta = combine_parallel_guards(left, right, par->sync);
    omega = left_omega && right_omega;
}

void Semantics::tally_time(const Composition& source, const Composition& target) const
{
    if (options_.tally == nullptr)
        return;
    if (const auto* at = source.as_atomic()) {
        const auto* post = target.as_postfix();
        if (post == nullptr) {
            record(Rule::atomic_time_leaf);
            return;
        }
        record(Rule::atomic_time_nested);
        const Location& v = pinned_location(post->parent);
        const Location* own = at->automaton.find(v.name);
        if (own != nullptr && own->sub)
            tally_time(*own->sub, *post->child);
        return;
    }
    if (const auto* post = source.as_postfix()) {
        record(Rule::postfix_time);
        tally_time(*post->child, *target.as_postfix()->child);
        return;
    }
    const auto* par = source.as_parallel();
    const auto* out = target.as_parallel();
    record(Rule::parallel_time);
    tally_time(*par->left, *out->left);
    tally_time(*par->right, *out->right);
}

std::vector<TimeStep> Semantics::time_successors(const CompositionPtr& p, const Valuation& sigma, double t) const
{
    return time_successors(p, sigma, t, options_.delta);
}

std::vector<TimeStep>
Semantics::time_successors(const CompositionPtr& p, const Valuation& sigma, double t, double delta) const
{
    (void)interval_count(t, delta);
    std::vector<TimeStep> out;

    // Active locations are chosen by the init premises of the time rules, not
    // by env derivations, so they are not tallied as such.
    auto entries = initialize(p, sigma, nullptr, false);

    for (auto& e : entries) {
        auto rho = flow(sigma, active_tcp(*e.term), t, delta, decls_);
        if (!rho)
            continue;
        TimeStep step;
        step.bundle.duration = t;
        step.bundle.step = delta;
        step.bundle.theta.resize(rho->samples.size());
        step.bundle.omega.resize(rho->samples.size());
        for (std::size_t k = 0; k < rho->samples.size(); ++k) {
            bool omega = false;
            guards_and_termination(*e.term, rho->samples[k], step.bundle.theta[k], omega);
            step.bundle.omega[k] = omega;
        }
        step.bundle.rho = std::move(rho->samples);
        step.target = std::move(e.term);
        tally_time(*p, *step.target);
        out.push_back(std::move(step));
    }
    return out;
}

std::vector<Transition> Semantics::successors(const State& state, const std::vector<double>& durations) const
{
    std::vector<Transition> out;
    for (auto& s : action_successors(state.term, state.valuation))
        out.push_back({ActionLabel{std::move(s.action)}, {std::move(s.target), std::move(s.next)}});
    for (auto& e : env_successors(state.term, state.valuation))
        out.push_back({EnvLabel{e.terminating}, {std::move(e.target), state.valuation}});
    for (double t : durations) {
        for (auto& step : time_successors(state.term, state.valuation, t)) {
            Valuation end = step.bundle.rho.back();
            out.push_back({std::move(step.bundle), {std::move(step.target), std::move(end)}});
        }
    }
    return out;
}

} // namespace hcif
