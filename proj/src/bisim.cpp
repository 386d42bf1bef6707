#include "hcif/bisim.hpp"

#include "hcif/errors.hpp"

#include <cmath>
#include <sstream>
#include <unordered_map>

namespace hcif {

bool labels_match(const Label& a, const Label& b, double tolerance)
{
    if (a.index() != b.index())
        return false;
    if (const auto* x = std::get_if<ActionLabel>(&a))
        return x->action == std::get<ActionLabel>(b).action;
    if (const auto* x = std::get_if<EnvLabel>(&a))
        return x->terminating == std::get<EnvLabel>(b).terminating;
    const auto& x = std::get<TrajectoryBundle>(a);
    const auto& y = std::get<TrajectoryBundle>(b);
    if (x.duration != y.duration || x.size() != y.size())
        return false;
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (x.theta[k] != y.theta[k] || x.omega[k] != y.omega[k])
            return false;
        if (!approx_equal(x.rho[k], y.rho[k], tolerance))
            return false;
    }
    return true;
}

bool transitions_match(const Transition& a, const Transition& b, double tolerance)
{
    return labels_match(a.label, b.label, tolerance) &&
           approx_equal(a.target.valuation, b.target.valuation, tolerance);
}

std::string describe(const Label& label)
{
    if (const auto* x = std::get_if<ActionLabel>(&label))
        return "action " + x->action;
    if (const auto* x = std::get_if<EnvLabel>(&label))
        return std::string("env ") + (x->terminating ? "true" : "false");
    std::ostringstream out;
    out << "time " << std::get<TrajectoryBundle>(label).duration;
    return out.str();
}

std::string describe(const GameStep& step)
{
    std::string out = step.attacker == Side::left ? "left " : "right ";
    out += describe(step.move.label) + " -> " + describe(*step.move.target.term) + " " +
           to_string(step.move.target.valuation);
    if (step.response)
        out += " / answered by " + describe(*step.response->target.term);
    else
        out += " / unmatched";
    return out;
}

namespace {

std::string quantize(const Valuation& sigma, double tolerance)
{
    std::string key;
    for (const auto& [k, v] : sigma) {
        key += to_string(k);
        key += '=';
        key += std::to_string(std::llround(v / tolerance));
        key += ';';
    }
    return key;
}

// Failure message for the final, unmatched step.
std::string mismatch_reason(const GameStep& last)
{
    std::string who = last.attacker == Side::left ? "left" : "right";
    std::string other = last.attacker == Side::left ? "right" : "left";
    return who + " " + describe(last.move.label) + " has no matching " + other + " transition";
}

class Game {
public:
    Game(const Semantics& semantics, const GameConfig& cfg) : sem_(semantics), cfg_(cfg) {}

    std::optional<std::vector<GameStep>>
    play(const CompositionPtr& p, const CompositionPtr& q, const Valuation& sigma, std::size_t k)
    {
        if (k == 0)
            return std::nullopt;
        const std::string key = p->key() + "|" + q->key() + "|" + quantize(sigma, cfg_.tolerance);
        if (auto it = memo_.find(key); it != memo_.end()) {
            if (it->second.passed >= k)
                return std::nullopt;
            if (it->second.failed != 0 && it->second.failed <= k)
                return it->second.trace;
        }
        ++pairs_;

        const auto left = sem_.successors({p, sigma}, cfg_.durations);
        const auto right = sem_.successors({q, sigma}, cfg_.durations);
        for (Side side : {Side::left, Side::right}) {
            const auto& attack = side == Side::left ? left : right;
            const auto& defend = side == Side::left ? right : left;
            for (const auto& move : attack) {
                std::optional<std::vector<GameStep>> refuted;
                bool answered = false;
                for (const auto& response : defend) {
                    if (!transitions_match(move, response, cfg_.tolerance))
                        continue;
                    const auto& next_p = side == Side::left ? move.target.term : response.target.term;
                    const auto& next_q = side == Side::left ? response.target.term : move.target.term;
                    if (next_p->key() == p->key() && next_q->key() == q->key() &&
                        approx_equal(move.target.valuation, sigma, 0.0)) {
                        answered = true;
                        break;
                    }
                    auto deeper = play(next_p, next_q, move.target.valuation, k - 1);
                    if (!deeper) {
                        answered = true;
                        break;
                    }
                    if (!refuted) {
                        std::vector<GameStep> trace{GameStep{side, move, response}};
                        trace.insert(trace.end(), deeper->begin(), deeper->end());
                        refuted = std::move(trace);
                    }
                }
                if (answered)
                    continue;
                if (!refuted)
                    refuted = std::vector<GameStep>{GameStep{side, move, std::nullopt}};
                auto& entry = memo_[key];
                if (entry.failed == 0 || k < entry.failed) {
                    entry.failed = k;
                    entry.trace = *refuted;
                }
                return refuted;
            }
        }
        auto& entry = memo_[key];
        entry.passed = std::max(entry.passed, k);
        return std::nullopt;
    }

    [[nodiscard]] std::size_t pairs() const { return pairs_; }

private:
    struct Memo {
        std::size_t passed = 0;
        std::size_t failed = 0;
        std::vector<GameStep> trace;
    };

    const Semantics& sem_;
    const GameConfig& cfg_;
    std::unordered_map<std::string, Memo> memo_;
    std::size_t pairs_ = 0;
};

void check_config(const GameConfig& cfg)
{
    if (cfg.initial_valuations.empty())
        throw Error("bisimulation game needs at least one initial valuation");
    for (double t : cfg.durations)
        (void)interval_count(t, cfg.delta);
}

} // namespace

Verdict bounded_bisim(const CompositionPtr& p, const CompositionPtr& q, const Declarations& decls,
                      const GameConfig& cfg)
{
    check_config(cfg);
    EngineOptions options;
    options.delta = cfg.delta;
    const Semantics sem(decls, options);
    Game game(sem, cfg);
    for (const auto& sigma : cfg.initial_valuations) {
        if (auto trace = game.play(p, q, sigma, cfg.depth)) {
            std::string reason = mismatch_reason(trace->back());
            return Distinguished{sigma, std::move(*trace), std::move(reason)};
        }
    }
    return EquivalentUpToBound{cfg.depth, game.pairs()};
}

bool replay(const CompositionPtr& p, const CompositionPtr& q, const Declarations& decls, const GameConfig& cfg,
            const Distinguished& verdict)
{
    if (verdict.trace.empty())
        return false;
    EngineOptions options;
    options.delta = cfg.delta;
    const Semantics sem(decls, options);

    auto find = [&](const std::vector<Transition>& all, const Transition& wanted) -> const Transition* {
        for (const auto& t : all)
            if (transitions_match(t, wanted, cfg.tolerance) && t.target.term->key() == wanted.target.term->key())
                return &t;
        return nullptr;
    };

    CompositionPtr left = p;
    CompositionPtr right = q;
    Valuation sigma = verdict.initial;
    for (std::size_t i = 0; i < verdict.trace.size(); ++i) {
        const GameStep& step = verdict.trace[i];
        const auto left_moves = sem.successors({left, sigma}, cfg.durations);
        const auto right_moves = sem.successors({right, sigma}, cfg.durations);
        const auto& attack = step.attacker == Side::left ? left_moves : right_moves;
        const auto& defend = step.attacker == Side::left ? right_moves : left_moves;

        const Transition* move = find(attack, step.move);
        if (move == nullptr)
            return false;
        const bool last = i + 1 == verdict.trace.size();
        if (last) {
            if (step.response)
                return false;
            for (const auto& t : defend)
                if (transitions_match(*move, t, cfg.tolerance))
                    return false;
            return true;
        }
        if (!step.response)
            return false;
        const Transition* response = find(defend, *step.response);
        if (response == nullptr || !transitions_match(*move, *response, cfg.tolerance))
            return false;
        left = step.attacker == Side::left ? move->target.term : response->target.term;
        right = step.attacker == Side::left ? response->target.term : move->target.term;
        sigma = move->target.valuation;
    }
    return false;
}

CompositionPtr Context::apply(const CompositionPtr& hole) const
{
    switch (kind) {
    case Kind::parallel_left:
        return make_parallel(hole, sync, other);
    case Kind::parallel_right:
        return make_parallel(other, sync, hole);
    case Kind::postfix:
        if (!parent || !parent->pinned())
            throw Error("postfix context needs a pinned parent");
        return make_postfix(hole, *parent);
    }
    return hole;
}

std::string Context::describe() const
{
    std::string s;
    for (const auto& a : sync)
        s += (s.empty() ? "" : ",") + a;
    switch (kind) {
    case Kind::parallel_left:
        return "[] ||{" + s + "} " + hcif::describe(*other);
    case Kind::parallel_right:
        return hcif::describe(*other) + " ||{" + s + "} []";
    case Kind::postfix:
        return "[] : " + (parent ? parent->name() + (parent->pinned() ? "[" + *parent->pinned() + "]" : "") : "?");
    }
    return "[]";
}

CongruenceReport check_congruence_sample(const CompositionPtr& p, const CompositionPtr& q,
                                         const std::vector<Context>& contexts, const Declarations& decls,
                                         const GameConfig& cfg)
{
    CongruenceReport report;
    report.base = bounded_bisim(p, q, decls, cfg);
    report.precondition = equivalent(report.base);
    if (!report.precondition)
        return report;
    for (const auto& c : contexts)
        report.verdicts.push_back(bounded_bisim(c.apply(p), c.apply(q), decls, cfg));
    return report;
}

} // namespace hcif
