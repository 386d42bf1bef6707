#include "hcif/io.hpp"

#include "hcif/errors.hpp"

#include <istream>
#include <ostream>
#include <random>
#include <sstream>

namespace hcif {

using nlohmann::json;

json to_json(const Valuation& sigma)
{
    json out = json::object();
    for (const auto& [key, value] : sigma)
        out[to_string(key)] = value;
    return out;
}

json to_json(const ActionSet& actions)
{
    json out = json::array();
    for (const auto& a : actions)
        out.push_back(a);
    return out;
}

json location_tree(const Composition& p)
{
    if (const auto* at = p.as_atomic()) {
        json node = {{"automaton", at->automaton.name()}};
        node["location"] = at->automaton.pinned() ? json(*at->automaton.pinned()) : json(nullptr);
        return node;
    }
    if (const auto* post = p.as_postfix()) {
        json node = {{"automaton", post->parent.name()}};
        node["location"] = post->parent.pinned() ? json(*post->parent.pinned()) : json(nullptr);
        node["sub"] = location_tree(*post->child);
        return node;
    }
    const auto* par = p.as_parallel();
    return {{"parallel", json::array({location_tree(*par->left), location_tree(*par->right)})},
            {"sync", to_json(par->sync)}};
}

json to_json(const TrajectoryBundle& bundle)
{
    json samples = json::array();
    for (std::size_t k = 0; k < bundle.size(); ++k)
        samples.push_back({{"s", bundle.time_at(k)},
                           {"rho", to_json(bundle.rho[k])},
                           {"theta", to_json(bundle.theta[k])},
                           {"omega", static_cast<bool>(bundle.omega[k])}});
    return {{"duration", bundle.duration}, {"delta", bundle.step}, {"samples", std::move(samples)}};
}

json trace_record(std::size_t step, const State& pre, const Transition& transition)
{
    json record = {{"step", step}};
    if (const auto* a = std::get_if<ActionLabel>(&transition.label)) {
        record["kind"] = "action";
        record["label"] = a->action;
    } else if (const auto* e = std::get_if<EnvLabel>(&transition.label)) {
        record["kind"] = "env";
        record["label"] = e->terminating;
    } else {
        record["kind"] = "time";
        record["label"] = to_json(std::get<TrajectoryBundle>(transition.label));
    }
    record["pre"] = to_json(pre.valuation);
    record["post"] = to_json(transition.target.valuation);
    record["locations"] = location_tree(*transition.target.term);
    return record;
}

namespace {

std::string choice_summary(const Transition& t)
{
    std::ostringstream out;
    if (const auto* a = std::get_if<ActionLabel>(&t.label))
        out << "action " << a->action;
    else if (const auto* e = std::get_if<EnvLabel>(&t.label))
        out << "env " << (e->terminating ? "true" : "false");
    else
        out << "time " << std::get<TrajectoryBundle>(t.label).duration;
    out << " -> " << describe(*t.target.term) << " " << to_string(t.target.valuation);
    return out.str();
}

} // namespace

std::size_t simulate(const ModelFile& model, const Valuation& initial, const SimulationOptions& options,
                     std::ostream& out)
{
    EngineOptions engine;
    engine.delta = options.delta;
    const Semantics sem(model.declarations, engine);
    std::mt19937_64 rng(options.seed);

    State state{model.root, initial};
    std::size_t step = 0;
    for (; step < options.steps; ++step) {
        auto choices = sem.successors(state, options.durations);
        if (choices.empty())
            break;
        std::size_t pick = 0;
        if (options.choices != nullptr) {
            std::ostream& prompt = options.prompt != nullptr ? *options.prompt : out;
            for (std::size_t i = 0; i < choices.size(); ++i)
                prompt << "[" << i << "] " << choice_summary(choices[i]) << "\n";
            prompt << "choice> " << std::flush;
            if (!(*options.choices >> pick) || pick >= choices.size())
                break;
        } else {
            std::uniform_int_distribution<std::size_t> uniform(0, choices.size() - 1);
            pick = uniform(rng);
        }
        out << trace_record(step, state, choices[pick]).dump() << "\n";
        state = choices[pick].target;
    }
    return step;
}

void enabled_at(const ModelFile& model, const Valuation& initial, double horizon, double delta, std::ostream& out)
{
    EngineOptions engine;
    engine.delta = delta;
    const Semantics sem(model.declarations, engine);
    const auto delays = sem.time_successors(model.root, initial, horizon, delta);
    if (delays.empty())
        throw Error("no delay of length " + std::to_string(horizon) + " is possible from the initial state");
    for (std::size_t d = 0; d < delays.size(); ++d) {
        const auto& bundle = delays[d].bundle;
        for (std::size_t k = 0; k < bundle.size(); ++k) {
            json line = {{"delay", d},
                         {"locations", location_tree(*delays[d].target)},
                         {"k", k},
                         {"s", bundle.time_at(k)},
                         {"theta", to_json(bundle.theta[k])},
                         {"omega", static_cast<bool>(bundle.omega[k])}};
            out << line.dump() << "\n";
        }
    }
}

// ---------------------------------------------------------------------------
// DOT

namespace {

std::string quoted(const std::string& s)
{
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\')
            out += '\\';
        out += c;
    }
    return out + "\"";
}

class DotWriter {
public:
    std::string run(const Composition& root)
    {
        out_ << "digraph hcif {\n  compound=true;\n  node [shape=box, style=rounded];\n";
        composition(root, "", 1);
        out_ << "}\n";
        return out_.str();
    }

private:
    void pad(int depth) { out_ << std::string(static_cast<std::size_t>(depth) * 2, ' '); }

    void composition(const Composition& p, const std::string& path, int depth)
    {
        if (const auto* at = p.as_atomic()) {
            automaton(at->automaton, path, depth);
        } else if (const auto* post = p.as_postfix()) {
            composition(*post->child, path, depth);
            automaton(post->parent, path, depth);
        } else {
            composition(*p.as_parallel()->left, path, depth);
            composition(*p.as_parallel()->right, path, depth);
        }
    }

    void automaton(const AtomicAutomaton& a, const std::string& prefix, int depth)
    {
        const std::string path = prefix.empty() ? a.name() : prefix + "/" + a.name();
        pad(depth);
        out_ << "subgraph " << quoted("cluster_" + std::to_string(clusters_++)) << " {\n";
        pad(depth + 1);
        out_ << "label=" << quoted(a.name()) << ";\n";
        for (const auto& loc : a.locations()) {
            const std::string id = path + "/" + loc.name;
            std::string label = loc.name;
            if (!loc.tcp.is_true())
                label += "\\n" + to_string(loc.tcp);
            if (!loc.term.is_false())
                label += "\\nterm: " + to_string(loc.term);
            pad(depth + 1);
            out_ << quoted(id) << " [label=" << quoted(label) << "];\n";
            const Expr init = a.effective_init(loc);
            if (!init.is_false()) {
                pad(depth + 1);
                out_ << quoted(id + "/init") << " [shape=point];\n";
                pad(depth + 1);
                out_ << quoted(id + "/init") << " -> " << quoted(id) << " [label=" << quoted(to_string(init))
                     << "];\n";
            }
            if (loc.sub) {
                pad(depth + 1);
                out_ << "subgraph " << quoted("cluster_" + std::to_string(clusters_++)) << " {\n";
                pad(depth + 2);
                out_ << "label=" << quoted("sub " + loc.name) << "; style=dashed;\n";
                composition(*loc.sub, id, depth + 2);
                pad(depth + 1);
                out_ << "}\n";
            }
        }
        for (const auto& e : a.edges()) {
            pad(depth + 1);
            out_ << quoted(path + "/" + e.source) << " -> " << quoted(path + "/" + e.target) << " [label="
                 << quoted(to_string(e.guard) + " : " + e.action + " : " + to_string(e.reset)) << "];\n";
        }
        pad(depth);
        out_ << "}\n";
    }

    std::ostringstream out_;
    std::size_t clusters_ = 0;
};

} // namespace

std::string to_dot(const ModelFile& model)
{
    return DotWriter().run(*model.root);
}

} // namespace hcif
