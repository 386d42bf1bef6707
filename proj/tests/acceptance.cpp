// One PASS/FAIL line per acceptance criterion; exit status 1 when any fails.

#include "hcif/bisim.hpp"
#include "hcif/flatten.hpp"
#include "hcif/io.hpp"
#include "hcif/sos.hpp"
#include "hcif/syntax.hpp"

#include "support/exploration.hpp"
#include "support/random_models.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

using namespace hcif;
using namespace hcif::testing;

namespace {

const std::filesystem::path models_dir = HCIF_MODELS_DIR;

struct Outcome {
    bool pass = false;
    std::string detail;
};

ModelFile bundled(const std::string& name)
{
    return load_model(models_dir / name);
}

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

GameConfig game(std::vector<Valuation> initial)
{
    GameConfig cfg;
    cfg.depth = 6;
    cfg.durations = {0.125, 0.5, 1.0, 2.0};
    cfg.delta = 1.0 / 32.0;
    cfg.initial_valuations = std::move(initial);
    return cfg;
}

// Locations renamed L0, L1, ... in breadth-first order from the initial
// locations, following edges in (action, guard, reset) order.
AtomicAutomaton canonical(const AtomicAutomaton& a)
{
    std::map<std::string, std::string> names;
    std::vector<std::string> queue;
    auto visit = [&](const std::string& loc) {
        if (names.emplace(loc, "L" + std::to_string(names.size())).second)
            queue.push_back(loc);
    };
    for (const auto& loc : a.locations())
        if (!a.effective_init(loc).is_false())
            visit(loc.name);
    for (std::size_t i = 0; i < queue.size(); ++i) {
        auto out = a.outgoing(queue[i]);
        std::sort(out.begin(), out.end(), [](const Edge* x, const Edge* y) {
            return std::tuple(x->action, to_string(x->guard), to_string(x->reset)) <
                   std::tuple(y->action, to_string(y->guard), to_string(y->reset));
        });
        for (const Edge* e : out)
            visit(e->target);
    }
    for (const auto& loc : a.locations())
        visit(loc.name);

    std::vector<Location> locations;
    for (const auto& loc : a.locations()) {
        Location renamed = loc;
        renamed.name = names.at(loc.name);
        locations.push_back(renamed);
    }
    std::sort(locations.begin(), locations.end(), [](const Location& x, const Location& y) {
        return std::stoi(x.name.substr(1)) < std::stoi(y.name.substr(1));
    });
    std::vector<Edge> edges;
    for (const auto& e : a.edges())
        edges.push_back({names.at(e.source), e.guard, e.action, e.reset, names.at(e.target)});
    return AtomicAutomaton("A", std::move(locations), std::move(edges));
}

Outcome flattening_regression()
{
    const ModelFile hier = bundled("thermostat_hier.hcif");
    const ModelFile expected = bundled("thermostat_flat.hcif");
    const AtomicAutomaton flat = eliminate(*hier.root, {.prune = true});

    std::set<std::string> names;
    for (const auto& loc : flat.locations())
        names.insert(loc.name);
    const bool locations_ok = names == std::set<std::string>{"Off", "On.Cold", "On.Hot"};

    std::map<std::string, std::pair<std::string, std::string>> by_action;
    for (const auto& e : flat.edges())
        by_action[e.action] = {to_string(e.guard), to_string(e.reset)};
    const bool edges_ok = flat.edges().size() == 3 && by_action.size() == 3 &&
                          by_action["switch-on"].first == "T < 20" && by_action["done"].first == "1 <= c" &&
                          by_action["switch-off"].first == "n <= 1000" &&
                          by_action["switch-on"].second == "n+ = n + 1 and c+ = 0";

    const auto& reference = expected.root->as_atomic()->automaton;
    const bool structural = structurally_equal(canonical(flat), canonical(reference));
    std::ostringstream detail;
    detail << flat.locations().size() << " locations, " << flat.edges().size() << " edges, locations "
           << (locations_ok ? "ok" : "wrong") << ", edges " << (edges_ok ? "ok" : "wrong") << ", canonical match "
           << (structural ? "yes" : "no");
    return {locations_ok && edges_ok && structural, detail.str()};
}

Outcome elimination_oracle()
{
    const auto start = std::chrono::steady_clock::now();
    const ModelFile hier = bundled("thermostat_hier.hcif");
    Valuation sigma0 = hier.declarations.zero_valuation();
    sigma0.set(VarKey{"T", false}, 25.0);
    const CompositionPtr flat = make_atomic(eliminate(*hier.root));
    const bool thermostat = equivalent(bounded_bisim(hier.root, flat, hier.declarations, game({sigma0})));

    std::size_t random_ok = 0;
    std::string first_failure;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const ModelFile m = random_model(seed);
        const CompositionPtr f = make_atomic(eliminate(*m.root));
        const Verdict v = bounded_bisim(m.root, f, m.declarations, game({default_initial_valuation(m)}));
        if (equivalent(v))
            ++random_ok;
        else if (first_failure.empty())
            first_failure = "seed " + std::to_string(seed) + ": " + std::get<Distinguished>(v).reason;
    }
    const double elapsed = seconds_since(start);
    std::ostringstream detail;
    detail << "thermostat " << (thermostat ? "equivalent" : "distinguished") << ", random " << random_ok
           << "/50 equivalent, " << elapsed << " s";
    if (!first_failure.empty())
        detail << " (" << first_failure << ")";
    return {thermostat && random_ok == 50 && elapsed <= 300.0, detail.str()};
}

Outcome mutation_sensitivity()
{
    std::size_t detected = 0;
    std::size_t replayed = 0;
    std::size_t total = 0;
    std::ostringstream missed;
    std::mt19937_64 rng(20240);
    for (std::uint64_t seed = 100; total < 20; ++seed) {
        const auto kind = static_cast<Mutation>(total % 3);
        const ModelFile m = random_model(seed);
        const ModelFile flat{m.declarations, make_atomic(eliminate(*m.root, {.prune = true}))};
        const GameConfig cfg = game({default_initial_valuation(m)});
        // Sites are edges that fire within the game horizon; mutating a dead
        // edge yields an equivalent model.
        const auto sites = live_edges(flat, cfg.initial_valuations.front(), cfg.durations, cfg.depth);
        const std::string mutated = mutate(print_model(flat), kind, rng, &sites);
        if (mutated.empty())
            continue;
        ++total;
        const ModelFile mutant = parse_model(mutated);
        const Verdict v = bounded_bisim(m.root, mutant.root, m.declarations, cfg);
        if (const auto* d = std::get_if<Distinguished>(&v)) {
            ++detected;
            if (replay(m.root, mutant.root, m.declarations, cfg, *d))
                ++replayed;
        } else {
            missed << " seed " << seed << " (" << mutation_name(kind) << ")";
        }
    }
    std::ostringstream detail;
    detail << detected << "/20 distinguished, " << replayed << " traces replayed";
    if (detected < 20)
        detail << ", undetected:" << missed.str();
    return {detected >= 19 && replayed == detected, detail.str()};
}

Outcome eager_choice()
{
    const ModelFile m = bundled("example1.hcif");
    const Semantics sem(m.declarations);
    const Exploration hts = explore(sem, {m.root, default_initial_valuation(m)}, default_durations(), 10000);
    std::set<std::string> actions;
    bool b_before_a = false;
    for (const auto& edge : hts.edges) {
        if (const auto* a = std::get_if<ActionLabel>(&edge.label)) {
            actions.insert(a->action);
            if (a->action == "b" && !hts.states[edge.source].after_action)
                b_before_a = true;
        }
    }
    const bool initial_only_a = [&] {
        for (const auto& edge : hts.edges)
            if (edge.source == 0)
                if (const auto* a = std::get_if<ActionLabel>(&edge.label); a && a->action != "a")
                    return false;
        return true;
    }();
    std::ostringstream detail;
    detail << hts.states.size() << " states, actions {";
    for (const auto& a : actions)
        detail << (a == *actions.begin() ? "" : ",") << a;
    detail << "}" << (hts.complete ? "" : ", exploration truncated");
    return {hts.complete && actions == ActionSet{"a", "b"} && initial_only_a && !b_before_a, detail.str()};
}

Outcome enabled_over_time()
{
    const ModelFile m = bundled("example2.hcif");
    const double delta = 1.0 / 32.0;
    const Semantics sem(m.declarations, EngineOptions{.delta = delta});
    const auto delays = sem.time_successors(m.root, default_initial_valuation(m), 2.0, delta);
    if (delays.size() != 1)
        return {false, std::to_string(delays.size()) + " delays of length 2"};
    const auto& bundle = delays.front().bundle;
    const double lo = std::log(2.0);
    const double hi = std::log(4.0);
    bool exact = true;
    bool a_everywhere = true;
    double first_b = -1.0;
    double last_b = -1.0;
    for (std::size_t k = 0; k < bundle.size(); ++k) {
        const double s = bundle.time_at(k);
        const bool b = bundle.theta[k].count("b") != 0;
        exact = exact && b == (lo < s && s < hi);
        a_everywhere = a_everywhere && bundle.theta[k].count("a") != 0;
        if (b) {
            if (first_b < 0)
                first_b = s;
            last_b = s;
        }
    }
    const bool within = first_b >= lo && first_b - lo <= delta && last_b <= hi && hi - last_b <= delta;
    std::ostringstream detail;
    detail << bundle.size() << " samples, b on [" << first_b << ", " << last_b << "], a "
           << (a_everywhere ? "at every sample" : "missing somewhere");
    return {exact && within && a_everywhere, detail.str()};
}

double rk4(double t0_value, double s, double h)
{
    auto f = [](double T) { return -T + 15.0; };
    double T = t0_value;
    double t = 0.0;
    while (t < s) {
        const double step = std::min(h, s - t);
        const double k1 = f(T);
        const double k2 = f(T + step / 2 * k1);
        const double k3 = f(T + step / 2 * k2);
        const double k4 = f(T + step * k3);
        T += step / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        t += step;
    }
    return T;
}

Outcome flow_accuracy()
{
    Declarations decls;
    decls.add({"T", VarKind::continuous});
    Valuation start = decls.zero_valuation();
    start.set(VarKey{"T", false}, 25.0);
    const Expr tcp = parse_predicate("T' = -T + 15");
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> when(0.0, 5.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double s = std::max(when(rng), 1e-6);
        const auto trajectory = flow(start, tcp, s, s, decls);
        if (!trajectory)
            return {false, "no trajectory at s = " + std::to_string(s)};
        const double closed = trajectory->samples.back().at(VarKey{"T", false});
        const double numeric = rk4(25.0, s, 1e-4);
        worst = std::max(worst, std::abs(closed - numeric) / std::abs(numeric));
    }
    std::ostringstream detail;
    detail << "max relative error " << worst;
    return {worst <= 1e-6, detail.str()};
}

Outcome congruence()
{
    std::size_t preserved = 0;
    std::size_t total = 0;
    std::ostringstream failures;
    std::mt19937_64 rng(777);
    for (std::uint64_t seed = 300; seed < 325; ++seed) {
        const ModelFile m = random_model(seed);
        const ModelFile ctx = random_context(seed);
        const CompositionPtr flat = make_atomic(eliminate(*m.root));
        Context c;
        c.kind = std::bernoulli_distribution(0.5)(rng) ? Context::Kind::parallel_left : Context::Kind::parallel_right;
        c.sync = random_sync(rng);
        c.other = ctx.root;
        const GameConfig cfg = game({default_initial_valuation(m)});
        const CongruenceReport report = check_congruence_sample(m.root, flat, {c}, m.declarations, cfg);
        ++total;
        if (report.precondition && equivalent(report.verdicts.front()))
            ++preserved;
        else
            failures << " seed " << seed << (report.precondition ? "" : " (base pair distinguished)");
    }
    std::ostringstream detail;
    detail << preserved << "/" << total << " contexts preserve equivalence";
    if (preserved != total)
        detail << ", failing:" << failures.str();
    return {preserved == 25, detail.str()};
}

Outcome rule_coverage()
{
    RuleTally tally;
    auto run = [&](const ModelFile& m, std::size_t limit) {
        const Semantics sem(m.declarations, EngineOptions{.tally = &tally});
        (void)explore(sem, {m.root, default_initial_valuation(m)}, default_durations(), limit);
    };
    for (const char* name : {"thermostat.hcif", "thermostat_hier.hcif", "thermostat_flat.hcif", "example1.hcif",
                             "example2.hcif"})
        run(bundled(name), 300);
    std::mt19937_64 rng(8);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const ModelFile m = random_model(seed);
        const ModelFile ctx = random_context(seed);
        run(ModelFile{m.declarations, make_parallel(m.root, random_sync(rng), ctx.root)}, 300);
    }
    std::ostringstream detail;
    bool all = true;
    for (std::size_t r = 0; r < rule_count; ++r) {
        const auto count = tally.fired[r];
        if (count == 0) {
            all = false;
            detail << rule_name(static_cast<Rule>(r)) << "=0 ";
        }
    }
    std::uint64_t least = tally.fired[0];
    for (auto c : tally.fired)
        least = std::min(least, c);
    if (all)
        detail << "all " << rule_count << " rules fired, least-used rule fired " << least << " times";
    return {all, detail.str()};
}

Outcome parallel_laws()
{
    std::mt19937_64 rng(9);
    const std::vector<std::string> alphabet{"a", "b", "c", "d"};
    std::size_t checks = 0;
    std::size_t failures = 0;
    std::uint64_t seed = 0;
    while (checks < 1000) {
        const ModelFile left = random_model(seed);
        const ModelFile right = random_context(seed);
        ++seed;
        const ActionSet sync = random_sync(rng);
        const Semantics sem(left.declarations);
        const Valuation sigma = default_initial_valuation(left);
        const auto composed = make_parallel(left.root, sync, right.root);
        const double t = std::vector<double>{0.125, 0.5, 1.0}[checks % 3];
        const auto p = sem.time_successors(left.root, sigma, t);
        const auto q = sem.time_successors(right.root, sigma, t);
        const auto pq = sem.time_successors(composed, sigma, t);
        // One delay per component target pair; the laws relate matching pairs.
        for (const auto& both : pq) {
            const auto* par = both.target->as_parallel();
            for (const auto& l : p) {
                if (l.target->key() != par->left->key())
                    continue;
                for (const auto& r : q) {
                    if (r.target->key() != par->right->key())
                        continue;
                    for (std::size_t k = 0; k < both.bundle.size(); ++k) {
                        const auto& t0 = l.bundle.theta[k];
                        const auto& t1 = r.bundle.theta[k];
                        for (const auto& a : alphabet) {
                            const bool in0 = t0.count(a) != 0;
                            const bool in1 = t1.count(a) != 0;
                            const bool synced = sync.count(a) != 0;
                            const bool expected = (in0 && in1) || (in0 && !synced) || (in1 && !synced);
                            if (expected != (both.bundle.theta[k].count(a) != 0))
                                ++failures;
                        }
                        if (both.bundle.omega[k] != (l.bundle.omega[k] && r.bundle.omega[k]))
                            ++failures;
                        ++checks;
                    }
                }
            }
        }
    }
    std::ostringstream detail;
    detail << checks << " sample checks over " << seed << " composed models, " << failures << " mismatches";
    return {failures == 0, detail.str()};
}

struct Command {
    int status = -1;
    std::string output;
};

Command run(const std::string& args)
{
    Command result;
    const std::string command = std::string(HCIF_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(command.c_str(), "r");
    if (pipe == nullptr)
        return result;
    std::array<char, 4096> buffer{};
    while (std::fgets(buffer.data(), buffer.size(), pipe) != nullptr)
        result.output += buffer.data();
    const int status = pclose(pipe);
    result.status = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

Outcome cli_contract()
{
    std::size_t round_trips = 0;
    std::size_t models = 0;
    for (const auto& entry : std::filesystem::directory_iterator(models_dir)) {
        if (entry.path().extension() != ".hcif")
            continue;
        ++models;
        const ModelFile m = load_model(entry.path());
        if (structurally_equal(parse_model(print_model(m)), m))
            ++round_trips;
    }
    const std::string dir = models_dir.string() + "/";
    const Command same = run("bisim " + dir + "thermostat_hier.hcif " + dir + "thermostat_flat.hcif");
    const Command differ = run("bisim " + dir + "thermostat_hier.hcif " + dir + "thermostat.hcif");
    const Command broken = run("bisim " + dir + "missing.hcif " + dir + "thermostat.hcif");
    const Command first = run("simulate " + dir + "thermostat_hier.hcif --steps 25 --seed 42");
    const Command second = run("simulate " + dir + "thermostat_hier.hcif --steps 25 --seed 42");
    const bool deterministic = first.status == 0 && second.status == 0 && !first.output.empty() &&
                               first.output == second.output;

    std::ostringstream detail;
    detail << round_trips << "/" << models << " round trips, bisim exits " << same.status << "/" << differ.status
           << "/" << broken.status << " (want 0/2/1), simulate " << (deterministic ? "deterministic" : "not deterministic");
    return {models > 0 && round_trips == models && same.status == 0 && differ.status == 2 && broken.status == 1 &&
                deterministic,
            detail.str()};
}

} // namespace

int main()
{
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"flattening regression", flattening_regression},
        {"elimination oracle", elimination_oracle},
        {"mutation sensitivity", mutation_sensitivity},
        {"eager choice", eager_choice},
        {"enabled actions over time", enabled_over_time},
        {"flow accuracy", flow_accuracy},
        {"congruence sampling", congruence},
        {"rule coverage", rule_coverage},
        {"parallel trajectory laws", parallel_laws},
        {"cli contract", cli_contract},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome outcome;
        try {
            outcome = criteria[i].second();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        failed += outcome.pass ? 0 : 1;
        std::cout << (outcome.pass ? "PASS" : "FAIL") << "  " << i + 1 << ". " << criteria[i].first << ": "
                  << outcome.detail << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
