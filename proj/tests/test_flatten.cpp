#include "catch_amalgamated.hpp"

#include "hcif/bisim.hpp"
#include "hcif/errors.hpp"
#include "hcif/flatten.hpp"
#include "hcif/syntax.hpp"

#include "support/random_models.hpp"

using namespace hcif;
using namespace hcif::testing;

namespace {

ModelFile bundled(const std::string& name)
{
    return load_model(std::string(HCIF_MODELS_DIR) + "/" + name);
}

GameConfig config(const ModelFile& m, std::size_t depth = 4)
{
    GameConfig cfg;
    cfg.depth = depth;
    cfg.delta = 1.0 / 32;
    cfg.initial_valuations = {default_initial_valuation(m)};
    return cfg;
}

std::size_t expected_location_count(const AtomicAutomaton& a)
{
    std::size_t n = 0;
    for (const auto& loc : a.locations())
        n += loc.sub ? loc.sub->as_atomic()->automaton.locations().size() : 1;
    return n;
}

} // namespace

TEST_CASE("thermostat hierarchy flattens to three locations")
{
    const ModelFile hier = bundled("thermostat_hier.hcif");
    const AtomicAutomaton& alpha = hier.root->as_atomic()->automaton;

    std::vector<std::string> names;
    for (const auto& l : flat_locations(alpha))
        names.push_back(flat_name(l));
    CHECK(names == std::vector<std::string>{"Off", "On.Cold", "On.Hot"});

    const AtomicAutomaton flat = flatten_depth2(alpha, {.prune = true});
    REQUIRE(flat.edges().size() == 3);
    const Location* cold = flat.find("On.Cold");
    REQUIRE(cold != nullptr);
    CHECK(to_string(cold->tcp) == "T' = -T + 25 and c' = 1");
    CHECK(cold->init.is_false());
    CHECK(to_string(flat.find("Off")->init) == "T = 25 and n = 0");
    CHECK(flat.find("On.Hot")->term.is_false());

    const ModelFile reference = bundled("thermostat_flat.hcif");
    CHECK(structurally_equal(flat, reference.root->as_atomic()->automaton));

    // Without pruning the dead alternative into On.Hot stays.
    const AtomicAutomaton raw = flatten_depth2(alpha);
    CHECK(raw.edges().size() == 5);
    CHECK(prune(raw).edges().size() == 3);
}

TEST_CASE("flattening preserves behaviour on generated models")
{
    for (std::uint64_t seed = 500; seed < 515; ++seed) {
        const ModelFile m = random_model(seed);
        const AtomicAutomaton& alpha = m.root->as_atomic()->automaton;
        const AtomicAutomaton flat = eliminate(*m.root);
        CHECK(flat.is_flat());
        CHECK(flat.locations().size() == expected_location_count(alpha));
        CHECK(equivalent(bounded_bisim(m.root, make_atomic(flat), m.declarations, config(m))));
        const AtomicAutomaton pruned = eliminate(*m.root, {.prune = true});
        CHECK(pruned.edges().size() <= flat.edges().size());
        CHECK(equivalent(bounded_bisim(make_atomic(pruned), make_atomic(flat), m.declarations, config(m))));
    }
}

TEST_CASE("product of flat automata")
{
    const ModelFile a = random_context(1);
    const ModelFile b = random_context(2);
    const auto& alpha = a.root->as_atomic()->automaton;
    const auto& beta = b.root->as_atomic()->automaton;
    const ActionSet sync{"a", "b"};
    const AtomicAutomaton prod = product(alpha, sync, beta);
    CHECK(prod.name() == alpha.name() + "_" + beta.name());
    CHECK(prod.locations().size() == alpha.locations().size() * beta.locations().size());
    CHECK(prod.find(alpha.locations().front().name + "__" + beta.locations().front().name) != nullptr);

    std::size_t expected_edges = 0;
    for (const auto& e : alpha.edges())
        expected_edges += sync.count(e.action) ? 0 : beta.locations().size();
    for (const auto& e : beta.edges())
        expected_edges += sync.count(e.action) ? 0 : alpha.locations().size();
    for (const auto& e0 : alpha.edges())
        for (const auto& e1 : beta.edges())
            expected_edges += sync.count(e0.action) && e0.action == e1.action ? 1 : 0;
    CHECK(prod.edges().size() == expected_edges);

    const auto parallel = make_parallel(a.root, sync, b.root);
    CHECK(equivalent(bounded_bisim(parallel, make_atomic(prod), a.declarations, config(a))));
}

TEST_CASE("parallel terms with hierarchy eliminate recursively")
{
    std::mt19937_64 rng(4);
    for (std::uint64_t seed = 40; seed < 46; ++seed) {
        const ModelFile m = random_model(seed);
        const ModelFile ctx = random_context(seed);
        const auto term = make_parallel(m.root, random_sync(rng), ctx.root);
        const AtomicAutomaton flat = eliminate(*term);
        CHECK(flat.is_flat());
        CHECK(equivalent(bounded_bisim(term, make_atomic(flat), m.declarations, config(m, 3))));
    }
}

TEST_CASE("three-level hierarchies eliminate recursively")
{
    const ModelFile m = parse_model(R"(
        cont x
        automaton Top {
          location A {
            init x = 0
            tcp x' = 1
            sub automaton Mid {
              location B {
                init true
                sub automaton Low {
                  location C { init true edge x >= 1 : tick : x+ = 0 -> D }
                  location D { term true }
                }
                edge true : up : true -> E
              }
              location E { }
            }
            edge x >= 0.5 : leave : true -> F
          }
          location F { }
        }
    )");
    CHECK(depth(*m.root) == 3);
    CHECK_THROWS_AS(flatten_depth2(m.root->as_atomic()->automaton), FlattenError);
    const AtomicAutomaton flat = eliminate(*m.root);
    std::set<std::string> names;
    for (const auto& l : flat.locations())
        names.insert(l.name);
    CHECK(names == std::set<std::string>{"A.B.C", "A.B.D", "A.E", "F"});
    CHECK(equivalent(bounded_bisim(m.root, make_atomic(flat), m.declarations, config(m, 5))));
}

TEST_CASE("flattening errors")
{
    const ModelFile m = bundled("thermostat_hier.hcif");
    const auto& thermo = m.root->as_atomic()->automaton;
    const auto clock = thermo.find("On")->sub;
    CHECK_THROWS_AS(eliminate(*make_postfix(clock, thermo.pin("On"))), FlattenError);
    CHECK_THROWS_AS(product(thermo, {}, thermo), FlattenError);
}

TEST_CASE("pruning keeps the guard trajectory")
{
    const ModelFile m = parse_model(R"(
        cont x
        automaton P {
          location A {
            init true
            edge false : a : true -> A
            edge x < 1 : b : false -> A
            edge x < 1 : c : false -> A
            edge x < 1 : c : x+ = 0 -> A
          }
        }
    )");
    const AtomicAutomaton pruned = prune(m.root->as_atomic()->automaton);
    std::multiset<std::string> actions;
    for (const auto& e : pruned.edges())
        actions.insert(e.action);
    // b has no live sibling, so its edge still contributes to theta.
    CHECK(actions == std::multiset<std::string>{"b", "c"});
    CHECK(equivalent(bounded_bisim(m.root, make_atomic(pruned), m.declarations, config(m))));
}
