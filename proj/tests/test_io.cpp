#include "catch_amalgamated.hpp"

#include "hcif/cli.hpp"
#include "hcif/io.hpp"
#include "hcif/syntax.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

using namespace hcif;
using nlohmann::json;

namespace {

const std::string models = HCIF_MODELS_DIR;

struct Run {
    int status = 0;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args, const std::string& input = "")
{
    args.insert(args.begin(), "hcif");
    std::istringstream in(input);
    std::ostringstream out;
    std::ostringstream err;
    Run r;
    r.status = run_cli(args, in, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::vector<json> lines(const std::string& text)
{
    std::vector<json> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
        out.push_back(json::parse(line));
    return out;
}

} // namespace

TEST_CASE("traces chain and are deterministic per seed")
{
    const ModelFile m = load_model(models + "/thermostat_hier.hcif");
    for (std::uint64_t seed : {0u, 1u, 7u}) {
        SimulationOptions opts;
        opts.steps = 40;
        opts.seed = seed;
        std::ostringstream a;
        std::ostringstream b;
        CHECK(simulate(m, default_initial_valuation(m), opts, a) == 40);
        (void)simulate(m, default_initial_valuation(m), opts, b);
        CHECK(a.str() == b.str());
        const auto records = lines(a.str());
        REQUIRE(records.size() == 40);
        CHECK(records.front()["pre"] == to_json(default_initial_valuation(m)));
        for (std::size_t k = 0; k < records.size(); ++k) {
            CHECK(records[k]["step"] == k);
            CHECK(records[k].contains("locations"));
            if (k + 1 < records.size())
                CHECK(records[k]["post"] == records[k + 1]["pre"]);
            const std::string kind = records[k]["kind"];
            if (kind == "time") {
                const auto& label = records[k]["label"];
                CHECK(label["samples"].size() == static_cast<std::size_t>(label["duration"].get<double>() * 32) + 1);
                CHECK(label["samples"].back()["rho"] == records[k]["post"]);
            } else if (kind == "env") {
                CHECK(records[k]["pre"] == records[k]["post"]);
            } else {
                CHECK(kind == "action");
            }
        }
    }
}

TEST_CASE("interactive simulation follows the chosen indices")
{
    const ModelFile m = load_model(models + "/example1.hcif");
    SimulationOptions opts;
    opts.steps = 5;
    std::istringstream choices("0\n0\n");
    std::ostringstream prompt;
    opts.choices = &choices;
    opts.prompt = &prompt;
    std::ostringstream out;
    CHECK(simulate(m, default_initial_valuation(m), opts, out) == 2);
    CHECK(prompt.str().find("[0] action a") != std::string::npos);
    CHECK(lines(out.str()).front()["label"] == "a");
}

TEST_CASE("location trees")
{
    const ModelFile m = load_model(models + "/thermostat_hier.hcif");
    const auto& thermo = m.root->as_atomic()->automaton;
    const auto clock = thermo.find("On")->sub->as_atomic()->automaton;
    const json tree = location_tree(*make_postfix(make_atomic(clock.pin("Cold")), thermo.pin("On")));
    CHECK(tree["automaton"] == "Thermostat");
    CHECK(tree["location"] == "On");
    CHECK(tree["sub"]["location"] == "Cold");
    const json par = location_tree(*make_parallel(m.root, {"x"}, m.root));
    CHECK(par["parallel"].size() == 2);
    CHECK(par["sync"] == json::array({"x"}));
    CHECK(par["parallel"][0]["location"].is_null());
}

TEST_CASE("dot export has one cluster per automaton")
{
    const ModelFile m = load_model(models + "/thermostat_hier.hcif");
    const std::string dot = to_dot(m);
    CHECK(dot.rfind("digraph", 0) == 0);
    const std::regex cluster("subgraph \"cluster_");
    const auto count = std::distance(std::sregex_iterator(dot.begin(), dot.end(), cluster), std::sregex_iterator());
    // Thermostat, the substructure wrapper of On, and Clock.
    CHECK(count == 3);
    CHECK(dot.find("switch-on") != std::string::npos);
}

TEST_CASE("cli: flatten writes a parseable flat model")
{
    const auto out = std::filesystem::temp_directory_path() / "hcif-flat-test.hcif";
    const Run r = cli({"flatten", models + "/thermostat_hier.hcif", "--prune", "-o", out.string()});
    REQUIRE(r.status == 0);
    const ModelFile flat = load_model(out);
    std::vector<std::string> names;
    for (const auto& l : flat.root->as_atomic()->automaton.locations())
        names.push_back(l.name);
    CHECK(names == std::vector<std::string>{"Off", "On.Cold", "On.Hot"});
    const Run back = cli({"bisim", models + "/thermostat_hier.hcif", out.string()});
    CHECK(back.status == 0);
    CHECK(back.out.find("equivalent") == 0);

    const Run stdout_flat = cli({"flatten", models + "/thermostat_hier.hcif"});
    CHECK(stdout_flat.status == 0);
    CHECK(parse_model(stdout_flat.out).root->as_atomic()->automaton.locations().size() == 3);
}

TEST_CASE("cli: bisim exit codes")
{
    CHECK(cli({"bisim", models + "/thermostat_hier.hcif", models + "/thermostat_flat.hcif"}).status == 0);
    const Run differ = cli({"bisim", models + "/thermostat_hier.hcif", models + "/thermostat.hcif"});
    CHECK(differ.status == 2);
    CHECK(differ.out.find("distinguished") == 0);
    CHECK(cli({"bisim", models + "/thermostat_hier.hcif", models + "/thermostat.hcif", "--depth", "2"}).status == 0);

    const auto sigma = std::filesystem::temp_directory_path() / "hcif-sigma-test.txt";
    {
        std::ofstream s(sigma);
        s << "T = 25, n = 0, c = 0\nT = 19\n";
    }
    CHECK(cli({"bisim", models + "/thermostat_hier.hcif", models + "/thermostat_flat.hcif", "--sigma",
               sigma.string()})
              .status == 0);
    {
        std::ofstream s(sigma);
        s << "T = \n";
    }
    const Run bad_sigma = cli({"bisim", models + "/thermostat_hier.hcif", models + "/thermostat_flat.hcif",
                               "--sigma", sigma.string()});
    CHECK(bad_sigma.status == 1);
    CHECK(bad_sigma.err.find(sigma.string() + ":1:") != std::string::npos);
}

TEST_CASE("cli: errors exit 1 with diagnostics")
{
    const auto bad = std::filesystem::temp_directory_path() / "hcif-bad-test.hcif";
    {
        std::ofstream out(bad);
        out << "cont x\nautomaton A {\n  location L { sub }\n}\n";
    }
    const Run syntax = cli({"simulate", bad.string()});
    CHECK(syntax.status == 1);
    CHECK(syntax.err.find(":3:") != std::string::npos);
    CHECK(syntax.out.empty());

    const Run missing = cli({"export-dot", "/nonexistent/model.hcif"});
    CHECK(missing.status == 1);
    CHECK_FALSE(missing.err.empty());
    CHECK(cli({}).status == 1);
    CHECK(cli({"simulate"}).status == 1);
    CHECK(cli({"frobnicate"}).status == 1);
    CHECK(cli({"--help"}).status == 0);
    CHECK(cli({"simulate", models + "/thermostat.hcif", "--durations", "0.3"}).status == 1);
}

TEST_CASE("cli: simulate is deterministic per seed")
{
    const auto a = cli({"simulate", models + "/thermostat_hier.hcif", "--steps", "30", "--seed", "9"});
    const auto b = cli({"simulate", models + "/thermostat_hier.hcif", "--steps", "30", "--seed", "9"});
    CHECK(a.status == 0);
    CHECK(a.out == b.out);
    CHECK(lines(a.out).size() == 30);
    const auto custom = cli({"simulate", models + "/thermostat.hcif", "--steps", "10", "--durations", "0.25,0.5",
                             "--delta", "0.25"});
    for (const auto& r : lines(custom.out))
        if (r["kind"] == "time")
            CHECK((r["label"]["duration"] == 0.25 || r["label"]["duration"] == 0.5));
    const auto interactive = cli({"simulate", models + "/example1.hcif", "--interactive"}, "0\n");
    CHECK(interactive.status == 0);
    CHECK(lines(interactive.out).size() == 1);
    CHECK(interactive.err.find("choice>") != std::string::npos);
}

TEST_CASE("cli: enabled-at reports guard trajectories")
{
    const Run r = cli({"enabled-at", models + "/example2.hcif", "--horizon", "2"});
    REQUIRE(r.status == 0);
    const auto records = lines(r.out);
    CHECK(records.size() == 65);
    for (const auto& rec : records) {
        const double s = rec["s"];
        const auto theta = rec["theta"].get<std::vector<std::string>>();
        const bool b = std::find(theta.begin(), theta.end(), "b") != theta.end();
        CHECK(b == (std::log(2.0) < s && s < std::log(4.0)));
    }
    CHECK(cli({"enabled-at", models + "/example2.hcif", "--horizon", "0.3"}).status == 1);
    const Run dot = cli({"export-dot", models + "/example2.hcif"});
    CHECK(dot.status == 0);
    CHECK(dot.out.find("cluster_") != std::string::npos);
}
