#include "hcif/cli.hpp"

#include "hcif/bisim.hpp"
#include "hcif/errors.hpp"
#include "hcif/flatten.hpp"
#include "hcif/io.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

namespace hcif {

namespace {

std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

void print_verdict(const Verdict& verdict, std::ostream& out)
{
    if (const auto* eq = std::get_if<EquivalentUpToBound>(&verdict)) {
        out << "equivalent up to depth " << eq->depth << " (" << eq->pairs << " pairs explored)\n";
        return;
    }
    const auto& d = std::get<Distinguished>(verdict);
    out << "distinguished from " << to_string(d.initial) << ": " << d.reason << "\n";
    for (std::size_t i = 0; i < d.trace.size(); ++i)
        out << "  " << i + 1 << ". " << describe(d.trace[i]) << "\n";
}

} // namespace

int run_cli(const std::vector<std::string>& argv, std::istream& in, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Hybrid automata with hierarchy: simulation, flattening and bisimulation checks", "hcif"};
    app.require_subcommand(1);

    double delta = default_delta();
    std::vector<double> durations = default_durations();

    std::string model_path;
    auto* simulate_cmd = app.add_subcommand("simulate", "Random or interactive run, one JSON record per step");
    std::size_t steps = 20;
    std::uint64_t seed = 0;
    bool interactive = false;
    simulate_cmd->add_option("file", model_path, "Model file")->required();
    simulate_cmd->add_option("--steps", steps, "Number of steps");
    simulate_cmd->add_option("--delta", delta, "Sampling step")->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--durations", durations, "Delay menu")->delimiter(',');
    simulate_cmd->add_option("--seed", seed, "Random seed");
    simulate_cmd->add_flag("--interactive", interactive, "Choose transitions from standard input");

    auto* flatten_cmd = app.add_subcommand("flatten", "Eliminate hierarchy and parallel composition");
    std::string output_path;
    bool prune_edges = false;
    flatten_cmd->add_option("file", model_path, "Model file")->required();
    flatten_cmd->add_option("-o,--output", output_path, "Output file (default: standard output)");
    flatten_cmd->add_flag("--prune", prune_edges, "Drop edges that can never fire");

    auto* bisim_cmd = app.add_subcommand("bisim", "Bounded stateless-bisimulation check");
    std::string other_path;
    std::string sigma_path;
    std::size_t depth = 6;
    bisim_cmd->add_option("a", model_path, "First model")->required();
    bisim_cmd->add_option("b", other_path, "Second model")->required();
    bisim_cmd->add_option("--depth", depth, "Game depth");
    bisim_cmd->add_option("--sigma", sigma_path, "Initial valuations, one per line");
    bisim_cmd->add_option("--delta", delta, "Sampling step")->check(CLI::PositiveNumber);
    bisim_cmd->add_option("--durations", durations, "Delay menu")->delimiter(',');

    auto* enabled_cmd = app.add_subcommand("enabled-at", "Guard and termination trajectories of one delay");
    double horizon = 1.0;
    enabled_cmd->add_option("file", model_path, "Model file")->required();
    enabled_cmd->add_option("--horizon", horizon, "Delay length")->required();
    enabled_cmd->add_option("--delta", delta, "Sampling step")->check(CLI::PositiveNumber);

    auto* dot_cmd = app.add_subcommand("export-dot", "Graphviz rendering");
    dot_cmd->add_option("file", model_path, "Model file")->required();

    std::vector<std::string> args(argv.size() > 0 ? argv.begin() + 1 : argv.begin(), argv.end());
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_error;
    }

    try {
        if (simulate_cmd->parsed()) {
            const ModelFile model = load_model(model_path);
            SimulationOptions options;
            options.steps = steps;
            options.durations = durations;
            options.delta = delta;
            options.seed = seed;
            if (interactive) {
                options.choices = &in;
                options.prompt = &err;
            }
            simulate(model, default_initial_valuation(model), options, out);
        } else if (flatten_cmd->parsed()) {
            ModelFile model = load_model(model_path);
            FlattenOptions options;
            options.prune = prune_edges;
            model.root = make_atomic(eliminate(*model.root, options));
            const std::string text = print_model(model);
            if (output_path.empty()) {
                out << text;
            } else {
                std::ofstream file(output_path);
                if (!(file << text))
                    throw Error("cannot write " + output_path);
            }
        } else if (bisim_cmd->parsed()) {
            const ModelFile a = load_model(model_path);
            const ModelFile b = load_model(other_path);
            const Declarations decls = merge(a.declarations, b.declarations);
            ModelFile base{decls, a.root};
            GameConfig cfg;
            cfg.depth = depth;
            cfg.delta = delta;
            cfg.durations = durations;
            const Valuation sigma0 = default_initial_valuation(base);
            cfg.initial_valuations = {sigma0};
            if (!sigma_path.empty()) {
                try {
                    cfg.initial_valuations = parse_sigma_file(read_file(sigma_path), decls, sigma0);
                } catch (const SyntaxError& e) {
                    throw Error(sigma_path + ":" + e.what());
                }
            }
            const Verdict verdict = bounded_bisim(a.root, b.root, decls, cfg);
            print_verdict(verdict, out);
            return equivalent(verdict) ? exit_ok : exit_distinguished;
        } else if (enabled_cmd->parsed()) {
            const ModelFile model = load_model(model_path);
            enabled_at(model, default_initial_valuation(model), horizon, delta, out);
        } else if (dot_cmd->parsed()) {
            out << to_dot(load_model(model_path));
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_error;
    }
    return exit_ok;
}

} // namespace hcif
