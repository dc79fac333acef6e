// Command-line front end: run scenarios, print bounds and oracle answers.
//
// Exit status: 0 on success, 1 on invalid input, 2 on I/O failure.

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "hullfeas/bounds.hpp"
#include "hullfeas/confidence.hpp"
#include "hullfeas/geometry.hpp"
#include "hullfeas/harness.hpp"
#include "hullfeas/scenario.hpp"

namespace {

using namespace hullfeas;

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

std::string samples(std::int64_t s) { return s == kUnboundedSamples ? "inf" : std::to_string(s); }

std::string vec(const std::vector<double>& v) {
    std::ostringstream out;
    out << std::setprecision(10) << '(';
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? ", " : "") << v[i];
    out << ')';
    return out.str();
}

void cmd_list() {
    for (const auto& name : builtin_scenario_names()) {
        const Scenario s = builtin_scenario(name);
        std::cout << name << "\td=" << s.spec.d << " k=" << s.spec.k << " trials=" << s.trials << '\n';
    }
}

void cmd_run(const std::string& which, std::optional<int> trials, std::optional<std::uint64_t> seed,
             const std::string& out_path, unsigned threads) {
    Scenario s = load_scenario(which);
    if (trials) {
        if (*trials < 1) throw ValidationError("--trials must be positive");
        s.trials = *trials;
    }
    if (seed) s.seed = *seed;
    const auto results = run_trials(s, {threads});
    const auto rows = aggregate(results);
    if (!out_path.empty()) {
        const std::filesystem::path path(out_path);
        const auto stem = path.parent_path() / path.stem();
        save_trials_csv(path, results);
        save_aggregate_csv(stem.string() + "_aggregate.csv", rows);
        save_manifest(stem.string() + "_manifest.json", s);
    }
    write_aggregate_csv(std::cout, rows);
}

void cmd_bounds(const std::string& which) {
    const Scenario s = load_scenario(which);
    const GapReport g = gaps(s.instance, s.spec);
    std::cout << "scenario " << s.name << " (" << to_string(s.instance.label) << ")\n";
    std::cout << "action,p,delta_min,delta_max,s_min,s_max\n";
    std::cout << std::setprecision(10);
    for (std::size_t i = 0; i < g.s_min.size(); ++i) {
        std::cout << i << ',' << s.instance.means[i][1] << ',' << g.delta_min[i] << ',' << g.delta_max[i]
                  << ',' << samples(g.s_min[i]) << ',' << samples(g.s_max[i]) << '\n';
    }
    if (s.instance.label == Verdict::feasible) {
        const OptimalSubset j = optimal_subset(s.instance, s.spec);
        std::cout << "optimal_subset " << (j.kind == OptimalSubset::Kind::pair ? "pair" : "singleton");
        for (int i : j.indices) std::cout << ' ' << i;
        std::cout << "\nlower_bound " << lower_bound_feasible(s.instance, s.spec) << '\n';
    } else {
        std::cout << "lower_bound " << lower_bound_infeasible(s.instance, s.spec) << '\n';
    }
    std::cout << "upper_bound_uniform " << samples(upper_bound_uniform(s.instance, s.spec)) << '\n';
    std::cout << "upper_bound_lucb_mean " << samples(upper_bound_lucb_mean(s.instance, s.spec)) << '\n';
}

void cmd_oracle(const std::string& which) {
    const Scenario s = load_scenario(which);
    const auto cert = oracle_feasibility(s.instance.means, s.spec);
    std::cout << std::setprecision(10);
    std::cout << "verdict " << to_string(cert.verdict) << '\n';
    std::cout << "distance " << cert.distance << '\n';
    std::cout << "closest " << vec(cert.closest) << '\n';
    std::cout << "weights " << vec(cert.weights) << '\n';
    if (!cert.separator.empty()) std::cout << "separator " << vec(cert.separator) << '\n';
}

void cmd_validate_margin(std::int64_t horizon, double delta, int k, const std::string& form) {
    if (horizon < 1) throw ValidationError("--horizon must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("--delta must lie in (0, 1)");
    if (k < 1) throw ValidationError("--k must be positive");
    const MarginSpec spec{delta, k, parse_margin_form(form)};
    const BudgetReport r = validate_budget(spec, horizon);
    std::cout << std::setprecision(10);
    std::cout << "partial_sum " << r.partial_sum << '\n';
    std::cout << "budget " << r.budget << '\n';
    std::cout << "ratio " << r.partial_sum / r.budget << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sequential convex-hull feasibility simulator"};
    app.set_version_flag("--version", std::string(hullfeas::library_version()));
    app.require_subcommand(1);

    std::string scenario;
    std::optional<int> trials;
    std::optional<std::uint64_t> seed;
    std::string out_path;
    unsigned threads = 0;
    auto* run = app.add_subcommand("run", "Run every policy of a scenario and print the aggregate table");
    run->add_option("scenario", scenario, "Builtin name or JSON file")->required();
    run->add_option("--trials", trials, "Override the number of trials");
    run->add_option("--seed", seed, "Override the master seed");
    run->add_option("--out", out_path, "Write per-trial CSV here, plus <stem>_aggregate.csv and <stem>_manifest.json");
    run->add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");

    auto* bounds = app.add_subcommand("bounds", "Print gaps and sample-complexity bounds (d = 2)");
    bounds->add_option("scenario", scenario, "Builtin name or JSON file")->required();

    auto* oracle = app.add_subcommand("oracle", "Print the ground-truth feasibility certificate");
    oracle->add_option("scenario", scenario, "Builtin name or JSON file")->required();

    std::int64_t horizon = 100'000;
    double delta = 0.01;
    int k = 10;
    std::string form = "standard";
    auto* validate = app.add_subcommand("validate-margin", "Sum the deviation budget of the confidence margin");
    validate->add_option("--horizon", horizon, "Largest n in the sum");
    validate->add_option("--delta", delta, "Confidence parameter");
    validate->add_option("--k", k, "Number of actions");
    validate->add_option("--form", form, "standard or conservative");

    app.add_subcommand("list-scenarios", "List builtin scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (*run) cmd_run(scenario, trials, seed, out_path, threads);
        else if (*bounds) cmd_bounds(scenario);
        else if (*oracle) cmd_oracle(scenario);
        else if (*validate) cmd_validate_margin(horizon, delta, k, form);
        else cmd_list();
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return 0;
}
