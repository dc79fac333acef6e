#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hullfeas/core.hpp"
#include "hullfeas/geometry.hpp"
#include "hullfeas/policies.hpp"

namespace hullfeas {

/// A fully validated simulation setup: the problem, the true means and how to
/// run it.
struct Scenario {
    std::string name;
    ProblemSpec spec;
    Instance instance;
    std::vector<Policy> policies;
    int trials = 30;
    std::uint64_t seed = 1;
    std::int64_t max_steps = 10'000'000;
    int grid_size = 300; ///< directions on the sphere; unused when d = 2

    DirectionGrid grid() const { return grid_for(spec, grid_size); }
};

/// Names accepted by builtin_scenario, in display order.
const std::vector<std::string>& builtin_scenario_names();

bool is_builtin_scenario(std::string_view name);

/// Throws ValidationError for unknown names.
Scenario builtin_scenario(std::string_view name);

/// Parses a JSON scenario. `origin` prefixes error messages (usually the path).
///
/// Required: name, means. Optional with defaults: d (2), k (len(means)),
/// x (0.5 or the simplex barycenter), epsilon (0.1), delta (0.01),
/// lambda (0.99), margin_form ("standard"), policies (all four), trials (30),
/// seed (1), grid_size (300), max_steps (1e7 for d = 2, 1e8 otherwise).
/// When d = 2, x and each mean may be given as the scalar probability of group 1.
Scenario parse_scenario(std::string_view text, std::string_view origin = "<scenario>");

/// A builtin name, or else a path to a JSON file. Unreadable files raise IoError.
Scenario load_scenario(std::string_view path_or_name);

/// Serializes to the format parse_scenario reads (full simplex vectors).
std::string to_json(const Scenario& scenario, int indent = 2);

} // namespace hullfeas
