#include "hullfeas/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace hullfeas {

using nlohmann::json;

namespace {

constexpr double kThird = 1.0 / 3.0;

using Rows = std::vector<std::vector<double>>;

std::vector<double> bern(double p) { return {1.0 - p, p}; }

Rows bern_rows(std::initializer_list<double> ps) {
    Rows out;
    for (double p : ps) out.push_back(bern(p));
    return out;
}

// First `first`, then `cycle` repeated until there are k rows.
Rows pad(const Rows& first, const Rows& cycle, int k) {
    Rows out(first.begin(), first.end());
    for (std::size_t i = 0; static_cast<int>(out.size()) < k; ++i) out.push_back(cycle[i % cycle.size()]);
    out.resize(static_cast<std::size_t>(k));
    return out;
}

struct Cell {
    const char* tag;
    Rows optimal;
    Rows other;
};

// A unique cell lists the optimal rows once and fills with the other rows. A
// non-unique cell cycles through both groups, so the optimal subset repeats.
Rows unique_means(const Cell& c, int k) { return pad(c.optimal, c.other, k); }

Rows nonunique_means(const Cell& c, int k) {
    Rows both(c.other.begin(), c.other.end());
    both.insert(both.end(), c.optimal.begin(), c.optimal.end());
    return pad({}, both, k);
}

const std::vector<Cell>& bernoulli_cells() {
    static const std::vector<Cell> cells{
        {"J1", bern_rows({.5}), bern_rows({.48, .52})},
        {"J2", bern_rows({.3, .7}), bern_rows({.48, .52})},
    };
    return cells;
}

const std::vector<Cell>& multinomial_cells() {
    static const std::vector<Cell> cells{
        {"J1", {{kThird, kThird, kThird}}, {{0.0, 0.0, 1.0}}},
        {"J2", {{.1, .57, .33}, {.57, .1, .33}}, {{.2, .47, .33}, {.47, .2, .33}}},
        {"J3",
         {{.2, .1, .7}, {.7, .2, .1}, {.1, .7, .2}},
         {{.33, .33, .34}, {.33, .34, .33}, {.34, .33, .33}}},
    };
    return cells;
}

Scenario assemble(std::string name, ProblemSpec spec, Rows means, std::vector<Policy> policies,
                  int trials, std::uint64_t seed, std::int64_t max_steps, int grid_size) {
    spec.validate();
    if (policies.empty()) throw ValidationError("at least one policy is required");
    if (trials < 1) throw ValidationError("trials must be positive");
    if (max_steps < spec.k) throw ValidationError("max_steps must be at least k");
    Scenario s;
    s.name = std::move(name);
    s.instance = make_instance(std::move(means), spec);
    s.spec = std::move(spec);
    s.policies = std::move(policies);
    s.trials = trials;
    s.seed = seed;
    s.max_steps = max_steps;
    s.grid_size = grid_size;
    if (s.spec.d > 2) (void)s.grid(); // rejects grid sizes below d + 1
    return s;
}

std::int64_t default_max_steps(int d) { return d == 2 ? 10'000'000 : 100'000'000; }

Scenario builtin(const std::string& name) {
    constexpr int k = 10;
    for (const auto& c : bernoulli_cells()) {
        const std::string base = std::string("bern-") + c.tag;
        const auto spec = ProblemSpec::bernoulli(k, 0.5, 0.1, 0.01);
        if (name == base + "-unique") {
            return assemble(name, spec, unique_means(c, k), standard_policies(), 30, 1, default_max_steps(2), 300);
        }
        if (name == base + "-nonunique") {
            return assemble(name, spec, nonunique_means(c, k), standard_policies(), 30, 1, default_max_steps(2), 300);
        }
    }
    for (const auto& c : multinomial_cells()) {
        const std::string base = std::string("multi-") + c.tag;
        const auto spec = ProblemSpec::multinomial(k, {kThird, kThird, kThird}, 0.1, 0.01, 0.99);
        if (name == base + "-unique") {
            return assemble(name, spec, unique_means(c, k), standard_policies(), 30, 1, default_max_steps(3), 300);
        }
        if (name == base + "-nonunique") {
            return assemble(name, spec, nonunique_means(c, k), standard_policies(), 30, 1, default_max_steps(3), 300);
        }
    }
    throw ValidationError("unknown builtin scenario '" + name + "'");
}

// -- JSON parsing ------------------------------------------------------------

class FieldError {
public:
    explicit FieldError(std::string origin) : origin_(std::move(origin)) {}

    [[noreturn]] void fail(std::string_view field, std::string_view message) const {
        throw ValidationError(origin_ + ": field '" + std::string(field) + "': " + std::string(message));
    }

    const std::string& origin() const { return origin_; }

private:
    std::string origin_;
};

double number_at(const json& v, std::string_view field, const FieldError& err) {
    if (!v.is_number()) err.fail(field, "expected a number");
    return v.get<double>();
}

template <class Int>
Int integer_at(const json& v, std::string_view field, const FieldError& err) {
    if (!v.is_number_integer()) err.fail(field, "expected an integer");
    if constexpr (std::is_unsigned_v<Int>) {
        if (v.is_number_unsigned()) return v.get<Int>();
        const auto signed_value = v.get<std::int64_t>();
        if (signed_value < 0) err.fail(field, "expected a nonnegative integer");
        return static_cast<Int>(signed_value);
    } else {
        return v.get<Int>();
    }
}

// A simplex point; for d = 2 a bare number p stands for (1 - p, p).
std::vector<double> point_at(const json& v, int d, const std::string& field, const FieldError& err) {
    std::vector<double> out;
    if (v.is_number()) {
        if (d != 2) err.fail(field, "a scalar point is only allowed when d = 2");
        const double p = v.get<double>();
        out = {1.0 - p, p};
    } else if (v.is_array()) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            out.push_back(number_at(v[i], field + "[" + std::to_string(i) + "]", err));
        }
    } else {
        err.fail(field, "expected a number or an array of numbers");
    }
    try {
        check_simplex_point(out, d, "point");
    } catch (const ValidationError& e) {
        err.fail(field, e.what());
    }
    return out;
}

template <class F>
auto guarded(const FieldError& err, std::string_view field, F&& f) {
    try {
        return f();
    } catch (const std::invalid_argument& e) {
        err.fail(field, e.what());
    }
}

Scenario from_json(const json& doc, const FieldError& err) {
    if (!doc.is_object()) err.fail("<root>", "expected a JSON object");
    static const std::vector<std::string> known{"name",    "d",      "k",     "x",         "epsilon",
                                                "delta",   "lambda", "means", "policies",  "trials",
                                                "seed",    "grid_size", "max_steps", "margin_form",
                                                "comment"};
    for (const auto& [key, _] : doc.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) err.fail(key, "unknown field");
    }
    if (!doc.contains("name") || !doc["name"].is_string()) err.fail("name", "required string");
    if (!doc.contains("means") || !doc["means"].is_array() || doc["means"].empty()) {
        err.fail("means", "required nonempty array");
    }

    ProblemSpec spec;
    spec.d = doc.contains("d") ? integer_at<int>(doc["d"], "d", err) : 2;
    if (spec.d < 2) err.fail("d", "must be at least 2");
    const auto& means_json = doc["means"];
    spec.k = doc.contains("k") ? integer_at<int>(doc["k"], "k", err) : static_cast<int>(means_json.size());
    if (spec.k != static_cast<int>(means_json.size())) {
        err.fail("k", "k = " + std::to_string(spec.k) + " but means lists " +
                          std::to_string(means_json.size()) + " rows");
    }
    if (doc.contains("x")) {
        spec.x = point_at(doc["x"], spec.d, "x", err);
    } else {
        spec.x.assign(static_cast<std::size_t>(spec.d), 1.0 / spec.d);
    }
    if (doc.contains("epsilon")) spec.epsilon = number_at(doc["epsilon"], "epsilon", err);
    if (doc.contains("delta")) spec.delta = number_at(doc["delta"], "delta", err);
    if (doc.contains("lambda")) spec.lambda = number_at(doc["lambda"], "lambda", err);
    if (doc.contains("margin_form")) {
        if (!doc["margin_form"].is_string()) err.fail("margin_form", "expected a string");
        const auto form = doc["margin_form"].get<std::string>();
        spec.margin_form = guarded(err, "margin_form", [&] { return parse_margin_form(form); });
    }
    guarded(err, "<spec>", [&] { spec.validate(); return 0; });

    Rows means;
    for (std::size_t i = 0; i < means_json.size(); ++i) {
        means.push_back(point_at(means_json[i], spec.d, "means[" + std::to_string(i) + "]", err));
    }

    std::vector<Policy> policies;
    if (doc.contains("policies")) {
        const auto& p = doc["policies"];
        if (!p.is_array() || p.empty()) err.fail("policies", "expected a nonempty array of names");
        for (std::size_t i = 0; i < p.size(); ++i) {
            const std::string field = "policies[" + std::to_string(i) + "]";
            if (!p[i].is_string()) err.fail(field, "expected a policy name");
            const auto text = p[i].get<std::string>();
            policies.push_back(guarded(err, field, [&] {
                Policy policy = Policy::parse(text);
                (void)policy.prior_for(spec.d);
                return policy;
            }));
        }
    } else {
        policies = standard_policies();
    }

    const int trials = doc.contains("trials") ? integer_at<int>(doc["trials"], "trials", err) : 30;
    if (trials < 1) err.fail("trials", "must be positive");
    const auto seed = doc.contains("seed") ? integer_at<std::uint64_t>(doc["seed"], "seed", err) : 1;
    const int grid_size = doc.contains("grid_size") ? integer_at<int>(doc["grid_size"], "grid_size", err) : 300;
    if (spec.d > 2 && grid_size < spec.d + 1) {
        err.fail("grid_size", "need at least d + 1 = " + std::to_string(spec.d + 1) + " directions");
    }
    const std::int64_t max_steps = doc.contains("max_steps")
                                       ? integer_at<std::int64_t>(doc["max_steps"], "max_steps", err)
                                       : default_max_steps(spec.d);
    if (max_steps < spec.k) err.fail("max_steps", "must be at least k");

    return guarded(err, "<scenario>", [&] {
        return assemble(doc["name"].get<std::string>(), spec, std::move(means), std::move(policies), trials,
                        seed, max_steps, grid_size);
    });
}

} // namespace

const std::vector<std::string>& builtin_scenario_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& c : bernoulli_cells()) {
            out.push_back(std::string("bern-") + c.tag + "-unique");
            out.push_back(std::string("bern-") + c.tag + "-nonunique");
        }
        for (const auto& c : multinomial_cells()) {
            out.push_back(std::string("multi-") + c.tag + "-unique");
            out.push_back(std::string("multi-") + c.tag + "-nonunique");
        }
        return out;
    }();
    return names;
}

bool is_builtin_scenario(std::string_view name) {
    const auto& names = builtin_scenario_names();
    return std::find(names.begin(), names.end(), name) != names.end();
}

Scenario builtin_scenario(std::string_view name) { return builtin(std::string(name)); }

Scenario parse_scenario(std::string_view text, std::string_view origin) {
    const FieldError err{std::string(origin)};
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string(origin) + ": " + e.what());
    }
    return from_json(doc, err);
}

Scenario load_scenario(std::string_view path_or_name) {
    if (is_builtin_scenario(path_or_name)) return builtin_scenario(path_or_name);
    const std::string path(path_or_name);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open scenario file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw IoError("error reading scenario file '" + path + "'");
    return parse_scenario(buffer.str(), path);
}

std::string to_json(const Scenario& s, int indent) {
    json doc;
    doc["name"] = s.name;
    doc["d"] = s.spec.d;
    doc["k"] = s.spec.k;
    doc["x"] = s.spec.x;
    doc["epsilon"] = s.spec.epsilon;
    doc["delta"] = s.spec.delta;
    doc["lambda"] = s.spec.lambda;
    doc["margin_form"] = std::string(to_string(s.spec.margin_form));
    doc["means"] = s.instance.means;
    json policies = json::array();
    for (const auto& p : s.policies) policies.push_back(p.name());
    doc["policies"] = policies;
    doc["trials"] = s.trials;
    doc["seed"] = s.seed;
    doc["grid_size"] = s.grid_size;
    doc["max_steps"] = s.max_steps;
    return doc.dump(indent);
}

} // namespace hullfeas
