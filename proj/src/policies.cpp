#include "hullfeas/policies.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace hullfeas {

std::string_view to_string(PolicyKind kind) {
    switch (kind) {
    case PolicyKind::uniform: return "uniform";
    case PolicyKind::lucb_mean: return "lucb_mean";
    case PolicyKind::lucb_ratio: return "lucb_ratio";
    case PolicyKind::thompson: return "thompson";
    }
    return "unknown";
}

Policy Policy::thompson(std::vector<double> prior) {
    for (double a : prior) {
        if (!(a > 0.0) || !std::isfinite(a)) {
            throw ValidationError("thompson prior parameters must be positive");
        }
    }
    return {PolicyKind::thompson, std::move(prior)};
}

Policy Policy::parse(std::string_view text) {
    std::string name(text);
    for (char& c : name) {
        if (c == '-') c = '_';
    }
    if (name == "uniform") return uniform();
    if (name == "lucb_mean") return lucb_mean();
    if (name == "lucb_ratio") return lucb_ratio();
    if (name == "thompson") return thompson();
    if (name.starts_with("thompson(") && name.ends_with(")")) {
        std::vector<double> prior;
        std::string_view body(name);
        body = body.substr(9, body.size() - 10);
        while (!body.empty()) {
            const auto comma = body.find(',');
            std::string_view item = body.substr(0, comma);
            while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
            while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
            double value = 0.0;
            auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
            if (ec != std::errc() || ptr != item.data() + item.size() || item.empty()) {
                throw ValidationError("policy '" + std::string(text) + "': bad prior parameter '" +
                                      std::string(item) + "'");
            }
            prior.push_back(value);
            if (comma == std::string_view::npos) break;
            body.remove_prefix(comma + 1);
        }
        return thompson(std::move(prior));
    }
    throw ValidationError("unknown policy '" + std::string(text) +
                          "' (expected uniform, lucb_mean, lucb_ratio or thompson)");
}

std::string Policy::name() const {
    std::string out(to_string(kind));
    if (kind == PolicyKind::thompson && !prior.empty()) {
        out += '(';
        for (std::size_t i = 0; i < prior.size(); ++i) {
            if (i) out += ',';
            char buf[32];
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, prior[i]);
            out.append(buf, ptr);
        }
        out += ')';
    }
    return out;
}

std::vector<double> Policy::prior_for(int d) const {
    if (prior.empty()) return std::vector<double>(static_cast<std::size_t>(d), 1.0);
    if (static_cast<int>(prior.size()) != d) {
        throw ValidationError("thompson prior has " + std::to_string(prior.size()) +
                              " parameters, expected d = " + std::to_string(d));
    }
    return prior;
}

std::vector<Policy> standard_policies() {
    return {Policy::uniform(), Policy::lucb_mean(), Policy::lucb_ratio(), Policy::thompson()};
}

// -- Stopping ----------------------------------------------------------------

StopCheck evaluate_stop(const SeparabilityMargins& margins, const ProblemSpec& spec) {
    StopCheck check;
    check.inner = margins.inner;
    check.outer = margins.outer;
    const double feasible_threshold = spec.d == 2 ? -spec.epsilon : -spec.lambda * spec.epsilon;
    if (margins.inner > feasible_threshold) {
        check.fired = true;
        check.verdict = Verdict::feasible;
    } else if (margins.outer < -spec.epsilon) {
        check.fired = true;
        check.verdict = Verdict::infeasible;
    }
    return check;
}

StopCheck check_stop(std::span<const ActionStats> stats, const ProblemSpec& spec,
                     const DirectionGrid& grid) {
    return evaluate_stop(separability_margins(stats, spec, grid), spec);
}

bool is_active(const ActionStats& stats, const ProblemSpec& spec) {
    const double p = stats.mean_view()[0];
    const double lo = p - stats.margin;
    const double hi = p + stats.margin;
    const double x = spec.x[1];
    const double left = x - spec.epsilon;
    const double right = x + spec.epsilon;
    return (lo <= left && left <= hi) || (lo <= right && right <= hi);
}

// -- Selection ---------------------------------------------------------------

namespace {

struct Context {
    std::span<const ActionStats> stats;
    const ProblemSpec& spec;
    const ProjectionTable& table;
    std::span<const double> margins;
};

int argmin_count(std::span<const ActionStats> stats, const std::vector<bool>* active) {
    int best = -1;
    for (int i = 0; i < static_cast<int>(stats.size()); ++i) {
        if (active && !(*active)[static_cast<std::size_t>(i)]) continue;
        if (best < 0 || stats[static_cast<std::size_t>(i)].n < stats[static_cast<std::size_t>(best)].n) best = i;
    }
    return best;
}

int choose_uniform(const Context& ctx) {
    if (ctx.spec.d != 2) return argmin_count(ctx.stats, nullptr);
    std::vector<bool> active(ctx.stats.size());
    for (std::size_t i = 0; i < ctx.stats.size(); ++i) active[i] = is_active(ctx.stats[i], ctx.spec);
    const int chosen = argmin_count(ctx.stats, &active);
    if (chosen < 0) {
        const bool stopped = evaluate_stop(separability_margins(ctx.table, ctx.margins), ctx.spec).fired;
        throw std::logic_error(stopped
                                   ? "uniform selection called after a stopping rule fired"
                                   : "no active action although no stopping rule holds");
    }
    return chosen;
}

int choose_lucb_mean(const Context& ctx, int direction) {
    int best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < ctx.table.actions(); ++i) {
        const double score = ctx.table.projection(direction, i) + ctx.margins[static_cast<std::size_t>(i)];
        if (score > best_score) {
            best_score = score;
            best = i;
        }
    }
    return best;
}

// For d = 2 finite scores compete only among active actions. A resolved
// region lying short of x has a negative ratio, and 1/sqrt(n) then favours
// the most sampled action, which would starve the unresolved ones forever.
int choose_lucb_ratio(const Context& ctx, int direction) {
    std::vector<bool> flags;
    if (ctx.spec.d == 2) {
        flags.resize(ctx.stats.size());
        for (std::size_t i = 0; i < ctx.stats.size(); ++i) flags[i] = is_active(ctx.stats[i], ctx.spec);
        if (std::find(flags.begin(), flags.end(), true) == flags.end()) flags.clear();
    }
    const std::vector<bool>* active = flags.empty() ? nullptr : &flags;
    int best = -1;
    bool best_unbounded = false;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < ctx.table.actions(); ++i) {
        const double proj = ctx.table.projection(direction, i);
        const double b = ctx.margins[static_cast<std::size_t>(i)];
        const double denominator = b - proj;
        const auto n = ctx.stats[static_cast<std::size_t>(i)].n;
        if (denominator <= 0.0) {
            if (!best_unbounded || n < ctx.stats[static_cast<std::size_t>(best)].n) {
                best = i;
                best_unbounded = true;
            }
            continue;
        }
        if (best_unbounded) continue;
        if (active && !(*active)[static_cast<std::size_t>(i)]) continue;
        const double score = (proj + b) / denominator / std::sqrt(static_cast<double>(n));
        if (best < 0 || score > best_score) {
            best_score = score;
            best = i;
        }
    }
    return best;
}

int choose_thompson(const Context& ctx, int direction, std::span<const std::vector<double>> draws) {
    const auto u = ctx.table.grid().direction(direction);
    const auto x = ctx.spec.x_view();
    int best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < static_cast<int>(draws.size()); ++i) {
        const auto view = view_of(draws[static_cast<std::size_t>(i)], ctx.spec.d);
        double score = 0.0;
        for (std::size_t r = 0; r < u.size(); ++r) score += u[r] * (view[r] - x[r]);
        if (score > best_score) {
            best_score = score;
            best = i;
        }
    }
    return best;
}

std::vector<double> margins_of(std::span<const ActionStats> stats) {
    std::vector<double> out;
    out.reserve(stats.size());
    for (const auto& s : stats) {
        if (s.n < 1) throw std::domain_error("every action needs at least one sample before selection");
        out.push_back(s.margin);
    }
    return out;
}

// Builds the table and margins for one of the pure entry points.
template <typename F>
int with_context(std::span<const ActionStats> stats, const ProblemSpec& spec,
                 const DirectionGrid& grid, F&& body) {
    const auto margins = margins_of(stats);
    ProjectionTable table(grid, spec.x_view(), static_cast<int>(stats.size()));
    table.load(stats);
    const Context ctx{stats, spec, table, margins};
    const int direction = table.min_max(margins, -1.0).direction;
    return body(ctx, direction);
}

} // namespace

int select_uniform(std::span<const ActionStats> stats, const ProblemSpec& spec,
                   const DirectionGrid& grid) {
    return with_context(stats, spec, grid, [](const Context& ctx, int) { return choose_uniform(ctx); });
}

int select_lucb_mean(std::span<const ActionStats> stats, const ProblemSpec& spec,
                     const DirectionGrid& grid) {
    return with_context(stats, spec, grid, choose_lucb_mean);
}

int select_lucb_ratio(std::span<const ActionStats> stats, const ProblemSpec& spec,
                      const DirectionGrid& grid) {
    return with_context(stats, spec, grid, choose_lucb_ratio);
}

std::vector<std::vector<double>> posterior_draws(std::span<const ActionStats> stats,
                                                 std::span<const double> prior, RngStream& rng) {
    std::vector<std::vector<double>> draws;
    draws.reserve(stats.size());
    for (const auto& s : stats) {
        std::vector<double> g(s.counts.size());
        double total = 0.0;
        for (std::size_t j = 0; j < g.size(); ++j) {
            std::gamma_distribution<double> gamma(prior[j] + static_cast<double>(s.counts[j]), 1.0);
            g[j] = gamma(rng.engine());
            total += g[j];
        }
        for (double& v : g) v /= total;
        draws.push_back(std::move(g));
    }
    return draws;
}

int select_thompson_from_draws(std::span<const ActionStats> stats, const ProblemSpec& spec,
                               const DirectionGrid& grid,
                               std::span<const std::vector<double>> draws) {
    if (draws.size() != stats.size()) throw std::invalid_argument("one posterior draw per action required");
    return with_context(stats, spec, grid, [draws](const Context& ctx, int direction) {
        return choose_thompson(ctx, direction, draws);
    });
}

int select_thompson(std::span<const ActionStats> stats, const ProblemSpec& spec,
                    const DirectionGrid& grid, std::span<const double> prior, RngStream& rng) {
    const auto draws = posterior_draws(stats, prior, rng);
    return select_thompson_from_draws(stats, spec, grid, draws);
}

// -- Sequential loop ---------------------------------------------------------

Decision run_policy(const Policy& policy, std::vector<SampleSource> sources,
                    const ProblemSpec& spec, const DirectionGrid& grid, std::uint64_t seed,
                    const RunOptions& options) {
    spec.validate();
    const int k = spec.k;
    if (static_cast<int>(sources.size()) != k) {
        throw ValidationError("run_policy: expected " + std::to_string(k) + " sources, got " +
                              std::to_string(sources.size()));
    }
    for (const auto& s : sources) {
        if (s.dims() != spec.d) throw ValidationError("run_policy: source dimension differs from d");
    }
    if (grid.dims() != spec.view_dims()) throw ValidationError("run_policy: grid dimension mismatch");
    if (options.max_steps < k) throw ValidationError("run_policy: max_steps must be at least k");

    const auto prior = policy.kind == PolicyKind::thompson ? policy.prior_for(spec.d) : std::vector<double>{};
    const MarginSpec margin_spec = spec.margin_spec();
    auto streams = TrialStreams::make(seed, k);

    Decision decision;
    auto& stats = decision.per_action;
    stats.assign(static_cast<std::size_t>(k), ActionStats::empty(spec.d));
    std::vector<double> margins(static_cast<std::size_t>(k));
    std::vector<double> view(static_cast<std::size_t>(spec.view_dims()));
    ProjectionTable table(grid, spec.x_view(), k);

    auto pull = [&](int a) {
        const auto ai = static_cast<std::size_t>(a);
        stats[ai].record(sources[ai].draw(streams.actions[ai]), margin_spec);
        stats[ai].mean_view(view);
        table.set_mean(a, view);
        margins[ai] = stats[ai].margin;
        if (options.record_trajectory) decision.trajectory.push_back(a);
    };

    for (int i = 0; i < k; ++i) pull(i);
    std::int64_t t = k;

    const Context ctx{stats, spec, table, margins};
    for (;;) {
        const SeparabilityMargins sep = separability_margins(table, margins);
        const StopCheck stop = evaluate_stop(sep, spec);
        if (stop.fired) {
            decision.outcome = to_outcome(*stop.verdict);
            break;
        }
        if (t >= options.max_steps) {
            decision.outcome = Outcome::undecided;
            break;
        }
        int next = 0;
        switch (policy.kind) {
        case PolicyKind::uniform: next = choose_uniform(ctx); break;
        case PolicyKind::lucb_mean: next = choose_lucb_mean(ctx, sep.inner_direction); break;
        case PolicyKind::lucb_ratio: next = choose_lucb_ratio(ctx, sep.inner_direction); break;
        case PolicyKind::thompson: {
            const auto draws = posterior_draws(stats, prior, streams.policy);
            next = choose_thompson(ctx, sep.inner_direction, draws);
            break;
        }
        }
        pull(next);
        ++t;
    }
    decision.tau = t;
    return decision;
}

} // namespace hullfeas
