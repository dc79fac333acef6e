#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hullfeas/core.hpp"
#include "hullfeas/geometry.hpp"

namespace hullfeas {

enum class PolicyKind { uniform, lucb_mean, lucb_ratio, thompson };

std::string_view to_string(PolicyKind kind);

/// A sampling policy. Thompson sampling carries a Dirichlet prior over the d
/// groups (Beta for d = 2); an empty prior means all ones.
struct Policy {
    PolicyKind kind = PolicyKind::uniform;
    std::vector<double> prior;

    static Policy uniform() { return {PolicyKind::uniform, {}}; }
    static Policy lucb_mean() { return {PolicyKind::lucb_mean, {}}; }
    static Policy lucb_ratio() { return {PolicyKind::lucb_ratio, {}}; }
    static Policy thompson(std::vector<double> prior = {});

    /// Accepts "uniform", "lucb_mean", "lucb_ratio", "thompson" and
    /// "thompson(a0,a1,...)". Hyphens are accepted in place of underscores.
    static Policy parse(std::string_view text);

    /// Round-trips through parse().
    std::string name() const;

    /// Prior expanded to d entries.
    std::vector<double> prior_for(int d) const;

    friend bool operator==(const Policy&, const Policy&) = default;
};

/// The four policies compared in the simulation study.
std::vector<Policy> standard_policies();

struct StopCheck {
    bool fired = false;
    std::optional<Verdict> verdict;
    double inner = 0.0;
    double outer = 0.0;
};

/// Applies both stopping rules to precomputed margins. Feasible fires when
/// inner > -eps (d = 2) or inner > -lambda * eps (d >= 3); infeasible fires
/// when outer < -eps. If both hold, feasible wins.
StopCheck evaluate_stop(const SeparabilityMargins& margins, const ProblemSpec& spec);

StopCheck check_stop(std::span<const ActionStats> stats, const ProblemSpec& spec,
                     const DirectionGrid& grid);

/// d = 2: whether [p_hat - B, p_hat + B] contains x - eps or x + eps.
bool is_active(const ActionStats& stats, const ProblemSpec& spec);

// Selection rules. Each is a pure function of its arguments; every action must
// have at least one sample. All ties go to the lowest index.

/// Least-sampled action, restricted to the active set when d = 2. Throws
/// std::logic_error when no action is active (a stopping rule must have fired).
int select_uniform(std::span<const ActionStats> stats, const ProblemSpec& spec,
                   const DirectionGrid& grid);

/// argmax_i (p_hat_i - x)^T u + B_i along the direction of greatest uncertainty u.
int select_lucb_mean(std::span<const ActionStats> stats, const ProblemSpec& spec,
                     const DirectionGrid& grid);

/// argmax_i n_i^{-1/2} ((p_hat_i - x)^T u + B_i) / ((x - p_hat_i)^T u + B_i).
/// A nonpositive denominator scores +infinity; ties among those go to the
/// smaller n_i, then the lower index.
int select_lucb_ratio(std::span<const ActionStats> stats, const ProblemSpec& spec,
                      const DirectionGrid& grid);

/// One posterior draw per action from Dirichlet(prior + counts).
std::vector<std::vector<double>> posterior_draws(std::span<const ActionStats> stats,
                                                 std::span<const double> prior, RngStream& rng);

/// argmax_i (draw_i - x)^T u, with u from the confidence margins (not the draws).
/// `draws` are full simplex points, one per action.
int select_thompson_from_draws(std::span<const ActionStats> stats, const ProblemSpec& spec,
                               const DirectionGrid& grid,
                               std::span<const std::vector<double>> draws);

int select_thompson(std::span<const ActionStats> stats, const ProblemSpec& spec,
                    const DirectionGrid& grid, std::span<const double> prior, RngStream& rng);

struct RunOptions {
    std::int64_t max_steps = 10'000'000;
    bool record_trajectory = false;
};

/// Samples every action once, then alternates stop check, selection, draw and
/// update until a stopping rule fires or `max_steps` samples have been drawn.
/// Randomness comes from TrialStreams::make(seed, k).
Decision run_policy(const Policy& policy, std::vector<SampleSource> sources,
                    const ProblemSpec& spec, const DirectionGrid& grid, std::uint64_t seed,
                    const RunOptions& options = {});

} // namespace hullfeas
