#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "hullfeas/confidence.hpp"
#include "hullfeas/core.hpp"

// Sample-complexity quantities for the two-group (d = 2) problem. Every entry
// point rejects d >= 3.

namespace hullfeas {

/// Sample count standing for "never": the threshold of a zero gap.
inline constexpr std::int64_t kUnboundedSamples = std::numeric_limits<std::int64_t>::max();

/// Smallest s >= 1 with gap > 2 B(s, delta). Throws std::domain_error for
/// gap <= 0; returns kUnboundedSamples if s would exceed 2^62.
std::int64_t solve_s(double gap, const MarginSpec& spec);

/// Like solve_s, but a nonpositive gap maps to kUnboundedSamples.
std::int64_t threshold_or_unbounded(double gap, const MarginSpec& spec);

struct GapReport {
    std::vector<double> delta_max; ///< distance from p_i to the far boundary of the eps-ball
    std::vector<double> delta_min; ///< distance from p_i to the near boundary
    std::vector<std::vector<double>> delta_pair; ///< |p_i - p_j|
    std::vector<std::int64_t> s_max;
    std::vector<std::int64_t> s_min;
    std::vector<std::vector<std::int64_t>> s_pair;
};

GapReport gaps(const Instance& instance, const ProblemSpec& spec);

/// Optimal feasible subset: one mean inside the eps-ball, or the pair
/// {argmax p, argmin p} straddling it.
struct OptimalSubset {
    enum class Kind { singleton, pair };
    Kind kind = Kind::singleton;
    std::vector<int> indices; ///< {l*} or {argmax p, argmin p}
    double score = 0.0;       ///< KL distance to the nearest infeasible alternative
};

/// Candidates are each p_i with |p_i - x| < eps, scored by
/// min(D(p_i || x - eps), D(p_i || x + eps)), and, when max p >= x + eps and
/// min p <= x - eps, the extreme pair scored by
/// min(D(p_max || x - eps), D(p_min || x + eps)). Highest score wins; ties
/// prefer singletons, then lower indices. Throws ValidationError for
/// infeasible instances.
OptimalSubset optimal_subset(const Instance& instance, const ProblemSpec& spec);

/// Oracle lower bound on E[tau] for a feasible instance. May be +infinity.
double lower_bound_feasible(const Instance& instance, const ProblemSpec& spec);

/// Lower bound on E[tau] for an infeasible instance. May be +infinity.
double lower_bound_infeasible(const Instance& instance, const ProblemSpec& spec);

// High-probability upper bounds, evaluated as the bare sums (hidden constants
// taken as 1). kUnboundedSamples when a term is unbounded.
std::int64_t upper_bound_uniform(const Instance& instance, const ProblemSpec& spec);
std::int64_t upper_bound_lucb_mean(const Instance& instance, const ProblemSpec& spec);

} // namespace hullfeas
