#include "hullfeas/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hullfeas/geometry.hpp"

namespace hullfeas {

namespace {

constexpr std::int64_t kSearchCeiling = std::int64_t{1} << 62;
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_bernoulli(const ProblemSpec& spec, const char* what) {
    if (spec.d != 2) {
        throw ValidationError(std::string(what) + ": only defined for d = 2 (got d = " +
                              std::to_string(spec.d) + ")");
    }
}

std::vector<double> success_probabilities(const Instance& instance) {
    std::vector<double> p;
    p.reserve(instance.means.size());
    for (const auto& m : instance.means) p.push_back(m[1]);
    return p;
}

// D(p || boundary); a boundary outside [0, 1] cannot be reached by any
// Bernoulli mean, so it is infinitely far away.
double boundary_kl(double p, double boundary) {
    if (boundary < 0.0 || boundary > 1.0) return kInf;
    return kl_bernoulli(p, boundary);
}

double lower_bound_scale(double delta) { return 0.5 * std::log(1.0 / (4.0 * delta)); }

double scaled(double inverse_divergence_sum, double delta) {
    const double scale = lower_bound_scale(delta);
    if (scale <= 0.0) return 0.0;
    return inverse_divergence_sum * scale;
}

std::int64_t saturating_add(std::int64_t a, std::int64_t b) {
    if (a == kUnboundedSamples || b == kUnboundedSamples) return kUnboundedSamples;
    if (a > kUnboundedSamples - b) return kUnboundedSamples;
    return a + b;
}

// Indices of the largest and smallest success probability, lowest index first on ties.
std::pair<int, int> extremes(const std::vector<double>& p) {
    int hi = 0;
    int lo = 0;
    for (int i = 1; i < static_cast<int>(p.size()); ++i) {
        if (p[static_cast<std::size_t>(i)] > p[static_cast<std::size_t>(hi)]) hi = i;
        if (p[static_cast<std::size_t>(i)] < p[static_cast<std::size_t>(lo)]) lo = i;
    }
    return {hi, lo};
}

// j* = argmax over the extreme pair of s_max, i* = the other one. The
// largest mean comes first, so it wins ties.
std::pair<int, int> extreme_thresholds(const std::vector<double>& p, const GapReport& g) {
    const auto [hi, lo] = extremes(p);
    if (g.s_max[static_cast<std::size_t>(lo)] > g.s_max[static_cast<std::size_t>(hi)]) return {lo, hi};
    return {hi, lo};
}

} // namespace

std::int64_t solve_s(double gap, const MarginSpec& spec) {
    if (!(gap > 0.0)) throw std::domain_error("solve_s: gap must be positive");
    auto satisfied = [&](std::int64_t s) { return gap > 2.0 * margin(s, spec); };
    if (satisfied(1)) return 1;
    std::int64_t hi = 2;
    while (!satisfied(hi)) {
        if (hi >= kSearchCeiling) return kUnboundedSamples;
        hi *= 2;
    }
    std::int64_t lo = hi / 2; // not satisfied
    while (hi - lo > 1) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (satisfied(mid)) hi = mid;
        else lo = mid;
    }
    return hi;
}

std::int64_t threshold_or_unbounded(double gap, const MarginSpec& spec) {
    return gap > 0.0 ? solve_s(gap, spec) : kUnboundedSamples;
}

GapReport gaps(const Instance& instance, const ProblemSpec& spec) {
    require_bernoulli(spec, "gaps");
    const auto p = success_probabilities(instance);
    const double x = spec.x[1];
    const double left = x - spec.epsilon;
    const double right = x + spec.epsilon;
    const MarginSpec ms = spec.margin_spec();
    const std::size_t k = p.size();

    GapReport g;
    g.delta_max.resize(k);
    g.delta_min.resize(k);
    g.s_max.resize(k);
    g.s_min.resize(k);
    g.delta_pair.assign(k, std::vector<double>(k, 0.0));
    g.s_pair.assign(k, std::vector<std::int64_t>(k, kUnboundedSamples));
    for (std::size_t i = 0; i < k; ++i) {
        const double a = std::abs(p[i] - left);
        const double b = std::abs(p[i] - right);
        g.delta_max[i] = std::max(a, b);
        g.delta_min[i] = std::min(a, b);
        g.s_max[i] = threshold_or_unbounded(g.delta_max[i], ms);
        g.s_min[i] = threshold_or_unbounded(g.delta_min[i], ms);
    }
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            const double dij = std::abs(p[i] - p[j]);
            const auto sij = threshold_or_unbounded(dij, ms);
            g.delta_pair[i][j] = g.delta_pair[j][i] = dij;
            g.s_pair[i][j] = g.s_pair[j][i] = sij;
        }
    }
    return g;
}

OptimalSubset optimal_subset(const Instance& instance, const ProblemSpec& spec) {
    require_bernoulli(spec, "optimal_subset");
    if (instance.label != Verdict::feasible) {
        throw ValidationError("optimal_subset: the instance is infeasible");
    }
    const auto p = success_probabilities(instance);
    const double x = spec.x[1];
    const double left = x - spec.epsilon;
    const double right = x + spec.epsilon;

    OptimalSubset best;
    bool found = false;
    for (int i = 0; i < static_cast<int>(p.size()); ++i) {
        const double pi = p[static_cast<std::size_t>(i)];
        if (!(std::abs(pi - x) < spec.epsilon)) continue;
        const double score = std::min(boundary_kl(pi, left), boundary_kl(pi, right));
        if (!found || score > best.score) {
            best = {OptimalSubset::Kind::singleton, {i}, score};
            found = true;
        }
    }
    const auto [hi, lo] = extremes(p);
    const double p_hi = p[static_cast<std::size_t>(hi)];
    const double p_lo = p[static_cast<std::size_t>(lo)];
    if (hi != lo && p_hi >= right && p_lo <= left) {
        const double score = std::min(boundary_kl(p_hi, left), boundary_kl(p_lo, right));
        if (!found || score > best.score) {
            best = {OptimalSubset::Kind::pair, {hi, lo}, score};
            found = true;
        }
    }
    if (!found) throw ValidationError("optimal_subset: no feasible subset found");
    return best;
}

double lower_bound_feasible(const Instance& instance, const ProblemSpec& spec) {
    require_bernoulli(spec, "lower_bound_feasible");
    const OptimalSubset j = optimal_subset(instance, spec);
    const double x = spec.x[1];
    const double left = x - spec.epsilon;
    const double right = x + spec.epsilon;
    const auto p = success_probabilities(instance);
    double inverse = 0.0;
    if (j.kind == OptimalSubset::Kind::singleton) {
        const double pl = p[static_cast<std::size_t>(j.indices[0])];
        inverse = std::max(1.0 / boundary_kl(pl, left), 1.0 / boundary_kl(pl, right));
    } else {
        inverse = 1.0 / boundary_kl(p[static_cast<std::size_t>(j.indices[0])], left) +
                  1.0 / boundary_kl(p[static_cast<std::size_t>(j.indices[1])], right);
    }
    return scaled(inverse, spec.delta);
}

double lower_bound_infeasible(const Instance& instance, const ProblemSpec& spec) {
    require_bernoulli(spec, "lower_bound_infeasible");
    if (instance.label != Verdict::infeasible) {
        throw ValidationError("lower_bound_infeasible: the instance is feasible");
    }
    const double x = spec.x[1];
    double inverse = 0.0;
    for (double pi : success_probabilities(instance)) {
        inverse += std::max(1.0 / boundary_kl(pi, x - spec.epsilon),
                            1.0 / boundary_kl(pi, x + spec.epsilon));
    }
    return scaled(inverse, spec.delta);
}

std::int64_t upper_bound_uniform(const Instance& instance, const ProblemSpec& spec) {
    require_bernoulli(spec, "upper_bound_uniform");
    const GapReport g = gaps(instance, spec);
    const std::size_t k = g.s_min.size();
    std::int64_t total = 0;
    if (instance.label == Verdict::infeasible) {
        for (std::size_t i = 0; i < k; ++i) total = saturating_add(total, g.s_min[i]);
        return total;
    }
    const OptimalSubset j = optimal_subset(instance, spec);
    std::int64_t cap = 0;
    if (j.kind == OptimalSubset::Kind::pair) {
        cap = g.s_max[static_cast<std::size_t>(extreme_thresholds(success_probabilities(instance), g).first)];
    } else {
        cap = g.s_min[static_cast<std::size_t>(j.indices[0])];
    }
    for (std::size_t i = 0; i < k; ++i) total = saturating_add(total, std::min(cap, g.s_min[i]));
    return total;
}

std::int64_t upper_bound_lucb_mean(const Instance& instance, const ProblemSpec& spec) {
    require_bernoulli(spec, "upper_bound_lucb_mean");
    const GapReport g = gaps(instance, spec);
    const std::size_t k = g.s_min.size();
    std::int64_t total = 0;
    if (instance.label == Verdict::infeasible) {
        for (std::size_t i = 0; i < k; ++i) total = saturating_add(total, g.s_min[i]);
        return total;
    }
    const auto p = success_probabilities(instance);
    const double x = spec.x[1];
    const bool below = std::any_of(p.begin(), p.end(), [x](double v) { return v < x; });
    const bool above = std::any_of(p.begin(), p.end(), [x](double v) { return v > x; });
    const auto [js, is] = extreme_thresholds(p, g);
    const auto j = static_cast<std::size_t>(js);
    const auto ii = static_cast<std::size_t>(is);

    for (std::size_t i = 0; i < k; ++i) {
        std::int64_t term = 0;
        if (below && above) {
            if (g.delta_pair[i][j] <= g.delta_max[j]) term = g.s_max[j];
            else term = std::max(g.s_pair[i][j], g.s_max[ii]);
        } else {
            term = std::min(g.s_pair[i][j], g.s_min[j]);
        }
        total = saturating_add(total, term);
    }
    return total;
}

} // namespace hullfeas
