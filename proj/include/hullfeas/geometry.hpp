#pragma once

#include <span>
#include <vector>

#include "hullfeas/core.hpp"

namespace hullfeas {

/// KL divergence D(p || q) between Bernoulli distributions, in nats.
/// Returns +infinity when q is 0 or 1 and p differs from q.
/// Throws std::domain_error when p or q lies outside [0, 1].
double kl_bernoulli(double p, double q);

/// A finite set of unit directions in the geometry's working space.
class DirectionGrid {
public:
    DirectionGrid() = default;
    DirectionGrid(int dims, std::vector<double> flat);

    int dims() const noexcept { return dims_; }
    int size() const noexcept { return dims_ == 0 ? 0 : static_cast<int>(flat_.size()) / dims_; }
    std::span<const double> direction(int index) const {
        return {flat_.data() + static_cast<std::size_t>(index) * dims_, static_cast<std::size_t>(dims_)};
    }

private:
    int dims_ = 0;
    std::vector<double> flat_;
};

/// {+1, -1} on the line, in that order.
DirectionGrid bernoulli_grid();

/// `count` roughly uniform unit vectors in R^d: a Fibonacci lattice for d = 3,
/// normalized Gaussianized Halton points for d > 3. Deterministic.
/// For d = 2 the count is ignored and the Bernoulli grid is returned.
DirectionGrid sphere_grid(int d, int count);

/// Grid matching a problem: the Bernoulli grid for d = 2, otherwise a sphere
/// grid with `count` points.
DirectionGrid grid_for(const ProblemSpec& spec, int count);

/// Nearest point of a convex hull to a target.
struct HullProjection {
    std::vector<double> weights; ///< convex weights over the input points
    std::vector<double> point;   ///< sum_i weights[i] * points[i]
    double distance = 0.0;       ///< ||point - target||
};

/// Minimizes ||sum_i w_i p_i - target|| over the probability simplex with
/// Wolfe's minimum-norm-point method. Converges to ~1e-12 in distance.
HullProjection project_onto_hull(const std::vector<std::vector<double>>& points,
                                 std::span<const double> target);

/// Ground-truth answer plus its evidence. All points are in the working space
/// (scalars for d = 2).
struct FeasibilityCertificate {
    Verdict verdict = Verdict::infeasible;
    double distance = 0.0;        ///< distance from x to the hull of the means
    std::vector<double> weights;  ///< convex weights of `closest`
    std::vector<double> closest;  ///< nearest hull point; lies in the eps-ball when feasible
    std::vector<double> separator; ///< unit normal a with (mu_i - y)^T a < 0, infeasible only
};

/// Exact feasibility of the eps-ball around x with respect to the hull of
/// `means`. Hull distance exactly eps counts as infeasible.
FeasibilityCertificate oracle_feasibility(const std::vector<std::vector<double>>& means,
                                          const ProblemSpec& spec);

/// Validates `means` against `spec` and labels them with the oracle.
Instance make_instance(std::vector<std::vector<double>> means, const ProblemSpec& spec);

struct MinMax {
    int direction = 0; ///< grid index attaining the min (lowest index on ties)
    double value = 0.0;
};

/// Cached projections (mean_hat_i - x)^T u for every grid direction u and
/// action i. Updating one action touches one column.
class ProjectionTable {
public:
    ProjectionTable(const DirectionGrid& grid, std::vector<double> x_view, int actions);

    void set_mean(int action, std::span<const double> mean_view);
    void load(std::span<const ActionStats> stats);

    double projection(int direction, int action) const {
        return proj_[static_cast<std::size_t>(direction) * actions_ + action];
    }

    /// min over directions of max over actions of projection + sign * margins[i].
    MinMax min_max(std::span<const double> margins, double sign) const;

    const DirectionGrid& grid() const noexcept { return *grid_; }
    int actions() const noexcept { return actions_; }

private:
    const DirectionGrid* grid_;
    std::vector<double> x_;
    int actions_;
    std::vector<double> proj_;
    std::vector<double> scratch_;
};

struct DirectionChoice {
    int index = 0;
    std::vector<double> direction;
    double value = 0.0;
};

/// Direction of greatest uncertainty: argmin over u in the grid of
/// max_i (mean_hat_i - x)^T u - B_i. Requires n >= 1 for every action.
DirectionChoice uncertainty_direction(std::span<const ActionStats> stats, const ProblemSpec& spec,
                                      const DirectionGrid& grid);

struct SeparabilityMargins {
    double inner = 0.0; ///< min_u max_i (mean_hat_i - x)^T u - B_i
    double outer = 0.0; ///< min_u max_i (mean_hat_i - x)^T u + B_i
    int inner_direction = 0;
    int outer_direction = 0;
};

SeparabilityMargins separability_margins(std::span<const ActionStats> stats,
                                         const ProblemSpec& spec, const DirectionGrid& grid);

/// Same evaluation against an already populated table.
SeparabilityMargins separability_margins(const ProjectionTable& table,
                                         std::span<const double> margins);

} // namespace hullfeas
