#include "hullfeas/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hullfeas {

double kl_bernoulli(double p, double q) {
    if (!(p >= 0.0 && p <= 1.0) || !(q >= 0.0 && q <= 1.0)) {
        throw std::domain_error("kl_bernoulli: arguments must lie in [0, 1]");
    }
    constexpr double inf = std::numeric_limits<double>::infinity();
    double d = 0.0;
    if (p > 0.0) {
        if (q == 0.0) return inf;
        d += p * std::log(p / q);
    }
    if (p < 1.0) {
        if (q == 1.0) return inf;
        d += (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
    }
    // Rounding can leave a tiny negative value for p close to q.
    return std::max(d, 0.0);
}

// -- Direction grids ---------------------------------------------------------

DirectionGrid::DirectionGrid(int dims, std::vector<double> flat) : dims_(dims), flat_(std::move(flat)) {
    if (dims < 1 || flat_.size() % static_cast<std::size_t>(dims) != 0) {
        throw std::invalid_argument("direction grid storage does not match its dimension");
    }
}

DirectionGrid bernoulli_grid() { return DirectionGrid(1, {1.0, -1.0}); }

namespace {

double radical_inverse(std::uint64_t index, std::uint64_t base) {
    double result = 0.0;
    double f = 1.0 / static_cast<double>(base);
    while (index > 0) {
        result += f * static_cast<double>(index % base);
        index /= base;
        f /= static_cast<double>(base);
    }
    return result;
}

std::vector<std::uint64_t> first_primes(std::size_t count) {
    std::vector<std::uint64_t> primes;
    for (std::uint64_t c = 2; primes.size() < count; ++c) {
        bool prime = true;
        for (auto p : primes) {
            if (p * p > c) break;
            if (c % p == 0) {
                prime = false;
                break;
            }
        }
        if (prime) primes.push_back(c);
    }
    return primes;
}

void normalize(std::span<double> v) {
    double norm = 0.0;
    for (double c : v) norm += c * c;
    norm = std::sqrt(norm);
    for (double& c : v) c /= norm;
}

} // namespace

DirectionGrid sphere_grid(int d, int count) {
    if (d == 2) return bernoulli_grid();
    if (d < 2) throw ValidationError("sphere_grid: dimension must be at least 2");
    if (count < d + 1) {
        throw ValidationError("sphere_grid: need at least d + 1 = " + std::to_string(d + 1) +
                              " directions, got " + std::to_string(count));
    }
    const auto n = static_cast<std::size_t>(count);
    const auto dims = static_cast<std::size_t>(d);
    std::vector<double> flat(n * dims);

    if (d == 3) {
        const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (std::size_t i = 0; i < n; ++i) {
            const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double phi = golden_angle * static_cast<double>(i);
            std::span<double> u(flat.data() + i * 3, 3);
            u[0] = r * std::cos(phi);
            u[1] = r * std::sin(phi);
            u[2] = z;
            normalize(u);
        }
        return DirectionGrid(d, std::move(flat));
    }

    // Halton points pushed through Box-Muller give a low-discrepancy Gaussian
    // sample; normalizing spreads it over the sphere.
    const std::size_t pairs = (dims + 1) / 2;
    const auto primes = first_primes(2 * pairs);
    std::vector<double> gauss(2 * pairs);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t index = i + 1; // index 0 maps to the origin
        for (std::size_t p = 0; p < pairs; ++p) {
            const double u1 = radical_inverse(index, primes[2 * p]);
            const double u2 = radical_inverse(index, primes[2 * p + 1]);
            const double radius = std::sqrt(-2.0 * std::log(u1));
            gauss[2 * p] = radius * std::cos(2.0 * std::numbers::pi * u2);
            gauss[2 * p + 1] = radius * std::sin(2.0 * std::numbers::pi * u2);
        }
        std::span<double> u(flat.data() + i * dims, dims);
        std::copy_n(gauss.begin(), dims, u.begin());
        normalize(u);
    }
    return DirectionGrid(d, std::move(flat));
}

DirectionGrid grid_for(const ProblemSpec& spec, int count) {
    return spec.d == 2 ? bernoulli_grid() : sphere_grid(spec.d, count);
}

// -- Feasibility oracle ------------------------------------------------------

FeasibilityCertificate oracle_feasibility(const std::vector<std::vector<double>>& means,
                                          const ProblemSpec& spec) {
    if (means.empty()) throw ValidationError("oracle_feasibility: no means given");
    FeasibilityCertificate cert;

    if (spec.d == 2) {
        const double x = spec.x[1];
        std::size_t lo = 0;
        std::size_t hi = 0;
        for (std::size_t i = 1; i < means.size(); ++i) {
            if (means[i][1] < means[lo][1]) lo = i;
            if (means[i][1] > means[hi][1]) hi = i;
        }
        const double p_lo = means[lo][1];
        const double p_hi = means[hi][1];
        cert.weights.assign(means.size(), 0.0);
        double closest = 0.0;
        if (x < p_lo) {
            closest = p_lo;
            cert.weights[lo] = 1.0;
        } else if (x > p_hi) {
            closest = p_hi;
            cert.weights[hi] = 1.0;
        } else if (p_hi == p_lo) {
            closest = p_lo;
            cert.weights[lo] = 1.0;
        } else {
            const double t = (x - p_lo) / (p_hi - p_lo);
            cert.weights[hi] = t;
            cert.weights[lo] = 1.0 - t;
            closest = x;
        }
        cert.closest = {closest};
        cert.distance = std::abs(closest - x);
        cert.verdict = cert.distance < spec.epsilon ? Verdict::feasible : Verdict::infeasible;
        if (cert.verdict == Verdict::infeasible) cert.separator = {x > closest ? 1.0 : -1.0};
        return cert;
    }

    std::vector<std::vector<double>> points;
    points.reserve(means.size());
    for (const auto& m : means) points.push_back(view_of(m, spec.d));
    const auto x = spec.x_view();
    auto proj = project_onto_hull(points, x);
    cert.weights = std::move(proj.weights);
    cert.closest = std::move(proj.point);
    cert.distance = proj.distance;
    cert.verdict = cert.distance < spec.epsilon ? Verdict::feasible : Verdict::infeasible;
    if (cert.verdict == Verdict::infeasible) {
        // The hull lies in the half-space {v : (v - x)^T a <= -distance}, and
        // every y in the eps-ball has (y - x)^T a > -eps >= -distance.
        cert.separator.resize(x.size());
        for (std::size_t r = 0; r < x.size(); ++r) {
            cert.separator[r] = (x[r] - cert.closest[r]) / cert.distance;
        }
    }
    return cert;
}

Instance make_instance(std::vector<std::vector<double>> means, const ProblemSpec& spec) {
    spec.validate();
    if (static_cast<int>(means.size()) != spec.k) {
        throw ValidationError("instance has " + std::to_string(means.size()) +
                              " means but the problem has k = " + std::to_string(spec.k));
    }
    for (std::size_t i = 0; i < means.size(); ++i) {
        check_simplex_point(means[i], spec.d, "means[" + std::to_string(i) + "]");
    }
    Instance inst;
    inst.label = oracle_feasibility(means, spec).verdict;
    inst.means = std::move(means);
    return inst;
}

// -- Projection table --------------------------------------------------------

ProjectionTable::ProjectionTable(const DirectionGrid& grid, std::vector<double> x_view, int actions)
    : grid_(&grid),
      x_(std::move(x_view)),
      actions_(actions),
      proj_(static_cast<std::size_t>(grid.size()) * static_cast<std::size_t>(actions), 0.0),
      scratch_(x_.size()) {
    if (static_cast<int>(x_.size()) != grid.dims()) {
        throw std::invalid_argument("projection table: grid and target dimensions differ");
    }
}

void ProjectionTable::set_mean(int action, std::span<const double> mean_view) {
    const int dims = grid_->dims();
    for (int r = 0; r < dims; ++r) scratch_[static_cast<std::size_t>(r)] = mean_view[static_cast<std::size_t>(r)] - x_[static_cast<std::size_t>(r)];
    const int dirs = grid_->size();
    for (int u = 0; u < dirs; ++u) {
        const auto dir = grid_->direction(u);
        double dot = 0.0;
        for (int r = 0; r < dims; ++r) dot += dir[static_cast<std::size_t>(r)] * scratch_[static_cast<std::size_t>(r)];
        proj_[static_cast<std::size_t>(u) * actions_ + action] = dot;
    }
}

void ProjectionTable::load(std::span<const ActionStats> stats) {
    if (static_cast<int>(stats.size()) != actions_) {
        throw std::invalid_argument("projection table: wrong number of actions");
    }
    std::vector<double> view(x_.size());
    for (int i = 0; i < actions_; ++i) {
        stats[static_cast<std::size_t>(i)].mean_view(view);
        set_mean(i, view);
    }
}

MinMax ProjectionTable::min_max(std::span<const double> margins, double sign) const {
    MinMax best{0, std::numeric_limits<double>::infinity()};
    const int dirs = grid_->size();
    for (int u = 0; u < dirs; ++u) {
        const double* row = proj_.data() + static_cast<std::size_t>(u) * actions_;
        double worst = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < actions_; ++i) worst = std::max(worst, row[i] + sign * margins[static_cast<std::size_t>(i)]);
        if (worst < best.value) best = {u, worst};
    }
    return best;
}

// -- Uncertainty direction and separability ----------------------------------

namespace {

std::vector<double> margins_of(std::span<const ActionStats> stats) {
    std::vector<double> out;
    out.reserve(stats.size());
    for (const auto& s : stats) {
        if (s.n < 1) throw std::domain_error("every action needs at least one sample");
        out.push_back(s.margin);
    }
    return out;
}

} // namespace

DirectionChoice uncertainty_direction(std::span<const ActionStats> stats, const ProblemSpec& spec,
                                      const DirectionGrid& grid) {
    const auto margins = margins_of(stats);
    ProjectionTable table(grid, spec.x_view(), static_cast<int>(stats.size()));
    table.load(stats);
    const MinMax mm = table.min_max(margins, -1.0);
    const auto dir = grid.direction(mm.direction);
    return {mm.direction, {dir.begin(), dir.end()}, mm.value};
}

SeparabilityMargins separability_margins(const ProjectionTable& table, std::span<const double> margins) {
    const MinMax inner = table.min_max(margins, -1.0);
    const MinMax outer = table.min_max(margins, +1.0);
    return {inner.value, outer.value, inner.direction, outer.direction};
}

SeparabilityMargins separability_margins(std::span<const ActionStats> stats, const ProblemSpec& spec,
                                         const DirectionGrid& grid) {
    const auto margins = margins_of(stats);
    ProjectionTable table(grid, spec.x_view(), static_cast<int>(stats.size()));
    table.load(stats);
    return separability_margins(table, margins);
}

} // namespace hullfeas
