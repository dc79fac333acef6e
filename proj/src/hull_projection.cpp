// Wolfe's minimum-norm-point algorithm for the distance from a point to the
// convex hull of finitely many points.

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "hullfeas/geometry.hpp"

namespace hullfeas {

namespace {

constexpr int kMaxMajorIterations = 1000;
constexpr double kWeightFloor = 1e-15;

// Minimizes ||sum_s a_s P_s|| subject to sum_s a_s = 1 over the columns of P.
Eigen::VectorXd affine_minimizer(const Eigen::MatrixXd& P) {
    const Eigen::Index m = P.cols();
    Eigen::VectorXd a(m);
    if (m == 1) {
        a(0) = 1.0;
        return a;
    }
    // Write the point as P_0 + sum_{s>0} b_s (P_s - P_0) and solve the least
    // squares problem for b.
    Eigen::MatrixXd A = P.rightCols(m - 1).colwise() - P.col(0);
    Eigen::VectorXd b = A.completeOrthogonalDecomposition().solve(-P.col(0));
    a(0) = 1.0 - b.sum();
    a.tail(m - 1) = b;
    return a;
}

} // namespace

HullProjection project_onto_hull(const std::vector<std::vector<double>>& points,
                                 std::span<const double> target) {
    if (points.empty()) throw std::invalid_argument("convex hull of an empty point set");
    const auto dim = static_cast<Eigen::Index>(target.size());
    const auto count = static_cast<Eigen::Index>(points.size());

    Eigen::MatrixXd Q(dim, count); // shifted so the target is the origin
    for (Eigen::Index j = 0; j < count; ++j) {
        const auto& p = points[static_cast<std::size_t>(j)];
        if (static_cast<Eigen::Index>(p.size()) != dim) {
            throw std::invalid_argument("hull points and target differ in dimension");
        }
        for (Eigen::Index r = 0; r < dim; ++r) Q(r, j) = p[static_cast<std::size_t>(r)] - target[static_cast<std::size_t>(r)];
    }

    const double scale = std::max(1.0, Q.colwise().squaredNorm().maxCoeff());
    const double tol = 1e-14 * scale;

    Eigen::Index start = 0;
    Q.colwise().squaredNorm().minCoeff(&start);
    std::vector<Eigen::Index> active{start};
    std::vector<double> w{1.0};
    Eigen::VectorXd y = Q.col(start);

    auto active_matrix = [&] {
        Eigen::MatrixXd P(dim, static_cast<Eigen::Index>(active.size()));
        for (std::size_t s = 0; s < active.size(); ++s) P.col(static_cast<Eigen::Index>(s)) = Q.col(active[s]);
        return P;
    };

    for (int major = 0; major < kMaxMajorIterations; ++major) {
        Eigen::Index j = 0;
        const double best = (y.transpose() * Q).minCoeff(&j);
        if (y.squaredNorm() - best <= tol) break;
        if (std::find(active.begin(), active.end(), j) != active.end()) break;
        active.push_back(j);
        w.push_back(0.0);

        for (;;) {
            const Eigen::VectorXd alpha = affine_minimizer(active_matrix());
            if (alpha.minCoeff() > kWeightFloor) {
                for (std::size_t s = 0; s < w.size(); ++s) w[s] = alpha(static_cast<Eigen::Index>(s));
                break;
            }
            double theta = 1.0;
            std::size_t leaving = 0;
            for (std::size_t s = 0; s < w.size(); ++s) {
                const double a = alpha(static_cast<Eigen::Index>(s));
                if (a <= kWeightFloor) {
                    const double t = w[s] / (w[s] - a);
                    if (t < theta) {
                        theta = t;
                        leaving = s;
                    }
                }
            }
            for (std::size_t s = 0; s < w.size(); ++s) {
                w[s] = theta * alpha(static_cast<Eigen::Index>(s)) + (1.0 - theta) * w[s];
            }
            w[leaving] = 0.0;
            std::vector<Eigen::Index> kept_idx;
            std::vector<double> kept_w;
            for (std::size_t s = 0; s < w.size(); ++s) {
                if (w[s] > kWeightFloor) {
                    kept_idx.push_back(active[s]);
                    kept_w.push_back(w[s]);
                }
            }
            active = std::move(kept_idx);
            w = std::move(kept_w);
            if (active.size() <= 1) {
                w.assign(active.size(), 1.0);
                break;
            }
        }

        y.setZero();
        for (std::size_t s = 0; s < active.size(); ++s) y += w[s] * Q.col(active[s]);
    }

    HullProjection out;
    out.weights.assign(points.size(), 0.0);
    double total = 0.0;
    for (double v : w) total += v;
    for (std::size_t s = 0; s < active.size(); ++s) {
        out.weights[static_cast<std::size_t>(active[s])] = w[s] / total;
    }
    Eigen::VectorXd shifted = Eigen::VectorXd::Zero(dim);
    for (std::size_t j = 0; j < points.size(); ++j) {
        if (out.weights[j] != 0.0) shifted += out.weights[j] * Q.col(static_cast<Eigen::Index>(j));
    }
    out.point.resize(target.size());
    for (Eigen::Index r = 0; r < dim; ++r) {
        out.point[static_cast<std::size_t>(r)] = target[static_cast<std::size_t>(r)] + shifted(r);
    }
    out.distance = shifted.norm();
    return out;
}

} // namespace hullfeas
