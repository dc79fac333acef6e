#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "hullfeas/geometry.hpp"
#include "test_support.hpp"

using namespace hullfeas;
using hullfeas::testing::ball;
using hullfeas::testing::bern;
using hullfeas::testing::interval;

namespace {

const auto kBern = ProblemSpec::bernoulli(2, 0.5, 0.1, 0.01);

std::vector<double> random_simplex(std::mt19937_64& rng, int d) {
    std::exponential_distribution<double> e(1.0);
    std::vector<double> w(static_cast<std::size_t>(d));
    double s = 0.0;
    for (auto& v : w) s += (v = e(rng));
    for (auto& v : w) v /= s;
    return w;
}

double norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double c : v) s += c * c;
    return std::sqrt(s);
}

} // namespace

TEST_CASE("bernoulli KL values") {
    CHECK(kl_bernoulli(0.5, 0.5) == 0.0);
    CHECK(kl_bernoulli(0.3, 0.5) == doctest::Approx(0.0822828785).epsilon(1e-9));
    CHECK(kl_bernoulli(0.7, 0.4) == doctest::Approx(0.1837868974).epsilon(1e-9));
    CHECK(kl_bernoulli(0.3, 0.6) == doctest::Approx(0.1837868974).epsilon(1e-9));
    CHECK(kl_bernoulli(0.5, 0.4) == doctest::Approx(0.0204109973).epsilon(1e-9));
    CHECK(kl_bernoulli(0.1, 0.4) == doctest::Approx(0.2262891612).epsilon(1e-9));
    CHECK(kl_bernoulli(0.1, 0.6) == doctest::Approx(0.5506612477).epsilon(1e-9));
    CHECK(std::isinf(kl_bernoulli(0.3, 0.0)));
    CHECK(std::isinf(kl_bernoulli(0.3, 1.0)));
    CHECK(kl_bernoulli(0.0, 0.0) == 0.0);
    CHECK(kl_bernoulli(0.0, 0.5) == doctest::Approx(std::log(2.0)));
    CHECK_THROWS_AS(kl_bernoulli(1.2, 0.5), std::domain_error);
}

TEST_CASE("KL is nonnegative and symmetric under relabeling") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.001, 0.999);
    for (int i = 0; i < 1000; ++i) {
        const double p = u(rng), q = u(rng);
        CHECK(kl_bernoulli(p, q) >= 0.0);
        CHECK(kl_bernoulli(p, q) == doctest::Approx(kl_bernoulli(1 - p, 1 - q)).epsilon(1e-9));
    }
}

TEST_CASE("d = 2 oracle examples") {
    const auto c = oracle_feasibility({bern(0.3), bern(0.7)}, kBern);
    CHECK(c.verdict == Verdict::feasible);
    CHECK(c.weights[0] == doctest::Approx(0.5));
    CHECK(c.weights[1] == doctest::Approx(0.5));
    CHECK(c.closest[0] == doctest::Approx(0.5));

    const auto inf = oracle_feasibility({bern(0.1), bern(0.2)}, kBern);
    CHECK(inf.verdict == Verdict::infeasible);
    CHECK(inf.distance == doctest::Approx(0.3));
    CHECK(inf.separator == std::vector<double>{1.0});

    CHECK_THROWS_AS(oracle_feasibility({}, kBern), ValidationError);
}

TEST_CASE("hull distance exactly eps is infeasible") {
    const auto spec = ProblemSpec::bernoulli(1, 0.5, 0.25, 0.01);
    CHECK(oracle_feasibility({bern(0.25)}, spec).verdict == Verdict::infeasible);
    CHECK(oracle_feasibility({bern(0.2500001)}, spec).verdict == Verdict::feasible);
}

TEST_CASE("d = 3 oracle example") {
    const auto spec = ProblemSpec::multinomial(3, {1.0 / 3, 1.0 / 3, 1.0 / 3}, 0.1, 0.01, 0.99);
    const auto c = oracle_feasibility({{.2, .1, .7}, {.7, .2, .1}, {.1, .7, .2}}, spec);
    CHECK(c.verdict == Verdict::feasible);
    CHECK(c.distance < 1e-9);
    for (double w : c.weights) CHECK(w == doctest::Approx(1.0 / 3).epsilon(1e-6));
}

TEST_CASE("d = 2 oracle matches a grid of convex combinations") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int checked = 0;
    while (checked < 1000) {
        const int k = 1 + static_cast<int>(rng() % 6);
        const double x = u(rng);
        const double eps = 0.01 + 0.3 * u(rng);
        std::vector<std::vector<double>> means;
        double lo = 1.0, hi = 0.0;
        for (int i = 0; i < k; ++i) {
            const double p = u(rng);
            lo = std::min(lo, p);
            hi = std::max(hi, p);
            means.push_back(bern(p));
        }
        const double dist = x < lo ? lo - x : (x > hi ? x - hi : 0.0);
        if (std::abs(dist - eps) < 1e-3) continue;
        const auto spec = ProblemSpec::bernoulli(k, x, eps, 0.01);
        bool brute = false;
        for (int s = 0; s <= 10000 && !brute; ++s) {
            const double t = s * 1e-4;
            brute = std::abs(t * hi + (1 - t) * lo - x) < eps;
        }
        CHECK((oracle_feasibility(means, spec).verdict == Verdict::feasible) == brute);
        ++checked;
    }
}

TEST_CASE("d = 3 certificates") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        const int k = 1 + static_cast<int>(rng() % 5);
        std::vector<std::vector<double>> means;
        for (int i = 0; i < k; ++i) means.push_back(random_simplex(rng, 3));
        const auto x = random_simplex(rng, 3);
        const double eps = 0.02 + 0.2 * u(rng);
        const auto spec = ProblemSpec::multinomial(k, x, eps, 0.01, 0.99);
        const auto c = oracle_feasibility(means, spec);

        double wsum = 0.0;
        std::vector<double> combo(3, 0.0);
        for (int i = 0; i < k; ++i) {
            const double w = c.weights[static_cast<std::size_t>(i)];
            CHECK(w >= -1e-12);
            wsum += w;
            for (int j = 0; j < 3; ++j) combo[static_cast<std::size_t>(j)] += w * means[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
        CHECK(wsum == doctest::Approx(1.0).epsilon(1e-9));
        std::vector<double> diff(3);
        for (int j = 0; j < 3; ++j) diff[static_cast<std::size_t>(j)] = combo[static_cast<std::size_t>(j)] - x[static_cast<std::size_t>(j)];
        CHECK(norm(diff) == doctest::Approx(c.distance).epsilon(1e-9));

        if (c.verdict == Verdict::feasible) {
            CHECK(c.distance < eps + 1e-9);
        } else {
            CHECK(norm(c.separator) == doctest::Approx(1.0));
            // (mu_i - y)^T a < 0 for y sampled over the sphere of radius eps around x.
            for (int s = 0; s < 200; ++s) {
                std::normal_distribution<double> g;
                std::vector<double> v{g(rng), g(rng), g(rng)};
                const double nv = norm(v);
                for (auto& c2 : v) c2 *= eps / nv;
                for (const auto& m : means) {
                    double dot = 0.0;
                    for (std::size_t j = 0; j < 3; ++j) dot += (m[j] - x[j] - v[j]) * c.separator[j];
                    CHECK(dot < 0.0);
                }
            }
        }
    }
}

TEST_CASE("hull projection matches brute force on small hulls") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 100; ++trial) {
        const int k = 2 + static_cast<int>(rng() % 3);
        std::vector<std::vector<double>> pts;
        for (int i = 0; i < k; ++i) pts.push_back(random_simplex(rng, 3));
        const auto x = random_simplex(rng, 3);
        const auto proj = project_onto_hull(pts, x);
        double best = std::numeric_limits<double>::infinity();
        for (int s = 0; s < 20000; ++s) {
            const auto w = random_simplex(rng, k);
            std::vector<double> y(3, 0.0);
            for (int i = 0; i < k; ++i)
                for (std::size_t j = 0; j < 3; ++j) y[j] += w[static_cast<std::size_t>(i)] * pts[static_cast<std::size_t>(i)][j];
            for (std::size_t j = 0; j < 3; ++j) y[j] -= x[j];
            best = std::min(best, norm(y));
        }
        CHECK(proj.distance <= best + 1e-12);
        // Optimality: no hull vertex lies strictly on x's side of the
        // supporting plane through the returned point.
        std::vector<double> normal(3);
        for (std::size_t j = 0; j < 3; ++j) normal[j] = proj.point[j] - x[j];
        for (const auto& p : pts) {
            double dot = 0.0;
            for (std::size_t j = 0; j < 3; ++j) dot += (p[j] - proj.point[j]) * normal[j];
            CHECK(dot >= -1e-10);
        }
        double wsum = 0.0;
        for (double w : proj.weights) {
            CHECK(w >= 0.0);
            wsum += w;
        }
        CHECK(wsum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("direction grids") {
    const auto b = sphere_grid(2, 17);
    REQUIRE(b.size() == 2);
    CHECK(b.direction(0)[0] == 1.0);
    CHECK(b.direction(1)[0] == -1.0);

    for (int d : {3, 4, 5}) {
        const auto g = sphere_grid(d, 300);
        REQUIRE(g.size() == 300);
        REQUIRE(g.dims() == d);
        double min_gap = std::numeric_limits<double>::infinity();
        for (int i = 0; i < g.size(); ++i) {
            double n2 = 0.0;
            for (double c : g.direction(i)) n2 += c * c;
            CHECK(std::abs(std::sqrt(n2) - 1.0) <= 1e-12);
            for (int j = i + 1; j < g.size(); ++j) {
                double dist2 = 0.0;
                for (int r = 0; r < d; ++r) {
                    const double t = g.direction(i)[static_cast<std::size_t>(r)] - g.direction(j)[static_cast<std::size_t>(r)];
                    dist2 += t * t;
                }
                min_gap = std::min(min_gap, dist2);
            }
        }
        CHECK(min_gap > 0.0);
    }
    const auto a = sphere_grid(3, 50), c = sphere_grid(3, 50);
    for (int i = 0; i < 50; ++i) CHECK(a.direction(i)[2] == c.direction(i)[2]);
    CHECK_THROWS_AS(sphere_grid(3, 3), ValidationError);
}

TEST_CASE("uncertainty direction examples") {
    const auto grid = bernoulli_grid();
    {
        const std::vector<ActionStats> s{interval(.48, .9), interval(.49, .8)};
        const auto u = uncertainty_direction(s, kBern, grid);
        CHECK(u.direction == std::vector<double>{-1.0});
    }
    {
        const std::vector<ActionStats> s{interval(.25, .5), interval(.5, .75)};
        const auto u = uncertainty_direction(s, kBern, grid);
        CHECK(u.index == 0);
        CHECK(u.direction == std::vector<double>{1.0});
    }
    {
        const std::vector<ActionStats> s{interval(.6, .8)};
        const auto u = uncertainty_direction(s, kBern, grid);
        CHECK(u.direction == std::vector<double>{-1.0});
        CHECK(u.value == doctest::Approx(-0.3));
    }
}

TEST_CASE("separability margins example") {
    const std::vector<ActionStats> s{interval(.3, .4), interval(.6, .7)};
    const auto m = separability_margins(s, kBern, bernoulli_grid());
    CHECK(m.inner == doctest::Approx(0.10));
    CHECK(m.outer == doctest::Approx(0.20));

    const std::vector<ActionStats> above{interval(.75, .85), interval(.72, .8)};
    const auto a = separability_margins(above, kBern, bernoulli_grid());
    CHECK(a.inner < 0.0);
    CHECK(a.outer < -0.1);
    CHECK(a.outer_direction == 1);
}

TEST_CASE("inner never exceeds outer, and the grid value is a min") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto spec3 = ProblemSpec::multinomial(4, {0.2, 0.3, 0.5}, 0.1, 0.01, 0.99);
    const auto grid3 = sphere_grid(3, 60);
    for (int t = 0; t < 1000; ++t) {
        std::vector<ActionStats> s2, s3;
        for (int i = 0; i < 4; ++i) {
            const double lo = u(rng);
            s2.push_back(interval(lo, std::min(1.0, lo + 0.3 * u(rng))));
            s3.push_back(ball(random_simplex(rng, 3), 0.2 * u(rng)));
        }
        const auto m2 = separability_margins(s2, kBern, bernoulli_grid());
        CHECK(m2.inner <= m2.outer);
        const auto m3 = separability_margins(s3, spec3, grid3);
        CHECK(m3.inner <= m3.outer);

        if (t % 50 == 0) {
            const auto choice = uncertainty_direction(s3, spec3, grid3);
            const auto x = spec3.x_view();
            for (int g = 0; g < grid3.size(); ++g) {
                double worst = -std::numeric_limits<double>::infinity();
                for (const auto& st : s3) {
                    const auto mv = st.mean_view();
                    double dot = 0.0;
                    for (std::size_t r = 0; r < 3; ++r) dot += (mv[r] - x[r]) * grid3.direction(g)[r];
                    worst = std::max(worst, dot - st.margin);
                }
                CHECK(choice.value <= worst + 1e-12);
            }
        }
    }
}

TEST_CASE("make_instance validates and labels") {
    const auto spec = ProblemSpec::bernoulli(2, 0.5, 0.1, 0.01);
    CHECK(make_instance({bern(.3), bern(.7)}, spec).label == Verdict::feasible);
    CHECK(make_instance({bern(.1), bern(.2)}, spec).label == Verdict::infeasible);
    CHECK_THROWS_AS(make_instance({bern(.3)}, spec), ValidationError);
    CHECK_THROWS_AS(make_instance({{0.5, 0.6}, bern(.3)}, spec), ValidationError);
}
