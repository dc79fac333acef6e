#include "hullfeas/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>

namespace hullfeas {

std::string_view to_string(Verdict v) {
    return v == Verdict::feasible ? "feasible" : "infeasible";
}

std::string_view to_string(Outcome o) {
    switch (o) {
    case Outcome::feasible: return "feasible";
    case Outcome::infeasible: return "infeasible";
    case Outcome::undecided: return "undecided";
    }
    return "undecided";
}

Outcome to_outcome(Verdict v) {
    return v == Verdict::feasible ? Outcome::feasible : Outcome::infeasible;
}

ProblemSpec ProblemSpec::bernoulli(int k, double x, double epsilon, double delta) {
    ProblemSpec spec;
    spec.d = 2;
    spec.k = k;
    spec.x = {1.0 - x, x};
    spec.epsilon = epsilon;
    spec.delta = delta;
    spec.validate();
    return spec;
}

ProblemSpec ProblemSpec::multinomial(int k, std::vector<double> x, double epsilon, double delta,
                                     double lambda) {
    ProblemSpec spec;
    spec.d = static_cast<int>(x.size());
    spec.k = k;
    spec.x = std::move(x);
    spec.epsilon = epsilon;
    spec.delta = delta;
    spec.lambda = lambda;
    spec.validate();
    return spec;
}

void ProblemSpec::validate() const {
    if (d < 2) throw ValidationError("d must be at least 2 (got " + std::to_string(d) + ")");
    if (k < 1) throw ValidationError("k must be at least 1 (got " + std::to_string(k) + ")");
    if (static_cast<int>(x.size()) != d) {
        throw ValidationError("x has " + std::to_string(x.size()) + " coordinates, expected d = " +
                              std::to_string(d));
    }
    check_simplex_point(x, d, "x");
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
        throw ValidationError("epsilon must be a finite nonnegative number");
    }
    if (!(delta > 0.0 && delta < 0.5)) throw ValidationError("delta must lie in (0, 1/2)");
    if (!(lambda > 0.0 && lambda < 1.0)) throw ValidationError("lambda must lie in (0, 1)");
}

std::vector<double> ProblemSpec::x_view() const { return view_of(x, d); }

std::vector<double> view_of(std::span<const double> point, int d) {
    if (d == 2) return {point[1]};
    return {point.begin(), point.end()};
}

void check_simplex_point(std::span<const double> point, int d, std::string_view what) {
    if (static_cast<int>(point.size()) != d) {
        throw ValidationError(std::string(what) + ": expected " + std::to_string(d) +
                              " coordinates, got " + std::to_string(point.size()));
    }
    double sum = 0.0;
    for (double v : point) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw ValidationError(std::string(what) + ": coordinate outside [0, 1]");
        }
        sum += v;
    }
    if (std::abs(sum - 1.0) > kSimplexTolerance) {
        throw ValidationError(std::string(what) + ": coordinates sum to " + std::to_string(sum) +
                              ", not 1");
    }
}

// -- SampleSource ----------------------------------------------------------

SampleSource SampleSource::bernoulli(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("bernoulli parameter outside [0, 1]");
    return SampleSource(Bernoulli{p});
}

SampleSource SampleSource::multinomial(std::vector<double> probabilities) {
    check_simplex_point(probabilities, static_cast<int>(probabilities.size()),
                        "multinomial probabilities");
    std::vector<double> cumulative(probabilities.size());
    std::partial_sum(probabilities.begin(), probabilities.end(), cumulative.begin());
    return SampleSource(Multinomial{std::move(cumulative)});
}

SampleSource SampleSource::replay(std::vector<int> labels, int d) {
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= d) {
            throw ValidationError("replay label " + std::to_string(labels[i]) + " at position " +
                                  std::to_string(i) + " is outside [0, " + std::to_string(d) + ")");
        }
    }
    return SampleSource(Replay{std::move(labels), 0, d});
}

SampleSource SampleSource::replay(std::istream& in, int d) {
    std::vector<int> labels;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        int label = 0;
        const char* begin = line.data() + first;
        const char* end = line.data() + last + 1;
        auto [ptr, ec] = std::from_chars(begin, end, label);
        if (ec != std::errc() || ptr != end) {
            throw ValidationError("replay stream line " + std::to_string(line_no) +
                                  ": not an integer label: '" + line + "'");
        }
        if (label < 0 || label >= d) {
            throw ValidationError("replay stream line " + std::to_string(line_no) + ": label " +
                                  std::to_string(label) + " outside [0, " + std::to_string(d) + ")");
        }
        labels.push_back(label);
    }
    return SampleSource(Replay{std::move(labels), 0, d});
}

SampleSource SampleSource::for_mean(std::span<const double> point) {
    if (point.size() == 2) return bernoulli(point[1]);
    return multinomial({point.begin(), point.end()});
}

int SampleSource::dims() const noexcept {
    return std::visit(
        [](const auto& k) -> int {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, Bernoulli>) return 2;
            else if constexpr (std::is_same_v<T, Multinomial>) return static_cast<int>(k.cumulative.size());
            else return k.d;
        },
        kind_);
}

int SampleSource::draw(RngStream& rng) {
    return std::visit(
        [&rng](auto& k) -> int {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, Bernoulli>) {
                return rng.uniform() < k.p ? 1 : 0;
            } else if constexpr (std::is_same_v<T, Multinomial>) {
                const double u = rng.uniform();
                const auto it = std::upper_bound(k.cumulative.begin(), k.cumulative.end(), u);
                if (it != k.cumulative.end()) return static_cast<int>(it - k.cumulative.begin());
                // u landed above a cumulative total rounded below 1: take the
                // last category with positive mass.
                int j = static_cast<int>(k.cumulative.size()) - 1;
                while (j > 0 && k.cumulative[static_cast<std::size_t>(j)] ==
                                    k.cumulative[static_cast<std::size_t>(j - 1)]) {
                    --j;
                }
                return j;
            } else {
                if (k.cursor >= k.labels.size()) {
                    throw SourceDrained("replay source drained after " +
                                        std::to_string(k.labels.size()) + " labels");
                }
                return k.labels[k.cursor++];
            }
        },
        kind_);
}

// -- ActionStats -----------------------------------------------------------

std::vector<double> ActionStats::mean_hat() const {
    if (n == 0) throw std::domain_error("empirical mean is undefined before the first sample");
    std::vector<double> out(counts.size());
    for (std::size_t j = 0; j < counts.size(); ++j) {
        out[j] = static_cast<double>(counts[j]) / static_cast<double>(n);
    }
    return out;
}

std::vector<double> ActionStats::mean_view() const {
    std::vector<double> out(static_cast<std::size_t>(dims() == 2 ? 1 : dims()));
    mean_view(out);
    return out;
}

void ActionStats::mean_view(std::span<double> out) const {
    if (n == 0) throw std::domain_error("empirical mean is undefined before the first sample");
    const double nn = static_cast<double>(n);
    if (dims() == 2) {
        out[0] = static_cast<double>(counts[1]) / nn;
        return;
    }
    for (std::size_t j = 0; j < counts.size(); ++j) out[j] = static_cast<double>(counts[j]) / nn;
}

void ActionStats::record(int label, const MarginSpec& spec) {
    ++n;
    ++counts[static_cast<std::size_t>(label)];
    margin = hullfeas::margin(n, spec);
}

ActionStats update(ActionStats stats, int label, const ProblemSpec& spec) {
    stats.record(label, spec.margin_spec());
    return stats;
}

} // namespace hullfeas
