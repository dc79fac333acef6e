#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hullfeas/confidence.hpp"
#include "hullfeas/rng.hpp"

namespace hullfeas {

/// Malformed problem parameters, scenario files or replay streams.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A replay source was asked for more labels than it recorded.
class SourceDrained : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Filesystem failures, carrying the offending path in the message.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Verdict { feasible, infeasible };

/// Result of a sequential run. `undecided` means the step budget ran out
/// before either stopping rule held.
enum class Outcome { feasible, infeasible, undecided };

std::string_view to_string(Verdict v);
std::string_view to_string(Outcome o);
Outcome to_outcome(Verdict v);

/// One feasibility question: is the eps-ball around `x` reachable by a convex
/// combination of the k unknown group distributions?
///
/// Points live on the (d-1)-simplex and are stored with all d coordinates.
/// For d = 2 the geometry is one-dimensional: a point (1 - p, p) is viewed as
/// the scalar p, the probability of group 1.
struct ProblemSpec {
    int d = 2;
    int k = 1;
    std::vector<double> x; ///< target proportions, length d
    double epsilon = 0.1;
    double delta = 0.01;
    double lambda = 0.99; ///< feasible-rule slack for d >= 3
    MarginForm margin_form = MarginForm::standard;

    static ProblemSpec bernoulli(int k, double x, double epsilon, double delta);
    static ProblemSpec multinomial(int k, std::vector<double> x, double epsilon, double delta,
                                   double lambda);

    /// Throws ValidationError when an invariant is violated.
    void validate() const;

    /// Dimension of the space the geometry works in: 1 for d = 2, d otherwise.
    int view_dims() const noexcept { return d == 2 ? 1 : d; }
    std::vector<double> x_view() const;
    MarginSpec margin_spec() const { return {delta, k, margin_form}; }
};

/// Coordinates of a simplex point in the geometry's working space.
std::vector<double> view_of(std::span<const double> point, int d);

/// Tolerance on |sum - 1| when checking simplex membership.
inline constexpr double kSimplexTolerance = 1e-6;

/// Throws ValidationError unless `point` has d nonnegative coordinates summing to 1.
void check_simplex_point(std::span<const double> point, int d, std::string_view what);

/// Ground-truth means with their feasibility label. Build through
/// `make_instance` (geometry.hpp) so the label always comes from the oracle.
struct Instance {
    std::vector<std::vector<double>> means;
    Verdict label = Verdict::feasible;
};

/// A distribution over group labels {0, ..., d-1}.
class SampleSource {
public:
    static SampleSource bernoulli(double p);
    static SampleSource multinomial(std::vector<double> probabilities);
    static SampleSource replay(std::vector<int> labels, int d);
    /// Reads one integer label per line; blank lines are skipped.
    static SampleSource replay(std::istream& in, int d);

    /// Source for a simplex point: bernoulli(point[1]) when d = 2.
    static SampleSource for_mean(std::span<const double> point);

    int dims() const noexcept;

    /// Draws one label. Replay sources ignore the stream and throw
    /// SourceDrained once exhausted.
    int draw(RngStream& rng);

private:
    struct Bernoulli {
        double p;
    };
    struct Multinomial {
        std::vector<double> cumulative;
    };
    struct Replay {
        std::vector<int> labels;
        std::size_t cursor = 0;
        int d = 2;
    };

    explicit SampleSource(std::variant<Bernoulli, Multinomial, Replay> kind)
        : kind_(std::move(kind)) {}

    std::variant<Bernoulli, Multinomial, Replay> kind_;
};

/// Running tallies for one action.
struct ActionStats {
    std::int64_t n = 0;
    std::vector<std::int64_t> counts; ///< per-group tallies; counts[1] is the success count when d = 2
    double margin = std::numeric_limits<double>::infinity();

    static ActionStats empty(int d) { return {0, std::vector<std::int64_t>(static_cast<std::size_t>(d), 0), std::numeric_limits<double>::infinity()}; }

    int dims() const noexcept { return static_cast<int>(counts.size()); }

    /// counts / n. Throws std::domain_error when n == 0.
    std::vector<double> mean_hat() const;
    /// Empirical mean in the geometry's working space (the scalar p-hat for d = 2).
    std::vector<double> mean_view() const;
    void mean_view(std::span<double> out) const;

    /// Adds one observation and refreshes the margin.
    void record(int label, const MarginSpec& spec);
};

/// Copying form of ActionStats::record.
ActionStats update(ActionStats stats, int label, const ProblemSpec& spec);

/// Outcome of one sequential run.
struct Decision {
    Outcome outcome = Outcome::undecided;
    std::int64_t tau = 0; ///< total samples, including the k initial ones
    std::vector<ActionStats> per_action;
    std::vector<int> trajectory; ///< chosen actions in order, when recorded
};

} // namespace hullfeas
