#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hullfeas/core.hpp"
#include "hullfeas/scenario.hpp"

namespace hullfeas {

struct TrialResult {
    std::string scenario;
    std::string policy;
    int trial = 0;
    std::uint64_t seed = 0; ///< trial seed; identical across policies
    std::int64_t tau = 0;
    Outcome verdict = Outcome::undecided;
    bool correct = false; ///< false for undecided runs

    friend bool operator==(const TrialResult&, const TrialResult&) = default;
};

struct AggregateRow {
    std::string scenario;
    std::string policy;
    double mean_tau = 0.0;
    double std_tau = 0.0;    ///< sample standard deviation; 0 for a single trial
    double error_rate = 0.0; ///< wrong / decided; NaN when nothing was decided
    std::int64_t undecided = 0;
};

struct TrialOptions {
    unsigned threads = 0; ///< 0 picks the hardware concurrency
};

/// Runs every policy of the scenario on trials 0..trials-1. All policies of a
/// trial share its seed, so they observe the same per-action sample streams.
/// Rows come back ordered by trial, then by the scenario's policy order,
/// independent of the thread count.
std::vector<TrialResult> run_trials(const Scenario& scenario, const TrialOptions& options = {});

/// One row per (scenario, policy), sorted by scenario then policy name. The
/// result does not depend on the order of `results`.
std::vector<AggregateRow> aggregate(std::span<const TrialResult> results);

void write_trials_csv(std::ostream& out, std::span<const TrialResult> results);
void write_aggregate_csv(std::ostream& out, std::span<const AggregateRow> rows);

/// Reads what write_trials_csv wrote. Throws ValidationError with the line
/// number on malformed input.
std::vector<TrialResult> read_trials_csv(std::istream& in);

// File variants; failures raise IoError naming the path.
void save_trials_csv(const std::filesystem::path& path, std::span<const TrialResult> results);
void save_aggregate_csv(const std::filesystem::path& path, std::span<const AggregateRow> rows);
std::vector<TrialResult> load_trials_csv(const std::filesystem::path& path);

/// JSON run manifest: the scenario, its seed, grid size and the library version.
std::string manifest_json(const Scenario& scenario);
void save_manifest(const std::filesystem::path& path, const Scenario& scenario);

/// Version string of the library.
std::string_view library_version();

} // namespace hullfeas
