#include "hullfeas/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#ifndef HULLFEAS_VERSION
#define HULLFEAS_VERSION "0.0.0"
#endif

namespace hullfeas {

namespace {

__extension__ typedef __int128 Wide;

constexpr std::string_view kTrialsHeader = "scenario,policy,trial,seed,tau,verdict,correct";
constexpr std::string_view kAggregateHeader = "scenario,policy,mean_tau,std_tau,error_rate,undecided";

TrialResult run_one(const Scenario& s, const DirectionGrid& grid, int trial, std::size_t policy_index) {
    const Policy& policy = s.policies[policy_index];
    const std::uint64_t seed = trial_seed(s.seed, static_cast<std::uint64_t>(trial));
    std::vector<SampleSource> sources;
    sources.reserve(s.instance.means.size());
    for (const auto& m : s.instance.means) sources.push_back(SampleSource::for_mean(m));
    RunOptions options;
    options.max_steps = s.max_steps;
    const Decision d = run_policy(policy, std::move(sources), s.spec, grid, seed, options);

    TrialResult r;
    r.scenario = s.name;
    r.policy = policy.name();
    r.trial = trial;
    r.seed = seed;
    r.tau = d.tau;
    r.verdict = d.outcome;
    r.correct = d.outcome == to_outcome(s.instance.label);
    return r;
}

// -- CSV ---------------------------------------------------------------------

void write_field(std::ostream& out, std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
        out << field;
        return;
    }
    out << '"';
    for (char c : field) {
        if (c == '"') out << '"';
        out << c;
    }
    out << '"';
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted) throw ValidationError("line " + std::to_string(line_no) + ": unterminated quote");
    fields.push_back(std::move(cur));
    return fields;
}

template <class Int>
Int parse_int(const std::string& text, std::string_view column, std::size_t line_no) {
    Int value{};
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw ValidationError("line " + std::to_string(line_no) + ": column '" + std::string(column) +
                              "': not an integer: '" + text + "'");
    }
    return value;
}

Outcome parse_outcome(const std::string& text, std::size_t line_no) {
    if (text == "feasible") return Outcome::feasible;
    if (text == "infeasible") return Outcome::infeasible;
    if (text == "undecided") return Outcome::undecided;
    throw ValidationError("line " + std::to_string(line_no) + ": unknown verdict '" + text + "'");
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    return out;
}

void finish_write(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw IoError("error writing '" + path.string() + "'");
}

} // namespace

std::vector<TrialResult> run_trials(const Scenario& scenario, const TrialOptions& options) {
    const DirectionGrid grid = scenario.grid();
    const std::size_t per_trial = scenario.policies.size();
    const std::size_t jobs = static_cast<std::size_t>(scenario.trials) * per_trial;
    std::vector<TrialResult> results(jobs);

    unsigned workers = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, jobs));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (;;) {
            const std::size_t j = next.fetch_add(1);
            if (j >= jobs) return;
            try {
                results[j] = run_one(scenario, grid, static_cast<int>(j / per_trial), j % per_trial);
            } catch (...) {
                const std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(jobs);
                return;
            }
        }
    };

    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);
    return results;
}

std::vector<AggregateRow> aggregate(std::span<const TrialResult> results) {
    struct Acc {
        std::int64_t n = 0;
        Wide sum = 0;
        Wide sum_sq = 0;
        std::int64_t decided = 0;
        std::int64_t wrong = 0;
        std::int64_t undecided = 0;
    };
    std::map<std::pair<std::string, std::string>, Acc> groups;
    for (const auto& r : results) {
        Acc& a = groups[{r.scenario, r.policy}];
        ++a.n;
        a.sum += r.tau;
        a.sum_sq += static_cast<Wide>(r.tau) * r.tau;
        if (r.verdict == Outcome::undecided) {
            ++a.undecided;
        } else {
            ++a.decided;
            if (!r.correct) ++a.wrong;
        }
    }

    std::vector<AggregateRow> rows;
    rows.reserve(groups.size());
    for (const auto& [key, a] : groups) {
        AggregateRow row;
        row.scenario = key.first;
        row.policy = key.second;
        const auto n = static_cast<long double>(a.n);
        row.mean_tau = static_cast<double>(static_cast<long double>(a.sum) / n);
        if (a.n > 1) {
            // n * sum_sq - sum^2 is exact, so the variance never goes negative.
            const Wide scatter = static_cast<Wide>(a.n) * a.sum_sq - a.sum * a.sum;
            row.std_tau = static_cast<double>(std::sqrt(static_cast<long double>(scatter) / (n * (n - 1))));
        }
        row.error_rate = a.decided > 0 ? static_cast<double>(a.wrong) / static_cast<double>(a.decided)
                                       : std::numeric_limits<double>::quiet_NaN();
        row.undecided = a.undecided;
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_trials_csv(std::ostream& out, std::span<const TrialResult> results) {
    out << kTrialsHeader << '\n';
    for (const auto& r : results) {
        write_field(out, r.scenario);
        out << ',';
        write_field(out, r.policy);
        out << ',' << r.trial << ',' << r.seed << ',' << r.tau << ',' << to_string(r.verdict) << ','
            << (r.correct ? 1 : 0) << '\n';
    }
}

void write_aggregate_csv(std::ostream& out, std::span<const AggregateRow> rows) {
    out << kAggregateHeader << '\n';
    for (const auto& r : rows) {
        write_field(out, r.scenario);
        out << ',';
        write_field(out, r.policy);
        out << ',' << format_double(r.mean_tau) << ',' << format_double(r.std_tau) << ','
            << format_double(r.error_rate) << ',' << r.undecided << '\n';
    }
}

std::vector<TrialResult> read_trials_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw ValidationError("trial table is empty");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kTrialsHeader) throw ValidationError("line 1: unexpected header '" + line + "'");

    std::vector<TrialResult> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = split_csv_line(line, line_no);
        if (f.size() != 7) {
            throw ValidationError("line " + std::to_string(line_no) + ": expected 7 columns, got " +
                                  std::to_string(f.size()));
        }
        TrialResult r;
        r.scenario = f[0];
        r.policy = f[1];
        r.trial = parse_int<int>(f[2], "trial", line_no);
        r.seed = parse_int<std::uint64_t>(f[3], "seed", line_no);
        r.tau = parse_int<std::int64_t>(f[4], "tau", line_no);
        r.verdict = parse_outcome(f[5], line_no);
        const int correct = parse_int<int>(f[6], "correct", line_no);
        if (correct != 0 && correct != 1) {
            throw ValidationError("line " + std::to_string(line_no) + ": column 'correct' must be 0 or 1");
        }
        r.correct = correct == 1;
        rows.push_back(std::move(r));
    }
    return rows;
}

void save_trials_csv(const std::filesystem::path& path, std::span<const TrialResult> results) {
    auto out = open_for_write(path);
    write_trials_csv(out, results);
    finish_write(out, path);
}

void save_aggregate_csv(const std::filesystem::path& path, std::span<const AggregateRow> rows) {
    auto out = open_for_write(path);
    write_aggregate_csv(out, rows);
    finish_write(out, path);
}

std::vector<TrialResult> load_trials_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    try {
        return read_trials_csv(in);
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

std::string manifest_json(const Scenario& scenario) {
    nlohmann::json doc;
    doc["version"] = std::string(library_version());
    doc["seed"] = scenario.seed;
    doc["grid_size"] = scenario.grid_size;
    doc["oracle_label"] = std::string(to_string(scenario.instance.label));
    doc["scenario"] = nlohmann::json::parse(to_json(scenario, -1));
    return doc.dump(2) + "\n";
}

void save_manifest(const std::filesystem::path& path, const Scenario& scenario) {
    auto out = open_for_write(path);
    out << manifest_json(scenario);
    finish_write(out, path);
}

std::string_view library_version() { return HULLFEAS_VERSION; }

} // namespace hullfeas
