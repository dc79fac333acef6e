#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include "hullfeas/harness.hpp"
#include "hullfeas/scenario.hpp"

using namespace hullfeas;

namespace {

std::string scenario_path(const char* file) { return std::string(HULLFEAS_SCENARIO_DIR) + "/" + file; }

TrialResult row(std::string policy, std::int64_t tau, Outcome verdict, bool correct, int trial = 0) {
    return {"s", std::move(policy), trial, 1, tau, verdict, correct};
}

Scenario small_scenario() {
    Scenario s = builtin_scenario("bern-J2-unique");
    s.trials = 6;
    s.spec.delta = 0.1;
    return s;
}

} // namespace

TEST_CASE("builtin scenarios cover the ten table cells") {
    const auto& names = builtin_scenario_names();
    CHECK(names.size() == 10);
    for (const auto& name : names) {
        const Scenario s = builtin_scenario(name);
        CHECK(s.name == name);
        CHECK(s.spec.k == 10);
        CHECK(s.spec.delta == 0.01);
        CHECK(s.spec.epsilon == 0.1);
        CHECK(s.trials == 30);
        CHECK(s.grid_size == 300);
        CHECK(s.policies.size() == 4);
        CHECK(s.instance.means.size() == 10);
        CHECK(s.instance.label == Verdict::feasible);
        CHECK(s.max_steps == (s.spec.d == 2 ? 10'000'000 : 100'000'000));
        if (s.spec.d == 2) CHECK(s.spec.x[1] == 0.5);
        else CHECK(s.spec.lambda == 0.99);
    }
    CHECK_THROWS_AS(builtin_scenario("bern-J3-unique"), ValidationError);
}

TEST_CASE("builtin means") {
    const Scenario j2 = builtin_scenario("bern-J2-unique");
    const std::vector<double> expect{.3, .7, .48, .52, .48, .52, .48, .52, .48, .52};
    for (std::size_t i = 0; i < 10; ++i) CHECK(j2.instance.means[i][1] == doctest::Approx(expect[i]));

    const Scenario j2n = builtin_scenario("bern-J2-nonunique");
    const std::vector<double> expect_n{.48, .52, .3, .7, .48, .52, .3, .7, .48, .52};
    for (std::size_t i = 0; i < 10; ++i) CHECK(j2n.instance.means[i][1] == doctest::Approx(expect_n[i]));

    const Scenario m3 = builtin_scenario("multi-J3-nonunique");
    CHECK(m3.instance.means[0] == std::vector<double>{.33, .33, .34});
    CHECK(m3.instance.means[1] == std::vector<double>{.33, .34, .33});
    CHECK(m3.instance.means[2] == std::vector<double>{.34, .33, .33});
    CHECK(m3.instance.means[3] == std::vector<double>{.2, .1, .7});

    const Scenario m3u = builtin_scenario("multi-J3-unique");
    CHECK(m3u.instance.means[0] == std::vector<double>{.2, .1, .7});
    CHECK(m3u.instance.means[3] == std::vector<double>{.33, .33, .34});
}

TEST_CASE("scenario files") {
    const Scenario inf = load_scenario(scenario_path("bern-infeasible.json"));
    CHECK(inf.instance.label == Verdict::infeasible);
    CHECK(inf.spec.k == 10);

    CHECK_THROWS_AS(load_scenario(scenario_path("does-not-exist.json")), IoError);
    CHECK_THROWS_WITH_AS(parse_scenario(R"({"name":"a","d":3,"x":[0.5,0.6],"means":[[0.2,0.3,0.5]]})", "f.json"),
                         doctest::Contains("f.json: field 'x'"), ValidationError);
    CHECK_THROWS_WITH_AS(parse_scenario(R"({"name":"a","means":[0.3],"policies":["greedy"]})", "f.json"),
                         doctest::Contains("policies[0]"), ValidationError);
    CHECK_THROWS_WITH_AS(parse_scenario(R"({"name":"a","means":[0.3],"delta":0.7})", "f.json"),
                         doctest::Contains("delta"), ValidationError);
    CHECK_THROWS_WITH_AS(parse_scenario(R"({"name":"a","means":[0.3, 1.3]})", "f.json"),
                         doctest::Contains("means[1]"), ValidationError);
    CHECK_THROWS_WITH_AS(parse_scenario("{\"name\": \"a\",\n \"means\": [0.3,]}", "f.json"),
                         doctest::Contains("line 2"), ValidationError);
    CHECK_THROWS_WITH_AS(parse_scenario(R"({"name":"a","means":[0.3],"colour":1})", "f.json"),
                         doctest::Contains("colour"), ValidationError);
    CHECK_THROWS_AS(parse_scenario(R"({"name":"a","k":2,"means":[0.3]})"), ValidationError);
}

TEST_CASE("scenario JSON round-trips") {
    for (const auto& name : builtin_scenario_names()) {
        const Scenario s = builtin_scenario(name);
        const Scenario back = parse_scenario(to_json(s));
        CHECK(back.name == s.name);
        CHECK(back.spec.x == s.spec.x);
        CHECK(back.spec.d == s.spec.d);
        CHECK(back.instance.means == s.instance.means);
        CHECK(back.policies == s.policies);
        CHECK(back.max_steps == s.max_steps);
        CHECK(to_json(back) == to_json(s));
    }
}

TEST_CASE("run_trials cardinality, order and determinism") {
    const Scenario s = small_scenario();
    const auto a = run_trials(s, {1});
    const auto b = run_trials(s, {4});
    REQUIRE(a.size() == 24);
    CHECK(a == b);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].trial == static_cast<int>(i / 4));
        CHECK(a[i].policy == s.policies[i % 4].name());
        CHECK(a[i].seed == a[i - i % 4].seed);
        CHECK(a[i].verdict != Outcome::undecided);
        CHECK(a[i].correct == (a[i].verdict == Outcome::feasible));
    }
}

TEST_CASE("policies in a trial see the same per-action samples") {
    const Scenario s = small_scenario();
    const auto seed = trial_seed(s.seed, 2);
    for (int i = 0; i < s.spec.k; ++i) {
        auto streams_a = TrialStreams::make(seed, s.spec.k);
        auto streams_b = TrialStreams::make(seed, s.spec.k);
        auto& ra = streams_a.actions[static_cast<std::size_t>(i)];
        auto& rb = streams_b.actions[static_cast<std::size_t>(i)];
        auto src_a = SampleSource::for_mean(s.instance.means[static_cast<std::size_t>(i)]);
        auto src_b = SampleSource::for_mean(s.instance.means[static_cast<std::size_t>(i)]);
        // Interleave draws from other actions on one side only.
        for (int t = 0; t < 200; ++t) {
            if (t % 3 == 0) (void)streams_b.actions[static_cast<std::size_t>((i + 1) % s.spec.k)].uniform();
            CHECK(src_a.draw(ra) == src_b.draw(rb));
        }
    }
    // Pulling one action never moves another action's stream: the first k
    // pulls of every policy see the same labels.
    std::vector<std::vector<std::int64_t>> first_counts;
    for (const auto& policy : s.policies) {
        std::vector<SampleSource> src;
        for (const auto& m : s.instance.means) src.push_back(SampleSource::for_mean(m));
        RunOptions opt;
        opt.max_steps = s.spec.k;
        const auto d = run_policy(policy, std::move(src), s.spec, s.grid(), seed, opt);
        std::vector<std::int64_t> ones;
        for (const auto& st : d.per_action) ones.push_back(st.counts[1]);
        first_counts.push_back(ones);
    }
    for (const auto& c : first_counts) CHECK(c == first_counts.front());
}

TEST_CASE("aggregate examples") {
    {
        const std::vector<TrialResult> r{row("uniform", 10, Outcome::feasible, true)};
        const auto a = aggregate(r);
        REQUIRE(a.size() == 1);
        CHECK(a[0].mean_tau == 10.0);
        CHECK(a[0].std_tau == 0.0);
        CHECK(a[0].error_rate == 0.0);
    }
    {
        const std::vector<TrialResult> r{row("uniform", 10, Outcome::feasible, true),
                                         row("uniform", 20, Outcome::infeasible, false)};
        const auto a = aggregate(r);
        CHECK(a[0].mean_tau == 15.0);
        CHECK(a[0].std_tau == doctest::Approx(std::sqrt(50.0)));
        CHECK(a[0].error_rate == 0.5);
    }
    {
        const std::vector<TrialResult> r{row("b", 10, Outcome::undecided, false),
                                         row("a", 5, Outcome::feasible, false),
                                         row("b", 30, Outcome::undecided, false)};
        const auto a = aggregate(r);
        REQUIRE(a.size() == 2);
        CHECK(a[0].policy == "a");
        CHECK(a[0].error_rate == 1.0);
        CHECK(a[1].policy == "b");
        CHECK(a[1].undecided == 2);
        CHECK(std::isnan(a[1].error_rate));
        CHECK(a[1].mean_tau == 20.0);
    }
}

TEST_CASE("aggregate is invariant to row order") {
    std::vector<TrialResult> r;
    std::mt19937_64 rng(1);
    for (int i = 0; i < 200; ++i) {
        const auto pol = (i % 3 == 0) ? "uniform" : "lucb_mean";
        r.push_back(row(pol, static_cast<std::int64_t>(rng() % 100000), i % 7 ? Outcome::feasible : Outcome::infeasible,
                        i % 7 != 0, i));
    }
    const auto before = aggregate(r);
    std::shuffle(r.begin(), r.end(), rng);
    const auto after = aggregate(r);
    REQUIRE(before.size() == after.size());
    for (std::size_t i = 0; i < before.size(); ++i) {
        CHECK(before[i].mean_tau == after[i].mean_tau);
        CHECK(before[i].std_tau == after[i].std_tau);
        CHECK(before[i].error_rate == after[i].error_rate);
    }
}

TEST_CASE("CSV schema and round trip") {
    std::vector<TrialResult> r{
        {"bern-J2-unique", "thompson(1,1)", 0, 123456789012345ULL, 4242, Outcome::feasible, true},
        {"bern-J2-unique", "uniform", 0, 123456789012345ULL, 9999, Outcome::undecided, false},
        {"bern-J2-unique", "uniform", 1, 7, 8000, Outcome::infeasible, false},
    };
    std::ostringstream out;
    write_trials_csv(out, r);
    const std::string text = out.str();
    CHECK(text.substr(0, text.find('\n')) == "scenario,policy,trial,seed,tau,verdict,correct");
    CHECK(text.find("\"thompson(1,1)\"") != std::string::npos);
    CHECK(text.find(",undecided,0") != std::string::npos);

    std::istringstream in(text);
    const auto back = read_trials_csv(in);
    CHECK(back == r);

    std::ostringstream agg1, agg2;
    write_aggregate_csv(agg1, aggregate(r));
    write_aggregate_csv(agg2, aggregate(back));
    CHECK(agg1.str() == agg2.str());
    CHECK(agg1.str().substr(0, agg1.str().find('\n')) == "scenario,policy,mean_tau,std_tau,error_rate,undecided");

    std::istringstream bad("scenario,policy,trial,seed,tau,verdict,correct\na,b,1,2,x,feasible,1\n");
    CHECK_THROWS_WITH_AS(read_trials_csv(bad), doctest::Contains("line 2"), ValidationError);
    std::istringstream wrong_header("a,b\n");
    CHECK_THROWS_AS(read_trials_csv(wrong_header), ValidationError);
}

TEST_CASE("file output") {
    const auto dir = std::filesystem::temp_directory_path() / "hullfeas_test_output";
    std::filesystem::create_directories(dir);
    const Scenario s = small_scenario();
    const auto results = run_trials(s);
    save_trials_csv(dir / "t.csv", results);
    save_aggregate_csv(dir / "a.csv", aggregate(results));
    save_manifest(dir / "m.json", s);
    CHECK(load_trials_csv(dir / "t.csv") == results);

    std::ostringstream m;
    m << manifest_json(s);
    CHECK(m.str().find(std::string(library_version())) != std::string::npos);
    CHECK(m.str().find("\"grid_size\": 300") != std::string::npos);

    CHECK_THROWS_AS(save_trials_csv(dir / "missing" / "x.csv", results), IoError);
    CHECK_THROWS_AS(load_trials_csv(dir / "missing.csv"), IoError);
    std::filesystem::remove_all(dir);
}
