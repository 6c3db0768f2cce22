#include "gigomea/harness.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

using namespace gigomea;
using Catch::Matchers::WithinAbs;

namespace
{

RunRecord record(bool success, std::uint64_t evals)
{
    RunRecord r;
    r.success = success;
    r.evaluations_used = evals;
    return r;
}

// Scripted EA: every run succeeds once n >= min_n and costs cost(n) evaluations.
RunFunction scripted(std::size_t min_n, std::function<double(std::size_t)> cost)
{
    return [=](const RunRequest &req) {
        RunRecord r;
        r.seed = req.seed;
        r.success = req.population_size >= min_n;
        r.evaluations_used = static_cast<std::uint64_t>(cost(req.population_size));
        return r;
    };
}

ProtocolSettings small_settings(std::uint64_t seed = 1)
{
    ProtocolSettings s;
    s.runs = 10;
    s.required_successes = default_required_successes(s.runs);
    s.ladder_max = 1024;
    s.master_seed = seed;
    return s;
}

} // namespace

TEST_CASE("corrected evaluations")
{
    CHECK_THAT(corrected_evaluations(1000.0, 49.0 / 50.0), WithinAbs(1020.408163265306, 1e-6));
    CHECK(corrected_evaluations(1234.0, 1.0) == 1234.0);
    CHECK_THROWS_AS(corrected_evaluations(1000.0, 0.0), std::invalid_argument);

    std::vector<RunRecord> runs(50, record(true, 1000));
    runs[0] = record(false, 5000);
    const auto s = summarize(16, runs);
    CHECK(s.successes == 49);
    CHECK(s.success_rate == 0.98);
    CHECK(*s.mean_evals_successful == 1000.0);
    CHECK_THAT(*s.corrected_evals, WithinAbs(1020.408163265306, 1e-6));

    const auto all = summarize(16, std::vector<RunRecord>(50, record(true, 700)));
    CHECK(*all.corrected_evals == *all.mean_evals_successful);

    const auto none = summarize(16, std::vector<RunRecord>(50, record(false, 700)));
    CHECK_FALSE(none.mean_evals_successful);
    CHECK_FALSE(none.corrected_evals);
    CHECK(none.success_rate == 0.0);
}

TEST_CASE("success threshold")
{
    CHECK(default_required_successes(50) == 49);
    CHECK(default_required_successes(10) == 10);
    CHECK(default_required_successes(100) == 98);
    CHECK(default_required_successes(1) == 1);
}

TEST_CASE("nearest-rank percentiles")
{
    std::vector<double> ten(10);
    for (std::size_t i = 0; i < 10; ++i)
        ten[i] = static_cast<double>(i + 1);
    CHECK(nearest_rank_percentile(ten, 10) == 1.0);
    CHECK(nearest_rank_percentile(ten, 90) == 9.0);
    CHECK(nearest_rank_percentile(ten, 100) == 10.0);

    std::vector<double> fifty(50);
    for (std::size_t i = 0; i < 50; ++i)
        fifty[i] = static_cast<double>(i + 1);
    CHECK(nearest_rank_percentile(fifty, 10) == 5.0);
    CHECK(nearest_rank_percentile(fifty, 90) == 45.0);

    const std::vector<double> one{42.0};
    CHECK(nearest_rank_percentile(one, 10) == 42.0);
    CHECK_THROWS_AS(nearest_rank_percentile(std::vector<double>{}, 10), std::invalid_argument);
}

TEST_CASE("doubling ladder")
{
    const auto ladder = doubling_ladder(8192);
    CHECK(ladder.size() == 13);
    CHECK(ladder.front() == 2);
    CHECK(ladder.back() == 8192);
    CHECK(doubling_ladder(8) == std::vector<std::size_t>{2, 4, 8});
    CHECK(doubling_ladder(1).empty());
}

TEST_CASE("sweep estimate")
{
    const auto settings = small_settings();
    const std::vector<std::size_t> ladder{2, 4, 8, 16};

    SECTION("nothing qualifies")
    {
        const auto result = sweep(scripted(1000, [](std::size_t) { return 10.0; }), ladder, settings);
        CHECK(result.records.size() == 4);
        CHECK_FALSE(result.estimate);
    }
    SECTION("one qualifying point")
    {
        const auto result = sweep(scripted(16, [](std::size_t) { return 10.0; }), ladder, settings);
        CHECK(result.estimate == 16);
    }
    SECTION("fewest mean evaluations wins")
    {
        const auto cost = [](std::size_t n) { return n == 4 ? 7000.0 : n == 8 ? 5000.0 : 9000.0; };
        const auto result = sweep(scripted(4, cost), ladder, settings);
        CHECK(result.estimate == 8);
    }
    SECTION("a point below the threshold does not qualify")
    {
        ProtocolSettings s = small_settings();
        s.runs = 50;
        s.required_successes = 49;
        const RunFunction fn = [](const RunRequest &req) {
            // n = 2 misses twice, n = 4 misses once.
            const bool miss = (req.population_size == 2 && req.run_index < 2) ||
                              (req.population_size == 4 && req.run_index < 1);
            return record(!miss, req.population_size == 2 ? 10 : 20);
        };
        const auto result = sweep(fn, std::vector<std::size_t>{2, 4}, s);
        CHECK(result.estimate == 4);
        CHECK(result.records[0].successes == 48);
        CHECK(result.records[1].successes == 49);
    }
}

TEST_CASE("interval refinement")
{
    const auto settings = small_settings();

    SECTION("unimodal curve")
    {
        for (std::size_t best : {10u, 23u, 40u, 57u})
        {
            const auto fn = scripted(2, [=](std::size_t n) {
                const double d = static_cast<double>(n) - static_cast<double>(best);
                return 1000.0 + d * d;
            });
            StageEvaluator evaluator(fn, settings, 0);
            const auto n_est = sweep_estimate(evaluator, settings);
            REQUIRE(n_est);
            const auto refined = bisect_refine(evaluator, *n_est);
            const double width = std::max(2.0, static_cast<double>(*n_est) / 16.0);
            CHECK(std::abs(static_cast<double>(refined) - static_cast<double>(best)) <= width);
        }
    }
    SECTION("flat curve stays in range")
    {
        const auto fn = scripted(2, [](std::size_t) { return 500.0; });
        for (std::size_t n_est : {2u, 3u, 8u, 64u, 100u})
        {
            StageEvaluator evaluator(fn, settings, 0);
            const auto refined = bisect_refine(evaluator, n_est);
            CHECK(refined >= std::max<std::size_t>(2, n_est / 2));
            CHECK(refined <= 2 * n_est);
        }
    }
    SECTION("lower end clamped at two")
    {
        const auto fn = scripted(2, [](std::size_t n) { return 100.0 * static_cast<double>(n); });
        StageEvaluator evaluator(fn, settings, 0);
        CHECK(bisect_refine(evaluator, 2) == 2);
        for (const auto &[n, rec] : evaluator.evaluated())
            CHECK(n >= 2);
    }
    SECTION("non-qualifying sizes are never chosen")
    {
        const auto fn = scripted(30, [](std::size_t n) { return 100.0 * static_cast<double>(n); });
        StageEvaluator evaluator(fn, settings, 0);
        CHECK(bisect_refine(evaluator, 32) >= 30);
    }
}

TEST_CASE("repetitions combine by rounded mean")
{
    using R = std::vector<std::optional<std::size_t>>;
    CHECK(combine_refined(R{8, 8, 10, 8, 8}) == 8);
    CHECK(combine_refined(R{8, 9, 9, 9, 9}) == 9);
    CHECK(combine_refined(R{8, 8, 9, 9}) == 9); // 8.5 rounds half away from zero
    CHECK_FALSE(combine_refined(R{8, 8, std::nullopt, 8, 8}));
    CHECK_FALSE(combine_refined(R{}));
}

TEST_CASE("optimal size estimation")
{
    const auto cost = [](std::size_t n) {
        const double d = static_cast<double>(n) - 40.0;
        return 1000.0 + d * d;
    };
    const auto fn = scripted(2, cost);

    std::optional<std::size_t> first;
    for (std::uint64_t seed : {1u, 2u, 99u})
    {
        const auto est = estimate_optimal_n(fn, small_settings(seed));
        REQUIRE(est.refined.size() == 5);
        REQUIRE(est.n_opt);
        if (!first)
            first = est.n_opt;
        CHECK(est.n_opt == first);
    }
    CHECK(std::abs(static_cast<double>(*first) - 40.0) <= 2.0);

    const auto failing = estimate_optimal_n(scripted(100000, cost), small_settings());
    CHECK_FALSE(failing.n_opt);

    // Fails only in the third repetition (stage 2).
    const RunFunction flaky = [&](const RunRequest &req) {
        auto r = fn(req);
        for (std::size_t n : doubling_ladder(1024))
            if (req.seed == run_seed(1, 2, n, req.run_index))
                r.success = false;
        return r;
    };
    const auto partial = estimate_optimal_n(flaky, small_settings(1));
    CHECK(partial.refined[0]);
    CHECK_FALSE(partial.refined[2]);
    CHECK_FALSE(partial.n_opt);
}

TEST_CASE("scalability record")
{
    const auto fn = scripted(4, [](std::size_t n) { return 100.0 + static_cast<double>(n); });
    const auto rec = scalability(fn, small_settings(), "Trap5", 20, "gi-gomea", "wvig");
    CHECK(rec.problem == "Trap5");
    CHECK(rec.ell == 20);
    REQUIRE(rec.n_opt);
    CHECK(*rec.n_opt == 4);
    CHECK(rec.success_rate == 1.0);
    CHECK(rec.corrected_evals == 104.0);
    CHECK(rec.p10 == 104.0);
    CHECK(rec.p90 == 104.0);

    const auto failed = scalability(scripted(100000, [](std::size_t) { return 1.0; }), small_settings(), "HIFF",
                                    64, "gomea", "mi");
    CHECK_FALSE(failed.n_opt);
    CHECK_FALSE(failed.corrected_evals);
}

TEST_CASE("run seeds are replayable")
{
    std::vector<std::uint64_t> seen;
    const RunFunction fn = [&](const RunRequest &req) {
        RunRecord r;
        r.seed = req.seed;
        return r;
    };
    const auto records = execute_runs(fn, 8, 5, 42, 3, 1);
    for (std::size_t r = 0; r < 5; ++r)
        CHECK(records[r].seed == run_seed(42, 3, 8, r));
    CHECK(run_seed(42, 3, 8, 0) != run_seed(42, 4, 8, 0));
    CHECK(run_seed(42, 3, 8, 0) != run_seed(42, 3, 16, 0));
    CHECK(run_seed(42, 3, 8, 0) != run_seed(43, 3, 8, 0));
}

TEST_CASE("parallel execution matches serial execution")
{
    auto instances = std::make_shared<const std::vector<ProblemInstance>>(
        std::vector<ProblemInstance>{gen_nks1(20, 5, 1), gen_nks1(20, 5, 2), gen_nks1(20, 5, 3)});
    EaConfig config;
    config.dsm_kind = DsmKind::MutualInformation;
    config.budget = 20000;
    const auto fn = make_ea_runner(instances, config);
    const auto serial = execute_runs(fn, 16, 12, 5, 0, 1);
    const auto parallel = execute_runs(fn, 16, 12, 5, 0, 4);
    CHECK(serial == parallel);

    // Errors inside a worker surface in the caller.
    const RunFunction broken = [](const RunRequest &req) -> RunRecord {
        if (req.run_index == 3)
            throw std::runtime_error("boom");
        return {};
    };
    CHECK_THROWS_AS(execute_runs(broken, 4, 8, 1, 0, 3), std::runtime_error);
}

TEST_CASE("EA runner uses the instance's value-to-reach")
{
    auto instances = std::make_shared<const std::vector<ProblemInstance>>(
        std::vector<ProblemInstance>{ProblemInstance::trap(20, 5)});
    EaConfig config;
    config.dsm_kind = DsmKind::Wvig;
    const auto fn = make_ea_runner(instances, config);
    const auto r = fn({2, 7, 0});
    CHECK(r.success);
    CHECK(r.best_fitness == 4.0);
    CHECK(r.seed == 7);
    CHECK_THROWS_AS(make_ea_runner(nullptr, config), std::invalid_argument);
}

TEST_CASE("CSV tables round trip")
{
    std::vector<SweepRecord> sweep_rows(3);
    sweep_rows[0].n = 2;
    sweep_rows[1] = {4, 0, 0, 0.98, 1000.5, 1000.5 / 0.98};
    sweep_rows[2] = {8, 0, 0, 1.0, 1.0 / 3.0, 1.0 / 3.0};
    std::stringstream sweep_text;
    write_sweep_csv(sweep_text, sweep_rows);
    const auto sweep_back = read_sweep_csv(sweep_text);
    REQUIRE(sweep_back.size() == 3);
    for (std::size_t i = 0; i < 3; ++i)
    {
        CHECK(sweep_back[i].n == sweep_rows[i].n);
        CHECK(sweep_back[i].success_rate == sweep_rows[i].success_rate);
        CHECK(sweep_back[i].mean_evals_successful == sweep_rows[i].mean_evals_successful);
        CHECK(sweep_back[i].corrected_evals == sweep_rows[i].corrected_evals);
    }

    std::vector<ScalabilityRecord> scale_rows(2);
    scale_rows[0] = {"Trap5", 20, "gi-gomea", "wvig", 2, 105.16, 59.0, 155.0, 1.0};
    scale_rows[1] = {"HIFF", 64, "gomea", "mi", std::nullopt, std::nullopt, std::nullopt, std::nullopt,
                     std::nullopt};
    std::stringstream scale_text;
    write_scale_csv(scale_text, scale_rows);
    CHECK(scale_text.str().rfind(std::string(scale_csv_header) + "\nTrap5,20,gi-gomea,wvig,2,105.16,59,155,1\n", 0) ==
          0);
    const auto scale_back = read_scale_csv(scale_text);
    REQUIRE(scale_back.size() == 2);
    for (std::size_t i = 0; i < 2; ++i)
    {
        CHECK(scale_back[i].problem == scale_rows[i].problem);
        CHECK(scale_back[i].ell == scale_rows[i].ell);
        CHECK(scale_back[i].algorithm == scale_rows[i].algorithm);
        CHECK(scale_back[i].dsm == scale_rows[i].dsm);
        CHECK(scale_back[i].n_opt == scale_rows[i].n_opt);
        CHECK(scale_back[i].corrected_evals == scale_rows[i].corrected_evals);
        CHECK(scale_back[i].p10 == scale_rows[i].p10);
        CHECK(scale_back[i].p90 == scale_rows[i].p90);
        CHECK(scale_back[i].success_rate == scale_rows[i].success_rate);
    }

    std::istringstream no_header("2,1,3,3\n");
    CHECK_THROWS_AS(read_sweep_csv(no_header), std::invalid_argument);
    std::istringstream short_row(std::string(sweep_csv_header) + "\n2,1\n");
    CHECK_THROWS_AS(read_sweep_csv(short_row), std::invalid_argument);
    std::istringstream bad_number(std::string(sweep_csv_header) + "\n2,abc,,\n");
    CHECK_THROWS_AS(read_sweep_csv(bad_number), std::invalid_argument);
}
