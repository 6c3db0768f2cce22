#pragma once

#include "gigomea/ea.hpp"
#include "gigomea/problems.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gigomea
{

struct RunRequest
{
    std::size_t population_size;
    std::uint64_t seed;
    // Position of the run within its batch; selects the instance on
    // instance-based problems.
    std::size_t run_index;
};

// Executes one optimisation run. Must be callable concurrently.
using RunFunction = std::function<RunRecord(const RunRequest &)>;

// Runs the configured EA on instances[run_index % instances.size()] with the
// instance's value-to-reach.
RunFunction make_ea_runner(std::shared_ptr<const std::vector<ProblemInstance>> instances, EaConfig base);

struct ProtocolSettings
{
    std::size_t runs = 50;
    // Successes out of `runs` needed for a population size to qualify.
    std::size_t required_successes = 49;
    std::size_t ladder_max = 8192;
    std::size_t repetitions = 5;
    std::size_t workers = 1;
    std::uint64_t master_seed = 0;
};

// 49 of 50, scaled to other run counts (rounded up).
std::size_t default_required_successes(std::size_t runs);

struct SweepRecord
{
    std::size_t n = 0;
    std::size_t runs = 0;
    std::size_t successes = 0;
    double success_rate = 0.0;
    std::optional<double> mean_evals_successful;
    // mean_evals_successful / success_rate; absent without successes.
    std::optional<double> corrected_evals;
};

struct ScalabilityRecord
{
    std::string problem;
    std::size_t ell = 0;
    std::string algorithm;
    std::string dsm;
    // Metric fields are absent when the protocol failed.
    std::optional<std::size_t> n_opt;
    std::optional<double> corrected_evals;
    std::optional<double> p10;
    std::optional<double> p90;
    std::optional<double> success_rate;
};

double corrected_evaluations(double mean_evals_successful, double success_rate);

// Nearest-rank percentile of an ascending sequence; pct in (0, 100].
double nearest_rank_percentile(std::span<const double> sorted, double pct);

SweepRecord summarize(std::size_t n, std::span<const RunRecord> records);

bool qualifies(const SweepRecord &record, const ProtocolSettings &settings);

// 2, 4, 8, ... up to and including max when max is a power of two.
std::vector<std::size_t> doubling_ladder(std::size_t max);

// Seed of one run: a pure function of (master, stage, n, run).
std::uint64_t run_seed(std::uint64_t master, std::uint64_t stage, std::size_t n, std::size_t run);

// Executes `runs` runs at population size n, possibly on several threads.
// Results are ordered by run index regardless of scheduling.
std::vector<RunRecord> execute_runs(const RunFunction &fn, std::size_t n, std::size_t runs, std::uint64_t master,
                                    std::uint64_t stage, std::size_t workers);

// Caches batch results per population size within one estimation stage.
class StageEvaluator
{
  public:
    StageEvaluator(const RunFunction &fn, const ProtocolSettings &settings, std::uint64_t stage)
        : fn_(fn), settings_(settings), stage_(stage)
    {
    }

    const SweepRecord &at(std::size_t n);
    // Corrected evaluations if n qualifies, +inf otherwise.
    double score(std::size_t n);
    std::size_t evaluated_count() const noexcept { return cache_.size(); }
    const std::map<std::size_t, SweepRecord> &evaluated() const noexcept { return cache_; }

  private:
    const RunFunction &fn_;
    const ProtocolSettings &settings_;
    std::uint64_t stage_;
    std::map<std::size_t, SweepRecord> cache_;
};

struct SweepResult
{
    std::vector<SweepRecord> records;
    // Qualifying ladder point with the fewest mean evaluations of successful runs.
    std::optional<std::size_t> estimate;
};

// Evaluates every ladder point.
SweepResult sweep(const RunFunction &fn, std::span<const std::size_t> ladder, const ProtocolSettings &settings,
                  std::uint64_t stage = 0);

std::optional<std::size_t> sweep_estimate(StageEvaluator &evaluator, const ProtocolSettings &settings);

// Interval search over [max(2, n_est/2), 2 n_est] minimising corrected
// evaluations; stops once the interval is at most max(2, n_est/16) wide.
std::size_t bisect_refine(StageEvaluator &evaluator, std::size_t n_est);

struct OptimalSizeEstimate
{
    // Refined size per repetition; absent where the sweep failed.
    std::vector<std::optional<std::size_t>> refined;
    // Rounded mean of the refined sizes if every repetition succeeded.
    std::optional<std::size_t> n_opt;
};

// Rounded mean of the refined sizes; absent if any repetition failed.
std::optional<std::size_t> combine_refined(std::span<const std::optional<std::size_t>> refined);

OptimalSizeEstimate estimate_optimal_n(const RunFunction &fn, const ProtocolSettings &settings);

struct FinalMeasurement
{
    SweepRecord summary;
    std::optional<double> p10;
    std::optional<double> p90;
};

FinalMeasurement final_measurement(const RunFunction &fn, std::size_t n_opt, const ProtocolSettings &settings);

// Estimation followed by the final measurement.
ScalabilityRecord scalability(const RunFunction &fn, const ProtocolSettings &settings, std::string problem,
                              std::size_t ell, std::string algorithm, std::string dsm);

// CSV tables.
inline constexpr const char *sweep_csv_header = "n,success_rate,mean_evals_successful,corrected_evals";
inline constexpr const char *scale_csv_header =
    "problem,ell,algorithm,dsm,n_opt,corrected_evals,p10,p90,success_rate";

std::string format_number(double value);
std::string to_csv_row(const SweepRecord &record);
std::string to_csv_row(const ScalabilityRecord &record);
void write_sweep_csv(std::ostream &out, std::span<const SweepRecord> records);
void write_scale_csv(std::ostream &out, std::span<const ScalabilityRecord> records, bool header = true);

// Parsers throw std::invalid_argument on malformed input. Fields that the
// sweep table does not carry (runs, successes) are left at zero.
std::vector<SweepRecord> read_sweep_csv(std::istream &in);
std::vector<ScalabilityRecord> read_scale_csv(std::istream &in);

} // namespace gigomea
