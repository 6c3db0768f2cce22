#include "gigomea/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace gigomea
{

namespace
{

constexpr std::uint64_t final_stage = 0xF1A1;

} // namespace

RunFunction make_ea_runner(std::shared_ptr<const std::vector<ProblemInstance>> instances, EaConfig base)
{
    if (!instances || instances->empty())
        throw std::invalid_argument("at least one problem instance is required");
    return [instances = std::move(instances), base](const RunRequest &request) {
        const auto &instance = (*instances)[request.run_index % instances->size()];
        EaConfig config = base;
        config.population_size = request.population_size;
        config.seed = request.seed;
        config.vtr = instance.vtr();
        return run(config, instance);
    };
}

std::size_t default_required_successes(std::size_t runs)
{
    return (runs * 49 + 49) / 50;
}

double corrected_evaluations(double mean_evals_successful, double success_rate)
{
    if (!(success_rate > 0.0))
        throw std::invalid_argument("corrected evaluations need a positive success rate");
    return mean_evals_successful / success_rate;
}

double nearest_rank_percentile(std::span<const double> sorted, double pct)
{
    if (sorted.empty())
        throw std::invalid_argument("percentile of an empty sample");
    const auto rank = static_cast<std::size_t>(std::ceil(pct / 100.0 * static_cast<double>(sorted.size())));
    return sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
}

SweepRecord summarize(std::size_t n, std::span<const RunRecord> records)
{
    SweepRecord out;
    out.n = n;
    out.runs = records.size();
    double total = 0.0;
    for (const auto &r : records)
    {
        if (r.success)
        {
            ++out.successes;
            total += static_cast<double>(r.evaluations_used);
        }
    }
    out.success_rate = out.runs ? static_cast<double>(out.successes) / static_cast<double>(out.runs) : 0.0;
    if (out.successes > 0)
    {
        out.mean_evals_successful = total / static_cast<double>(out.successes);
        out.corrected_evals = corrected_evaluations(*out.mean_evals_successful, out.success_rate);
    }
    return out;
}

bool qualifies(const SweepRecord &record, const ProtocolSettings &settings)
{
    return record.successes >= settings.required_successes && record.successes > 0;
}

std::vector<std::size_t> doubling_ladder(std::size_t max)
{
    std::vector<std::size_t> ladder;
    for (std::size_t n = 2; n <= max; n *= 2)
        ladder.push_back(n);
    return ladder;
}

std::uint64_t run_seed(std::uint64_t master, std::uint64_t stage, std::size_t n, std::size_t run)
{
    return derive_seed(master, {stage, n, run});
}

std::vector<RunRecord> execute_runs(const RunFunction &fn, std::size_t n, std::size_t runs, std::uint64_t master,
                                    std::uint64_t stage, std::size_t workers)
{
    std::vector<RunRecord> records(runs);
    auto job = [&](std::size_t r) { records[r] = fn({n, run_seed(master, stage, n, r), r}); };

    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(runs, 1));
    if (workers == 1)
    {
        for (std::size_t r = 0; r < runs; ++r)
            job(r);
        return records;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
    {
        pool.emplace_back([&, w] {
            (void)w;
            for (std::size_t r = next++; r < runs; r = next++)
            {
                try
                {
                    job(r);
                }
                catch (...)
                {
                    if (!failed.exchange(true))
                        failure = std::current_exception();
                    next = runs;
                }
            }
        });
    }
    pool.clear();
    if (failure)
        std::rethrow_exception(failure);
    return records;
}

const SweepRecord &StageEvaluator::at(std::size_t n)
{
    auto it = cache_.find(n);
    if (it == cache_.end())
    {
        const auto records = execute_runs(fn_, n, settings_.runs, settings_.master_seed, stage_, settings_.workers);
        it = cache_.emplace(n, summarize(n, records)).first;
    }
    return it->second;
}

double StageEvaluator::score(std::size_t n)
{
    const auto &record = at(n);
    if (!qualifies(record, settings_))
        return std::numeric_limits<double>::infinity();
    return *record.corrected_evals;
}

SweepResult sweep(const RunFunction &fn, std::span<const std::size_t> ladder, const ProtocolSettings &settings,
                  std::uint64_t stage)
{
    StageEvaluator evaluator(fn, settings, stage);
    SweepResult out;
    for (auto n : ladder)
    {
        const auto &record = evaluator.at(n);
        out.records.push_back(record);
        if (!qualifies(record, settings))
            continue;
        if (!out.estimate || *record.mean_evals_successful < *evaluator.at(*out.estimate).mean_evals_successful)
            out.estimate = n;
    }
    return out;
}

std::optional<std::size_t> sweep_estimate(StageEvaluator &evaluator, const ProtocolSettings &settings)
{
    std::optional<std::size_t> best;
    for (auto n : doubling_ladder(settings.ladder_max))
    {
        const auto &record = evaluator.at(n);
        if (!qualifies(record, settings))
            continue;
        if (!best || *record.mean_evals_successful < *evaluator.at(*best).mean_evals_successful)
            best = n;
    }
    return best;
}

std::size_t bisect_refine(StageEvaluator &evaluator, std::size_t n_est)
{
    std::size_t lo = std::max<std::size_t>(2, n_est / 2);
    std::size_t hi = 2 * n_est;
    const double stop_width = std::max(2.0, static_cast<double>(n_est) / 16.0);

    while (static_cast<double>(hi - lo) > stop_width)
    {
        const std::size_t third = (hi - lo) / 3;
        const std::size_t a = lo + third;
        const std::size_t b = hi - third;
        if (evaluator.score(a) <= evaluator.score(b))
            hi = b;
        else
            lo = a;
    }

    // Best-scoring size among everything evaluated in the search range;
    // ties go to the smaller population.
    const std::size_t range_lo = std::max<std::size_t>(2, n_est / 2);
    const std::size_t range_hi = 2 * n_est;
    std::size_t best = n_est;
    double best_score = evaluator.score(n_est);
    for (const auto &[n, record] : evaluator.evaluated())
    {
        if (n < range_lo || n > range_hi)
            continue;
        const double s = evaluator.score(n);
        if (s < best_score || (s == best_score && n < best))
        {
            best = n;
            best_score = s;
        }
    }
    return best;
}

std::optional<std::size_t> combine_refined(std::span<const std::optional<std::size_t>> refined)
{
    if (refined.empty())
        return std::nullopt;
    double total = 0.0;
    for (const auto &r : refined)
    {
        if (!r)
            return std::nullopt;
        total += static_cast<double>(*r);
    }
    return static_cast<std::size_t>(std::lround(total / static_cast<double>(refined.size())));
}

OptimalSizeEstimate estimate_optimal_n(const RunFunction &fn, const ProtocolSettings &settings)
{
    OptimalSizeEstimate out;
    for (std::size_t rep = 0; rep < settings.repetitions; ++rep)
    {
        StageEvaluator evaluator(fn, settings, rep);
        const auto n_est = sweep_estimate(evaluator, settings);
        if (n_est)
            out.refined.emplace_back(bisect_refine(evaluator, *n_est));
        else
            out.refined.emplace_back();
    }
    out.n_opt = combine_refined(out.refined);
    return out;
}

FinalMeasurement final_measurement(const RunFunction &fn, std::size_t n_opt, const ProtocolSettings &settings)
{
    const auto records = execute_runs(fn, n_opt, settings.runs, settings.master_seed, final_stage, settings.workers);
    FinalMeasurement out;
    out.summary = summarize(n_opt, records);

    std::vector<double> evals;
    for (const auto &r : records)
        if (r.success)
            evals.push_back(static_cast<double>(r.evaluations_used));
    std::sort(evals.begin(), evals.end());
    if (!evals.empty())
    {
        out.p10 = nearest_rank_percentile(evals, 10.0);
        out.p90 = nearest_rank_percentile(evals, 90.0);
    }
    return out;
}

ScalabilityRecord scalability(const RunFunction &fn, const ProtocolSettings &settings, std::string problem,
                              std::size_t ell, std::string algorithm, std::string dsm)
{
    ScalabilityRecord out;
    out.problem = std::move(problem);
    out.ell = ell;
    out.algorithm = std::move(algorithm);
    out.dsm = std::move(dsm);

    const auto estimate = estimate_optimal_n(fn, settings);
    if (!estimate.n_opt)
        return out;

    const auto final = final_measurement(fn, *estimate.n_opt, settings);
    out.n_opt = estimate.n_opt;
    out.success_rate = final.summary.success_rate;
    out.corrected_evals = final.summary.corrected_evals;
    out.p10 = final.p10;
    out.p90 = final.p90;
    return out;
}

// CSV

std::string format_number(double value)
{
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, result.ptr);
}

namespace
{

std::string optional_field(const std::optional<double> &value)
{
    return value ? format_number(*value) : std::string();
}

std::vector<std::string> split_fields(const std::string &line)
{
    std::vector<std::string> fields;
    std::string field;
    std::istringstream stream(line);
    while (std::getline(stream, field, ','))
        fields.push_back(field);
    if (!line.empty() && line.back() == ',')
        fields.emplace_back();
    return fields;
}

double parse_double(const std::string &text)
{
    double value = 0.0;
    const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
    if (result.ec != std::errc() || result.ptr != text.data() + text.size())
        throw std::invalid_argument("not a number: '" + text + "'");
    return value;
}

std::size_t parse_size(const std::string &text)
{
    std::size_t value = 0;
    const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
    if (result.ec != std::errc() || result.ptr != text.data() + text.size())
        throw std::invalid_argument("not an integer: '" + text + "'");
    return value;
}

std::optional<double> parse_optional(const std::string &text)
{
    if (text.empty())
        return std::nullopt;
    return parse_double(text);
}

template <typename Parse>
auto read_table(std::istream &in, const char *header, std::size_t columns, Parse parse)
{
    std::vector<decltype(parse(std::vector<std::string>{}))> out;
    std::string line;
    bool seen_header = false;
    while (std::getline(in, line))
    {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (line == header)
        {
            seen_header = true;
            continue;
        }
        if (!seen_header)
            throw std::invalid_argument("CSV table does not start with the expected header");
        auto fields = split_fields(line);
        if (fields.size() != columns)
            throw std::invalid_argument("CSV row has " + std::to_string(fields.size()) + " fields, expected " +
                                        std::to_string(columns));
        out.push_back(parse(fields));
    }
    return out;
}

} // namespace

std::string to_csv_row(const SweepRecord &record)
{
    return std::to_string(record.n) + ',' + format_number(record.success_rate) + ',' +
           optional_field(record.mean_evals_successful) + ',' + optional_field(record.corrected_evals);
}

std::string to_csv_row(const ScalabilityRecord &record)
{
    return record.problem + ',' + std::to_string(record.ell) + ',' + record.algorithm + ',' + record.dsm + ',' +
           (record.n_opt ? std::to_string(*record.n_opt) : std::string()) + ',' +
           optional_field(record.corrected_evals) + ',' + optional_field(record.p10) + ',' +
           optional_field(record.p90) + ',' + optional_field(record.success_rate);
}

void write_sweep_csv(std::ostream &out, std::span<const SweepRecord> records)
{
    out << sweep_csv_header << '\n';
    for (const auto &r : records)
        out << to_csv_row(r) << '\n';
}

void write_scale_csv(std::ostream &out, std::span<const ScalabilityRecord> records, bool header)
{
    if (header)
        out << scale_csv_header << '\n';
    for (const auto &r : records)
        out << to_csv_row(r) << '\n';
}

std::vector<SweepRecord> read_sweep_csv(std::istream &in)
{
    return read_table(in, sweep_csv_header, 4, [](const std::vector<std::string> &f) {
        SweepRecord r;
        r.n = parse_size(f[0]);
        r.success_rate = parse_double(f[1]);
        r.mean_evals_successful = parse_optional(f[2]);
        r.corrected_evals = parse_optional(f[3]);
        return r;
    });
}

std::vector<ScalabilityRecord> read_scale_csv(std::istream &in)
{
    return read_table(in, scale_csv_header, 9, [](const std::vector<std::string> &f) {
        ScalabilityRecord r;
        r.problem = f[0];
        r.ell = parse_size(f[1]);
        r.algorithm = f[2];
        r.dsm = f[3];
        if (!f[4].empty())
            r.n_opt = parse_size(f[4]);
        r.corrected_evals = parse_optional(f[5]);
        r.p10 = parse_optional(f[6]);
        r.p90 = parse_optional(f[7]);
        r.success_rate = parse_optional(f[8]);
        return r;
    });
}

} // namespace gigomea
