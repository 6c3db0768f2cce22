#include "gigomea/cli.hpp"

#include "gigomea/ea.hpp"
#include "gigomea/harness.hpp"
#include "gigomea/instance_io.hpp"
#include "gigomea/problems.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

namespace gigomea::cli
{

namespace
{

namespace fs = std::filesystem;

class InvalidArgs : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

class IoFailure : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

struct Options
{
    std::string problem;
    std::vector<std::size_t> ells;
    std::optional<std::size_t> k;
    std::string instance;
    std::string algorithm = "gi-gomea";
    std::string dsm = "mi";
    std::optional<std::size_t> n;
    std::optional<std::uint64_t> budget;
    std::optional<std::size_t> runs;
    std::optional<std::uint64_t> seed;
    std::size_t workers = 1;
    std::string out;
    std::size_t count = 50;
    std::size_t settle = 0;
    std::size_t ladder_max = 8192;
    std::string report_file;
};

std::string normalize(const std::string &text)
{
    std::string key;
    for (char c : text)
        if (c != '-' && c != '_' && c != ' ')
            key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return key;
}

bool is_instance_kind(const std::string &key)
{
    return key == "nks1" || key == "maxcutfull" || key == "maxcutgeo";
}

std::uint64_t resolve_seed(Options &opt, std::ostream &err)
{
    if (!opt.seed)
    {
        std::random_device device;
        opt.seed = (static_cast<std::uint64_t>(device()) << 32) ^ device();
        err << "seed=" << *opt.seed << '\n';
    }
    return *opt.seed;
}

ProblemInstance make_benchmark(const std::string &key, std::size_t ell, std::optional<std::size_t> k)
{
    try
    {
        if (key == "trap")
            return ProblemInstance::trap(ell, k.value_or(5));
        if (key == "htrap")
            return ProblemInstance::htrap(ell, k.value_or(3));
        if (key == "hiff")
            return ProblemInstance::hiff(ell);
        if (key == "bimtrap")
            return ProblemInstance::bimtrap(ell, k.value_or(10));
        if (key == "asymtrap")
            return ProblemInstance::asymtrap(ell, k.value_or(5));
        if (key == "asymhtrap")
            return ProblemInstance::asymhtrap(ell, k.value_or(4));
    }
    catch (const std::invalid_argument &e)
    {
        throw InvalidArgs(e.what());
    }
    throw InvalidArgs("unknown problem '" + key + "'");
}

ProblemInstance generate_instance(const std::string &key, std::size_t ell, std::optional<std::size_t> k,
                                  std::uint64_t seed)
{
    try
    {
        if (key == "nks1")
            return gen_nks1(ell, k.value_or(5), seed);
        if (key == "maxcutfull")
            return gen_maxcut_full(ell, seed);
        if (key == "maxcutgeo")
            return gen_maxcut_geo(ell, seed);
    }
    catch (const std::invalid_argument &e)
    {
        throw InvalidArgs(e.what());
    }
    throw InvalidArgs("'" + key + "' has no instance generator (expected NKS1, MaxCutFull or MaxCutGeo)");
}

std::uint64_t instance_seed(std::uint64_t seed, std::size_t ell, std::size_t index)
{
    return derive_seed(seed, {0x1257ULL, ell, index});
}

std::vector<ProblemInstance> load_instances(const std::string &path)
{
    try
    {
        if (fs::is_directory(path))
        {
            auto instances = load_instance_directory(path);
            if (instances.empty())
                throw IoFailure("no *.json instance files in '" + path + "'");
            return instances;
        }
        return {load_instance(path)};
    }
    catch (const InstanceFormatError &e)
    {
        throw IoFailure(e.what());
    }
    catch (const fs::filesystem_error &e)
    {
        throw IoFailure(e.what());
    }
}

// Instances for one dimensionality: loaded from --instance, built directly
// for the analytic benchmarks, or generated from the seed otherwise.
std::vector<ProblemInstance> resolve_instances(const Options &opt, std::size_t ell, std::uint64_t seed,
                                               std::size_t generated_count)
{
    if (!opt.instance.empty())
        return load_instances(opt.instance);
    if (opt.problem.empty())
        throw InvalidArgs("--problem or --instance is required");
    const auto key = normalize(opt.problem);
    if (!is_instance_kind(key))
        return {make_benchmark(key, ell, opt.k)};

    std::vector<ProblemInstance> out;
    out.reserve(generated_count);
    for (std::size_t i = 0; i < generated_count; ++i)
        out.push_back(generate_instance(key, ell, opt.k, instance_seed(seed, ell, i)));
    return out;
}

EaConfig base_config(const Options &opt, std::uint64_t default_budget)
{
    EaConfig config;
    try
    {
        config.algorithm = parse_algorithm(opt.algorithm);
        config.dsm_kind = parse_dsm_kind(opt.dsm);
    }
    catch (const std::invalid_argument &e)
    {
        throw InvalidArgs(e.what());
    }
    config.budget = opt.budget.value_or(default_budget);
    if (config.budget < 1)
        throw InvalidArgs("--budget must be at least 1");
    return config;
}

std::size_t single_ell(const Options &opt)
{
    if (opt.ells.size() > 1)
        throw InvalidArgs("this command takes a single --ell");
    if (opt.ells.empty())
    {
        if (!opt.instance.empty())
            return 0;
        throw InvalidArgs("--ell is required");
    }
    return opt.ells.front();
}

class OutputTarget
{
  public:
    OutputTarget(const std::string &path, std::ostream &fallback, bool append = false)
    {
        if (path.empty())
        {
            stream_ = &fallback;
            return;
        }
        file_.open(path, append ? std::ios::app : std::ios::trunc);
        if (!file_)
            throw IoFailure("cannot open '" + path + "' for writing");
        stream_ = &file_;
    }
    std::ostream &stream() { return *stream_; }

  private:
    std::ofstream file_;
    std::ostream *stream_ = nullptr;
};

// --- commands -------------------------------------------------------------

double settle_vtr(const ProblemInstance &instance, std::size_t runs, std::uint64_t budget, std::uint64_t seed)
{
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < runs; ++r)
    {
        EaConfig config;
        config.algorithm = Algorithm::GIGOMEA;
        config.dsm_kind = DsmKind::MutualInformation;
        config.population_size = std::size_t{32} << (r % 4);
        config.budget = budget;
        config.vtr = std::numeric_limits<double>::infinity();
        config.seed = derive_seed(seed, {0x5e771eULL, r});
        best = std::max(best, run(config, instance).best_fitness);
    }
    return best;
}

int cmd_gen(Options &opt, std::ostream &out, std::ostream &err)
{
    const auto key = normalize(opt.problem);
    if (!is_instance_kind(key))
        throw InvalidArgs("gen supports NKS1, MaxCutFull and MaxCutGeo");
    if (opt.n)
        throw InvalidArgs("gen does not take --n");
    const std::size_t ell = single_ell(opt);
    const std::uint64_t seed = resolve_seed(opt, err);
    const fs::path dir = opt.out.empty() ? fs::path(".") : fs::path(opt.out);

    try
    {
        fs::create_directories(dir);
    }
    catch (const fs::filesystem_error &e)
    {
        throw IoFailure(e.what());
    }

    for (std::size_t i = 0; i < opt.count; ++i)
    {
        auto instance = generate_instance(key, ell, opt.k, instance_seed(seed, ell, i));
        if (!instance.has_vtr() && opt.settle > 0)
            instance.set_vtr(settle_vtr(instance, opt.settle, opt.budget.value_or(10'000'000), instance.seed()));

        std::ostringstream name;
        name << key << "_l" << ell << '_' << std::setw(3) << std::setfill('0') << i << ".json";
        const fs::path path = dir / name.str();
        try
        {
            save_instance(path, instance);
        }
        catch (const std::runtime_error &e)
        {
            throw IoFailure(e.what());
        }
        out << path.string() << ',' << (instance.has_vtr() ? format_number(instance.vtr()) : std::string()) << '\n';
    }
    return ok;
}

int cmd_run(Options &opt, std::ostream &out, std::ostream &err)
{
    if (!opt.n)
        throw InvalidArgs("run requires --n");
    if (*opt.n < 2)
        throw InvalidArgs("--n must be at least 2");
    const std::uint64_t seed = resolve_seed(opt, err);
    const std::size_t ell = single_ell(opt);
    const auto instances = resolve_instances(opt, ell, seed, 1);
    const auto &instance = instances.front();

    EaConfig config = base_config(opt, 10'000'000);
    config.population_size = *opt.n;
    config.seed = seed;
    config.vtr = instance.vtr();
    const auto record = run(config, instance);

    OutputTarget target(opt.out, out);
    target.stream() << "success,evaluations,best_fitness,generations,seed\n"
                    << (record.success ? "true" : "false") << ',' << record.evaluations_used << ','
                    << format_number(record.best_fitness) << ',' << record.generations << ',' << record.seed << '\n';
    return record.success ? ok : optimum_not_found;
}

ProtocolSettings protocol_settings(const Options &opt, std::uint64_t seed)
{
    ProtocolSettings settings;
    settings.runs = opt.runs.value_or(50);
    if (settings.runs < 1)
        throw InvalidArgs("--runs must be at least 1");
    settings.required_successes = default_required_successes(settings.runs);
    settings.workers = std::max<std::size_t>(1, opt.workers);
    settings.master_seed = seed;
    settings.ladder_max = opt.ladder_max;
    return settings;
}

int cmd_sweep(Options &opt, std::ostream &out, std::ostream &err)
{
    const std::uint64_t seed = resolve_seed(opt, err);
    const std::size_t ell = single_ell(opt);
    auto settings = protocol_settings(opt, seed);
    const auto instances =
        std::make_shared<const std::vector<ProblemInstance>>(resolve_instances(opt, ell, seed, settings.runs));
    // Preliminary-analysis defaults: ladder up to 4096, budget 1e8.
    const EaConfig config = base_config(opt, 100'000'000);
    const auto ladder = doubling_ladder(opt.n.value_or(4096));
    if (ladder.empty())
        throw InvalidArgs("--n must be at least 2");

    const auto result = sweep(make_ea_runner(instances, config), ladder, settings);
    OutputTarget target(opt.out, out);
    write_sweep_csv(target.stream(), result.records);
    return ok;
}

using ScaleKey = std::tuple<std::string, std::size_t, std::string, std::string>;

std::set<ScaleKey> completed_keys(const std::string &path)
{
    std::set<ScaleKey> keys;
    if (path.empty() || !fs::exists(path))
        return keys;
    std::ifstream in(path);
    if (!in)
        throw IoFailure("cannot read '" + path + "'");
    try
    {
        for (const auto &r : read_scale_csv(in))
            keys.emplace(r.problem, r.ell, r.algorithm, r.dsm);
    }
    catch (const std::invalid_argument &e)
    {
        throw IoFailure("existing output '" + path + "' is not a scale table: " + e.what());
    }
    return keys;
}

int cmd_scale(Options &opt, std::ostream &out, std::ostream &err)
{
    if (opt.n)
        throw InvalidArgs("scale estimates the population size itself; --n is not allowed");
    const std::uint64_t seed = resolve_seed(opt, err);
    const auto settings = protocol_settings(opt, seed);
    const EaConfig config = base_config(opt, 10'000'000);
    std::vector<std::size_t> ells = opt.ells;
    if (ells.empty())
    {
        if (opt.instance.empty())
            throw InvalidArgs("--ell is required");
        ells.push_back(0);
    }

    const auto done = completed_keys(opt.out);
    const bool write_header = opt.out.empty() || !fs::exists(opt.out) || fs::file_size(opt.out) == 0;
    OutputTarget target(opt.out, out, true);
    if (write_header)
        target.stream() << scale_csv_header << '\n';

    for (auto ell : ells)
    {
        const auto instances =
            std::make_shared<const std::vector<ProblemInstance>>(resolve_instances(opt, ell, seed, settings.runs));
        const auto &first = instances->front();
        ScaleKey key{first.name(), first.dimension(), to_string(config.algorithm), to_string(config.dsm_kind)};
        if (done.count(key))
        {
            err << "skipping completed " << std::get<0>(key) << " ell=" << std::get<1>(key) << '\n';
            continue;
        }
        const auto record = scalability(make_ea_runner(instances, config), settings, std::get<0>(key),
                                        std::get<1>(key), std::get<2>(key), std::get<3>(key));
        target.stream() << to_csv_row(record) << '\n';
        target.stream().flush();
    }
    return ok;
}

void print_table(std::ostream &out, const std::vector<std::vector<std::string>> &rows)
{
    std::vector<std::size_t> width;
    for (const auto &row : rows)
    {
        width.resize(std::max(width.size(), row.size()), 0);
        for (std::size_t c = 0; c < row.size(); ++c)
            width[c] = std::max(width[c], row[c].size());
    }
    for (const auto &row : rows)
    {
        for (std::size_t c = 0; c < row.size(); ++c)
            out << (c ? "  " : "") << std::setw(static_cast<int>(width[c])) << std::left << row[c];
        out << '\n';
    }
}

int cmd_report(Options &opt, std::ostream &out, std::ostream &)
{
    std::ifstream in(opt.report_file);
    if (!in)
        throw IoFailure("cannot read '" + opt.report_file + "'");
    std::string header;
    std::getline(in, header);
    if (!header.empty() && header.back() == '\r')
        header.pop_back();
    in.clear();
    in.seekg(0);

    auto opt_str = [](const std::optional<double> &v) { return v ? format_number(*v) : std::string("-"); };
    std::vector<std::vector<std::string>> rows;
    try
    {
        if (header == sweep_csv_header)
        {
            rows.push_back({"n", "success", "mean evals", "corrected"});
            for (const auto &r : read_sweep_csv(in))
                rows.push_back({std::to_string(r.n), format_number(r.success_rate), opt_str(r.mean_evals_successful),
                                opt_str(r.corrected_evals)});
        }
        else if (header == scale_csv_header)
        {
            rows.push_back({"problem", "ell", "algorithm", "dsm", "n_opt", "corrected", "p10", "p90", "success"});
            for (const auto &r : read_scale_csv(in))
                rows.push_back({r.problem, std::to_string(r.ell), r.algorithm, r.dsm,
                                r.n_opt ? std::to_string(*r.n_opt) : std::string("failed"), opt_str(r.corrected_evals),
                                opt_str(r.p10), opt_str(r.p90), opt_str(r.success_rate)});
        }
        else
        {
            throw IoFailure("'" + opt.report_file + "' is neither a sweep nor a scale table");
        }
    }
    catch (const std::invalid_argument &e)
    {
        throw IoFailure(e.what());
    }
    print_table(out, rows);
    return ok;
}

void add_problem_options(CLI::App &cmd, Options &opt, bool multiple_ells)
{
    cmd.add_option("--problem", opt.problem,
                   "trap, htrap, hiff, bimtrap, asymtrap, asymhtrap, nks1, maxcut-full, maxcut-geo");
    if (multiple_ells)
        cmd.add_option("--ell", opt.ells, "Problem dimensionality (repeatable)")->delimiter(',');
    else
        cmd.add_option("--ell", opt.ells, "Problem dimensionality")->expected(1);
    cmd.add_option("--k", opt.k, "Block or subfunction size");
    cmd.add_option("--instance", opt.instance, "Instance file, or directory of instance files");
}

void add_algorithm_options(CLI::App &cmd, Options &opt)
{
    cmd.add_option("--algorithm", opt.algorithm, "gomea or gi-gomea")->capture_default_str();
    cmd.add_option("--dsm", opt.dsm, "mi, ddsm or wvig")->capture_default_str();
    cmd.add_option("--budget", opt.budget, "Evaluation budget per run");
}

} // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
{
    CLI::App app{"GOMEA and gene-invariant GOMEA on discrete benchmark problems"};
    app.set_config("--config", "", "TOML/INI file with option defaults; flags override it");
    app.require_subcommand(1);

    Options opt;

    auto *gen = app.add_subcommand("gen", "Write NK-S1 or MaxCut instance files");
    add_problem_options(*gen, opt, false);
    gen->add_option("--count", opt.count, "Number of instances")->capture_default_str();
    gen->add_option("--seed", opt.seed, "Master seed");
    gen->add_option("--out", opt.out, "Output directory");
    gen->add_option("--settle", opt.settle, "Long runs used to record a best-known value when no exact optimum is computed");
    gen->add_option("--budget", opt.budget, "Evaluation budget of each settle run");
    gen->add_option("--n", opt.n)->group("");

    auto *run_cmd = app.add_subcommand("run", "Single optimisation run");
    add_problem_options(*run_cmd, opt, false);
    add_algorithm_options(*run_cmd, opt);
    run_cmd->add_option("--n", opt.n, "Population size");
    run_cmd->add_option("--seed", opt.seed, "Run seed");
    run_cmd->add_option("--out", opt.out, "Write the result row to this file");

    auto *sweep_cmd = app.add_subcommand("sweep", "Population-size sweep over 2, 4, ..., n");
    add_problem_options(*sweep_cmd, opt, false);
    add_algorithm_options(*sweep_cmd, opt);
    sweep_cmd->add_option("--n", opt.n, "Largest population size of the ladder (default 4096)");
    sweep_cmd->add_option("--runs", opt.runs, "Runs per population size (default 50)");
    sweep_cmd->add_option("--seed", opt.seed, "Master seed");
    sweep_cmd->add_option("--workers", opt.workers, "Parallel runs")->capture_default_str();
    sweep_cmd->add_option("--out", opt.out, "CSV output file");

    auto *scale_cmd = app.add_subcommand("scale", "Optimal population size estimation and final measurement");
    add_problem_options(*scale_cmd, opt, true);
    add_algorithm_options(*scale_cmd, opt);
    scale_cmd->add_option("--n", opt.n)->group("");
    scale_cmd->add_option("--runs", opt.runs, "Runs per population size (default 50)");
    scale_cmd->add_option("--seed", opt.seed, "Master seed");
    scale_cmd->add_option("--workers", opt.workers, "Parallel runs")->capture_default_str();
    scale_cmd->add_option("--out", opt.out, "CSV output file; completed rows are skipped on rerun");
    scale_cmd->add_option("--ladder-max", opt.ladder_max, "Largest population size of the initial sweep")
        ->capture_default_str();

    auto *report_cmd = app.add_subcommand("report", "Pretty-print a sweep or scale CSV table");
    report_cmd->add_option("file", opt.report_file, "CSV file")->required();

    try
    {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    }
    catch (const CLI::CallForHelp &e)
    {
        app.exit(e, out, err);
        return ok;
    }
    catch (const CLI::CallForAllHelp &e)
    {
        app.exit(e, out, err);
        return ok;
    }
    catch (const CLI::ParseError &e)
    {
        app.exit(e, out, err);
        return invalid_args;
    }

    try
    {
        if (gen->parsed())
            return cmd_gen(opt, out, err);
        if (run_cmd->parsed())
            return cmd_run(opt, out, err);
        if (sweep_cmd->parsed())
            return cmd_sweep(opt, out, err);
        if (scale_cmd->parsed())
            return cmd_scale(opt, out, err);
        if (report_cmd->parsed())
            return cmd_report(opt, out, err);
    }
    catch (const InvalidArgs &e)
    {
        err << "error: " << e.what() << '\n';
        return invalid_args;
    }
    catch (const IoFailure &e)
    {
        err << "error: " << e.what() << '\n';
        return io_failure;
    }
    catch (const std::invalid_argument &e)
    {
        err << "error: " << e.what() << '\n';
        return invalid_args;
    }
    return invalid_args;
}

} // namespace gigomea::cli
