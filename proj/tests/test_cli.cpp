#include "gigomea/cli.hpp"
#include "gigomea/harness.hpp"
#include "gigomea/instance_io.hpp"

#include "oracles.hpp"

#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace gigomea;
namespace fs = std::filesystem;

namespace
{

struct Result
{
    int code;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = cli::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path &path)
{
    std::ifstream in(path, std::ios::binary);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::vector<std::string> lines(const std::string &text)
{
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
        out.push_back(line);
    return out;
}

class TempDir
{
  public:
    explicit TempDir(const std::string &name) : path_(fs::temp_directory_path() / name)
    {
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    const fs::path &path() const { return path_; }
    std::string operator/(const std::string &child) const { return (path_ / child).string(); }

  private:
    fs::path path_;
};

} // namespace

TEST_CASE("gen writes reproducible instance files")
{
    TempDir dir("gigomea_cli_gen");
    const auto first = invoke({"gen", "--problem", "NKS1", "--ell", "20", "--count", "50", "--seed", "7", "--out",
                            dir / "a"});
    REQUIRE(first.code == 0);
    const auto second = invoke({"gen", "--problem", "nks1", "--ell", "20", "--count", "50", "--seed", "7", "--out",
                             dir / "b"});
    REQUIRE(second.code == 0);

    std::vector<fs::path> files;
    for (const auto &entry : fs::directory_iterator(dir.path() / "a"))
        files.push_back(entry.path());
    CHECK(files.size() == 50);
    for (const auto &f : files)
        CHECK(slurp(f) == slurp(dir.path() / "b" / f.filename()));

    const auto loaded = load_instance_directory(dir.path() / "a");
    REQUIRE(loaded.size() == 50);
    CHECK(loaded[0].dimension() == 20);
    CHECK(loaded[0].vtr() == oracle::nks1_brute_force(loaded[0].nk()));
}

TEST_CASE("gen MaxCut embeds the exhaustive optimum")
{
    TempDir dir("gigomea_cli_maxcut");
    REQUIRE(invoke({"gen", "--problem", "MaxCutGeo", "--ell", "12", "--count", "3", "--seed", "1", "--out",
                 dir.path().string()})
                .code == 0);
    for (const auto &p : load_instance_directory(dir.path()))
    {
        REQUIRE(p.has_vtr());
        CHECK(p.vtr() == oracle::maxcut_brute_force(p.graph()));
    }
}

TEST_CASE("gen settles a best-known value for large MaxCut")
{
    TempDir dir("gigomea_cli_settle");
    REQUIRE(invoke({"gen", "--problem", "maxcut-full", "--ell", "30", "--count", "1", "--seed", "1", "--settle", "2",
                 "--budget", "20000", "--out", dir.path().string()})
                .code == 0);
    const auto p = load_instance_directory(dir.path()).front();
    REQUIRE(p.has_vtr());
    CHECK(p.vtr() > 0.0);
}

TEST_CASE("gen argument errors")
{
    CHECK(invoke({"gen", "--problem", "Sphere", "--ell", "10"}).code == cli::invalid_args);
    CHECK(invoke({"gen", "--problem", "trap", "--ell", "10"}).code == cli::invalid_args);
    CHECK(invoke({"gen", "--problem", "nks1"}).code == cli::invalid_args);
    CHECK(invoke({"gen", "--problem", "nks1", "--ell", "3"}).code == cli::invalid_args);
}

TEST_CASE("run")
{
    const auto ok = invoke({"run", "--problem", "trap", "--ell", "40", "--algorithm", "gi-gomea", "--dsm", "wvig",
                         "--n", "2", "--seed", "3"});
    CHECK(ok.code == 0);
    const auto rows = lines(ok.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == "success,evaluations,best_fitness,generations,seed");
    CHECK(rows[1].rfind("true,", 0) == 0);

    const auto again = invoke({"run", "--problem", "trap", "--ell", "40", "--algorithm", "gi-gomea", "--dsm", "wvig",
                            "--n", "2", "--seed", "3"});
    CHECK(again.out == ok.out);

    const auto starved = invoke({"run", "--problem", "trap", "--ell", "40", "--n", "8", "--budget", "10", "--seed", "1"});
    CHECK(starved.code == cli::optimum_not_found);
    const auto fields = lines(starved.out).at(1);
    CHECK(fields.rfind("false,", 0) == 0);
    CHECK(std::stoul(fields.substr(6)) <= 10);

    const auto unseeded = invoke({"run", "--problem", "hiff", "--ell", "16", "--n", "2", "--dsm", "wvig"});
    CHECK(unseeded.err.find("seed=") != std::string::npos);
}

TEST_CASE("run argument errors")
{
    CHECK(invoke({"run", "--problem", "trap", "--ell", "40"}).code == cli::invalid_args);
    CHECK(invoke({"run", "--problem", "trap", "--ell", "42", "--n", "4"}).code == cli::invalid_args);
    CHECK(invoke({"run", "--problem", "trap", "--ell", "40", "--n", "4", "--dsm", "bogus"}).code == cli::invalid_args);
    CHECK(invoke({"run", "--problem", "trap", "--ell", "40", "--n", "4", "--algorithm", "x"}).code ==
          cli::invalid_args);
    CHECK(invoke({"run", "--problem", "trap", "--ell", "40", "--n", "four"}).code == cli::invalid_args);
    CHECK(invoke({"run", "--ell", "40", "--n", "4"}).code == cli::invalid_args);
    CHECK(invoke({}).code == cli::invalid_args);
    CHECK(invoke({"frobnicate"}).code == cli::invalid_args);
    CHECK(invoke({"--help"}).code == cli::ok);
}

TEST_CASE("run on instance files")
{
    TempDir dir("gigomea_cli_instance");
    REQUIRE(invoke({"gen", "--problem", "nks1", "--ell", "15", "--count", "1", "--seed", "2", "--out",
                 dir.path().string()})
                .code == 0);
    const std::string file = (*fs::directory_iterator(dir.path())).path().string();
    const auto r = invoke({"run", "--instance", file, "--n", "32", "--seed", "1"});
    CHECK(r.code == 0);

    std::ofstream(dir / "broken.json") << "{\"kind\": \"NKS1\"";
    CHECK(invoke({"run", "--instance", dir / "broken.json", "--n", "4"}).code == cli::io_failure);
    CHECK(invoke({"run", "--instance", dir / "missing.json", "--n", "4"}).code == cli::io_failure);
}

TEST_CASE("sweep")
{
    const auto r = invoke({"sweep", "--problem", "trap", "--ell", "20", "--dsm", "wvig", "--n", "8", "--runs", "5",
                        "--seed", "1"});
    REQUIRE(r.code == 0);
    const auto rows = lines(r.out);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == sweep_csv_header);
    CHECK(rows[1].rfind("2,", 0) == 0);
    CHECK(rows[3].rfind("8,", 0) == 0);
}

TEST_CASE("scale, resume and report")
{
    TempDir dir("gigomea_cli_scale");
    const std::string out = dir / "scale.csv";
    CHECK(invoke({"scale", "--problem", "trap", "--ell", "20", "--n", "4"}).code == cli::invalid_args);

    const auto first = invoke({"scale", "--problem", "trap", "--ell", "20", "--dsm", "wvig", "--runs", "10", "--seed",
                            "4", "--ladder-max", "64", "--out", out});
    REQUIRE(first.code == 0);
    const auto text = slurp(out);
    const auto rows = lines(text);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == scale_csv_header);
    CHECK(rows[1].rfind("Trap5,20,gi-gomea,wvig,2,", 0) == 0);

    // A rerun skips the completed key and leaves the file untouched.
    const auto second = invoke({"scale", "--problem", "trap", "--ell", "20", "--dsm", "wvig", "--runs", "10", "--seed",
                             "4", "--ladder-max", "64", "--out", out});
    CHECK(second.code == 0);
    CHECK(slurp(out) == text);

    const auto report = invoke({"report", out});
    CHECK(report.code == 0);
    CHECK(report.out.find("Trap5") != std::string::npos);
    CHECK(report.out.find("n_opt") != std::string::npos);

    std::ofstream(dir / "junk.csv") << "a,b\n1,2\n";
    CHECK(invoke({"report", dir / "junk.csv"}).code == cli::io_failure);
    CHECK(invoke({"report", dir / "missing.csv"}).code == cli::io_failure);
}

TEST_CASE("options from a config file")
{
    TempDir dir("gigomea_cli_config");
    std::ofstream(dir / "run.toml") << "[run]\nproblem = \"hiff\"\nell = 16\nn = 2\ndsm = \"wvig\"\nseed = 9\n";
    const auto from_file = invoke({"--config", dir / "run.toml", "run"});
    CHECK(from_file.code == 0);
    const auto from_flags = invoke({"run", "--problem", "hiff", "--ell", "16", "--n", "2", "--dsm", "wvig", "--seed",
                                 "9"});
    CHECK(from_file.out == from_flags.out);
    const auto overridden = invoke({"--config", dir / "run.toml", "run", "--seed", "10"});
    CHECK(lines(overridden.out).at(1).substr(lines(overridden.out).at(1).rfind(',')) == ",10");
}

TEST_CASE("executable exit codes")
{
    const std::string exe = GIGOMEA_CLI_PATH;
    auto status = [&](const std::string &args) {
        const int raw = std::system((exe + " " + args + " >/dev/null 2>&1").c_str());
        return WEXITSTATUS(raw);
    };
    CHECK(status("run --problem trap --ell 20 --dsm wvig --n 2 --seed 1") == 0);
    CHECK(status("run --problem trap --ell 20 --n 4 --budget 5 --seed 1") == 1);
    CHECK(status("gen --problem nope --ell 10") == 2);
    CHECK(status("run --instance /nonexistent.json --n 4") == 3);
}
