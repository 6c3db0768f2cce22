#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <initializer_list>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gigomea
{

// Fixed-length binary solution vector. Length is set at construction.
class Genotype
{
  public:
    Genotype() = default;
    explicit Genotype(std::size_t length) : bits_(length, 0) {}
    explicit Genotype(std::vector<std::uint8_t> bits);

    // Parses a string of '0'/'1' characters; throws std::invalid_argument otherwise.
    static Genotype from_string(std::string_view text);

    std::size_t size() const noexcept { return bits_.size(); }
    std::uint8_t operator[](std::size_t i) const noexcept { return bits_[i]; }
    void set(std::size_t i, bool value) noexcept { bits_[i] = value ? 1 : 0; }
    void flip(std::size_t i) noexcept { bits_[i] ^= 1; }

    std::span<const std::uint8_t> bits() const noexcept { return bits_; }
    std::string to_string() const;

    Genotype complement() const;

    friend bool operator==(const Genotype &, const Genotype &) = default;

  private:
    std::vector<std::uint8_t> bits_;
};

std::size_t unitation(std::span<const std::uint8_t> bits) noexcept;
inline std::size_t unitation(const Genotype &g) noexcept
{
    return unitation(g.bits());
}

// Anything that maps a genotype to a fitness value (maximisation).
class Objective
{
  public:
    virtual ~Objective() = default;
    virtual std::size_t dimension() const = 0;
    virtual double evaluate(const Genotype &g) const = 0;
};

struct Individual
{
    Genotype genotype;
    double fitness = 0.0;
    bool evaluated = false;

    Individual() = default;
    explicit Individual(Genotype g) : genotype(std::move(g)) {}

    // Marks the cached fitness stale after the genotype was modified.
    void invalidate() noexcept { evaluated = false; }
};

using Population = std::vector<Individual>;

// Number of ones at every locus across the population.
std::vector<std::size_t> allele_counts(const Population &population);

// Thrown when an evaluation would exceed the budget of the ledger.
class BudgetExhausted : public std::exception
{
  public:
    const char *what() const noexcept override { return "evaluation budget exhausted"; }
};

// Thrown by the ledger right after an evaluation reaches the value-to-reach.
class TargetReached : public std::exception
{
  public:
    const char *what() const noexcept override { return "value-to-reach attained"; }
};

// Per-run evaluation counter. Every call to the objective goes through here.
class EvaluationLedger
{
  public:
    static constexpr std::uint64_t unlimited = std::numeric_limits<std::uint64_t>::max();

    explicit EvaluationLedger(std::uint64_t budget = unlimited,
                              std::optional<double> target = std::nullopt)
        : budget_(budget), target_(target)
    {
    }

    // Returns the cached fitness when available, otherwise evaluates and
    // stores it. Throws BudgetExhausted before the call if the budget is
    // spent and TargetReached after a call that attains the target.
    double evaluate(Individual &ind, const Objective &objective);

    std::uint64_t used() const noexcept { return used_; }
    std::uint64_t budget() const noexcept { return budget_; }
    bool exhausted() const noexcept { return used_ >= budget_; }

    // Best fitness over all evaluations so far; -inf before the first one.
    double best() const noexcept { return best_; }
    bool target_reached() const noexcept { return target_ && best_ >= *target_; }

  private:
    std::uint64_t used_ = 0;
    std::uint64_t budget_;
    std::optional<double> target_;
    double best_ = -std::numeric_limits<double>::infinity();
};

// Seeded random stream. Same seed, same draws.
class Rng
{
  public:
    using engine_type = std::mt19937_64;

    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }
    engine_type &engine() noexcept { return engine_; }

    std::uint64_t next() { return engine_(); }
    // Uniform in [0, bound).
    std::size_t index(std::size_t bound);
    // Uniform in [0, 1).
    double uniform();
    bool coin() { return (engine_() >> 63) != 0; }

    template <typename T> void shuffle(std::span<T> values)
    {
        std::shuffle(values.begin(), values.end(), engine_);
    }
    template <typename T> void shuffle(std::vector<T> &values)
    {
        std::shuffle(values.begin(), values.end(), engine_);
    }

  private:
    std::uint64_t seed_;
    engine_type engine_;
};

// SplitMix64 finaliser; used to derive independent child seeds.
std::uint64_t mix_seed(std::uint64_t value) noexcept;
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept;

} // namespace gigomea
