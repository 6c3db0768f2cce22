#pragma once

#include "gigomea/core.hpp"
#include "gigomea/dsm.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace gigomea
{

enum class ProblemKind
{
    Trap,
    HTrap,
    HIFF,
    BimTrap,
    AsymTrap,
    AsymHTrap,
    NKS1,
    MaxCut
};

enum class MaxCutVariant
{
    Full,
    Geo
};

// Node value in the symbol tree of the hierarchical problems.
enum class Symbol : std::uint8_t
{
    Zero,
    One,
    Null
};

class UnsupportedKind : public std::logic_error
{
  public:
    using std::logic_error::logic_error;
};

// Subfunctions. All return values in [0, 1].
double trap_sub(std::size_t ones, std::size_t k);
double bimtrap_sub(std::size_t ones, std::size_t k);
double asymtrap_sub(std::span<const std::uint8_t> block);
// Hierarchical trap group score before the k^h weight; `top` selects w(h) = 0.9.
double htrap_sub(std::span<const Symbol> group, bool top);
double asymhtrap_sub(std::span<const Symbol> group);

double eval_trapk(const Genotype &g, std::size_t k);
double eval_bimtrapk(const Genotype &g, std::size_t k);
double eval_asymtrapk(const Genotype &g, std::size_t k);
double eval_htrapk(const Genotype &g, std::size_t k);
double eval_asymhtrapk(const Genotype &g, std::size_t k = 4);
double eval_hiff(const Genotype &g);

// Subfunction i of an NK-S1 landscape covers genes [i, i + k). Table entries
// are indexed with gene i as the most significant bit.
struct NkTables
{
    std::size_t k = 5;
    std::vector<std::vector<double>> tables;

    std::size_t dimension() const noexcept { return tables.empty() ? 0 : tables.size() + k - 1; }
};

double eval_nks1(const Genotype &g, const NkTables &nk);
// Exact maximum by dynamic programming over the (k-1)-bit window state.
double nks1_optimum(const NkTables &nk);

// Fully connected weighted graph stored as a dense symmetric matrix.
class MaxCutGraph
{
  public:
    MaxCutGraph() = default;
    explicit MaxCutGraph(std::size_t vertices) : n_(vertices), w_(vertices * vertices, 0.0) {}

    std::size_t vertices() const noexcept { return n_; }
    double weight(std::size_t i, std::size_t j) const noexcept { return w_[i * n_ + j]; }
    void set_weight(std::size_t i, std::size_t j, double w) noexcept
    {
        w_[i * n_ + j] = w;
        w_[j * n_ + i] = w;
    }

  private:
    std::size_t n_ = 0;
    std::vector<double> w_;
};

double eval_maxcut(const Genotype &g, const MaxCutGraph &graph);
// Exhaustive maximum cut (Gray-code walk with vertex 0 fixed). Intended for
// graphs of at most ~30 vertices.
double maxcut_exhaustive_optimum(const MaxCutGraph &graph);

// Largest vertex count for which generators compute the exact optimum.
inline constexpr std::size_t maxcut_exhaustive_limit = 24;

class ProblemInstance : public Objective
{
  public:
    static ProblemInstance trap(std::size_t ell, std::size_t k = 5);
    static ProblemInstance htrap(std::size_t ell, std::size_t k = 3);
    static ProblemInstance hiff(std::size_t ell);
    static ProblemInstance bimtrap(std::size_t ell, std::size_t k = 10);
    static ProblemInstance asymtrap(std::size_t ell, std::size_t k = 5);
    static ProblemInstance asymhtrap(std::size_t ell, std::size_t k = 4);
    // The optimum is computed by dynamic programming when absent.
    static ProblemInstance nks1(NkTables tables, std::uint64_t seed,
                                std::optional<double> vtr = std::nullopt);
    // vtr may be absent for graphs too large to solve exhaustively.
    static ProblemInstance maxcut(MaxCutGraph graph, MaxCutVariant variant, std::uint64_t seed,
                                  std::optional<double> vtr);

    ProblemKind kind() const noexcept { return kind_; }
    std::size_t dimension() const override { return ell_; }
    std::size_t k() const noexcept { return k_; }
    std::uint64_t seed() const noexcept { return seed_; }

    bool has_vtr() const noexcept { return vtr_.has_value(); }
    // +inf when no value-to-reach is known.
    double vtr() const noexcept { return vtr_.value_or(std::numeric_limits<double>::infinity()); }
    void set_vtr(std::optional<double> vtr) { vtr_ = vtr; }

    double evaluate(const Genotype &g) const override;

    // Weighted variable interaction graph as a DSM.
    Dsm wvig_dsm() const;

    // Display name, e.g. "Trap5", "HIFF", "MaxCut-Geo".
    std::string name() const;

    const NkTables &nk() const;
    const MaxCutGraph &graph() const;
    MaxCutVariant maxcut_variant() const noexcept { return variant_; }

  private:
    ProblemInstance(ProblemKind kind, std::size_t ell, std::size_t k, std::optional<double> vtr)
        : kind_(kind), ell_(ell), k_(k), vtr_(vtr)
    {
    }

    ProblemKind kind_;
    std::size_t ell_;
    std::size_t k_;
    std::optional<double> vtr_;
    std::uint64_t seed_ = 0;
    MaxCutVariant variant_ = MaxCutVariant::Full;
    std::variant<std::monostate, NkTables, MaxCutGraph> payload_;
};

// Instance generators.
ProblemInstance gen_nks1(std::size_t ell, std::size_t k, std::uint64_t seed);
// Exact optimum attached when ell <= maxcut_exhaustive_limit.
ProblemInstance gen_maxcut_full(std::size_t ell, std::uint64_t seed);
ProblemInstance gen_maxcut_geo(std::size_t ell, std::uint64_t seed);
// Floored Euclidean distance between two points.
double geo_weight(std::pair<double, double> a, std::pair<double, double> b);

// Beta(alpha, 1) sample by inverse CDF.
double sample_beta_alpha_one(Rng &rng, double alpha);

// Hierarchical helpers.
// Returns D if ell == base^D for some D >= 1, otherwise 0.
std::size_t exact_levels(std::size_t ell, std::size_t base);

std::string to_string(ProblemKind kind);

} // namespace gigomea
