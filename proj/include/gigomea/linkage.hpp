#pragma once

#include "gigomea/core.hpp"
#include "gigomea/dsm.hpp"
#include "gigomea/problems.hpp"

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace gigomea
{

enum class DsmKind
{
    MutualInformation,
    Distance,
    Wvig
};

std::string to_string(DsmKind kind);
// Accepts "mi", "ddsm", "wvig"; throws std::invalid_argument otherwise.
DsmKind parse_dsm_kind(const std::string &text);

// Pairwise mutual information (natural log) over the population, or over the
// ceil(n/2) fittest members when select_best_half is set. Fitness ties are
// broken by lower index.
Dsm mi_dsm(const Population &population, bool select_best_half);

// dsm(i, j) = ell - |i - j|.
Dsm distance_dsm(std::size_t ell);

using LinkageSet = std::vector<std::size_t>;

struct LinkageMerge
{
    static constexpr std::size_t root = std::numeric_limits<std::size_t>::max();

    // Indices into LinkageModel::sets; parent is `root` for the final merge.
    std::size_t parent;
    std::size_t left;
    std::size_t right;
};

// Linkage tree without its root: the l singletons followed by the l - 2
// internal sets in merge order.
struct LinkageModel
{
    std::vector<LinkageSet> sets;
    std::vector<LinkageMerge> merges;

    std::size_t size() const noexcept { return sets.size(); }
};

struct LinkageTreeStats
{
    std::uint64_t neighbor_comparisons = 0;
    std::uint64_t similarity_updates = 0;
};

// Average-linkage (UPGMA) clustering with the nearest-neighbour chain
// algorithm, O(l^2). Candidate pairs are ranked by average DSM entry, then by
// smaller merged size, then by a per-pair random key drawn from rng.
LinkageModel build_linkage_tree(const Dsm &dsm, Rng &rng, LinkageTreeStats *stats = nullptr);

// Random key of a pair of clusters, each identified by its smallest variable
// index, for a given tree salt.
// Symmetric in a and b. Exposed so reference implementations can reproduce
// the tie order.
std::uint64_t merge_tie_key(std::uint64_t salt, std::size_t a, std::size_t b) noexcept;

// Builds DSMs per generation. Static DSMs (distance, wvig) are computed once
// and only the tree is rebuilt, which re-rolls the tie-breaking.
class LinkageLearner
{
  public:
    LinkageLearner(DsmKind kind, bool select_best_half, const ProblemInstance &instance);

    LinkageModel learn(const Population &population, Rng &rng) const;
    Dsm dsm(const Population &population) const;

  private:
    DsmKind kind_;
    bool select_best_half_;
    std::optional<Dsm> static_dsm_;
};

// One-shot convenience over LinkageLearner.
LinkageModel model_for(DsmKind kind, bool gene_invariant, const Population &population,
                       const ProblemInstance &instance, Rng &rng);

// Debug dump: {"sets": [[...], ...]}.
void write_linkage_model(std::ostream &out, const LinkageModel &model);

} // namespace gigomea
