#include "gigomea/linkage.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <tuple>

namespace gigomea
{

std::string to_string(DsmKind kind)
{
    switch (kind)
    {
    case DsmKind::MutualInformation:
        return "mi";
    case DsmKind::Distance:
        return "ddsm";
    case DsmKind::Wvig:
        return "wvig";
    }
    return "?";
}

DsmKind parse_dsm_kind(const std::string &text)
{
    if (text == "mi")
        return DsmKind::MutualInformation;
    if (text == "ddsm")
        return DsmKind::Distance;
    if (text == "wvig")
        return DsmKind::Wvig;
    throw std::invalid_argument("unknown DSM kind '" + text + "' (expected mi, ddsm or wvig)");
}

Dsm mi_dsm(const Population &population, bool select_best_half)
{
    if (population.empty())
        throw std::invalid_argument("mutual information needs a non-empty population");

    std::vector<std::size_t> rows(population.size());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    if (select_best_half)
    {
        std::stable_sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
            return population[a].fitness > population[b].fitness;
        });
        rows.resize((population.size() + 1) / 2);
    }

    const std::size_t ell = population.front().genotype.size();
    const auto n = static_cast<double>(rows.size());

    std::vector<std::size_t> ones(ell, 0);
    for (auto r : rows)
    {
        auto bits = population[r].genotype.bits();
        for (std::size_t i = 0; i < ell; ++i)
            ones[i] += bits[i];
    }

    // joint[i * ell + j] (i < j) counts members with ones at both i and j.
    std::vector<std::size_t> joint(ell * ell, 0);
    std::vector<std::size_t> set_bits;
    set_bits.reserve(ell);
    for (auto r : rows)
    {
        auto bits = population[r].genotype.bits();
        set_bits.clear();
        for (std::size_t i = 0; i < ell; ++i)
            if (bits[i])
                set_bits.push_back(i);
        for (std::size_t a = 0; a < set_bits.size(); ++a)
            for (std::size_t b = a + 1; b < set_bits.size(); ++b)
                ++joint[set_bits[a] * ell + set_bits[b]];
    }

    auto term = [n](double count, double pa, double pb) {
        if (count == 0.0)
            return 0.0;
        const double p = count / n;
        return p * std::log(p / (pa * pb));
    };

    Dsm dsm(ell);
    for (std::size_t i = 0; i < ell; ++i)
    {
        const double p1i = static_cast<double>(ones[i]) / n;
        const double p0i = 1.0 - p1i;
        for (std::size_t j = i + 1; j < ell; ++j)
        {
            const double p1j = static_cast<double>(ones[j]) / n;
            const double p0j = 1.0 - p1j;
            const auto c11 = static_cast<double>(joint[i * ell + j]);
            const double c10 = static_cast<double>(ones[i]) - c11;
            const double c01 = static_cast<double>(ones[j]) - c11;
            const double c00 = n - c11 - c10 - c01;
            const double mi = term(c00, p0i, p0j) + term(c01, p0i, p1j) + term(c10, p1i, p0j) +
                              term(c11, p1i, p1j);
            dsm.set(i, j, std::max(0.0, mi));
        }
    }
    return dsm;
}

Dsm distance_dsm(std::size_t ell)
{
    Dsm dsm(ell);
    for (std::size_t i = 0; i < ell; ++i)
        for (std::size_t j = i + 1; j < ell; ++j)
            dsm.set(i, j, static_cast<double>(ell - (j - i)));
    return dsm;
}

std::uint64_t merge_tie_key(std::uint64_t salt, std::size_t a, std::size_t b) noexcept
{
    if (a > b)
        std::swap(a, b);
    return mix_seed(salt ^ mix_seed((static_cast<std::uint64_t>(a) << 32) ^ static_cast<std::uint64_t>(b)));
}

namespace
{

// Working state of the clustering. Clusters live in slots 0..l-1; a merge
// stores the result in the lower slot and retires the other one.
class NearestNeighborChain
{
  public:
    NearestNeighborChain(const Dsm &dsm, std::uint64_t salt, LinkageTreeStats &stats)
        : ell_(dsm.size()), salt_(salt), stats_(stats), sums_(ell_ * ell_), size_(ell_, 1),
          set_index_(ell_), active_(ell_)
    {
        for (std::size_t i = 0; i < ell_; ++i)
            for (std::size_t j = 0; j < ell_; ++j)
                sums_[i * ell_ + j] = i == j ? 0.0 : dsm(i, j);
        std::iota(set_index_.begin(), set_index_.end(), std::size_t{0});
        std::iota(active_.begin(), active_.end(), std::size_t{0});
    }

    LinkageModel run()
    {
        LinkageModel model;
        model.sets.reserve(2 * ell_ - 2);
        for (std::size_t i = 0; i < ell_; ++i)
            model.sets.push_back({i});

        std::vector<std::size_t> chain;
        chain.reserve(ell_);
        while (active_.size() > 1)
        {
            if (chain.empty())
                chain.push_back(active_.front());

            const std::size_t tip = chain.back();
            const std::size_t nearest = nearest_neighbor(tip);
            if (chain.size() >= 2 && nearest == chain[chain.size() - 2])
            {
                chain.pop_back();
                chain.pop_back();
                merge(tip, nearest, model);
            }
            else
            {
                chain.push_back(nearest);
            }
        }
        return model;
    }

  private:
    double average(std::size_t a, std::size_t b) const
    {
        return sums_[a * ell_ + b] / (static_cast<double>(size_[a]) * static_cast<double>(size_[b]));
    }

    // True if pair (a, x) ranks strictly above pair (a, y).
    bool ranks_above(std::size_t a, std::size_t x, std::size_t y) const
    {
        const double sx = average(a, x);
        const double sy = average(a, y);
        if (sx != sy)
            return sx > sy;
        const std::size_t mx = size_[a] + size_[x];
        const std::size_t my = size_[a] + size_[y];
        if (mx != my)
            return mx < my;
        // A slot index is the smallest variable of the cluster it holds.
        const auto kx = merge_tie_key(salt_, a, x);
        const auto ky = merge_tie_key(salt_, a, y);
        if (kx != ky)
            return kx > ky;
        return x < y;
    }

    std::size_t nearest_neighbor(std::size_t a) const
    {
        std::size_t best = a;
        for (auto c : active_)
        {
            if (c == a)
                continue;
            ++stats_.neighbor_comparisons;
            if (best == a || ranks_above(a, c, best))
                best = c;
        }
        return best;
    }

    void merge(std::size_t a, std::size_t b, LinkageModel &model)
    {
        const std::size_t keep = std::min(a, b);
        const std::size_t drop = std::max(a, b);

        std::erase(active_, drop);
        for (auto c : active_)
        {
            if (c == keep)
                continue;
            const double s = sums_[keep * ell_ + c] + sums_[drop * ell_ + c];
            sums_[keep * ell_ + c] = s;
            sums_[c * ell_ + keep] = s;
            ++stats_.similarity_updates;
        }
        size_[keep] += size_[drop];

        const std::size_t left = set_index_[keep];
        const std::size_t right = set_index_[drop];
        if (active_.size() == 1)
        {
            // The root is never used as a mask.
            model.merges.push_back({LinkageMerge::root, left, right});
            return;
        }

        LinkageSet merged;
        merged.reserve(size_[keep]);
        std::merge(model.sets[left].begin(), model.sets[left].end(), model.sets[right].begin(),
                   model.sets[right].end(), std::back_inserter(merged));
        model.sets.push_back(std::move(merged));
        set_index_[keep] = model.sets.size() - 1;
        model.merges.push_back({set_index_[keep], left, right});
    }

    std::size_t ell_;
    std::uint64_t salt_;
    LinkageTreeStats &stats_;
    std::vector<double> sums_;
    std::vector<std::size_t> size_;
    std::vector<std::size_t> set_index_;
    std::vector<std::size_t> active_;
};

} // namespace

LinkageModel build_linkage_tree(const Dsm &dsm, Rng &rng, LinkageTreeStats *stats)
{
    if (dsm.size() < 2)
        throw std::invalid_argument("a linkage tree needs at least two variables");
    LinkageTreeStats local;
    NearestNeighborChain chain(dsm, rng.next(), stats ? *stats : local);
    return chain.run();
}

LinkageLearner::LinkageLearner(DsmKind kind, bool select_best_half, const ProblemInstance &instance)
    : kind_(kind), select_best_half_(select_best_half)
{
    if (kind_ == DsmKind::Distance)
        static_dsm_ = distance_dsm(instance.dimension());
    else if (kind_ == DsmKind::Wvig)
        static_dsm_ = instance.wvig_dsm();
}

Dsm LinkageLearner::dsm(const Population &population) const
{
    if (static_dsm_)
        return *static_dsm_;
    return mi_dsm(population, select_best_half_);
}

LinkageModel LinkageLearner::learn(const Population &population, Rng &rng) const
{
    if (static_dsm_)
        return build_linkage_tree(*static_dsm_, rng);
    return build_linkage_tree(mi_dsm(population, select_best_half_), rng);
}

LinkageModel model_for(DsmKind kind, bool gene_invariant, const Population &population,
                       const ProblemInstance &instance, Rng &rng)
{
    return LinkageLearner(kind, gene_invariant, instance).learn(population, rng);
}

void write_linkage_model(std::ostream &out, const LinkageModel &model)
{
    nlohmann::json doc;
    doc["sets"] = model.sets;
    out << doc.dump() << '\n';
}

} // namespace gigomea
