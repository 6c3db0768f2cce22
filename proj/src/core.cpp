#include "gigomea/core.hpp"

#include <numeric>
#include <stdexcept>

namespace gigomea
{

Genotype::Genotype(std::vector<std::uint8_t> bits) : bits_(std::move(bits))
{
    for (auto &b : bits_)
    {
        if (b > 1)
            throw std::invalid_argument("genotype values must be 0 or 1");
    }
}

Genotype Genotype::from_string(std::string_view text)
{
    std::vector<std::uint8_t> bits;
    bits.reserve(text.size());
    for (char c : text)
    {
        if (c == ' ')
            continue;
        if (c != '0' && c != '1')
            throw std::invalid_argument("genotype string may only contain '0' and '1'");
        bits.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return Genotype(std::move(bits));
}

std::string Genotype::to_string() const
{
    std::string out(bits_.size(), '0');
    for (std::size_t i = 0; i < bits_.size(); ++i)
        out[i] = bits_[i] ? '1' : '0';
    return out;
}

Genotype Genotype::complement() const
{
    Genotype out = *this;
    for (auto &b : out.bits_)
        b ^= 1;
    return out;
}

std::size_t unitation(std::span<const std::uint8_t> bits) noexcept
{
    return std::accumulate(bits.begin(), bits.end(), std::size_t{0});
}

std::vector<std::size_t> allele_counts(const Population &population)
{
    if (population.empty())
        return {};
    std::vector<std::size_t> counts(population.front().genotype.size(), 0);
    for (const auto &ind : population)
    {
        auto bits = ind.genotype.bits();
        for (std::size_t i = 0; i < counts.size(); ++i)
            counts[i] += bits[i];
    }
    return counts;
}

double EvaluationLedger::evaluate(Individual &ind, const Objective &objective)
{
    if (ind.evaluated)
        return ind.fitness;
    if (used_ >= budget_)
        throw BudgetExhausted();

    ind.fitness = objective.evaluate(ind.genotype);
    ind.evaluated = true;
    ++used_;
    if (ind.fitness > best_)
        best_ = ind.fitness;
    if (target_ && ind.fitness >= *target_)
        throw TargetReached();
    return ind.fitness;
}

std::size_t Rng::index(std::size_t bound)
{
    std::uniform_int_distribution<std::size_t> dist(0, bound - 1);
    return dist(engine_);
}

double Rng::uniform()
{
    // 53 random mantissa bits.
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t mix_seed(std::uint64_t value) noexcept
{
    value += 0x9e3779b97f4a7c15ULL;
    value = (value ^ (value >> 30)) * 0xbf58476d1ce4e5b9ULL;
    value = (value ^ (value >> 27)) * 0x94d049bb133111ebULL;
    return value ^ (value >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept
{
    std::uint64_t state = mix_seed(master);
    for (auto p : path)
        state = mix_seed(state ^ mix_seed(p + 0x632be59bd9b4e019ULL));
    return state;
}

} // namespace gigomea
