#include "gigomea/ea.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <stdexcept>

namespace gigomea
{

std::string to_string(Algorithm algorithm)
{
    return algorithm == Algorithm::GOMEA ? "gomea" : "gi-gomea";
}

Algorithm parse_algorithm(const std::string &text)
{
    std::string key;
    for (char c : text)
        if (c != '-' && c != '_')
            key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (key == "gomea")
        return Algorithm::GOMEA;
    if (key == "gigomea")
        return Algorithm::GIGOMEA;
    throw std::invalid_argument("unknown algorithm '" + text + "' (expected gomea or gi-gomea)");
}

Population pc_initialize(std::size_t n, std::size_t ell, Rng &rng)
{
    if (n < 2)
        throw std::invalid_argument("population size must be at least 2");

    const std::size_t balanced = n - n % 2;
    Population population(n, Individual(Genotype(ell)));
    std::vector<std::uint8_t> column(n);
    for (std::size_t locus = 0; locus < ell; ++locus)
    {
        for (std::size_t i = 0; i < balanced; ++i)
            column[i] = i < balanced / 2 ? 0 : 1;
        if (n != balanced)
            column[n - 1] = rng.coin() ? 1 : 0;
        rng.shuffle(column);
        for (std::size_t i = 0; i < n; ++i)
            population[i].genotype.set(locus, column[i] != 0);
    }
    return population;
}

void evaluate_population(Population &population, const Objective &objective, EvaluationLedger &ledger)
{
    for (auto &ind : population)
        ledger.evaluate(ind, objective);
}

std::size_t select_mate(const Population &population, std::size_t parent, Rng &rng)
{
    const std::size_t n = population.size();
    if (n == 2)
        return 1 - parent;

    // Draw from the n - 1 non-parent slots, then from the remaining n - 2.
    std::size_t a = rng.index(n - 1);
    if (a >= parent)
        ++a;
    std::size_t b = rng.index(n - 2);
    const std::size_t lo = std::min(a, parent);
    const std::size_t hi = std::max(a, parent);
    if (b >= lo)
        ++b;
    if (b >= hi)
        ++b;

    const double fa = population[a].fitness;
    const double fb = population[b].fitness;
    if (fa > fb)
        return a;
    if (fb > fa)
        return b;
    return rng.coin() ? a : b;
}

namespace
{

void swap_masked(Individual &p, Individual &m, const LinkageSet &mask)
{
    for (auto u : mask)
    {
        const bool pu = p.genotype[u] != 0;
        p.genotype.set(u, m.genotype[u] != 0);
        m.genotype.set(u, pu);
    }
}

bool masked_equal(const Genotype &a, const Genotype &b, const LinkageSet &mask)
{
    return std::all_of(mask.begin(), mask.end(), [&](std::size_t u) { return a[u] == b[u]; });
}

} // namespace

GiGomOutcome gi_gom_in_place(Individual &p, Individual &m, const LinkageSet &mask, const Objective &objective,
                             EvaluationLedger &ledger)
{
    if (masked_equal(p.genotype, m.genotype, mask))
        return GiGomOutcome::Unchanged;

    const double fp = ledger.evaluate(p, objective);
    const double fm = ledger.evaluate(m, objective);

    swap_masked(p, m, mask);
    p.invalidate();
    m.invalidate();

    auto restore = [&] {
        swap_masked(p, m, mask);
        p.fitness = fp;
        p.evaluated = true;
        m.fitness = fm;
        m.evaluated = true;
    };

    // The better of the two decides; the mate decides on a tie.
    Individual &judged = fp > fm ? p : m;
    Individual &other = fp > fm ? m : p;
    const double reference = fp > fm ? fp : fm;

    double trial = 0.0;
    try
    {
        trial = ledger.evaluate(judged, objective);
    }
    catch (const BudgetExhausted &)
    {
        restore();
        throw;
    }
    if (trial < reference)
    {
        restore();
        return GiGomOutcome::Rejected;
    }
    ledger.evaluate(other, objective);
    return GiGomOutcome::Accepted;
}

std::pair<Individual, Individual> gi_gom(const Individual &p, const Individual &m, const LinkageSet &mask,
                                         const Objective &objective, EvaluationLedger &ledger)
{
    std::pair<Individual, Individual> out(p, m);
    gi_gom_in_place(out.first, out.second, mask, objective, ledger);
    return out;
}

std::size_t gi_gomea_generation(Population &population, const LinkageModel &model, const Objective &objective,
                                EvaluationLedger &ledger, Rng &rng)
{
    struct Item
    {
        std::uint32_t member;
        std::uint32_t set;
    };
    std::vector<Item> items;
    items.reserve(population.size() * model.size());
    for (std::size_t i = 0; i < population.size(); ++i)
        for (std::size_t j = 0; j < model.size(); ++j)
            items.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
    rng.shuffle(items);

    std::size_t processed = 0;
    for (const auto &item : items)
    {
        const std::size_t mate = select_mate(population, item.member, rng);
        gi_gom_in_place(population[item.member], population[mate], model.sets[item.set], objective, ledger);
        ++processed;
    }
    return processed;
}

Individual gom_step(std::size_t target, const Population &snapshot, const LinkageModel &model,
                    const Objective &objective, EvaluationLedger &ledger, Rng &rng)
{
    Individual current = snapshot[target];
    ledger.evaluate(current, objective);

    std::vector<std::size_t> order(model.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order);

    std::vector<std::uint8_t> backup;
    for (auto set_index : order)
    {
        const auto &mask = model.sets[set_index];
        std::size_t donor = rng.index(snapshot.size() - 1);
        if (donor >= target)
            ++donor;
        const auto &donor_genes = snapshot[donor].genotype;
        if (masked_equal(current.genotype, donor_genes, mask))
            continue;

        backup.clear();
        for (auto u : mask)
        {
            backup.push_back(current.genotype[u]);
            current.genotype.set(u, donor_genes[u] != 0);
        }
        const double before = current.fitness;
        current.invalidate();

        double after = 0.0;
        try
        {
            after = ledger.evaluate(current, objective);
        }
        catch (const BudgetExhausted &)
        {
            for (std::size_t t = 0; t < mask.size(); ++t)
                current.genotype.set(mask[t], backup[t] != 0);
            current.fitness = before;
            current.evaluated = true;
            throw;
        }
        if (after < before)
        {
            for (std::size_t t = 0; t < mask.size(); ++t)
                current.genotype.set(mask[t], backup[t] != 0);
            current.fitness = before;
            current.evaluated = true;
        }
    }
    return current;
}

void gomea_generation(Population &population, const LinkageModel &model, const Objective &objective,
                      EvaluationLedger &ledger, Rng &rng)
{
    const Population snapshot = population;
    Population offspring;
    offspring.reserve(population.size());
    for (std::size_t i = 0; i < snapshot.size(); ++i)
        offspring.push_back(gom_step(i, snapshot, model, objective, ledger, rng));
    population = std::move(offspring);
}

bool genotypes_converged(const Population &population)
{
    return std::all_of(population.begin(), population.end(),
                       [&](const Individual &ind) { return ind.genotype == population.front().genotype; });
}

RunRecord run(const EaConfig &config, const ProblemInstance &instance, const GenerationObserver &observer)
{
    if (config.population_size < 2)
        throw std::invalid_argument("population size must be at least 2");
    if (config.budget < 1)
        throw std::invalid_argument("budget must be at least 1");

    const bool gene_invariant = config.algorithm == Algorithm::GIGOMEA;
    const LinkageLearner learner(config.dsm_kind, gene_invariant, instance);

    EvaluationLedger ledger(config.budget, config.vtr);
    Rng rng(config.seed);
    RunRecord record;
    record.seed = config.seed;

    try
    {
        Population population = pc_initialize(config.population_size, instance.dimension(), rng);
        evaluate_population(population, instance, ledger);
        if (observer)
            observer(population, 0);

        while (config.max_generations == 0 || record.generations < config.max_generations)
        {
            if (!gene_invariant && genotypes_converged(population))
                break;
            const LinkageModel model = learner.learn(population, rng);
            if (gene_invariant)
                gi_gomea_generation(population, model, instance, ledger, rng);
            else
                gomea_generation(population, model, instance, ledger, rng);
            ++record.generations;
            if (observer)
                observer(population, record.generations);
        }
    }
    catch (const TargetReached &)
    {
    }
    catch (const BudgetExhausted &)
    {
    }

    record.success = ledger.target_reached();
    record.evaluations_used = ledger.used();
    record.best_fitness = ledger.best();
    return record;
}

} // namespace gigomea
