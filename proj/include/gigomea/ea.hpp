#pragma once

#include "gigomea/core.hpp"
#include "gigomea/linkage.hpp"
#include "gigomea/problems.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <utility>

namespace gigomea
{

enum class Algorithm
{
    GOMEA,
    GIGOMEA
};

std::string to_string(Algorithm algorithm);
// Accepts "gomea" and "gi-gomea" (case-insensitive, '-' optional).
Algorithm parse_algorithm(const std::string &text);

struct EaConfig
{
    Algorithm algorithm = Algorithm::GIGOMEA;
    std::size_t population_size = 2;
    DsmKind dsm_kind = DsmKind::MutualInformation;
    std::uint64_t budget = 10'000'000;
    double vtr = 0.0;
    std::uint64_t seed = 0;
    // 0 means no generation limit.
    std::uint64_t max_generations = 0;
};

struct RunRecord
{
    bool success = false;
    std::uint64_t evaluations_used = 0;
    double best_fitness = 0.0;
    std::uint64_t generations = 0;
    std::uint64_t seed = 0;

    friend bool operator==(const RunRecord &, const RunRecord &) = default;
};

// Probabilistically complete initialisation: every column holds n/2 ones for
// even n. For odd n the first n-1 rows are balanced, the last row is drawn
// from Bernoulli(0.5), and then every column is shuffled.
Population pc_initialize(std::size_t n, std::size_t ell, Rng &rng);

void evaluate_population(Population &population, const Objective &objective, EvaluationLedger &ledger);

// Best of two distinct random members other than parent; fitness ties are
// settled by a coin flip. With n == 2 the other member is returned.
std::size_t select_mate(const Population &population, std::size_t parent, Rng &rng);

enum class GiGomOutcome
{
    Unchanged,
    Accepted,
    Rejected
};

// Gene-invariant optimal mixing of two population members, performed in place.
// The masked genes of p and m are exchanged; the pair is kept only when the
// better of the two (the mate on a fitness tie) does not get worse. Evaluates
// 0 (unchanged), 1 (rejected) or 2 (accepted) new solutions.
GiGomOutcome gi_gom_in_place(Individual &p, Individual &m, const LinkageSet &mask, const Objective &objective,
                             EvaluationLedger &ledger);

// Value form of gi_gom_in_place: returns the pair that replaces (p, m).
std::pair<Individual, Individual> gi_gom(const Individual &p, const Individual &m, const LinkageSet &mask,
                                         const Objective &objective, EvaluationLedger &ledger);

// One GI-GOMEA generation: all (member, linkage set) pairs in random order,
// each mixed with a tournament-selected mate, results written back at once.
// Returns the number of pairs processed.
std::size_t gi_gomea_generation(Population &population, const LinkageModel &model, const Objective &objective,
                                EvaluationLedger &ledger, Rng &rng);

// Classic GOM on population[target]: for every linkage set (random order)
// copy the genes of a random donor from the snapshot and keep the change if
// fitness does not decrease.
Individual gom_step(std::size_t target, const Population &snapshot, const LinkageModel &model,
                    const Objective &objective, EvaluationLedger &ledger, Rng &rng);

// One GOMEA generation; offspring replace the population at the end.
void gomea_generation(Population &population, const LinkageModel &model, const Objective &objective,
                      EvaluationLedger &ledger, Rng &rng);

bool genotypes_converged(const Population &population);

// Called after initialisation (generation 0) and after every completed generation.
using GenerationObserver = std::function<void(const Population &, std::uint64_t generation)>;

// Full optimisation run. Stops on reaching config.vtr, on budget exhaustion,
// when GOMEA's population has converged, or after max_generations.
RunRecord run(const EaConfig &config, const ProblemInstance &instance, const GenerationObserver &observer = {});

} // namespace gigomea
