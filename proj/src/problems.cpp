#include "gigomea/problems.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>

namespace gigomea
{

namespace
{

std::size_t count_ones(std::span<const Symbol> group)
{
    return static_cast<std::size_t>(std::count(group.begin(), group.end(), Symbol::One));
}

bool has_null(std::span<const Symbol> group)
{
    return std::find(group.begin(), group.end(), Symbol::Null) != group.end();
}

// Scratch buffer for the symbol tree; one per thread so concurrent runs do not share it.
std::vector<Symbol> &symbol_buffer(std::size_t size)
{
    thread_local std::vector<Symbol> buffer;
    buffer.resize(size);
    return buffer;
}

void load_symbols(const Genotype &g, std::vector<Symbol> &symbols)
{
    for (std::size_t i = 0; i < g.size(); ++i)
        symbols[i] = g[i] ? Symbol::One : Symbol::Zero;
}

void require(bool condition, const char *message)
{
    if (!condition)
        throw std::invalid_argument(message);
}

} // namespace

double trap_sub(std::size_t ones, std::size_t k)
{
    if (ones == k)
        return 1.0;
    return static_cast<double>(k - ones - 1) / static_cast<double>(k);
}

double bimtrap_sub(std::size_t ones, std::size_t k)
{
    if (ones == 0 || ones == k)
        return 1.0;
    const auto skew = static_cast<double>(std::abs(2 * static_cast<long>(ones) - static_cast<long>(k)));
    return (static_cast<double>(k) - skew - 2.0) / static_cast<double>(k);
}

double asymtrap_sub(std::span<const std::uint8_t> block)
{
    const std::size_t k = block.size();
    const std::size_t ones = unitation(block);
    if (ones == k - 1 && block[0] == 0)
        return 1.0;
    return static_cast<double>(k - ones) / static_cast<double>(k + 1);
}

double htrap_sub(std::span<const Symbol> group, bool top)
{
    if (has_null(group))
        return 0.0;
    const std::size_t k = group.size();
    const std::size_t ones = count_ones(group);
    if (ones == k)
        return 1.0;
    const double w = top ? 0.9 : 1.0;
    return w * static_cast<double>(k - ones - 1) / static_cast<double>(k - 1);
}

double asymhtrap_sub(std::span<const Symbol> group)
{
    if (has_null(group))
        return 0.0;
    const std::size_t k = group.size();
    const std::size_t ones = count_ones(group);
    if (ones == k - 1 && group[0] == Symbol::Zero)
        return 1.0;
    return 0.9 * static_cast<double>(k - ones) / static_cast<double>(k);
}

double eval_trapk(const Genotype &g, std::size_t k)
{
    double total = 0.0;
    for (std::size_t start = 0; start < g.size(); start += k)
        total += trap_sub(unitation(g.bits().subspan(start, k)), k);
    return total;
}

double eval_bimtrapk(const Genotype &g, std::size_t k)
{
    double total = 0.0;
    for (std::size_t start = 0; start < g.size(); start += k)
        total += bimtrap_sub(unitation(g.bits().subspan(start, k)), k);
    return total;
}

double eval_asymtrapk(const Genotype &g, std::size_t k)
{
    double total = 0.0;
    for (std::size_t start = 0; start < g.size(); start += k)
        total += asymtrap_sub(g.bits().subspan(start, k));
    return total;
}

double eval_htrapk(const Genotype &g, std::size_t k)
{
    const std::size_t levels = exact_levels(g.size(), k);
    auto &symbols = symbol_buffer(g.size());
    load_symbols(g, symbols);

    double total = 0.0;
    double weight = 1.0;
    std::size_t width = g.size();
    for (std::size_t h = 1; h <= levels; ++h)
    {
        weight *= static_cast<double>(k);
        const bool top = h == levels;
        const std::size_t groups = width / k;
        for (std::size_t j = 0; j < groups; ++j)
        {
            std::span<const Symbol> group(symbols.data() + j * k, k);
            total += weight * htrap_sub(group, top);

            Symbol up = Symbol::Null;
            if (!has_null(group))
            {
                const std::size_t ones = count_ones(group);
                if (ones == 0)
                    up = Symbol::Zero;
                else if (ones == k)
                    up = Symbol::One;
            }
            // Safe in place: group j is read fully before slot j is written, and j <= j * k.
            symbols[j] = up;
        }
        width = groups;
    }
    return total;
}

double eval_asymhtrapk(const Genotype &g, std::size_t k)
{
    const std::size_t levels = exact_levels(g.size(), k);
    auto &symbols = symbol_buffer(g.size());
    load_symbols(g, symbols);

    double total = 0.0;
    double weight = 1.0;
    std::size_t width = g.size();
    for (std::size_t h = 1; h <= levels; ++h)
    {
        weight *= static_cast<double>(k);
        const std::size_t groups = width / k;
        for (std::size_t j = 0; j < groups; ++j)
        {
            std::span<const Symbol> group(symbols.data() + j * k, k);
            total += weight * asymhtrap_sub(group);

            Symbol up = Symbol::Null;
            if (!has_null(group))
            {
                const std::size_t ones = count_ones(group);
                if (ones == 0)
                    up = Symbol::Zero;
                else if (ones == k - 1 && group[0] == Symbol::Zero)
                    // An optimal group becomes the symbol that an optimal
                    // group one level up expects at this position.
                    up = (j % k == 0) ? Symbol::Zero : Symbol::One;
            }
            symbols[j] = up;
        }
        width = groups;
    }
    return total;
}

double eval_hiff(const Genotype &g)
{
    const std::size_t levels = exact_levels(g.size(), 2);
    auto &symbols = symbol_buffer(g.size());
    load_symbols(g, symbols);

    // Every leaf is a uniform block of size one.
    double total = static_cast<double>(g.size());
    double block = 1.0;
    std::size_t width = g.size();
    for (std::size_t h = 1; h <= levels; ++h)
    {
        block *= 2.0;
        const std::size_t groups = width / 2;
        for (std::size_t j = 0; j < groups; ++j)
        {
            const Symbol a = symbols[2 * j];
            const Symbol b = symbols[2 * j + 1];
            if (a != Symbol::Null && a == b)
            {
                total += block;
                symbols[j] = a;
            }
            else
            {
                symbols[j] = Symbol::Null;
            }
        }
        width = groups;
    }
    return total;
}

double eval_nks1(const Genotype &g, const NkTables &nk)
{
    const std::size_t k = nk.k;
    const std::size_t mask = (std::size_t{1} << k) - 1;
    std::size_t index = 0;
    for (std::size_t i = 0; i + 1 < k; ++i)
        index = (index << 1) | g[i];

    double total = 0.0;
    for (std::size_t s = 0; s < nk.tables.size(); ++s)
    {
        index = ((index << 1) | g[s + k - 1]) & mask;
        total += nk.tables[s][index];
    }
    return total;
}

double nks1_optimum(const NkTables &nk)
{
    const std::size_t k = nk.k;
    const std::size_t states = std::size_t{1} << (k - 1);
    const std::size_t state_mask = states - 1;
    constexpr double lowest = -std::numeric_limits<double>::infinity();

    // best[s]: best prefix score given the last k-1 genes encode s.
    std::vector<double> best(states, lowest);
    for (std::size_t config = 0; config < (std::size_t{1} << k); ++config)
        best[config & state_mask] = std::max(best[config & state_mask], nk.tables[0][config]);

    std::vector<double> next(states);
    for (std::size_t s = 1; s < nk.tables.size(); ++s)
    {
        std::fill(next.begin(), next.end(), lowest);
        const auto &table = nk.tables[s];
        for (std::size_t state = 0; state < states; ++state)
        {
            for (std::size_t bit = 0; bit < 2; ++bit)
            {
                const std::size_t config = (state << 1) | bit;
                const std::size_t to = config & state_mask;
                next[to] = std::max(next[to], best[state] + table[config]);
            }
        }
        best.swap(next);
    }
    return *std::max_element(best.begin(), best.end());
}

double eval_maxcut(const Genotype &g, const MaxCutGraph &graph)
{
    const std::size_t n = graph.vertices();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (g[i] != g[j])
                total += graph.weight(i, j);
    return total;
}

double maxcut_exhaustive_optimum(const MaxCutGraph &graph)
{
    const std::size_t n = graph.vertices();
    if (n < 2)
        return 0.0;

    double total_weight = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            total_weight += std::abs(graph.weight(i, j));
    // Incremental sums drift; anything this close to the running best is
    // re-scored exactly so the returned value matches eval_maxcut bit for bit.
    const double slack = 1e-9 * (total_weight + 1.0);

    Genotype side(n);
    double running = 0.0;
    double best_running = 0.0;
    double best_exact = 0.0;

    const std::uint64_t steps = std::uint64_t{1} << (n - 1);
    for (std::uint64_t step = 1; step < steps; ++step)
    {
        // Gray code: flip the vertex at the lowest set bit of step (vertex 0 stays fixed).
        const std::size_t v = static_cast<std::size_t>(std::countr_zero(step)) + 1;
        double delta = 0.0;
        for (std::size_t u = 0; u < n; ++u)
        {
            if (u == v)
                continue;
            delta += (side[u] == side[v]) ? graph.weight(u, v) : -graph.weight(u, v);
        }
        side.flip(v);
        running += delta;
        if (running >= best_running - slack)
        {
            best_running = std::max(best_running, running);
            best_exact = std::max(best_exact, eval_maxcut(side, graph));
        }
    }
    return best_exact;
}

std::size_t exact_levels(std::size_t ell, std::size_t base)
{
    if (base < 2 || ell < base)
        return 0;
    std::size_t levels = 0;
    while (ell > 1)
    {
        if (ell % base != 0)
            return 0;
        ell /= base;
        ++levels;
    }
    return levels;
}

ProblemInstance ProblemInstance::trap(std::size_t ell, std::size_t k)
{
    require(k >= 2 && ell >= k && ell % k == 0, "Trap requires k >= 2 dividing ell");
    return ProblemInstance(ProblemKind::Trap, ell, k, static_cast<double>(ell / k));
}

ProblemInstance ProblemInstance::htrap(std::size_t ell, std::size_t k)
{
    const std::size_t levels = exact_levels(ell, k);
    require(levels >= 1, "HTrap requires ell to be a power of k");
    return ProblemInstance(ProblemKind::HTrap, ell, k, static_cast<double>(ell * levels));
}

ProblemInstance ProblemInstance::hiff(std::size_t ell)
{
    const std::size_t levels = exact_levels(ell, 2);
    require(levels >= 1, "HIFF requires ell to be a power of 2");
    return ProblemInstance(ProblemKind::HIFF, ell, 2, static_cast<double>(ell * (levels + 1)));
}

ProblemInstance ProblemInstance::bimtrap(std::size_t ell, std::size_t k)
{
    require(k >= 2 && k % 2 == 0 && ell >= k && ell % k == 0,
            "BimTrap requires an even k dividing ell");
    return ProblemInstance(ProblemKind::BimTrap, ell, k, static_cast<double>(ell / k));
}

ProblemInstance ProblemInstance::asymtrap(std::size_t ell, std::size_t k)
{
    require(k >= 2 && ell >= k && ell % k == 0, "AsymTrap requires k >= 2 dividing ell");
    return ProblemInstance(ProblemKind::AsymTrap, ell, k, static_cast<double>(ell / k));
}

ProblemInstance ProblemInstance::asymhtrap(std::size_t ell, std::size_t k)
{
    const std::size_t levels = exact_levels(ell, k);
    require(k >= 3 && levels >= 1, "AsymHTrap requires ell to be a power of k (k >= 3)");
    return ProblemInstance(ProblemKind::AsymHTrap, ell, k, static_cast<double>(ell * levels));
}

ProblemInstance ProblemInstance::nks1(NkTables tables, std::uint64_t seed, std::optional<double> vtr)
{
    require(tables.k >= 1 && !tables.tables.empty(), "NK-S1 requires at least one subfunction");
    for (const auto &t : tables.tables)
        require(t.size() == (std::size_t{1} << tables.k), "NK-S1 table must hold 2^k weights");
    if (!vtr)
        vtr = nks1_optimum(tables);
    ProblemInstance p(ProblemKind::NKS1, tables.dimension(), tables.k, vtr);
    p.seed_ = seed;
    p.payload_ = std::move(tables);
    return p;
}

ProblemInstance ProblemInstance::maxcut(MaxCutGraph graph, MaxCutVariant variant, std::uint64_t seed,
                                        std::optional<double> vtr)
{
    require(graph.vertices() >= 2, "MaxCut requires at least 2 vertices");
    ProblemInstance p(ProblemKind::MaxCut, graph.vertices(), 0, vtr);
    p.seed_ = seed;
    p.variant_ = variant;
    p.payload_ = std::move(graph);
    return p;
}

double ProblemInstance::evaluate(const Genotype &g) const
{
    if (g.size() != ell_)
        throw std::invalid_argument("genotype length does not match the problem dimension");
    switch (kind_)
    {
    case ProblemKind::Trap:
        return eval_trapk(g, k_);
    case ProblemKind::HTrap:
        return eval_htrapk(g, k_);
    case ProblemKind::HIFF:
        return eval_hiff(g);
    case ProblemKind::BimTrap:
        return eval_bimtrapk(g, k_);
    case ProblemKind::AsymTrap:
        return eval_asymtrapk(g, k_);
    case ProblemKind::AsymHTrap:
        return eval_asymhtrapk(g, k_);
    case ProblemKind::NKS1:
        return eval_nks1(g, std::get<NkTables>(payload_));
    case ProblemKind::MaxCut:
        return eval_maxcut(g, std::get<MaxCutGraph>(payload_));
    }
    return 0.0;
}

Dsm ProblemInstance::wvig_dsm() const
{
    Dsm dsm(ell_);
    switch (kind_)
    {
    case ProblemKind::Trap:
    case ProblemKind::BimTrap:
    case ProblemKind::AsymTrap:
        for (std::size_t i = 0; i < ell_; ++i)
            for (std::size_t j = i + 1; j < ell_ && j / k_ == i / k_; ++j)
                dsm.set(i, j, 1.0);
        break;
    case ProblemKind::HTrap:
    case ProblemKind::HIFF:
    case ProblemKind::AsymHTrap:
    {
        const std::size_t levels = exact_levels(ell_, k_);
        for (std::size_t i = 0; i < ell_; ++i)
        {
            for (std::size_t j = i + 1; j < ell_; ++j)
            {
                // q = number of levels whose groups contain both i and j.
                std::size_t shared = 0;
                std::size_t group = 1;
                for (std::size_t h = 1; h <= levels; ++h)
                {
                    group *= k_;
                    if (i / group == j / group)
                        ++shared;
                }
                dsm.set(i, j, std::pow(static_cast<double>(k_), static_cast<double>(shared) - 1.0));
            }
        }
        break;
    }
    case ProblemKind::NKS1:
    {
        const std::size_t windows = ell_ - k_ + 1;
        for (std::size_t i = 0; i < ell_; ++i)
        {
            for (std::size_t j = i + 1; j < ell_; ++j)
            {
                const long first = std::max<long>(0, static_cast<long>(j) - static_cast<long>(k_) + 1);
                const long last = std::min<long>(static_cast<long>(i), static_cast<long>(windows) - 1);
                dsm.set(i, j, static_cast<double>(std::max<long>(0, last - first + 1)));
            }
        }
        break;
    }
    case ProblemKind::MaxCut:
    {
        const auto &g = std::get<MaxCutGraph>(payload_);
        for (std::size_t i = 0; i < ell_; ++i)
            for (std::size_t j = i + 1; j < ell_; ++j)
                dsm.set(i, j, std::abs(g.weight(i, j)));
        break;
    }
    default:
        throw UnsupportedKind("no weighted VIG defined for " + to_string(kind_));
    }
    return dsm;
}

std::string ProblemInstance::name() const
{
    switch (kind_)
    {
    case ProblemKind::Trap:
        return "Trap" + std::to_string(k_);
    case ProblemKind::HTrap:
        return "HTrap" + std::to_string(k_);
    case ProblemKind::HIFF:
        return "HIFF";
    case ProblemKind::BimTrap:
        return "BimTrap" + std::to_string(k_);
    case ProblemKind::AsymTrap:
        return "AsymTrap" + std::to_string(k_);
    case ProblemKind::AsymHTrap:
        return "AsymHTrap" + std::to_string(k_);
    case ProblemKind::NKS1:
        return "NK-S1";
    case ProblemKind::MaxCut:
        return variant_ == MaxCutVariant::Full ? "MaxCut-Full" : "MaxCut-Geo";
    }
    return "?";
}

const NkTables &ProblemInstance::nk() const
{
    if (const auto *p = std::get_if<NkTables>(&payload_))
        return *p;
    throw UnsupportedKind("instance carries no NK tables");
}

const MaxCutGraph &ProblemInstance::graph() const
{
    if (const auto *p = std::get_if<MaxCutGraph>(&payload_))
        return *p;
    throw UnsupportedKind("instance carries no MaxCut graph");
}

double sample_beta_alpha_one(Rng &rng, double alpha)
{
    // CDF of Beta(alpha, 1) is x^alpha.
    return std::pow(rng.uniform(), 1.0 / alpha);
}

ProblemInstance gen_nks1(std::size_t ell, std::size_t k, std::uint64_t seed)
{
    require(k >= 1 && ell >= k, "NK-S1 requires ell >= k");
    Rng rng(seed);
    NkTables nk;
    nk.k = k;
    nk.tables.resize(ell - k + 1);
    for (auto &table : nk.tables)
    {
        table.resize(std::size_t{1} << k);
        for (auto &w : table)
            w = rng.uniform() * 1e6;
    }
    return ProblemInstance::nks1(std::move(nk), seed);
}

namespace
{

std::optional<double> exhaustive_vtr(const MaxCutGraph &graph)
{
    if (graph.vertices() <= maxcut_exhaustive_limit)
        return maxcut_exhaustive_optimum(graph);
    return std::nullopt;
}

} // namespace

ProblemInstance gen_maxcut_full(std::size_t ell, std::uint64_t seed)
{
    require(ell >= 2, "MaxCut requires ell >= 2");
    Rng rng(seed);
    MaxCutGraph graph(ell);
    for (std::size_t i = 0; i < ell; ++i)
        for (std::size_t j = i + 1; j < ell; ++j)
            graph.set_weight(i, j, 1.0 + 4.0 * sample_beta_alpha_one(rng, 100.0));
    auto vtr = exhaustive_vtr(graph);
    return ProblemInstance::maxcut(std::move(graph), MaxCutVariant::Full, seed, vtr);
}

double geo_weight(std::pair<double, double> a, std::pair<double, double> b)
{
    return std::floor(std::hypot(a.first - b.first, a.second - b.second));
}

ProblemInstance gen_maxcut_geo(std::size_t ell, std::uint64_t seed)
{
    require(ell >= 2, "MaxCut requires ell >= 2");
    Rng rng(seed);
    std::vector<std::pair<double, double>> points(ell);
    for (auto &[x, y] : points)
    {
        x = rng.uniform() * 1000.0;
        y = rng.uniform() * 1000.0;
    }
    MaxCutGraph graph(ell);
    for (std::size_t i = 0; i < ell; ++i)
        for (std::size_t j = i + 1; j < ell; ++j)
            graph.set_weight(i, j, geo_weight(points[i], points[j]));
    auto vtr = exhaustive_vtr(graph);
    return ProblemInstance::maxcut(std::move(graph), MaxCutVariant::Geo, seed, vtr);
}

std::string to_string(ProblemKind kind)
{
    switch (kind)
    {
    case ProblemKind::Trap:
        return "Trap";
    case ProblemKind::HTrap:
        return "HTrap";
    case ProblemKind::HIFF:
        return "HIFF";
    case ProblemKind::BimTrap:
        return "BimTrap";
    case ProblemKind::AsymTrap:
        return "AsymTrap";
    case ProblemKind::AsymHTrap:
        return "AsymHTrap";
    case ProblemKind::NKS1:
        return "NKS1";
    case ProblemKind::MaxCut:
        return "MaxCut";
    }
    return "?";
}

} // namespace gigomea
