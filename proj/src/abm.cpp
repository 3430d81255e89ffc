#include "tcellsim/abm.hpp"

#include "tcellsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

#include <fmt/format.h>

namespace tcellsim {

const char* to_string(CellState state)
{
    switch (state) {
    case CellState::Naive: return "Naive";
    case CellState::NaiveFromProliferation: return "NaiveFromProliferation";
    case CellState::Memory: return "Memory";
    }
    return "?";
}

AgentPopulation AgentPopulation::from_counts(const PopulationCounts& counts)
{
    if (counts.naive < 0 || counts.naive_prolif < 0 || counts.memory < 0)
        throw InvalidArgument("agent counts must be non-negative");
    AgentPopulation pop;
    pop.agents.reserve(static_cast<std::size_t>(counts.total()));
    pop.agents.insert(pop.agents.end(), counts.naive, Agent{CellState::Naive});
    pop.agents.insert(pop.agents.end(), counts.naive_prolif, Agent{CellState::NaiveFromProliferation});
    pop.agents.insert(pop.agents.end(), counts.memory, Agent{CellState::Memory});
    return pop;
}

PopulationCounts AgentPopulation::counts() const
{
    PopulationCounts c;
    for (const Agent& a : agents) {
        switch (a.state) {
        case CellState::Naive: ++c.naive; break;
        case CellState::NaiveFromProliferation: ++c.naive_prolif; break;
        case CellState::Memory: ++c.memory; break;
        }
    }
    return c;
}

void AbmConfig::validate() const
{
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw InvalidArgument(fmt::format("dt must be > 0, got {}", dt));
    if (!(t_end > 0.0) || !std::isfinite(t_end))
        throw InvalidArgument(fmt::format("t_end must be > 0, got {}", t_end));
    if (replicates < 1)
        throw InvalidArgument("replicates must be >= 1");
    if (!(scale > 0.0) || !std::isfinite(scale))
        throw InvalidArgument(fmt::format("scale must be > 0, got {}", scale));
    if (record_stride < 1)
        throw InvalidArgument("record_stride must be >= 1");
}

PopulationCounts StepTally::apply(const PopulationCounts& start) const
{
    return {
        start.naive + thymic_births - conversions - naive_deaths,
        start.naive_prolif + conversions + reversions + offspring - naive_prolif_deaths,
        start.memory + memory_births - reversions - memory_deaths,
    };
}

double hazard_to_prob(double rate, double dt)
{
    return -std::expm1(-rate * dt);
}

double uniform01(Rng& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Rng replicate_rng(std::uint64_t base_seed, std::uint64_t replicate)
{
    std::seed_seq seq{
        static_cast<std::uint32_t>(base_seed),
        static_cast<std::uint32_t>(base_seed >> 32),
        static_cast<std::uint32_t>(replicate),
        static_cast<std::uint32_t>(replicate >> 32),
    };
    return Rng(seq);
}

namespace {

// Roughly a gigabyte of agents; anything beyond is treated as divergence.
constexpr double kAgentLimit = 1e9;

// Per-state event probabilities for one exposure window.
struct Exposure {
    // Naive: competing death / conversion.
    double naive_exit = 0.0;
    double naive_death = 0.0;        // share of naive_exit that is death
    // Proliferating naive: independent death and division.
    double prolif_death = 0.0;
    double prolif_divide = 0.0;
    // Memory: competing death / reversion.
    double memory_exit = 0.0;
    double memory_death = 0.0;
};

struct Rates {
    double naive_death;
    double conversion;
    double prolif_death;
    double divide;
    double memory_death;
    double reversion;

    Exposure over(double window) const
    {
        Exposure e;
        const double naive_total = naive_death + conversion;
        e.naive_exit = hazard_to_prob(naive_total, window);
        e.naive_death = naive_total > 0 ? e.naive_exit * naive_death / naive_total : 0.0;
        e.prolif_death = hazard_to_prob(prolif_death, window);
        e.prolif_divide = hazard_to_prob(divide, window);
        const double memory_total = memory_death + reversion;
        e.memory_exit = hazard_to_prob(memory_total, window);
        e.memory_death = memory_total > 0 ? e.memory_exit * memory_death / memory_total : 0.0;
        return e;
    }
};

// Draws the events of one agent. Survivors (in their possibly new state)
// are pushed to `stay` if unchanged, or to `moved` if they changed state;
// offspring go to `moved`.
inline void expose(Agent agent, const Exposure& e, Rng& rng, StepTally& tally,
                   std::vector<Agent>& stay, std::vector<Agent>& moved)
{
    switch (agent.state) {
    case CellState::Naive: {
        const double u = uniform01(rng);
        if (u < e.naive_death) {
            ++tally.naive_deaths;
        } else if (u < e.naive_exit) {
            ++tally.conversions;
            moved.push_back({CellState::NaiveFromProliferation});
        } else {
            stay.push_back(agent);
        }
        break;
    }
    case CellState::NaiveFromProliferation: {
        const bool dies = uniform01(rng) < e.prolif_death;
        const bool divides = uniform01(rng) < e.prolif_divide;
        if (divides) {
            ++tally.offspring;
            moved.push_back(agent);
        }
        if (dies)
            ++tally.naive_prolif_deaths;
        else
            stay.push_back(agent);
        break;
    }
    case CellState::Memory: {
        const double u = uniform01(rng);
        if (u < e.memory_death) {
            ++tally.memory_deaths;
        } else if (u < e.memory_exit) {
            ++tally.reversions;
            moved.push_back({CellState::NaiveFromProliferation});
        } else {
            stay.push_back(agent);
        }
        break;
    }
    }
}

std::int64_t emit_whole(double& reservoir, double expected, const char* source, double t)
{
    if (!std::isfinite(expected) || expected < 0.0 || expected > kAgentLimit)
        throw NumericalFailure(fmt::format("invalid {} spawn expectation {} at t = {}", source, expected, t));
    reservoir += expected;
    const double whole = std::floor(reservoir);
    reservoir -= whole;
    return static_cast<std::int64_t>(whole);
}

} // namespace

StepTally step_population(AgentPopulation& pop, double t, const Scenario& scenario,
                          const ActiveCellTable& actives, const AbmConfig& cfg, Rng& rng)
{
    const ModelParams& p = scenario.params;
    const PopulationCounts start = pop.counts();
    const double n = static_cast<double>(start.naive) / cfg.scale;
    const double np = static_cast<double>(start.naive_prolif) / cfg.scale;

    const Rates rates{
        p.mu_n * death_modifier(np, p),
        p.lambda_n,
        p.mu_np,
        p.c * dilution(n, np, p),
        p.mu_m,
        p.lambda_mn,
    };
    const Exposure full = rates.over(cfg.dt);
    const Exposure half = rates.over(cfg.dt / 2);

    StepTally tally;
    tally.thymic_births = emit_whole(pop.thymus_reservoir,
                                     thymic_output(t, np, p) * cfg.dt * cfg.scale, "thymic", t);
    tally.memory_births = emit_whole(pop.activation_reservoir,
                                     p.lambda_a * lookup_active(t, actives) * cfg.dt * cfg.scale,
                                     "memory", t);

    std::vector<Agent> next;
    next.reserve(pop.agents.size() + static_cast<std::size_t>(tally.thymic_births + tally.memory_births));
    std::vector<Agent> entrants;
    entrants.insert(entrants.end(), tally.thymic_births, Agent{CellState::Naive});
    entrants.insert(entrants.end(), tally.memory_births, Agent{CellState::Memory});

    for (const Agent& a : pop.agents)
        expose(a, full, rng, tally, next, entrants);

    // Second-generation entrants land directly in `next`.
    for (const Agent& a : entrants)
        expose(a, half, rng, tally, next, next);

    pop.agents = std::move(next);
    return tally;
}

namespace {

StateVector densities(const PopulationCounts& c, double t, double scale)
{
    return {t, static_cast<double>(c.naive) / scale, static_cast<double>(c.naive_prolif) / scale,
            static_cast<double>(c.memory) / scale};
}

PopulationCounts counts_for(const StateVector& init, double scale)
{
    const double total = (init.n + init.np + init.m) * scale;
    if (!std::isfinite(total) || total > kAgentLimit)
        throw NumericalFailure(fmt::format("initial population of {} agents exceeds the limit of {}", total,
                                           kAgentLimit));
    return {
        std::llround(init.n * scale),
        std::llround(init.np * scale),
        std::llround(init.m * scale),
    };
}

} // namespace

Trajectory run_single(const Scenario& scenario, const ActiveCellTable& actives,
                      const AbmConfig& cfg, const StateVector& init, Rng& rng)
{
    cfg.validate();
    scenario.params.validate();
    if (actives.empty())
        throw DomainError("active cell table is empty");

    AgentPopulation pop = AgentPopulation::from_counts(counts_for(init, cfg.scale));
    const std::size_t steps = step_count(cfg.t_end, cfg.dt);

    std::vector<StateVector> samples;
    samples.reserve(steps / cfg.record_stride + 1);
    samples.push_back(densities(pop.counts(), init.t, cfg.scale));

    for (std::size_t k = 1; k <= steps; ++k) {
        const double t = init.t + static_cast<double>(k - 1) * cfg.dt;
        step_population(pop, t, scenario, actives, cfg, rng);
        if (k % cfg.record_stride == 0)
            samples.push_back(densities(pop.counts(), init.t + static_cast<double>(k) * cfg.dt, cfg.scale));
    }
    return Trajectory(cfg.dt * static_cast<double>(cfg.record_stride), std::move(samples));
}

Trajectory mean_trajectory(const std::vector<Trajectory>& runs)
{
    if (runs.empty())
        throw InvalidArgument("mean of zero trajectories");
    const std::size_t len = runs.front().size();
    for (const auto& r : runs) {
        if (r.size() != len || r.spacing() != runs.front().spacing())
            throw InvalidArgument("trajectories do not share a time grid");
    }

    std::vector<StateVector> mean(len);
    const double inv = 1.0 / static_cast<double>(runs.size());
    for (std::size_t i = 0; i < len; ++i) {
        StateVector acc{runs.front()[i].t, 0.0, 0.0, 0.0};
        for (const auto& r : runs) {
            acc.n += r[i].n;
            acc.np += r[i].np;
            acc.m += r[i].m;
        }
        acc.n *= inv;
        acc.np *= inv;
        acc.m *= inv;
        mean[i] = acc;
    }
    return Trajectory(runs.front().spacing(), std::move(mean));
}

ReplicateSet run_replicates(const Scenario& scenario, const ActiveCellTable& actives,
                            const AbmConfig& cfg, const StateVector& init)
{
    cfg.validate();
    const std::size_t count = cfg.replicates;
    std::vector<Trajectory> runs(count);
    std::vector<std::exception_ptr> failures(count);

    auto work = [&](std::size_t first, std::size_t stride) {
        for (std::size_t r = first; r < count; r += stride) {
            try {
                Rng rng = replicate_rng(cfg.base_seed, r);
                runs[r] = run_single(scenario, actives, cfg, init, rng);
            } catch (...) {
                failures[r] = std::current_exception();
            }
        }
    };

    unsigned workers = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    if (workers <= 1) {
        work(0, 1);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back(work, w, workers);
    }

    for (std::size_t r = 0; r < count; ++r) {
        if (!failures[r])
            continue;
        try {
            std::rethrow_exception(failures[r]);
        } catch (const NumericalFailure& e) {
            throw NumericalFailure(fmt::format("replicate {}: {}", r, e.what()));
        }
    }

    ReplicateSet set;
    set.mean = mean_trajectory(runs);
    set.trajectories = std::move(runs);
    return set;
}

} // namespace tcellsim
