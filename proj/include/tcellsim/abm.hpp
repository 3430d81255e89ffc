#pragma once

// Stochastic agent-based counterpart of the ODE model. Every cell is an
// agent in one of three states; agents do not interact directly and only
// see the population densities through the homeostatic modifiers.

#include "tcellsim/model.hpp"
#include "tcellsim/ode.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace tcellsim {

enum class CellState : std::uint8_t { Naive, NaiveFromProliferation, Memory };

const char* to_string(CellState state);

struct Agent {
    CellState state = CellState::Naive;
};

struct PopulationCounts {
    std::int64_t naive = 0;
    std::int64_t naive_prolif = 0;
    std::int64_t memory = 0;

    std::int64_t total() const { return naive + naive_prolif + memory; }
    bool operator==(const PopulationCounts&) const = default;
};

struct AgentPopulation {
    std::vector<Agent> agents;
    // Fractional expected spawns carried over to the next step.
    double thymus_reservoir = 0.0;
    double activation_reservoir = 0.0;

    static AgentPopulation from_counts(const PopulationCounts& counts);
    PopulationCounts counts() const;
};

struct AbmConfig {
    double dt = 0.01;
    double t_end = 100.0;
    std::size_t replicates = 50;
    std::uint64_t base_seed = 42;
    double scale = 1.0;               // agents per cell/mm^3
    std::size_t record_stride = 10;
    unsigned threads = 0;             // 0: one per hardware thread

    void validate() const;
};

/// Per-step event counts. Satisfies, per state,
/// end = start + inflow - outflow (see StepTally::apply).
struct StepTally {
    std::int64_t thymic_births = 0;
    std::int64_t memory_births = 0;        // active -> memory
    std::int64_t offspring = 0;            // proliferating naive reproduction
    std::int64_t conversions = 0;          // naive -> proliferating naive
    std::int64_t reversions = 0;           // memory -> proliferating naive
    std::int64_t naive_deaths = 0;
    std::int64_t naive_prolif_deaths = 0;
    std::int64_t memory_deaths = 0;

    PopulationCounts apply(const PopulationCounts& start) const;
};

using Rng = std::mt19937_64;

/// 1 - exp(-rate * dt): probability that an event with constant hazard
/// occurs within one step.
double hazard_to_prob(double rate, double dt);

/// Uniform double in [0, 1) from the top 53 bits of one engine draw.
double uniform01(Rng& rng);

/// Independent per-replicate stream derived from (base_seed, replicate).
Rng replicate_rng(std::uint64_t base_seed, std::uint64_t replicate);

/// Advances the population by cfg.dt from time t.
///
/// Densities feeding g, h and the thymic feedback are taken from the
/// population at the start of the step. Spawned cells (thymic output,
/// activated -> memory) and cells that changed state or were born by
/// division during the step are exposed to their new state's hazards for
/// half a step, the mean residence time of an entrant born uniformly within
/// the step. Their own events are applied without further exposure.
StepTally step_population(AgentPopulation& pop, double t, const Scenario& scenario,
                          const ActiveCellTable& actives, const AbmConfig& cfg, Rng& rng);

/// One stochastic run. Densities are agent counts divided by cfg.scale.
Trajectory run_single(const Scenario& scenario, const ActiveCellTable& actives,
                      const AbmConfig& cfg, const StateVector& init, Rng& rng);

struct ReplicateSet {
    std::vector<Trajectory> trajectories;
    Trajectory mean;
};

/// cfg.replicates independent runs from init (default: 3673 naive cells per
/// mm^3) and their pointwise mean. Numerical failures are rethrown with the
/// replicate index in the message.
ReplicateSet run_replicates(const Scenario& scenario, const ActiveCellTable& actives,
                            const AbmConfig& cfg, const StateVector& init = initial_state());

/// Pointwise mean of trajectories sharing one time grid.
Trajectory mean_trajectory(const std::vector<Trajectory>& runs);

} // namespace tcellsim
