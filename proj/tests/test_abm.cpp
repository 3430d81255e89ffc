#include "tcellsim/abm.hpp"
#include "tcellsim/data_io.hpp"
#include "tcellsim/errors.hpp"
#include "tcellsim/stats.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace tcellsim;

namespace {

Scenario null_scenario()
{
    return {0, "null", ModelParams{}};
}

AbmConfig short_config(double t_end, std::size_t replicates = 1)
{
    AbmConfig cfg;
    cfg.t_end = t_end;
    cfg.replicates = replicates;
    return cfg;
}

} // namespace

TEST(HazardToProb, KnownValues)
{
    EXPECT_EQ(hazard_to_prob(0.0, 0.01), 0.0);
    EXPECT_NEAR(hazard_to_prob(std::numbers::ln2, 1.0), 0.5, 1e-15);
    EXPECT_NEAR(hazard_to_prob(1.0, std::numbers::ln2), 0.5, 1e-15);
    EXPECT_NEAR(hazard_to_prob(4.4, 0.01), 0.04304604252695332, 1e-15);
    EXPECT_LE(hazard_to_prob(1e6, 1.0), 1.0);
}

TEST(Uniform01, InUnitInterval)
{
    Rng rng(7);
    for (int i = 0; i < 100000; ++i) {
        const double u = uniform01(rng);
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
}

TEST(StepPopulation, NullStepLeavesPopulationUnchanged)
{
    AgentPopulation pop = AgentPopulation::from_counts({50, 30, 20});
    const auto before = pop.counts();
    Rng rng(1);
    const AbmConfig cfg;
    for (int k = 0; k < 100; ++k) {
        const StepTally tally = step_population(pop, k * cfg.dt, null_scenario(), ActiveCellTable::zero(), cfg, rng);
        EXPECT_EQ(tally.apply(before), before);
    }
    EXPECT_EQ(pop.counts(), before);
}

TEST(StepPopulation, TallyConservesEveryState)
{
    // Scenario 1 exercises every transition, including memory reversion.
    const Scenario s = scenario_params(1);
    const auto actives = load_active_table(placeholder_active_table_path());
    AgentPopulation pop = AgentPopulation::from_counts({3000, 800, 900});
    AbmConfig cfg;
    cfg.dt = 0.05;
    Rng rng(99);
    std::int64_t conversions = 0;
    std::int64_t reversions = 0;
    for (int k = 0; k < 400; ++k) {
        const auto start = pop.counts();
        const StepTally tally = step_population(pop, k * cfg.dt, s, actives, cfg, rng);
        const auto end = pop.counts();
        ASSERT_EQ(tally.apply(start), end) << "step " << k;
        ASSERT_EQ(end.total(), static_cast<std::int64_t>(pop.agents.size()));
        ASSERT_GE(end.naive, 0);
        ASSERT_GE(end.naive_prolif, 0);
        ASSERT_GE(end.memory, 0);
        conversions += tally.conversions;
        reversions += tally.reversions;
    }
    EXPECT_GT(conversions, 0);
    EXPECT_GT(reversions, 0);
}

TEST(StepPopulation, FractionalSpawnsAccumulate)
{
    // 25 cells/year for 0.01 years = 0.25 agents per step.
    ModelParams p;
    p.s0 = 25.0;
    AgentPopulation pop;
    Rng rng(3);
    const AbmConfig cfg;
    std::int64_t born = 0;
    for (int k = 0; k < 40; ++k)
        born += step_population(pop, 0.0, {0, "spawn", p}, ActiveCellTable::zero(), cfg, rng).thymic_births;
    EXPECT_EQ(born, 10);
    EXPECT_EQ(pop.counts().naive, 10);
}

TEST(StepPopulation, SpawnedAgentsTakeSourceState)
{
    ModelParams p;
    p.s0 = 300.0;
    p.lambda_a = 1.0;
    AgentPopulation pop;
    Rng rng(5);
    step_population(pop, 0.0, {0, "spawn", p}, ActiveCellTable::constant(500.0), AbmConfig{}, rng);
    const auto c = pop.counts();
    EXPECT_EQ(c.naive, 3);
    EXPECT_EQ(c.memory, 5);
    EXPECT_EQ(c.naive_prolif, 0);
}

TEST(StepPopulation, DivisionCopiesParentState)
{
    ModelParams p;
    p.c = 50.0;  // h = 1 when the population is tiny relative to n_bar_p
    p.n_bar_p = 1e9;
    AgentPopulation pop = AgentPopulation::from_counts({0, 100, 0});
    Rng rng(11);
    AbmConfig cfg;
    cfg.dt = 0.01;
    std::int64_t offspring = 0;
    for (int k = 0; k < 10; ++k)
        offspring += step_population(pop, 0.0, {0, "divide", p}, ActiveCellTable::zero(), cfg, rng).offspring;
    const auto c = pop.counts();
    EXPECT_GT(offspring, 0);
    EXPECT_EQ(c.naive, 0);
    EXPECT_EQ(c.memory, 0);
    EXPECT_EQ(c.naive_prolif, 100 + offspring);
}

TEST(RunReplicates, PureDeathMatchesExponentialSurvival)
{
    ModelParams p;
    p.mu_m = 0.05;
    AbmConfig cfg = short_config(20.0, 20);
    cfg.base_seed = 2024;
    const ReplicateSet set = run_replicates({0, "death", p}, ActiveCellTable::zero(), cfg, {0.0, 0.0, 0.0, 2000.0});
    std::vector<double> fractions;
    for (const auto& r : set.trajectories)
        fractions.push_back(r.back().m / 2000.0);
    const Summary s = summarize(fractions);
    EXPECT_NEAR(s.mean, std::exp(-1.0), 3.0 * s.std_error) << "se=" << s.std_error;
}

TEST(RunReplicates, InitialPopulationIsScaled)
{
    AbmConfig cfg = short_config(0.1, 1);
    cfg.scale = 2.5;
    const ReplicateSet set = run_replicates(null_scenario(), ActiveCellTable::zero(), cfg);
    EXPECT_DOUBLE_EQ(set.trajectories[0][0].n, std::round(3673.0 * 2.5) / 2.5);
    EXPECT_DOUBLE_EQ(set.mean.back().n, std::round(3673.0 * 2.5) / 2.5);
}

TEST(RunReplicates, ZeroRatesKeepCountConstant)
{
    const ReplicateSet set = run_replicates(null_scenario(), ActiveCellTable::zero(), short_config(5.0, 2));
    for (const auto& traj : set.trajectories)
        for (const auto& s : traj.samples())
            EXPECT_EQ(s.n, 3673.0);
}

TEST(RunReplicates, FixedSeedIsBitReproducible)
{
    const auto actives = load_active_table(placeholder_active_table_path());
    AbmConfig cfg = short_config(10.0, 3);
    cfg.base_seed = 77;
    const ReplicateSet a = run_replicates(scenario_params(3), actives, cfg);
    const ReplicateSet b = run_replicates(scenario_params(3), actives, cfg);
    EXPECT_TRUE(a.mean == b.mean);
    ASSERT_EQ(a.trajectories.size(), 3u);
    for (std::size_t r = 0; r < 3; ++r)
        EXPECT_TRUE(a.trajectories[r] == b.trajectories[r]);
    EXPECT_FALSE(a.trajectories[0] == a.trajectories[1]);

    cfg.threads = 3;
    const ReplicateSet c = run_replicates(scenario_params(3), actives, cfg);
    EXPECT_TRUE(a.mean == c.mean);
}

TEST(RunReplicates, MeanIsPointwiseAverage)
{
    const auto actives = load_active_table(placeholder_active_table_path());
    const ReplicateSet set = run_replicates(scenario_params(5), actives, short_config(3.0, 4));
    for (std::size_t i = 0; i < set.mean.size(); ++i) {
        double n = 0.0;
        for (const auto& r : set.trajectories)
            n += r[i].n;
        EXPECT_DOUBLE_EQ(set.mean[i].n, n / 4.0);
        EXPECT_EQ(set.mean[i].t, set.trajectories[0][i].t);
    }
}

TEST(RunReplicates, ReportsFailingReplicate)
{
    ModelParams p;
    p.s0 = 1e308;
    AbmConfig cfg = short_config(1.0, 2);
    try {
        run_replicates({0, "overflow", p}, ActiveCellTable::zero(), cfg);
        FAIL() << "expected NumericalFailure";
    } catch (const NumericalFailure& e) {
        EXPECT_NE(std::string(e.what()).find("replicate 0"), std::string::npos) << e.what();
    }
}

TEST(RunReplicates, RejectsInvalidConfig)
{
    AbmConfig cfg;
    cfg.replicates = 0;
    EXPECT_THROW(run_replicates(null_scenario(), ActiveCellTable::zero(), cfg), InvalidArgument);
    cfg = {};
    cfg.scale = 0.0;
    EXPECT_THROW(run_replicates(null_scenario(), ActiveCellTable::zero(), cfg), InvalidArgument);
    cfg = {};
    cfg.dt = -1.0;
    EXPECT_THROW(run_replicates(null_scenario(), ActiveCellTable::zero(), cfg), InvalidArgument);
}

// The stochastic mean tracks the deterministic solution in the early,
// well-populated phase of scenario 2.
TEST(RunReplicates, TracksOdeInScenarioTwo)
{
    const auto actives = load_active_table(placeholder_active_table_path());
    AbmConfig cfg = short_config(30.0, 8);
    IntegrationConfig ode_cfg;
    ode_cfg.t_end = 30.0;
    const Trajectory ode = integrate(scenario_params(2), initial_state(), actives, ode_cfg);
    const ReplicateSet abm = run_replicates(scenario_params(2), actives, cfg);
    ASSERT_EQ(ode.size(), abm.mean.size());
    for (std::size_t i = 10; i < ode.size(); i += 50) {
        EXPECT_NEAR(abm.mean[i].n, ode[i].n, 0.03 * ode[i].n) << "t=" << ode[i].t;
        EXPECT_NEAR(abm.mean[i].np, ode[i].np, 0.03 * ode[i].np) << "t=" << ode[i].t;
    }
}
