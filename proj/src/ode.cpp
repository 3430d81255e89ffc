#include "tcellsim/ode.hpp"

#include "tcellsim/errors.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace tcellsim {

void IntegrationConfig::validate() const
{
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw InvalidArgument(fmt::format("dt must be > 0, got {}", dt));
    if (!(t_end > 0.0) || !std::isfinite(t_end))
        throw InvalidArgument(fmt::format("t_end must be > 0, got {}", t_end));
    if (record_stride < 1)
        throw InvalidArgument("record_stride must be >= 1");
}

Trajectory::Trajectory(double spacing, std::vector<StateVector> samples)
    : spacing_(spacing), samples_(std::move(samples))
{
}

std::size_t step_count(double t_end, double dt)
{
    return static_cast<std::size_t>(std::floor(t_end / dt + 1e-9));
}

namespace {

StateVector advance(const StateVector& s, const Derivatives& d, double h)
{
    return {s.t + h, s.n + h * d.dn, s.np + h * d.dnp, s.m + h * d.dm};
}

StateVector rk4_step(const StateVector& s, double dt, const ModelParams& p,
                     const ActiveCellTable& actives)
{
    const Derivatives k1 = derivatives(s, p, actives);
    const Derivatives k2 = derivatives(advance(s, k1, dt / 2), p, actives);
    const Derivatives k3 = derivatives(advance(s, k2, dt / 2), p, actives);
    const Derivatives k4 = derivatives(advance(s, k3, dt), p, actives);
    return {
        s.t + dt,
        s.n + dt / 6 * (k1.dn + 2 * k2.dn + 2 * k3.dn + k4.dn),
        s.np + dt / 6 * (k1.dnp + 2 * k2.dnp + 2 * k3.dnp + k4.dnp),
        s.m + dt / 6 * (k1.dm + 2 * k2.dm + 2 * k3.dm + k4.dm),
    };
}

} // namespace

Trajectory integrate(const Scenario& scenario, const StateVector& init,
                     const ActiveCellTable& actives, const IntegrationConfig& cfg)
{
    cfg.validate();
    scenario.params.validate();
    if (actives.empty())
        throw DomainError("active cell table is empty");
    if (init.t < 0 || init.n < 0 || init.np < 0 || init.m < 0)
        throw InvalidArgument("initial state must be non-negative");

    const std::size_t steps = step_count(cfg.t_end, cfg.dt);
    std::vector<StateVector> samples;
    samples.reserve(steps / cfg.record_stride + 1);
    samples.push_back(init);

    StateVector state = init;
    for (std::size_t k = 1; k <= steps; ++k) {
        state = cfg.method == IntegrationMethod::RK4
                    ? rk4_step(state, cfg.dt, scenario.params, actives)
                    : advance(state, derivatives(state, scenario.params, actives), cfg.dt);
        // Recompute time from the step index so the grid does not drift.
        state.t = init.t + static_cast<double>(k) * cfg.dt;

        if (!std::isfinite(state.n) || !std::isfinite(state.np) || !std::isfinite(state.m))
            throw NumericalFailure(fmt::format("non-finite state at step {} (t = {})", k, state.t));
        state.n = std::max(state.n, 0.0);
        state.np = std::max(state.np, 0.0);
        state.m = std::max(state.m, 0.0);

        if (k % cfg.record_stride == 0)
            samples.push_back(state);
    }
    return Trajectory(cfg.dt * static_cast<double>(cfg.record_stride), std::move(samples));
}

std::vector<double> total_naive(const Trajectory& traj)
{
    std::vector<double> out;
    out.reserve(traj.size());
    for (const auto& s : traj.samples())
        out.push_back(s.total_naive());
    return out;
}

} // namespace tcellsim
