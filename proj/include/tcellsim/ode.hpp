#pragma once

// Deterministic stock-and-flow simulation: fixed-step explicit integration of
// the three-compartment model.

#include "tcellsim/model.hpp"

#include <cstddef>
#include <vector>

namespace tcellsim {

enum class IntegrationMethod { Euler, RK4 };

struct IntegrationConfig {
    double dt = 0.01;
    IntegrationMethod method = IntegrationMethod::RK4;
    double t_end = 100.0;
    std::size_t record_stride = 10;

    void validate() const;
};

/// Uniformly sampled series of states. Sample i sits at t = i * spacing.
class Trajectory {
public:
    Trajectory() = default;
    Trajectory(double spacing, std::vector<StateVector> samples);

    const std::vector<StateVector>& samples() const { return samples_; }
    std::size_t size() const { return samples_.size(); }
    bool empty() const { return samples_.empty(); }
    double spacing() const { return spacing_; }
    const StateVector& operator[](std::size_t i) const { return samples_[i]; }
    const StateVector& back() const { return samples_.back(); }

    bool operator==(const Trajectory&) const = default;

private:
    double spacing_ = 0.0;
    std::vector<StateVector> samples_;
};

/// Number of whole steps of size dt that fit in t_end, tolerant of the
/// rounding in t_end / dt.
std::size_t step_count(double t_end, double dt);

/// Integrates the model from init.t. Negative components after a step are
/// clamped to zero. Throws NumericalFailure naming the step on a non-finite
/// state.
Trajectory integrate(const Scenario& scenario, const StateVector& init,
                     const ActiveCellTable& actives, const IntegrationConfig& cfg);

/// N + Np per sample.
std::vector<double> total_naive(const Trajectory& traj);

} // namespace tcellsim
