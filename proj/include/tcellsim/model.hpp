#pragma once

// Naive T cell population model: rate constants, homeostatic modifier
// functions and the three-compartment state derivatives.
//
// Units throughout: densities in cells per mm^3, time in years, rates in
// 1/year.

#include <string>
#include <utility>
#include <vector>

namespace tcellsim {

struct ModelParams {
    double s0 = 0.0;         // thymic output at birth, cells/mm^3/year
    double lambda_t = 0.0;   // thymic involution rate
    double lambda_n = 0.0;   // thymic naive -> proliferating naive conversion
    double mu_n = 0.0;       // thymic naive death rate
    double mu_np = 0.0;      // proliferating naive death rate
    double c = 0.0;          // peripheral proliferation rate
    double lambda_mn = 0.0;  // memory -> proliferating naive reversion
    double mu_m = 0.0;       // memory death rate
    double lambda_a = 0.0;   // active -> memory reversion
    double n_bar_p = 1.0;    // homeostatic equilibrium of the proliferating pool
    double s_bar = 0.0;      // thymic export feedback strength
    double b = 0.0;          // death-rate asymmetry

    /// Throws InvalidArgument unless every field is >= 0 and n_bar_p > 0.
    void validate() const;

    bool operator==(const ModelParams&) const = default;
};

struct StateVector {
    double t = 0.0;
    double n = 0.0;   // naive cells of thymic origin
    double np = 0.0;  // naive cells that have undergone peripheral proliferation
    double m = 0.0;   // memory cells

    double total_naive() const { return n + np; }
    bool operator==(const StateVector&) const = default;
};

struct Derivatives {
    double dn = 0.0;
    double dnp = 0.0;
    double dm = 0.0;
};

struct Scenario {
    int id = 0;
    std::string description;
    ModelParams params;
};

/// Activated cell density as a function of age. Ages strictly increasing,
/// counts non-negative, at least one point.
class ActiveCellTable {
public:
    struct Point {
        double age = 0.0;
        double count = 0.0;
    };

    ActiveCellTable() = default;
    /// Throws DomainError when the invariants do not hold.
    explicit ActiveCellTable(std::vector<Point> points);

    const std::vector<Point>& points() const { return points_; }
    bool empty() const { return points_.empty(); }
    std::size_t size() const { return points_.size(); }

    /// A table that is zero at every age.
    static ActiveCellTable zero();
    static ActiveCellTable constant(double count);

private:
    std::vector<Point> points_;
};

/// Cells present at birth, all of thymic origin.
inline constexpr double kInitialNaive = 3673.0;
/// Thymic output at birth.
inline constexpr double kThymicOutputAtBirth = 56615.0;

StateVector initial_state();

/// s(Np) = 1 / (1 + s_bar * Np / n_bar_p)
double export_modifier(double np, const ModelParams& p);

/// g(Np) = 1 + (b Np / n_bar_p) / (1 + Np / n_bar_p)
double death_modifier(double np, const ModelParams& p);

/// h(N, Np) = 1 / (1 + (N + Np) / n_bar_p)
double dilution(double n, double np, const ModelParams& p);

/// s0 exp(-lambda_t t) s(Np)
double thymic_output(double t, double np, const ModelParams& p);

/// mu_n (1 + 300 / n_bar_p). Scenario 1 bypasses this and uses c = 0.
double proliferation_c(const ModelParams& p);

/// Piecewise-linear interpolation, clamped to the end values outside the
/// table's age range. Throws DomainError on an empty table.
double lookup_active(double t, const ActiveCellTable& actives);

Derivatives derivatives(const StateVector& state, const ModelParams& p,
                        const ActiveCellTable& actives);

/// Scenario rows 1..5. Throws InvalidArgument for any other id.
Scenario scenario_params(int id);

inline constexpr int kScenarioCount = 5;

} // namespace tcellsim
