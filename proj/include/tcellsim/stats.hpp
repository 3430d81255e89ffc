#pragma once

#include "tcellsim/ode.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace tcellsim {

enum class RankSumMethod { ExactEnumeration, NormalApproximation };

const char* to_string(RankSumMethod method);

/// Which path wilcoxon_rank_sum takes. Auto picks exact enumeration for
/// n1 + n2 <= 20 without ties, the normal approximation otherwise.
enum class RankSumMode { Auto, ForceExact, ForceNormal };

struct RankSumResult {
    double u_statistic = 0.0;  // Mann-Whitney U of the first sample
    double p_value = 1.0;      // two-sided
    RankSumMethod method = RankSumMethod::NormalApproximation;
};

inline constexpr std::size_t kExactRankSumLimit = 20;

/// Midranks (1-based) of the pooled values.
std::vector<double> midranks(std::span<const double> pooled);

/// Number of ways to pick n1 of the ranks 1..n1+n2 for each possible U,
/// indexed by U in [0, n1*n2].
std::vector<double> rank_sum_null_counts(std::size_t n1, std::size_t n2);

/// Two-sided Wilcoxon rank-sum (Mann-Whitney U) test. Throws InvalidArgument
/// on an empty sample, or on ForceExact with ties.
RankSumResult wilcoxon_rank_sum(std::span<const double> x, std::span<const double> y,
                                RankSumMode mode = RankSumMode::Auto);

enum class Quantity { N, Np, M, Total };

const char* to_string(Quantity q);
/// Accepts the to_string names, case-sensitive. Throws InvalidArgument.
Quantity parse_quantity(const std::string& name);

std::vector<double> extract(const Trajectory& traj, Quantity q);

/// Samples of traj whose time is a multiple of `interval`.
Trajectory subsample(const Trajectory& traj, double interval);

struct Comparison {
    Quantity quantity = Quantity::Total;
    RankSumResult test;
    double rms_difference = 0.0;
    double max_difference = 0.0;
    std::size_t test_points = 0;
};

/// Rank-sum test on the quantity sampled every `test_interval` years, plus
/// RMS and max absolute difference over every recorded sample. Throws
/// InvalidArgument when the two time grids differ.
Comparison compare_trajectories(const Trajectory& a, const Trajectory& b, Quantity q,
                                double test_interval = 1.0);

struct Summary {
    std::size_t count = 0;
    double mean = 0.0;
    double stddev = 0.0;  // sample (n - 1) standard deviation
    double std_error = 0.0;
};

Summary summarize(std::span<const double> values);

/// Root-mean-square of a - b. Sizes must match.
double rms_difference(std::span<const double> a, std::span<const double> b);

} // namespace tcellsim
