#include "tcellsim/stats.hpp"

#include "tcellsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace tcellsim {

const char* to_string(RankSumMethod method)
{
    return method == RankSumMethod::ExactEnumeration ? "exact-enumeration" : "normal-approximation";
}

std::vector<double> midranks(std::span<const double> pooled)
{
    std::vector<std::size_t> order(pooled.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });

    std::vector<double> ranks(pooled.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i + 1;
        while (j < order.size() && pooled[order[j]] == pooled[order[i]])
            ++j;
        // Positions i..j-1 share the average of ranks i+1..j.
        const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k)
            ranks[order[k]] = rank;
        i = j;
    }
    return ranks;
}

std::vector<double> rank_sum_null_counts(std::size_t n1, std::size_t n2)
{
    // ways[k][u]: subsets of size k drawn from the ranks seen so far whose
    // U contribution is u. Adding rank r (1-based, among r-1 earlier ranks)
    // to a subset of size k-1 adds r - k to U.
    const std::size_t n = n1 + n2;
    const std::size_t umax = n1 * n2;
    std::vector<std::vector<double>> ways(n1 + 1, std::vector<double>(umax + 1, 0.0));
    ways[0][0] = 1.0;
    for (std::size_t r = 1; r <= n; ++r) {
        const std::size_t kmax = std::min(r, n1);
        for (std::size_t k = kmax; k >= 1; --k) {
            const std::size_t shift = r - k;
            if (shift > n2)
                continue;
            auto& dst = ways[k];
            const auto& src = ways[k - 1];
            for (std::size_t u = umax; u + 1 > shift; --u)
                dst[u] += src[u - shift];
        }
    }
    return ways[n1];
}

namespace {

bool has_ties(std::span<const double> pooled)
{
    std::vector<double> sorted(pooled.begin(), pooled.end());
    std::sort(sorted.begin(), sorted.end());
    return std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
}

double normal_upper_tail(double z)
{
    return 0.5 * std::erfc(z / std::sqrt(2.0));
}

} // namespace

RankSumResult wilcoxon_rank_sum(std::span<const double> x, std::span<const double> y,
                                RankSumMode mode)
{
    if (x.empty() || y.empty())
        throw InvalidArgument("rank-sum test needs two non-empty samples");

    const std::size_t n1 = x.size();
    const std::size_t n2 = y.size();
    const std::size_t n = n1 + n2;

    std::vector<double> pooled;
    pooled.reserve(n);
    pooled.insert(pooled.end(), x.begin(), x.end());
    pooled.insert(pooled.end(), y.begin(), y.end());
    for (double v : pooled) {
        if (std::isnan(v))
            throw InvalidArgument("rank-sum test sample contains NaN");
    }

    const std::vector<double> ranks = midranks(pooled);
    const double r1 = std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(n1), 0.0);
    const double fn1 = static_cast<double>(n1);
    const double fn2 = static_cast<double>(n2);

    RankSumResult result;
    result.u_statistic = r1 - fn1 * (fn1 + 1.0) / 2.0;

    const bool ties = has_ties(pooled);
    bool exact = false;
    switch (mode) {
    case RankSumMode::Auto: exact = n <= kExactRankSumLimit && !ties; break;
    case RankSumMode::ForceExact:
        if (ties)
            throw InvalidArgument("exact rank-sum enumeration requires tie-free samples");
        exact = true;
        break;
    case RankSumMode::ForceNormal: exact = false; break;
    }

    if (exact) {
        const std::vector<double> counts = rank_sum_null_counts(n1, n2);
        const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
        // Without ties U is an integer.
        const auto u = static_cast<std::size_t>(std::llround(result.u_statistic));
        const double lower = std::accumulate(counts.begin(), counts.begin() + static_cast<std::ptrdiff_t>(u) + 1, 0.0);
        const double upper = std::accumulate(counts.begin() + static_cast<std::ptrdiff_t>(u), counts.end(), 0.0);
        result.p_value = std::min(1.0, 2.0 * std::min(lower, upper) / total);
        result.method = RankSumMethod::ExactEnumeration;
        return result;
    }

    // Tie-corrected variance of U.
    std::vector<double> sorted = pooled;
    std::sort(sorted.begin(), sorted.end());
    double tie_term = 0.0;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i + 1;
        while (j < sorted.size() && sorted[j] == sorted[i])
            ++j;
        const double t = static_cast<double>(j - i);
        tie_term += t * t * t - t;
        i = j;
    }
    const double fn = static_cast<double>(n);
    const double variance = fn1 * fn2 / 12.0 * ((fn + 1.0) - tie_term / (fn * (fn - 1.0)));

    result.method = RankSumMethod::NormalApproximation;
    if (!(variance > 0.0)) {
        // Every value identical.
        result.p_value = 1.0;
        return result;
    }
    const double deviation = std::max(0.0, std::abs(result.u_statistic - fn1 * fn2 / 2.0) - 0.5);
    const double z = deviation / std::sqrt(variance);
    result.p_value = std::min(1.0, 2.0 * normal_upper_tail(z));
    return result;
}

const char* to_string(Quantity q)
{
    switch (q) {
    case Quantity::N: return "N";
    case Quantity::Np: return "Np";
    case Quantity::M: return "M";
    case Quantity::Total: return "total";
    }
    return "?";
}

Quantity parse_quantity(const std::string& name)
{
    for (Quantity q : {Quantity::N, Quantity::Np, Quantity::M, Quantity::Total}) {
        if (name == to_string(q))
            return q;
    }
    throw InvalidArgument(fmt::format("unknown quantity '{}'", name));
}

std::vector<double> extract(const Trajectory& traj, Quantity q)
{
    std::vector<double> out;
    out.reserve(traj.size());
    for (const auto& s : traj.samples()) {
        switch (q) {
        case Quantity::N: out.push_back(s.n); break;
        case Quantity::Np: out.push_back(s.np); break;
        case Quantity::M: out.push_back(s.m); break;
        case Quantity::Total: out.push_back(s.total_naive()); break;
        }
    }
    return out;
}

Trajectory subsample(const Trajectory& traj, double interval)
{
    if (!(interval > 0.0))
        throw InvalidArgument("subsample interval must be > 0");
    if (traj.empty())
        return traj;
    const double ratio = interval / traj.spacing();
    const auto every = static_cast<std::size_t>(std::llround(ratio));
    if (every < 1 || std::abs(ratio - static_cast<double>(every)) > 1e-6)
        throw InvalidArgument(fmt::format("interval {} is not a multiple of the sample spacing {}",
                                          interval, traj.spacing()));
    std::vector<StateVector> picked;
    for (std::size_t i = 0; i < traj.size(); i += every)
        picked.push_back(traj[i]);
    return Trajectory(interval, std::move(picked));
}

double rms_difference(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size())
        throw InvalidArgument("rms_difference: size mismatch");
    if (a.empty())
        return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(acc / static_cast<double>(a.size()));
}

Comparison compare_trajectories(const Trajectory& a, const Trajectory& b, Quantity q,
                                double test_interval)
{
    if (a.empty() || b.empty())
        throw InvalidArgument("cannot compare empty trajectories");
    bool same_grid = a.size() == b.size() && std::abs(a.spacing() - b.spacing()) <= 1e-12;
    for (std::size_t i = 0; same_grid && i < a.size(); ++i)
        same_grid = std::abs(a[i].t - b[i].t) <= 1e-9;
    if (!same_grid)
        throw InvalidArgument("trajectories do not share a time grid");

    const std::vector<double> va = extract(a, q);
    const std::vector<double> vb = extract(b, q);

    Comparison cmp;
    cmp.quantity = q;
    cmp.rms_difference = rms_difference(va, vb);
    for (std::size_t i = 0; i < va.size(); ++i)
        cmp.max_difference = std::max(cmp.max_difference, std::abs(va[i] - vb[i]));

    const std::vector<double> ta = extract(subsample(a, test_interval), q);
    const std::vector<double> tb = extract(subsample(b, test_interval), q);
    cmp.test = wilcoxon_rank_sum(ta, tb);
    cmp.test_points = ta.size();
    return cmp;
}

Summary summarize(std::span<const double> values)
{
    Summary s;
    s.count = values.size();
    if (values.empty())
        return s;
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.count);
    if (s.count > 1) {
        double ss = 0.0;
        for (double v : values)
            ss += (v - s.mean) * (v - s.mean);
        s.stddev = std::sqrt(ss / static_cast<double>(s.count - 1));
        s.std_error = s.stddev / std::sqrt(static_cast<double>(s.count));
    }
    return s;
}

} // namespace tcellsim
