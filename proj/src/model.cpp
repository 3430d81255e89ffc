#include "tcellsim/model.hpp"

#include "tcellsim/errors.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace tcellsim {

void ModelParams::validate() const
{
    const std::pair<const char*, double> fields[] = {
        {"s0", s0},           {"lambda_t", lambda_t},   {"lambda_n", lambda_n},
        {"mu_n", mu_n},       {"mu_np", mu_np},         {"c", c},
        {"lambda_mn", lambda_mn}, {"mu_m", mu_m},       {"lambda_a", lambda_a},
        {"n_bar_p", n_bar_p}, {"s_bar", s_bar},         {"b", b},
    };
    for (const auto& [name, value] : fields) {
        if (!(value >= 0.0) || !std::isfinite(value))
            throw InvalidArgument(fmt::format("parameter {} must be finite and >= 0, got {}", name, value));
    }
    if (!(n_bar_p > 0.0))
        throw InvalidArgument("parameter n_bar_p must be > 0");
}

ActiveCellTable::ActiveCellTable(std::vector<Point> points)
    : points_(std::move(points))
{
    if (points_.empty())
        throw DomainError("active cell table is empty");
    for (std::size_t i = 0; i < points_.size(); ++i) {
        const auto& pt = points_[i];
        if (!std::isfinite(pt.age) || !std::isfinite(pt.count))
            throw DomainError(fmt::format("active cell table point {} is not finite", i));
        if (pt.count < 0.0)
            throw DomainError(fmt::format("active cell table point {} has negative count {}", i, pt.count));
        if (i > 0 && !(pt.age > points_[i - 1].age))
            throw DomainError(fmt::format("active cell table ages not strictly increasing at point {}", i));
    }
}

ActiveCellTable ActiveCellTable::zero()
{
    return constant(0.0);
}

ActiveCellTable ActiveCellTable::constant(double count)
{
    return ActiveCellTable({{0.0, count}});
}

StateVector initial_state()
{
    return {0.0, kInitialNaive, 0.0, 0.0};
}

double export_modifier(double np, const ModelParams& p)
{
    return 1.0 / (1.0 + p.s_bar * np / p.n_bar_p);
}

double death_modifier(double np, const ModelParams& p)
{
    const double ratio = np / p.n_bar_p;
    return 1.0 + (p.b * ratio) / (1.0 + ratio);
}

double dilution(double n, double np, const ModelParams& p)
{
    return 1.0 / (1.0 + (n + np) / p.n_bar_p);
}

double thymic_output(double t, double np, const ModelParams& p)
{
    return p.s0 * std::exp(-p.lambda_t * t) * export_modifier(np, p);
}

double proliferation_c(const ModelParams& p)
{
    return p.mu_n * (1.0 + 300.0 / p.n_bar_p);
}

double lookup_active(double t, const ActiveCellTable& actives)
{
    const auto& pts = actives.points();
    if (pts.empty())
        throw DomainError("lookup on an empty active cell table");
    if (t <= pts.front().age)
        return pts.front().count;
    if (t >= pts.back().age)
        return pts.back().count;

    // First knot with age > t; t lies in [lo.age, hi.age).
    std::size_t hi = 1;
    while (pts[hi].age <= t)
        ++hi;
    const auto& a = pts[hi - 1];
    const auto& b = pts[hi];
    const double w = (t - a.age) / (b.age - a.age);
    return a.count + w * (b.count - a.count);
}

Derivatives derivatives(const StateVector& s, const ModelParams& p,
                        const ActiveCellTable& actives)
{
    const double active = lookup_active(s.t, actives);
    Derivatives d;
    d.dn = thymic_output(s.t, s.np, p) - (p.lambda_n + p.mu_n * death_modifier(s.np, p)) * s.n;
    d.dnp = p.lambda_n * s.n + (p.c * dilution(s.n, s.np, p) - p.mu_np) * s.np + p.lambda_mn * s.m;
    d.dm = p.lambda_a * active - p.mu_m * s.m - p.lambda_mn * s.m;
    return d;
}

namespace {

struct ScenarioRow {
    const char* description;
    double lambda_n;
    double lambda_mn;
    double n_bar_p;
    double s_bar;
    double b;
    double mu_np;
    bool proliferation;
};

constexpr ScenarioRow kScenarioRows[kScenarioCount] = {
    {"No peripheral proliferation", 0.22, 0.05, 387.0, 0.48, 3.4, 0.13, false},
    {"No homeostatic reduction in thymic export, no homeostatic alteration of naive death rate",
     2.1, 0.0, 713.0, 0.0, 0.0, 4.4, true},
    {"Homeostatic alteration of naive death rate but not thymic export",
     0.003, 0.0, 392.0, 0.0, 4.2, 4.4, true},
    {"Homeostatic alteration of thymic export but no naive death rate",
     0.005, 0.0, 378.0, 2.4, 0.0, 4.4, true},
    {"No restrictions", 0.005, 0.0, 378.0, 2.2, 0.13, 4.4, true},
};

} // namespace

Scenario scenario_params(int id)
{
    if (id < 1 || id > kScenarioCount)
        throw InvalidArgument(fmt::format("unknown scenario id {} (expected 1..{})", id, kScenarioCount));
    const auto& row = kScenarioRows[id - 1];

    ModelParams p;
    p.s0 = kThymicOutputAtBirth;
    p.lambda_t = std::numbers::ln2 / 15.7;
    p.mu_n = 4.4;
    p.mu_m = 0.05;
    p.lambda_a = 1.0;
    p.lambda_n = row.lambda_n;
    p.lambda_mn = row.lambda_mn;
    p.n_bar_p = row.n_bar_p;
    p.s_bar = row.s_bar;
    p.b = row.b;
    p.mu_np = row.mu_np;
    p.c = row.proliferation ? proliferation_c(p) : 0.0;

    return {id, row.description, p};
}

} // namespace tcellsim
