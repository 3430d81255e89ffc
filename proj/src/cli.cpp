#include "tcellsim/cli.hpp"

#include "tcellsim/data_io.hpp"
#include "tcellsim/errors.hpp"
#include "tcellsim/plot.hpp"
#include "tcellsim/stats.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

namespace tcellsim::cli {

namespace fs = std::filesystem;

const char* to_string(Engine engine)
{
    switch (engine) {
    case Engine::Ode: return "ode";
    case Engine::Abm: return "abm";
    case Engine::Both: return "both";
    }
    return "?";
}

void align_recording(RunRequest& request)
{
    auto stride_for = [](double dt) -> std::size_t {
        const double ratio = 0.1 / dt;
        const double whole = std::round(ratio);
        if (whole >= 1.0 && std::abs(ratio - whole) < 1e-6)
            return static_cast<std::size_t>(whole);
        return 1;
    };
    request.ode.record_stride = stride_for(request.ode.dt);
    request.abm.record_stride = stride_for(request.abm.dt);
}

namespace {

struct Inputs {
    ActiveCellTable actives;
    fs::path path;
    bool placeholder = false;
};

Inputs load_inputs(const RunRequest& request)
{
    Inputs in;
    in.path = request.actives.value_or(placeholder_active_table_path());
    in.actives = load_active_table(in.path);
    in.placeholder = is_placeholder_active_table(in.path);
    return in;
}

std::string utc_timestamp()
{
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

Manifest base_manifest(const RunRequest& request, const Inputs& inputs, const std::string& command)
{
    Manifest m;
    m["command"] = command;
    m["command_line"] = request.command_line;
    m["engine"] = to_string(request.engine);
    m["created_utc"] = utc_timestamp();
    m["actives.path"] = inputs.path.string();
    m["actives.placeholder"] = inputs.placeholder ? "true" : "false";
    m["initial.naive_thymus"] = format_number(kInitialNaive);
    m["t_end"] = format_number(request.ode.t_end);
    if (request.engine != Engine::Abm) {
        m["ode.method"] = request.ode.method == IntegrationMethod::RK4 ? "rk4" : "euler";
        m["ode.dt"] = format_number(request.ode.dt);
        m["ode.record_stride"] = std::to_string(request.ode.record_stride);
    }
    if (request.engine != Engine::Ode) {
        m["abm.dt"] = format_number(request.abm.dt);
        m["abm.replicates"] = std::to_string(request.abm.replicates);
        m["abm.seed"] = std::to_string(request.abm.base_seed);
        m["abm.scale"] = format_number(request.abm.scale);
        m["abm.record_stride"] = std::to_string(request.abm.record_stride);
        m["abm.rng"] = "mt19937_64 seeded by seed_seq(seed_lo, seed_hi, replicate_lo, replicate_hi)";
    }
    return m;
}

std::string trajectory_csv(const Trajectory& t)
{
    std::ostringstream ss;
    write_trajectory(ss, t);
    return ss.str();
}

std::string replicates_csv(const std::vector<Trajectory>& runs)
{
    std::ostringstream ss;
    write_replicates(ss, runs);
    return ss.str();
}

std::string report_csv(const std::vector<ReportRow>& rows)
{
    std::ostringstream ss;
    write_report_csv(ss, rows);
    return ss.str();
}

std::string report_text(const std::vector<ReportRow>& rows)
{
    std::ostringstream ss;
    write_report_text(ss, rows);
    return ss.str();
}

std::string manifest_text(const Manifest& m)
{
    std::ostringstream ss;
    write_manifest(ss, m);
    return ss.str();
}

std::vector<ReportRow> compare_all(int scenario, const Trajectory& ode, const Trajectory& abm_mean)
{
    std::vector<ReportRow> rows;
    for (Quantity q : {Quantity::N, Quantity::Np, Quantity::M, Quantity::Total})
        rows.push_back({scenario, compare_trajectories(ode, abm_mean, q)});
    return rows;
}

std::vector<double> times(const Trajectory& t)
{
    std::vector<double> out;
    for (const auto& s : t.samples())
        out.push_back(s.t);
    return out;
}

void validate_request(const RunRequest& r)
{
    if (r.scenarios.empty())
        throw InvalidArgument("no scenario selected");
    for (int id : r.scenarios)
        scenario_params(id);
    r.ode.validate();
    r.abm.validate();
}

} // namespace

int cmd_run(const RunRequest& request, std::ostream& out)
{
    validate_request(request);
    const Inputs inputs = load_inputs(request);

    for (int id : request.scenarios) {
        const Scenario scenario = scenario_params(id);
        const std::string stem = fmt::format("scenario{}", id);
        Manifest manifest = base_manifest(request, inputs, "run");
        manifest["scenario"] = std::to_string(id);

        std::vector<PlotSeries> plot;
        std::optional<Trajectory> ode;
        std::optional<ReplicateSet> abm;
        if (request.engine != Engine::Abm) {
            ode = integrate(scenario, initial_state(), inputs.actives, request.ode);
            write_file(request.out_dir / (stem + "_ode.csv"), trajectory_csv(*ode));
            plot.push_back({"ODE total naive", times(*ode), total_naive(*ode)});
            out << fmt::format("scenario {}: ode total naive at t={} is {:.2f} cells/mm^3\n", id, ode->back().t,
                               ode->back().total_naive());
        }
        if (request.engine != Engine::Ode) {
            abm = run_replicates(scenario, inputs.actives, request.abm);
            write_file(request.out_dir / (stem + "_abm_mean.csv"), trajectory_csv(abm->mean));
            write_file(request.out_dir / (stem + "_abm_replicates.csv"), replicates_csv(abm->trajectories));
            plot.push_back({"ABM mean total naive", times(abm->mean), total_naive(abm->mean)});
            out << fmt::format("scenario {}: abm mean total naive at t={} is {:.2f} cells/mm^3 ({} replicates)\n",
                               id, abm->mean.back().t, abm->mean.back().total_naive(), request.abm.replicates);
        }
        if (ode && abm) {
            const auto rows = compare_all(id, *ode, abm->mean);
            write_file(request.out_dir / (stem + "_comparison.csv"), report_csv(rows));
            write_file(request.out_dir / (stem + "_comparison.txt"), report_text(rows));
            out << report_text(rows);
        }
        render_plot(plot, request.out_dir / (stem + "_total.svg"),
                    {fmt::format("Scenario {}: total naive T cells", id), "age (years)", "cells per mm^3"});
        write_file(request.out_dir / (stem + "_manifest.txt"), manifest_text(manifest));
    }
    return kSuccess;
}

int cmd_compare(const RunRequest& request, std::ostream& out)
{
    validate_request(request);
    const Inputs inputs = load_inputs(request);
    RunRequest both = request;
    both.engine = Engine::Both;

    std::vector<ReportRow> rows;
    for (int id : request.scenarios) {
        const Scenario scenario = scenario_params(id);
        const Trajectory ode = integrate(scenario, initial_state(), inputs.actives, request.ode);
        const ReplicateSet abm = run_replicates(scenario, inputs.actives, request.abm);
        const auto scenario_rows = compare_all(id, ode, abm.mean);
        rows.insert(rows.end(), scenario_rows.begin(), scenario_rows.end());
    }

    Manifest manifest = base_manifest(both, inputs, "compare");
    std::string ids;
    for (int id : request.scenarios)
        ids += (ids.empty() ? "" : ",") + std::to_string(id);
    manifest["scenarios"] = ids;
    manifest["test"] = "two-sided Wilcoxon rank-sum on annual samples";

    write_file(request.out_dir / "comparison.csv", report_csv(rows));
    write_file(request.out_dir / "comparison.txt", report_text(rows));
    write_file(request.out_dir / "compare_manifest.txt", manifest_text(manifest));
    out << report_text(rows);
    return kSuccess;
}

int cmd_validate(const ValidateRequest& request, std::ostream& out)
{
    const RunRequest& run = request.run;
    validate_request(run);
    if (run.engine == Engine::Both)
        throw InvalidArgument("validate takes --engine ode or abm");

    std::vector<std::pair<std::string, TrecDataset>> datasets;
    if (request.dataset == "both") {
        for (const auto& name : builtin_dataset_names())
            datasets.emplace_back(name, builtin_dataset(name));
    } else {
        datasets.emplace_back(request.dataset, builtin_dataset(request.dataset));
    }

    const Inputs inputs = load_inputs(run);
    for (int id : run.scenarios) {
        const Scenario scenario = scenario_params(id);
        const Trajectory traj = run.engine == Engine::Ode
                                    ? integrate(scenario, initial_state(), inputs.actives, run.ode)
                                    : run_replicates(scenario, inputs.actives, run.abm).mean;
        const double baseline = traj[0].n;
        if (!(baseline > 0.0))
            throw NumericalFailure("simulated N(0) is zero; cannot normalise");

        auto simulated_percent = [&](double age) {
            const double pos = age / traj.spacing();
            const auto i = std::min(static_cast<std::size_t>(std::floor(pos)), traj.size() - 1);
            const auto j = std::min(i + 1, traj.size() - 1);
            const double w = std::clamp(pos - static_cast<double>(i), 0.0, 1.0);
            return 100.0 * (traj[i].n + w * (traj[j].n - traj[i].n)) / baseline;
        };

        std::vector<PlotSeries> plot;
        std::vector<double> sim_x;
        std::vector<double> sim_y;
        for (const auto& s : traj.samples()) {
            if (s.t > 60.0)
                break;
            sim_x.push_back(s.t);
            sim_y.push_back(100.0 * s.n / baseline);
        }
        plot.push_back({fmt::format("simulated N ({})", to_string(run.engine)), sim_x, sim_y});

        std::string residuals = "dataset,age,observed_percent,simulated_percent,residual\n";
        std::string summary;
        const MarkerStyle styles[] = {MarkerStyle::Circle, MarkerStyle::Square};
        for (std::size_t d = 0; d < datasets.size(); ++d) {
            const auto& [name, ds] = datasets[d];
            const auto points = to_percentage(ds);
            PlotSeries obs{fmt::format("TREC {}", name), {}, {}, styles[d % 2]};
            double ss = 0.0;
            for (const auto& pt : points) {
                const double sim = simulated_percent(pt.age);
                residuals += fmt::format("{},{},{},{},{}\n", name, format_number(pt.age), format_number(pt.percent),
                                         format_number(sim), format_number(sim - pt.percent));
                ss += (sim - pt.percent) * (sim - pt.percent);
                obs.x.push_back(pt.age);
                obs.y.push_back(pt.percent);
            }
            const double rms = std::sqrt(ss / static_cast<double>(points.size()));
            summary += fmt::format("scenario={} dataset={} engine={} rms_residual_percent={}\n", id, name,
                                   to_string(run.engine), format_number(rms));
            plot.push_back(std::move(obs));
        }

        const std::string stem = fmt::format("validate_scenario{}", id);
        write_file(run.out_dir / (stem + "_residuals.csv"), residuals);
        write_file(run.out_dir / (stem + "_summary.txt"), summary);
        render_plot(plot, run.out_dir / (stem + ".svg"),
                    {fmt::format("Scenario {}: thymic naive vs TREC", id), "age (years)", "percent of age-0 value"});

        Manifest manifest = base_manifest(run, inputs, "validate");
        manifest["scenario"] = std::to_string(id);
        manifest["dataset"] = request.dataset;
        manifest["percent_baseline"] = "per-dataset age-0 row; simulated N(t) relative to N(0)";
        manifest["age_point"] = "age range midpoint";
        write_file(run.out_dir / (stem + "_manifest.txt"), manifest_text(manifest));
        out << summary;
    }
    return kSuccess;
}

int cmd_datasets(std::ostream& out)
{
    const auto [murray, lorenzi] = builtin_datasets();
    out << "[murray]\n";
    write_trec_dataset(out, murray);
    out << "\n[lorenzi]\n";
    write_trec_dataset(out, lorenzi);
    return kSuccess;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Naive T cell depletion: ODE and agent-based simulation"};
    app.require_subcommand(1);

    RunRequest req;
    std::string engine = "ode";
    std::string method = "rk4";
    std::string out_dir;
    std::string actives;
    std::string dataset = "both";
    double dt = 0.01;
    double t_end = 100.0;
    std::size_t replicates = 50;
    std::uint64_t seed = 42;
    double scale = 1.0;
    unsigned threads = 0;
    std::vector<int> scenarios;

    auto add_common = [&](CLI::App* sub, bool with_engine) {
        sub->add_option("--scenario", scenarios, "Scenario id(s) 1..5 (default: all)");
        if (with_engine)
            sub->add_option("--engine", engine, "ode, abm or both")->check(CLI::IsMember({"ode", "abm", "both"}));
        sub->add_option("--dt", dt, "Step size in years (both engines)");
        sub->add_option("--t-end", t_end, "Simulated horizon in years");
        sub->add_option("--method", method, "ODE scheme: rk4 or euler")->check(CLI::IsMember({"rk4", "euler"}));
        sub->add_option("--replicates", replicates, "ABM replicate count");
        sub->add_option("--seed", seed, "ABM base seed");
        sub->add_option("--scale", scale, "ABM agents per cell/mm^3");
        sub->add_option("--threads", threads, "ABM worker threads (0: all cores)");
        sub->add_option("--actives", actives, "Active cell table CSV (default: bundled placeholder)");
        sub->add_option("--out", out_dir, fmt::format("Output directory (default: ${} or {})", kOutDirEnv, kDefaultOutDir));
    };

    auto* run = app.add_subcommand("run", "Simulate scenarios with one or both engines");
    add_common(run, true);
    auto* validate = app.add_subcommand("validate", "Compare simulated thymic naive decay with TREC data");
    add_common(validate, true);
    validate->add_option("--dataset", dataset, "murray, lorenzi or both");
    auto* compare = app.add_subcommand("compare", "Rank-sum comparison of ODE vs ABM mean");
    add_common(compare, false);
    auto* datasets = app.add_subcommand("datasets", "Print the built-in TREC tables");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kUsageError;
    }

    try {
        if (datasets->parsed())
            return cmd_datasets(out);

        if (!scenarios.empty())
            req.scenarios = scenarios;
        req.engine = engine == "abm" ? Engine::Abm : engine == "both" ? Engine::Both : Engine::Ode;
        req.ode.dt = dt;
        req.ode.t_end = t_end;
        req.ode.method = method == "euler" ? IntegrationMethod::Euler : IntegrationMethod::RK4;
        req.abm.dt = dt;
        req.abm.t_end = t_end;
        req.abm.replicates = replicates;
        req.abm.base_seed = seed;
        req.abm.scale = scale;
        req.abm.threads = threads;
        align_recording(req);
        if (!actives.empty())
            req.actives = actives;
        if (!out_dir.empty())
            req.out_dir = out_dir;
        else if (const char* env = std::getenv(kOutDirEnv); env && *env)
            req.out_dir = env;
        for (int i = 0; i < argc; ++i)
            req.command_line += (i ? " " : "") + std::string(argv[i]);

        if (run->parsed())
            return cmd_run(req, out);
        if (compare->parsed())
            return cmd_compare(req, out);
        ValidateRequest v{req, dataset};
        return cmd_validate(v, out);
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const NumericalFailure& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return kDataError;
    } catch (const DomainError& e) {
        err << "data error: " << e.what() << '\n';
        return kDataError;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << '\n';
        return kDataError;
    }
}

} // namespace tcellsim::cli
