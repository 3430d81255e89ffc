#pragma once

// Validation datasets, the active cell lookup file, and the text formats
// written by the simulators (trajectory CSV, run manifest, comparison
// report).

#include "tcellsim/abm.hpp"
#include "tcellsim/model.hpp"
#include "tcellsim/ode.hpp"
#include "tcellsim/stats.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace tcellsim {

struct TrecRow {
    double age_low = 0.0;
    double age_high = 0.0;
    double mean_log10_trec = 0.0;  // log10 TREC per 10^6 PBMC
    int individuals = 0;

    double midpoint() const { return (age_low + age_high) / 2.0; }
    bool operator==(const TrecRow&) const = default;
};

struct TrecDataset {
    std::string source;
    std::vector<TrecRow> rows;

    /// Throws DataError unless ranges are ascending and non-overlapping and
    /// every row has at least one individual.
    void validate() const;
    bool operator==(const TrecDataset&) const = default;
};

/// The two published TREC tables: Murray/Cossarizza and Lorenzi, 12 rows each.
std::pair<TrecDataset, TrecDataset> builtin_datasets();

/// Looks up a built-in dataset by selector name ("murray" or "lorenzi").
/// Throws InvalidArgument for anything else.
TrecDataset builtin_dataset(const std::string& name);
std::vector<std::string> builtin_dataset_names();

struct PercentPoint {
    double age = 0.0;
    double percent = 0.0;
};

/// 10^mean as a percentage of the age-0 row's 10^mean, at range midpoints.
/// Throws InvalidArgument when there is no age-0 row.
std::vector<PercentPoint> to_percentage(const TrecDataset& dataset);

// TREC dataset CSV: `# source=<label>` line, then
// `age_low,age_high,mean_log10_trec,individuals`.
void write_trec_dataset(std::ostream& out, const TrecDataset& dataset);
TrecDataset read_trec_dataset(std::istream& in);

// Active cell table CSV with header `age_years,active_per_mm3`.
ActiveCellTable parse_active_table(std::istream& in, const std::string& origin = "<stream>");
ActiveCellTable load_active_table(const std::filesystem::path& path);
void write_active_table(std::ostream& out, const ActiveCellTable& table);

/// Path of the bundled placeholder active cell table.
std::filesystem::path placeholder_active_table_path();
/// True when the file carries the placeholder marker comment.
bool is_placeholder_active_table(const std::filesystem::path& path);

// Trajectory CSV:
// `t_years,naive_thymus,naive_prolif,memory,total_naive`, optionally with a
// leading `replicate` column when several runs share one file.
void write_trajectory(std::ostream& out, const Trajectory& traj);
void write_replicates(std::ostream& out, const std::vector<Trajectory>& runs);
Trajectory read_trajectory(std::istream& in);
std::vector<Trajectory> read_replicates(std::istream& in);

/// Line-oriented key=value run manifest. Keys are kept sorted.
using Manifest = std::map<std::string, std::string>;
void write_manifest(std::ostream& out, const Manifest& manifest);
Manifest read_manifest(std::istream& in);

struct ReportRow {
    int scenario = 0;
    Comparison comparison;
};

// Comparison report in CSV and aligned plain text.
void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows);
std::vector<ReportRow> read_report_csv(std::istream& in);
void write_report_text(std::ostream& out, const std::vector<ReportRow>& rows);

/// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

/// Writes `content` to `path`, creating parent directories. Throws IoError.
void write_file(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

} // namespace tcellsim
