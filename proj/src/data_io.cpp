#include "tcellsim/data_io.hpp"

#include "tcellsim/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace tcellsim {

namespace {

constexpr const char* kTrajectoryHeader = "t_years,naive_thymus,naive_prolif,memory,total_naive";
constexpr const char* kActiveHeader = "age_years,active_per_mm3";
constexpr const char* kTrecHeader = "age_low,age_high,mean_log10_trec,individuals";
constexpr const char* kReportHeader = "scenario,quantity,u_statistic,p_value,method,rms_difference,max_difference,test_points";
constexpr const char* kPlaceholderMarker = "# placeholder";

std::vector<std::string> split(const std::string& line, char sep = ',')
{
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, sep))
        out.push_back(field);
    if (!line.empty() && line.back() == sep)
        out.emplace_back();
    return out;
}

std::string trim(std::string s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& text, const std::string& where)
{
    const std::string t = trim(text);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
        throw DataError(fmt::format("{}: '{}' is not a number", where, t));
    return value;
}

long long parse_int(const std::string& text, const std::string& where)
{
    const std::string t = trim(text);
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
        throw DataError(fmt::format("{}: '{}' is not an integer", where, t));
    return value;
}

// Yields non-empty, non-comment lines with their 1-based line numbers.
struct LineReader {
    std::istream& in;
    std::size_t number = 0;

    bool next(std::string& line)
    {
        while (std::getline(in, line)) {
            ++number;
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            if (trim(line).empty() || line.front() == '#')
                continue;
            return true;
        }
        return false;
    }
};

void expect_header(LineReader& reader, const std::string& expected, const std::string& origin)
{
    std::string line;
    if (!reader.next(line))
        throw DataError(fmt::format("{}: empty file, expected header '{}'", origin, expected));
    if (trim(line) != expected)
        throw DataError(fmt::format("{}:{}: expected header '{}', got '{}'", origin, reader.number, expected, line));
}

} // namespace

std::string format_number(double value)
{
    return fmt::format("{}", value);
}

void TrecDataset::validate() const
{
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.individuals < 1)
            throw DataError(fmt::format("{}: row {} has no individuals", source, i + 1));
        if (r.age_high < r.age_low)
            throw DataError(fmt::format("{}: row {} has an inverted age range", source, i + 1));
        if (i > 0 && !(r.age_low > rows[i - 1].age_high))
            throw DataError(fmt::format("{}: row {} overlaps or precedes the previous range", source, i + 1));
    }
}

std::pair<TrecDataset, TrecDataset> builtin_datasets()
{
    TrecDataset murray{
        "Murray et al. 2003; Cossarizza et al. 1996",
        {
            {0, 0, 5.03, 48},   {1, 4, 4.93, 53},   {5, 9, 4.86, 19},   {10, 14, 4.86, 19},
            {15, 19, 4.56, 33}, {20, 24, 3.88, 26}, {25, 29, 3.75, 47}, {30, 34, 3.61, 65},
            {35, 39, 3.54, 73}, {40, 44, 3.52, 52}, {45, 49, 3.37, 55}, {50, 54, 3.17, 16},
        },
    };
    TrecDataset lorenzi{
        "Lorenzi et al. 2008",
        {
            {0, 0, 4.85, 2},    {1, 4, 5.29, 30},   {5, 9, 5.05, 33},   {10, 14, 4.99, 15},
            {15, 19, 4.56, 5},  {20, 24, 4.55, 12}, {25, 29, 4.55, 9},  {30, 34, 4.44, 20},
            {35, 39, 4.23, 15}, {40, 44, 4.16, 9},  {45, 49, 3.82, 16}, {50, 54, 4.21, 21},
        },
    };
    return {std::move(murray), std::move(lorenzi)};
}

std::vector<std::string> builtin_dataset_names()
{
    return {"murray", "lorenzi"};
}

TrecDataset builtin_dataset(const std::string& name)
{
    auto [murray, lorenzi] = builtin_datasets();
    if (name == "murray")
        return murray;
    if (name == "lorenzi")
        return lorenzi;
    throw InvalidArgument(fmt::format("unknown dataset '{}' (expected murray or lorenzi)", name));
}

std::vector<PercentPoint> to_percentage(const TrecDataset& dataset)
{
    if (dataset.rows.empty())
        throw InvalidArgument("dataset is empty");
    const TrecRow* baseline = nullptr;
    for (const auto& r : dataset.rows) {
        if (r.age_low == 0.0 && r.age_high == 0.0) {
            baseline = &r;
            break;
        }
    }
    if (!baseline)
        throw InvalidArgument(fmt::format("dataset '{}' has no age-0 row", dataset.source));

    std::vector<PercentPoint> out;
    out.reserve(dataset.rows.size());
    for (const auto& r : dataset.rows)
        out.push_back({r.midpoint(), 100.0 * std::pow(10.0, r.mean_log10_trec - baseline->mean_log10_trec)});
    return out;
}

void write_trec_dataset(std::ostream& out, const TrecDataset& dataset)
{
    out << "# source=" << dataset.source << '\n' << kTrecHeader << '\n';
    for (const auto& r : dataset.rows) {
        out << format_number(r.age_low) << ',' << format_number(r.age_high) << ','
            << format_number(r.mean_log10_trec) << ',' << r.individuals << '\n';
    }
}

TrecDataset read_trec_dataset(std::istream& in)
{
    TrecDataset ds;
    std::string line;
    std::size_t number = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.rfind("# source=", 0) == 0) {
            ds.source = line.substr(9);
            continue;
        }
        if (trim(line).empty() || line.front() == '#')
            continue;
        if (!header) {
            if (trim(line) != kTrecHeader)
                throw DataError(fmt::format("line {}: expected header '{}'", number, kTrecHeader));
            header = true;
            continue;
        }
        const auto f = split(line);
        const std::string where = fmt::format("line {}", number);
        if (f.size() != 4)
            throw DataError(fmt::format("{}: expected 4 fields, got {}", where, f.size()));
        ds.rows.push_back({parse_double(f[0], where), parse_double(f[1], where), parse_double(f[2], where),
                           static_cast<int>(parse_int(f[3], where))});
    }
    if (!header)
        throw DataError("TREC dataset has no header");
    ds.validate();
    return ds;
}

ActiveCellTable parse_active_table(std::istream& in, const std::string& origin)
{
    LineReader reader{in};
    expect_header(reader, kActiveHeader, origin);

    std::vector<ActiveCellTable::Point> points;
    std::string line;
    while (reader.next(line)) {
        const std::string where = fmt::format("{}:{}", origin, reader.number);
        const auto f = split(line);
        if (f.size() != 2)
            throw DataError(fmt::format("{}: expected 2 fields, got {}", where, f.size()));
        const double age = parse_double(f[0], where);
        const double count = parse_double(f[1], where);
        if (!std::isfinite(age) || !std::isfinite(count))
            throw DataError(fmt::format("{}: non-finite value", where));
        if (count < 0)
            throw DataError(fmt::format("{}: negative active count {}", where, count));
        if (!points.empty() && !(age > points.back().age))
            throw DataError(fmt::format("{}: ages not strictly increasing ({} after {})", where, age, points.back().age));
        points.push_back({age, count});
    }
    if (points.empty())
        throw DataError(fmt::format("{}: no data rows", origin));
    return ActiveCellTable(std::move(points));
}

ActiveCellTable load_active_table(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw DataError(fmt::format("cannot open active cell table '{}'", path.string()));
    return parse_active_table(in, path.string());
}

void write_active_table(std::ostream& out, const ActiveCellTable& table)
{
    out << kActiveHeader << '\n';
    for (const auto& p : table.points())
        out << format_number(p.age) << ',' << format_number(p.count) << '\n';
}

std::filesystem::path placeholder_active_table_path()
{
    return std::filesystem::path(TCELLSIM_DATA_DIR) / "active_cells_placeholder.csv";
}

bool is_placeholder_active_table(const std::filesystem::path& path)
{
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind(kPlaceholderMarker, 0) == 0)
            return true;
        if (!line.empty() && line.front() != '#')
            break;
    }
    return false;
}

namespace {

void write_row(std::ostream& out, const StateVector& s)
{
    out << format_number(s.t) << ',' << format_number(s.n) << ',' << format_number(s.np) << ','
        << format_number(s.m) << ',' << format_number(s.total_naive()) << '\n';
}

Trajectory make_trajectory(std::vector<StateVector> samples)
{
    const double spacing = samples.size() > 1 ? samples[1].t - samples[0].t : 0.0;
    return Trajectory(spacing, std::move(samples));
}

} // namespace

void write_trajectory(std::ostream& out, const Trajectory& traj)
{
    out << kTrajectoryHeader << '\n';
    for (const auto& s : traj.samples())
        write_row(out, s);
}

void write_replicates(std::ostream& out, const std::vector<Trajectory>& runs)
{
    out << "replicate," << kTrajectoryHeader << '\n';
    for (std::size_t r = 0; r < runs.size(); ++r) {
        for (const auto& s : runs[r].samples()) {
            out << r << ',';
            write_row(out, s);
        }
    }
}

namespace {

StateVector parse_state(const std::vector<std::string>& f, std::size_t offset, const std::string& where)
{
    return {parse_double(f[offset], where), parse_double(f[offset + 1], where),
            parse_double(f[offset + 2], where), parse_double(f[offset + 3], where)};
}

} // namespace

Trajectory read_trajectory(std::istream& in)
{
    LineReader reader{in};
    expect_header(reader, kTrajectoryHeader, "trajectory");
    std::vector<StateVector> samples;
    std::string line;
    while (reader.next(line)) {
        const auto f = split(line);
        const std::string where = fmt::format("trajectory:{}", reader.number);
        if (f.size() != 5)
            throw DataError(fmt::format("{}: expected 5 fields, got {}", where, f.size()));
        samples.push_back(parse_state(f, 0, where));
    }
    return make_trajectory(std::move(samples));
}

std::vector<Trajectory> read_replicates(std::istream& in)
{
    LineReader reader{in};
    expect_header(reader, std::string("replicate,") + kTrajectoryHeader, "replicates");
    std::vector<std::vector<StateVector>> runs;
    std::string line;
    while (reader.next(line)) {
        const auto f = split(line);
        const std::string where = fmt::format("replicates:{}", reader.number);
        if (f.size() != 6)
            throw DataError(fmt::format("{}: expected 6 fields, got {}", where, f.size()));
        const auto r = static_cast<std::size_t>(parse_int(f[0], where));
        if (r != runs.size() && r + 1 != runs.size())
            throw DataError(fmt::format("{}: replicate index {} out of order", where, r));
        if (r == runs.size())
            runs.emplace_back();
        runs[r].push_back(parse_state(f, 1, where));
    }
    std::vector<Trajectory> out;
    out.reserve(runs.size());
    for (auto& samples : runs)
        out.push_back(make_trajectory(std::move(samples)));
    return out;
}

void write_manifest(std::ostream& out, const Manifest& manifest)
{
    for (const auto& [key, value] : manifest) {
        if (key.find('=') != std::string::npos || key.find('\n') != std::string::npos ||
            value.find('\n') != std::string::npos)
            throw InvalidArgument(fmt::format("manifest entry '{}' contains '=' or a newline", key));
        out << key << '=' << value << '\n';
    }
}

Manifest read_manifest(std::istream& in)
{
    Manifest m;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line.front() == '#')
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw DataError(fmt::format("manifest line {}: missing '='", number));
        m[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return m;
}

void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows)
{
    out << kReportHeader << '\n';
    for (const auto& row : rows) {
        const auto& c = row.comparison;
        out << row.scenario << ',' << to_string(c.quantity) << ',' << format_number(c.test.u_statistic) << ','
            << format_number(c.test.p_value) << ',' << to_string(c.test.method) << ','
            << format_number(c.rms_difference) << ',' << format_number(c.max_difference) << ','
            << c.test_points << '\n';
    }
}

std::vector<ReportRow> read_report_csv(std::istream& in)
{
    LineReader reader{in};
    expect_header(reader, kReportHeader, "report");
    std::vector<ReportRow> rows;
    std::string line;
    while (reader.next(line)) {
        const auto f = split(line);
        const std::string where = fmt::format("report:{}", reader.number);
        if (f.size() != 8)
            throw DataError(fmt::format("{}: expected 8 fields, got {}", where, f.size()));
        ReportRow row;
        row.scenario = static_cast<int>(parse_int(f[0], where));
        auto& c = row.comparison;
        c.quantity = parse_quantity(f[1]);
        c.test.u_statistic = parse_double(f[2], where);
        c.test.p_value = parse_double(f[3], where);
        if (f[4] == to_string(RankSumMethod::ExactEnumeration))
            c.test.method = RankSumMethod::ExactEnumeration;
        else if (f[4] == to_string(RankSumMethod::NormalApproximation))
            c.test.method = RankSumMethod::NormalApproximation;
        else
            throw DataError(fmt::format("{}: unknown method '{}'", where, f[4]));
        c.rms_difference = parse_double(f[5], where);
        c.max_difference = parse_double(f[6], where);
        c.test_points = static_cast<std::size_t>(parse_int(f[7], where));
        rows.push_back(row);
    }
    return rows;
}

void write_report_text(std::ostream& out, const std::vector<ReportRow>& rows)
{
    out << fmt::format("{:>8}  {:<8} {:>12} {:>10}  {:<22} {:>12} {:>12}  {}\n", "scenario", "quantity", "U",
                       "p", "method", "rms", "max", "verdict");
    for (const auto& row : rows) {
        const auto& c = row.comparison;
        out << fmt::format("{:>8}  {:<8} {:>12.1f} {:>10.4f}  {:<22} {:>12.4f} {:>12.4f}  {}\n", row.scenario,
                           to_string(c.quantity), c.test.u_statistic, c.test.p_value, to_string(c.test.method),
                           c.rms_difference, c.max_difference,
                           c.test.p_value > 0.05 ? "not different at 5%" : "different at 5%");
    }
}

void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::error_code ec;
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path(), ec);
    if (ec)
        throw IoError(fmt::format("cannot create directory '{}': {}", path.parent_path().string(), ec.message()));
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
    out << content;
    if (!out)
        throw IoError(fmt::format("write to '{}' failed", path.string()));
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError(fmt::format("cannot open '{}'", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace tcellsim
