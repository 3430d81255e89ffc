#include "tcellsim/data_io.hpp"
#include "tcellsim/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace tcellsim;

TEST(BuiltinDatasets, PublishedRows)
{
    const auto [murray, lorenzi] = builtin_datasets();
    ASSERT_EQ(murray.rows.size(), 12u);
    ASSERT_EQ(lorenzi.rows.size(), 12u);

    EXPECT_EQ(murray.rows.front(), (TrecRow{0, 0, 5.03, 48}));
    EXPECT_EQ(murray.rows.back(), (TrecRow{50, 54, 3.17, 16}));
    EXPECT_EQ(lorenzi.rows.front(), (TrecRow{0, 0, 4.85, 2}));
    EXPECT_EQ(lorenzi.rows.back(), (TrecRow{50, 54, 4.21, 21}));
    EXPECT_EQ(murray.rows[5], (TrecRow{20, 24, 3.88, 26}));
    EXPECT_EQ(lorenzi.rows[1], (TrecRow{1, 4, 5.29, 30}));
    EXPECT_NO_THROW(murray.validate());
    EXPECT_NO_THROW(lorenzi.validate());
}

TEST(BuiltinDatasets, SelectorNames)
{
    EXPECT_EQ(builtin_dataset("murray"), builtin_datasets().first);
    EXPECT_EQ(builtin_dataset("lorenzi"), builtin_datasets().second);
    EXPECT_THROW(builtin_dataset("nope"), InvalidArgument);
}

TEST(ToPercentage, NormalisesToAgeZero)
{
    const auto pts = to_percentage(builtin_datasets().first);
    EXPECT_DOUBLE_EQ(pts.front().percent, 100.0);
    EXPECT_EQ(pts.front().age, 0.0);
    EXPECT_EQ(pts[1].age, 2.5);
    EXPECT_EQ(pts.back().age, 52.0);
    EXPECT_NEAR(pts.back().percent, 1.3803842646028839, 1e-10);
}

TEST(ToPercentage, UniformDatasetIsFlat)
{
    TrecDataset ds{"flat", {{0, 0, 4.0, 1}, {1, 4, 4.0, 1}, {5, 9, 4.0, 3}}};
    for (const auto& p : to_percentage(ds))
        EXPECT_DOUBLE_EQ(p.percent, 100.0);
}

TEST(ToPercentage, InvariantToLogOffset)
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> offset(-3.0, 3.0);
    const TrecDataset base = builtin_datasets().second;
    const auto expected = to_percentage(base);
    for (int rep = 0; rep < 20; ++rep) {
        TrecDataset moved = base;
        const double d = offset(rng);
        for (auto& r : moved.rows)
            r.mean_log10_trec += d;
        const auto got = to_percentage(moved);
        for (std::size_t i = 0; i < got.size(); ++i)
            EXPECT_NEAR(got[i].percent, expected[i].percent, 1e-9 * expected[i].percent);
    }
}

TEST(ToPercentage, MissingAgeZeroIsError)
{
    TrecDataset ds{"no baseline", {{1, 4, 4.0, 1}}};
    EXPECT_THROW(to_percentage(ds), InvalidArgument);
    EXPECT_THROW(to_percentage(TrecDataset{}), InvalidArgument);
}

TEST(TrecDatasetFile, RoundTripsBuiltins)
{
    for (const auto& ds : {builtin_datasets().first, builtin_datasets().second}) {
        std::stringstream ss;
        write_trec_dataset(ss, ds);
        EXPECT_EQ(read_trec_dataset(ss), ds);
    }
}

TEST(TrecDatasetFile, RejectsOverlap)
{
    std::stringstream ss("age_low,age_high,mean_log10_trec,individuals\n0,4,5,1\n3,8,4,1\n");
    EXPECT_THROW(read_trec_dataset(ss), DataError);
    std::stringstream none("age_low,age_high,mean_log10_trec,individuals\n0,0,5,0\n");
    EXPECT_THROW(read_trec_dataset(none), DataError);
}

TEST(ActiveTable, ParsesWellFormedFile)
{
    std::stringstream ss("age_years,active_per_mm3\n0,100\n2.5,80\n");
    const auto table = parse_active_table(ss);
    ASSERT_EQ(table.size(), 2u);
    EXPECT_EQ(table.points()[1].age, 2.5);
    EXPECT_EQ(table.points()[1].count, 80.0);
}

TEST(ActiveTable, UnsortedAgesNameTheLine)
{
    std::stringstream ss("age_years,active_per_mm3\n0,100\n5,80\n3,70\n");
    try {
        parse_active_table(ss, "actives.csv");
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("actives.csv:4"), std::string::npos) << e.what();
    }
}

TEST(ActiveTable, RejectsMalformedInput)
{
    std::stringstream negative("age_years,active_per_mm3\n0,-1\n");
    EXPECT_THROW(parse_active_table(negative), DataError);
    std::stringstream header("age,count\n0,1\n");
    EXPECT_THROW(parse_active_table(header), DataError);
    std::stringstream text("age_years,active_per_mm3\n0,lots\n");
    EXPECT_THROW(parse_active_table(text), DataError);
    std::stringstream empty("age_years,active_per_mm3\n");
    EXPECT_THROW(parse_active_table(empty), DataError);
    std::stringstream fields("age_years,active_per_mm3\n0,1,2\n");
    EXPECT_THROW(parse_active_table(fields), DataError);
    EXPECT_THROW(load_active_table("/nonexistent/actives.csv"), DataError);
}

TEST(ActiveTable, PlaceholderLoadsAndIsFlagged)
{
    const auto path = placeholder_active_table_path();
    const auto table = load_active_table(path);
    EXPECT_GT(table.size(), 1u);
    EXPECT_TRUE(is_placeholder_active_table(path));

    std::stringstream ss;
    write_active_table(ss, table);
    const auto again = parse_active_table(ss);
    ASSERT_EQ(again.size(), table.size());
    for (std::size_t i = 0; i < table.size(); ++i) {
        EXPECT_EQ(again.points()[i].age, table.points()[i].age);
        EXPECT_EQ(again.points()[i].count, table.points()[i].count);
    }
}

TEST(TrajectoryFile, WriteReadInverse)
{
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 1e5);
    std::vector<StateVector> samples;
    for (int i = 0; i < 50; ++i)
        samples.push_back({i * 0.1, u(rng), u(rng) / 7.0, u(rng) / 3.0});
    const Trajectory traj(0.1, samples);

    std::stringstream ss;
    write_trajectory(ss, traj);
    const Trajectory back = read_trajectory(ss);
    ASSERT_EQ(back.size(), traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i)
        EXPECT_EQ(back[i], traj[i]);
}

TEST(TrajectoryFile, HeaderAndTotalColumn)
{
    std::stringstream ss;
    write_trajectory(ss, Trajectory(1.0, {{0, 10, 5, 1}}));
    EXPECT_EQ(ss.str(), "t_years,naive_thymus,naive_prolif,memory,total_naive\n0,10,5,1,15\n");
}

TEST(ReplicateFile, WriteReadInverse)
{
    const std::vector<Trajectory> runs{
        Trajectory(1.0, {{0, 1, 2, 3}, {1, 4, 5, 6}}),
        Trajectory(1.0, {{0, 7, 8, 9}, {1, 0.5, 0.25, 0.125}}),
    };
    std::stringstream ss;
    write_replicates(ss, runs);
    EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')),
              "replicate,t_years,naive_thymus,naive_prolif,memory,total_naive");
    const auto back = read_replicates(ss);
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[1][1], runs[1][1]);
    EXPECT_EQ(back[0][0], runs[0][0]);
}

TEST(Manifest, WriteReadInverse)
{
    const Manifest m{{"scenario", "3"}, {"abm.seed", "42"}, {"actives.placeholder", "true"}, {"note", "a=b"}};
    std::stringstream ss;
    write_manifest(ss, m);
    EXPECT_EQ(read_manifest(ss), m);
    EXPECT_THROW(write_manifest(ss, {{"bad=key", "x"}}), InvalidArgument);
}

TEST(Report, CsvRoundTripAndText)
{
    Comparison c;
    c.quantity = Quantity::Np;
    c.test = {4321.5, 0.8731, RankSumMethod::NormalApproximation};
    c.rms_difference = 12.25;
    c.max_difference = 40.5;
    c.test_points = 101;
    const std::vector<ReportRow> rows{{2, c}};

    std::stringstream ss;
    write_report_csv(ss, rows);
    const auto back = read_report_csv(ss);
    ASSERT_EQ(back.size(), 1u);
    EXPECT_EQ(back[0].scenario, 2);
    EXPECT_EQ(back[0].comparison.quantity, Quantity::Np);
    EXPECT_EQ(back[0].comparison.test.p_value, 0.8731);
    EXPECT_EQ(back[0].comparison.test.method, RankSumMethod::NormalApproximation);
    EXPECT_EQ(back[0].comparison.rms_difference, 12.25);
    EXPECT_EQ(back[0].comparison.test_points, 101u);

    std::stringstream text;
    write_report_text(text, rows);
    EXPECT_NE(text.str().find("not different at 5%"), std::string::npos);
    EXPECT_NE(text.str().find("0.8731"), std::string::npos);
}

TEST(FormatNumber, ShortestRoundTrip)
{
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(format_number(3673.0), "3673");
    const double v = 1.0 / 3.0;
    EXPECT_EQ(std::stod(format_number(v)), v);
}
