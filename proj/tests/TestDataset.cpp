#include "care/Dataset.h"

#include "TestSupport.h"

#include <doctest.h>

#include <set>

using namespace care;
using testsupport::TempFile;

TEST_CASE("loadCsv parses a small continuous file") {
    TempFile file("care_small.csv", "x1,y\n1.5,0\n-2.25,1\n0.5,1\n");
    Dataset d = loadCsv(file.path(), {ColumnKind::continuous(), ColumnKind::binaryTarget()},
                        "y");
    CHECK(d.rowCount() == 3);
    CHECK(d.columnCount() == 2);
    CHECK(d.targetIndex() == 1);
    CHECK(d.rows[1][0] == doctest::Approx(-2.25));
    CHECK(d.target() == std::vector<int>{0, 1, 1});
}

TEST_CASE("loadCsv rejects a non-binary target naming the row") {
    TempFile file("care_badtarget.csv", "x,y\n1,0\n2,2\n");
    try {
        loadCsv(file.path(), {ColumnKind::continuous(), ColumnKind::binaryTarget()}, "y");
        FAIL("expected rejection");
    } catch (const std::invalid_argument& e) {
        std::string msg = e.what();
        CHECK(msg.find("row") != std::string::npos);
    }
}

TEST_CASE("loadCsv rejects unknown categorical levels by name") {
    TempFile file("care_badlevel.csv", "c,y\na,0\nc,1\n");
    try {
        loadCsv(file.path(),
                {ColumnKind::categorical({"a", "b"}), ColumnKind::binaryTarget()}, "y");
        FAIL("expected rejection");
    } catch (const std::invalid_argument& e) {
        std::string msg = e.what();
        CHECK(msg.find("c") != std::string::npos);
    }
}

TEST_CASE("loadCsv rejects empty cells and wrong arity") {
    TempFile empty("care_empty.csv", "x,y\n,0\n");
    CHECK_THROWS_AS(
        loadCsv(empty.path(), {ColumnKind::continuous(), ColumnKind::binaryTarget()}, "y"),
        std::invalid_argument);
    TempFile arity("care_arity.csv", "x,y\n1,0,5\n");
    CHECK_THROWS_AS(
        loadCsv(arity.path(), {ColumnKind::continuous(), ColumnKind::binaryTarget()}, "y"),
        std::invalid_argument);
}

TEST_CASE("csv round trip preserves the dataset") {
    Dataset d;
    d.names = {"x", "c", "y"};
    d.kinds = {ColumnKind::continuous(), ColumnKind::categorical({"lo", "hi"}),
               ColumnKind::binaryTarget()};
    d.rows = {{0.125, 0, 1}, {-3.75e-7, 1, 0}, {123456.5, 0, 1}};
    d.validate();

    std::string path =
        (std::filesystem::temp_directory_path() / "care_roundtrip.csv").string();
    writeCsv(d, path);
    Dataset back = loadCsv(path, d.kinds, "y");
    std::remove(path.c_str());
    CHECK(back.names == d.names);
    CHECK(back.kinds == d.kinds);
    CHECK(back.rows == d.rows);
}

TEST_CASE("standardize centers and scales") {
    Dataset d;
    d.names = {"x", "y"};
    d.kinds = {ColumnKind::continuous(), ColumnKind::binaryTarget()};
    d.rows = {{1, 0}, {2, 1}, {3, 0}};

    auto [z, stats] = standardize(d);
    CHECK(stats.mean[0] == doctest::Approx(2.0));
    double mean = (z.rows[0][0] + z.rows[1][0] + z.rows[2][0]) / 3.0;
    CHECK(mean == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(z.rows[2][0] == doctest::Approx(1.0));  // sample std of [1,2,3] is 1

    SUBCASE("constant column maps to zeros") {
        Dataset c = d;
        c.rows = {{5, 0}, {5, 1}, {5, 0}};
        auto [zc, statsC] = standardize(c);
        for (const auto& row : zc.rows) CHECK(row[0] == doctest::Approx(0.0));
    }

    SUBCASE("foreign stats leave a nonzero mean") {
        Dataset shifted = d;
        shifted.rows = {{5, 0}, {6, 1}, {7, 0}};
        auto [zs, unused] = standardize(shifted, stats);
        double m = (zs.rows[0][0] + zs.rows[1][0] + zs.rows[2][0]) / 3.0;
        CHECK(std::abs(m) > 1.0);
    }

    SUBCASE("re-standardizing with own stats is idempotent") {
        auto [z2, statsZ] = standardize(z);
        auto [z3, unused] = standardize(z2, statsZ);
        (void)unused;
        for (size_t r = 0; r < z2.rows.size(); ++r)
            CHECK(std::abs(z3.rows[r][0] - z2.rows[r][0]) < 1e-12);
    }
}

TEST_CASE("oneHotEncode expands categoricals") {
    Dataset d;
    d.names = {"a", "b", "c", "y"};
    d.kinds = {ColumnKind::continuous(), ColumnKind::continuous(),
               ColumnKind::categorical({"r", "g", "b"}), ColumnKind::binaryTarget()};
    d.rows = {{0.5, -1, 2, 1}, {1.5, 2, 0, 0}};

    EncodedMatrix enc = oneHotEncode(d);
    CHECK(enc.values.cols() == 5);
    CHECK(enc.columnMap == std::vector<int>{0, 1, 2, 2, 2});
    CHECK(enc.variableNames == std::vector<std::string>{"a", "b", "c"});
    CHECK(enc.values(0, 0) == doctest::Approx(0.5));
    // categorical block rows sum to one
    CHECK(enc.values(0, 2) + enc.values(0, 3) + enc.values(0, 4) == doctest::Approx(1.0));
    CHECK(enc.values(1, 2) + enc.values(1, 3) + enc.values(1, 4) == doctest::Approx(1.0));
    CHECK(enc.values(0, 4) == doctest::Approx(1.0));
    CHECK(enc.values(1, 2) == doctest::Approx(1.0));

    SUBCASE("all-continuous dataset encodes to its own values") {
        Dataset cont;
        cont.names = {"a", "b", "y"};
        cont.kinds = {ColumnKind::continuous(), ColumnKind::continuous(),
                      ColumnKind::binaryTarget()};
        cont.rows = {{1, 2, 0}, {3, 4, 1}};
        EncodedMatrix e = oneHotEncode(cont);
        CHECK(e.values.cols() == 2);
        CHECK(e.values(0, 0) == 1.0);
        CHECK(e.values(1, 1) == 4.0);
        CHECK(e.columnMap == std::vector<int>{0, 1});
    }
}

namespace {

Dataset numberedRows(size_t n) {
    Dataset d;
    d.names = {"x", "y"};
    d.kinds = {ColumnKind::continuous(), ColumnKind::binaryTarget()};
    for (size_t i = 0; i < n; ++i)
        d.rows.push_back({static_cast<double>(i), static_cast<double>(i % 2)});
    return d;
}

}  // namespace

TEST_CASE("kfoldSplit partitions rows") {
    Dataset d = numberedRows(10);
    auto folds = kfoldSplit(d, 5, 42);
    REQUIRE(folds.size() == 5);

    std::multiset<double> testRows;
    for (const auto& [train, test] : folds) {
        CHECK(test.rowCount() == 2);
        CHECK(train.rowCount() == 8);
        std::set<double> trainSet;
        for (const auto& row : train.rows) trainSet.insert(row[0]);
        for (const auto& row : test.rows) {
            testRows.insert(row[0]);
            CHECK(trainSet.count(row[0]) == 0);
        }
    }
    CHECK(testRows.size() == 10);
    for (size_t i = 0; i < 10; ++i) CHECK(testRows.count(static_cast<double>(i)) == 1);

    SUBCASE("same seed reproduces the split") {
        auto again = kfoldSplit(d, 5, 42);
        for (size_t f = 0; f < folds.size(); ++f) {
            CHECK(again[f].first.rows == folds[f].first.rows);
            CHECK(again[f].second.rows == folds[f].second.rows);
        }
    }

    SUBCASE("n=11 fold sizes differ by at most one") {
        auto f11 = kfoldSplit(numberedRows(11), 5, 7);
        size_t mn = 99, mx = 0;
        for (const auto& [train, test] : f11) {
            mn = std::min(mn, test.rowCount());
            mx = std::max(mx, test.rowCount());
        }
        CHECK(mx - mn <= 1);
    }

    SUBCASE("k beyond N is rejected") {
        CHECK_THROWS_AS(kfoldSplit(numberedRows(3), 5, 1), std::invalid_argument);
    }
}

TEST_CASE("loadCsvAutoSchema classifies columns") {
    TempFile file("care_auto.csv", "num,cat,y\n1.5,red,0\n2.5,blue,1\n3.5,red,1\n");
    Dataset d = loadCsvAutoSchema(file.path(), "y");
    CHECK(d.kinds[0].role == ColumnRole::Continuous);
    CHECK(d.kinds[1].role == ColumnRole::Categorical);
    CHECK(d.kinds[1].levels == std::vector<std::string>{"blue", "red"});
    CHECK(d.kinds[2].role == ColumnRole::BinaryTarget);

    SUBCASE("missing target column is a clear error") {
        CHECK_THROWS_AS(loadCsvAutoSchema(file.path(), "nope"), std::invalid_argument);
    }
}

TEST_CASE("dataset validation catches structural violations") {
    Dataset d = numberedRows(3);
    SUBCASE("ragged rows") {
        d.rows[1] = {1.0};
        CHECK_THROWS_AS(d.validate(), std::invalid_argument);
    }
    SUBCASE("two targets") {
        d.names.push_back("y2");
        d.kinds.push_back(ColumnKind::binaryTarget());
        for (auto& row : d.rows) row.push_back(0.0);
        CHECK_THROWS_AS(d.validate(), std::invalid_argument);
    }
    SUBCASE("categorical index out of range") {
        d.kinds[0] = ColumnKind::categorical({"a", "b"});
        d.rows[2][0] = 5.0;
        CHECK_THROWS_AS(d.validate(), std::invalid_argument);
    }
}
