#include "care/Harness.h"

#include "care/Random.h"
#include "care/SynthGen.h"
#include "TestSupport.h"

#include <doctest.h>

#include <filesystem>

using namespace care;

namespace {

std::string writeSyntheticCsv(const std::string& name, size_t n, uint64_t seed) {
    Dataset d = generateSynthetic({n, DataMode::Train, seed});
    std::string path = (std::filesystem::temp_directory_path() / name).string();
    writeCsv(d, path);
    return path;
}

RosterSpec rosterByName(const std::string& name) {
    for (const RosterSpec& r : defaultRoster())
        if (r.name == name) return r;
    throw std::runtime_error("no roster entry " + name);
}

}  // namespace

TEST_CASE("default roster lists the comparison grid") {
    std::vector<RosterSpec> roster = defaultRoster();
    REQUIRE(roster.size() == 7);
    CHECK(roster[0].name == "LR");
    CHECK(roster[0].kind == ModelKind::LogisticRegression);
    CHECK(roster[0].wantImportance);
    CHECK(roster[2].weightDecay == 1e-5);
    CHECK(roster[3].earlyStopping);
    CHECK(rosterByName("LR_causal_FS").restrictToMask);
    CHECK(rosterByName("LR_ACR").useAcr);
    CHECK(rosterByName("MLP_ACR").useAcr);
    CHECK(rosterByName("MLP_ACR").wantImportance);
}

TEST_CASE("the synthetic mask recovers the causal parents on seed one") {
    Dataset train = generateSynthetic({1000, DataMode::Train, 1});
    CausalMask mask = learnSyntheticMask(train);
    REQUIRE(mask.names ==
            std::vector<std::string>{"X1", "X2", "Xproxy", "Xspur", "Xnoise"});
    CHECK(mask.values == std::vector<int>{1, 1, 0, 0, 0});
}

TEST_CASE("mask restriction drops unprotected columns") {
    Dataset train = generateSynthetic({300, DataMode::Train, 2});
    Dataset test = generateSynthetic({300, DataMode::Test, 1002});
    RosterSpec fs = rosterByName("LR_causal_FS");
    CausalMask names{{"X1", "X2", "Xproxy", "Xspur", "Xnoise"}, {1, 0, 0, 0, 0}};

    // Manually keep only X1 and the target, then fit the same roster entry on
    // the reduced table with a trivially all-protected mask. The restricted
    // run must coincide exactly.
    auto keepX1 = [](const Dataset& d) {
        Dataset out;
        out.meta = d.meta;
        std::vector<size_t> cols;
        for (size_t c = 0; c < d.names.size(); ++c)
            if (d.names[c] == "X1" || d.kinds[c].role == ColumnRole::BinaryTarget) {
                out.names.push_back(d.names[c]);
                out.kinds.push_back(d.kinds[c]);
                cols.push_back(c);
            }
        for (const auto& row : d.rows) {
            std::vector<double> r;
            for (size_t c : cols) r.push_back(row[c]);
            out.rows.push_back(r);
        }
        return out;
    };

    CellResult restricted = runCell(train, test, names, fs, 0.0, 5);
    CellResult manual = runCell(keepX1(train), keepX1(test), {{"X1"}, {1}}, fs, 0.0, 5);
    CHECK(restricted.test.f1 == manual.test.f1);
    CHECK(restricted.train.f1 == manual.train.f1);

    SUBCASE("an all-zero mask degenerates to keeping every column") {
        CausalMask zero{names.names, {0, 0, 0, 0, 0}};
        CausalMask ones{names.names, {1, 1, 1, 1, 1}};
        CellResult viaZero = runCell(train, test, zero, fs, 0.0, 5);
        CellResult viaOnes = runCell(train, test, ones, fs, 0.0, 5);
        CHECK(viaZero.test.f1 == viaOnes.test.f1);
    }
}

TEST_CASE("custom csv experiment") {
    std::string path = writeSyntheticCsv("care_custom.csv", 60, 4);

    SUBCASE("a missing target column is rejected") {
        CHECK_THROWS_AS(runCustomCsv(path, "nope", 1e-2, 3), std::invalid_argument);
    }

    nlohmann::ordered_json doc = runCustomCsv(path, "Y", 1e-2, 3);
    CHECK(doc["experiment"] == "custom_csv");
    CHECK(doc["config"]["folds"] == 3);
    CHECK(doc["fold_masks"].size() == 3);
    REQUIRE(doc["models"].size() == 7);
    for (const auto& [name, mj] : doc["models"].items()) {
        REQUIRE(mj["per_run"].size() == 3);
        for (size_t f = 0; f < 3; ++f) {
            CHECK(mj["per_run"][f]["fold"] == f);
            CHECK(mj["per_run"][f]["test"].contains("f1"));
        }
        CHECK(mj["test_aggregate"]["f1"].contains("median"));
    }

    SUBCASE("fold cells match a by-hand reconstruction") {
        Dataset data = loadCsvAutoSchema(path, "Y");
        auto splits = kfoldSplit(data, 3, 1);
        AutoTester tester(splits[0].first, {100, 10, 1});
        FciOptions opts;
        opts.alpha = 0.1;
        Pag pag = runFci(tester, splits[0].first.names, opts);
        int t = splits[0].first.targetIndex();
        CausalMask mask =
            extractMask(pag, splits[0].first.names[static_cast<size_t>(t)]);

        CellResult cell = runCell(splits[0].first, splits[0].second, mask,
                                  rosterByName("MLP"), 1e-2, mixSeed(1, 0));
        CHECK(doc["models"]["MLP"]["per_run"][0]["test"]["f1"] ==
              doctest::Approx(cell.test.f1).epsilon(1e-12));
        CHECK(doc["models"]["MLP"]["per_run"][0]["train"]["f1"] ==
              doctest::Approx(cell.train.f1).epsilon(1e-12));
    }

    std::filesystem::remove(path);
}

TEST_CASE("the synthetic experiment is a pure function of its config") {
    ExperimentConfig cfg;
    cfg.seeds = {7};
    cfg.nTrain = 200;
    cfg.nTest = 100;
    nlohmann::ordered_json a = runSyntheticGeneralization(cfg);
    nlohmann::ordered_json b = runSyntheticGeneralization(cfg);
    CHECK(a.dump() == b.dump());

    CHECK(a["per_seed"].size() == 1);
    CHECK(a["models"].contains("MLP_ACR"));
    CHECK(a["models"]["CASTLE"] == "not implemented");
}

TEST_CASE("scenario experiment runs on a miniature network") {
    ExperimentConfig cfg;
    cfg.bifPath =
        (std::filesystem::path(__FILE__).parent_path() / "data" / "minibp.bif")
            .string();
    nlohmann::ordered_json doc = runAlarmScenarios(cfg);

    CHECK(doc["config"]["target"] == "BP");
    CHECK(doc["fold_masks"].size() == 5);
    REQUIRE(doc["scenarios"].contains("scenario_1"));
    REQUIRE(doc["scenarios"].contains("scenario_2"));
    CHECK(doc["scenarios"]["scenario_1"]["lambda"] == 1.0);
    CHECK(doc["scenarios"]["scenario_2"]["lambda"] == 1e-2);
    for (const auto& [name, scenario] : doc["scenarios"].items()) {
        REQUIRE(scenario["models"].size() == 7);
        const auto& acr = scenario["models"]["MLP_ACR"];
        CHECK(acr["per_run"].size() == 5);
        REQUIRE(acr.contains("top5"));
        CHECK(acr["top5"].size() <= 5);
    }

    SUBCASE("a missing bif path is rejected") {
        ExperimentConfig empty;
        CHECK_THROWS_AS(runAlarmScenarios(empty), std::invalid_argument);
    }
}

TEST_CASE("experiment dispatch validates its inputs") {
    ExperimentConfig cfg;
    CHECK_THROWS_AS(runExperiment("no_such_experiment", cfg, ""),
                    std::invalid_argument);

    ExperimentConfig bad = cfg;
    bad.lambdaGrid = {1e-3, -1.0};
    CHECK_THROWS_AS(runExperiment("lambda_sweep", bad, ""), std::invalid_argument);

    ExperimentConfig noSeeds = cfg;
    noSeeds.seeds.clear();
    CHECK_THROWS_AS(runExperiment("synthetic_generalization", noSeeds, ""),
                    std::invalid_argument);

    CHECK_THROWS_AS(runExperiment("custom_csv", cfg, ""), std::invalid_argument);
}
