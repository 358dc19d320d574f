#include "care/Harness.h"

#include "care/BayesNet.h"
#include "care/Random.h"
#include "care/SynthGen.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>

namespace care {
namespace {

using nlohmann::ordered_json;

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::vector<double> toStdVector(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

Dataset subsetRows(const Dataset& data, const std::vector<size_t>& indices) {
    Dataset out;
    out.names = data.names;
    out.kinds = data.kinds;
    out.meta = data.meta;
    out.rows.reserve(indices.size());
    for (size_t idx : indices) out.rows.push_back(data.rows[idx]);
    return out;
}

Dataset selectColumns(const Dataset& data, const std::vector<std::string>& keep) {
    std::vector<size_t> cols;
    for (size_t c = 0; c < data.names.size(); ++c) {
        if (data.kinds[c].role == ColumnRole::BinaryTarget ||
            std::find(keep.begin(), keep.end(), data.names[c]) != keep.end())
            cols.push_back(c);
    }
    Dataset out;
    out.meta = data.meta;
    for (size_t c : cols) {
        out.names.push_back(data.names[c]);
        out.kinds.push_back(data.kinds[c]);
    }
    out.rows.reserve(data.rows.size());
    for (const auto& row : data.rows) {
        std::vector<double> r;
        r.reserve(cols.size());
        for (size_t c : cols) r.push_back(row[c]);
        out.rows.push_back(std::move(r));
    }
    return out;
}

ordered_json metricJson(const MetricReport& m) {
    ordered_json j;
    j["precision"] = m.precision;
    j["recall"] = m.recall;
    j["f1"] = m.f1;
    j["degenerate"] = m.degenerate;
    return j;
}

ordered_json aggMetricJson(const AggregatedMetric& m) {
    ordered_json j;
    j["median"] = m.median;
    j["min"] = m.min;
    j["max"] = m.max;
    return j;
}

ordered_json aggJson(const AggregatedReport& r) {
    ordered_json j;
    j["precision"] = aggMetricJson(r.precision);
    j["recall"] = aggMetricJson(r.recall);
    j["f1"] = aggMetricJson(r.f1);
    return j;
}

ordered_json importanceJson(const ImportanceScores& s) {
    ordered_json j = ordered_json::object();
    for (size_t i = 0; i < s.names.size(); ++i) j[s.names[i]] = s.scores[i];
    return j;
}

ordered_json maskJson(const CausalMask& mask) {
    ordered_json j = ordered_json::object();
    for (size_t i = 0; i < mask.names.size(); ++i) j[mask.names[i]] = mask.values[i];
    return j;
}

// Per-variable lower median across runs; name sets must agree.
ImportanceScores medianImportance(const std::vector<ImportanceScores>& runs) {
    ImportanceScores out;
    if (runs.empty()) return out;
    out.names = runs[0].names;
    for (size_t v = 0; v < out.names.size(); ++v) {
        std::vector<double> vals;
        for (const auto& run : runs) vals.push_back(run.scores[v]);
        std::sort(vals.begin(), vals.end());
        out.scores.push_back(vals[(vals.size() - 1) / 2]);
    }
    return out;
}

MetricReport evalSplit(const FittedPipeline& fit, const Dataset& data) {
    return classificationMetrics(data.target(), toStdVector(fit.predictProba(data)));
}

struct CellRun {
    CellResult result;
    FittedPipeline fit;
};

CellRun runCellFull(const Dataset& trainData, const Dataset& testData,
                    const CausalMask& mask, const RosterSpec& roster, double acrLambda,
                    uint64_t seed, bool withImportance) {
    Dataset tr = trainData;
    Dataset te = testData;
    CausalMask m = mask;
    if (roster.restrictToMask) {
        std::vector<std::string> keep;
        for (size_t i = 0; i < mask.names.size(); ++i)
            if (mask.values[i] == 1) keep.push_back(mask.names[i]);
        if (keep.empty()) keep = mask.names;  // degenerate mask, keep everything
        tr = selectColumns(trainData, keep);
        te = selectColumns(testData, keep);
        m.names = keep;
        m.values.assign(keep.size(), 1);
    }

    AcrConfig cfg;
    cfg.lambda = roster.useAcr ? acrLambda : 0.0;
    cfg.spec.kind = roster.kind;
    cfg.spec.seed = mixSeed(seed, fnv1a(roster.name));
    cfg.train.learningRate =
        roster.kind == ModelKind::LogisticRegression ? 1e-2 : 1e-3;
    cfg.train.maxIters = 1000;
    cfg.train.weightDecay = roster.weightDecay;
    cfg.train.earlyStopping.enabled = roster.earlyStopping;
    cfg.train.seed = cfg.spec.seed;

    CellRun run;
    run.fit = fitAcr(tr, m, cfg);
    run.result.lambda = cfg.lambda;
    run.result.train = evalSplit(run.fit, tr);
    run.result.test = evalSplit(run.fit, te);
    if (withImportance) {
        run.result.importance = pipelineImportance(run.fit, tr, te, seed);
        run.result.hasImportance = true;
    }
    return run;
}

struct LambdaSelection {
    double chosen = 0.0;
    std::vector<double> candidates;
    std::vector<double> validationF1;
};

// 80/20 split of the training rows; the candidate with the best validation F1
// wins, earlier grid entries break ties.
LambdaSelection selectLambda(const Dataset& trainData, const CausalMask& mask,
                             const RosterSpec& roster,
                             const std::vector<double>& candidates, uint64_t seed) {
    if (candidates.empty())
        throw std::invalid_argument("selectLambda: empty candidate list");
    Rng rng(mixSeed(seed, 0x73656cULL));
    std::vector<size_t> perm = rng.permutation(trainData.rowCount());
    size_t nVal = trainData.rowCount() / 5;
    if (nVal == 0) nVal = 1;
    std::vector<size_t> valIdx(perm.begin(), perm.begin() + static_cast<long>(nVal));
    std::vector<size_t> fitIdx(perm.begin() + static_cast<long>(nVal), perm.end());
    std::sort(valIdx.begin(), valIdx.end());
    std::sort(fitIdx.begin(), fitIdx.end());
    Dataset fitData = subsetRows(trainData, fitIdx);
    Dataset valData = subsetRows(trainData, valIdx);

    LambdaSelection sel;
    sel.candidates = candidates;
    size_t best = 0;
    for (size_t c = 0; c < candidates.size(); ++c) {
        CellRun run = runCellFull(fitData, valData, mask, roster, candidates[c],
                                  mixSeed(seed, 0x76616cULL + c), false);
        sel.validationF1.push_back(run.result.test.f1);
        if (sel.validationF1[c] > sel.validationF1[best]) best = c;
    }
    sel.chosen = candidates[best];
    return sel;
}

ordered_json cellJson(uint64_t seedOrFold, const char* key, const CellResult& cell) {
    ordered_json j;
    j[key] = seedOrFold;
    j["lambda"] = cell.lambda;
    j["train"] = metricJson(cell.train);
    j["test"] = metricJson(cell.test);
    if (cell.hasImportance) j["importance"] = importanceJson(cell.importance);
    return j;
}

struct ModelOutcome {
    std::vector<CellResult> cells;
    ordered_json perRun = ordered_json::array();
};

ordered_json outcomeJson(const ModelOutcome& o) {
    ordered_json j;
    j["per_run"] = o.perRun;
    std::vector<MetricReport> tr, te;
    for (const auto& c : o.cells) {
        tr.push_back(c.train);
        te.push_back(c.test);
    }
    j["train_aggregate"] = aggJson(aggregate(tr));
    j["test_aggregate"] = aggJson(aggregate(te));
    return j;
}

std::string formatDouble(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

void writeTextFile(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

}  // namespace

std::vector<RosterSpec> defaultRoster() {
    std::vector<RosterSpec> roster;
    roster.push_back({"LR", ModelKind::LogisticRegression, 0.0, false, false, false, true});
    roster.push_back({"MLP", ModelKind::Mlp, 0.0, false, false, false, false});
    roster.push_back({"MLP_WD", ModelKind::Mlp, 1e-5, false, false, false, false});
    roster.push_back({"MLP_WD_ES", ModelKind::Mlp, 1e-5, true, false, false, true});
    roster.push_back({"LR_causal_FS", ModelKind::LogisticRegression, 0.0, false, true, false, false});
    roster.push_back({"LR_ACR", ModelKind::LogisticRegression, 0.0, false, false, true, false});
    roster.push_back({"MLP_ACR", ModelKind::Mlp, 0.0, false, false, true, true});
    return roster;
}

CellResult runCell(const Dataset& trainData, const Dataset& testData,
                   const CausalMask& mask, const RosterSpec& roster, double acrLambda,
                   uint64_t seed) {
    return runCellFull(trainData, testData, mask, roster, acrLambda, seed,
                       roster.wantImportance)
        .result;
}

CausalMask learnSyntheticMask(const Dataset& trainData, double alpha) {
    int t = trainData.targetIndex();
    if (t < 0) throw std::invalid_argument("learnSyntheticMask: no target column");
    Eigen::MatrixXd mat(static_cast<Eigen::Index>(trainData.rowCount()),
                        static_cast<Eigen::Index>(trainData.columnCount()));
    for (size_t r = 0; r < trainData.rowCount(); ++r)
        for (size_t c = 0; c < trainData.columnCount(); ++c)
            mat(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                trainData.rows[r][c];
    FisherZTester tester(std::move(mat));
    FciOptions opts;
    opts.alpha = alpha;
    Pag pag = runFci(tester, trainData.names, opts);
    return extractMask(pag, trainData.names[static_cast<size_t>(t)]);
}

ImportanceScores pipelineImportance(const FittedPipeline& fit, const Dataset& trainData,
                                    const Dataset& testData, uint64_t seed) {
    Eigen::MatrixXd encTrain = fit.encode(trainData);
    Eigen::MatrixXd encTest = fit.encode(testData);
    Eigen::Index nExplain = std::min<Eigen::Index>(50, encTest.rows());
    Eigen::MatrixXd Xexplain = encTest.topRows(nExplain);

    AttributionMatrix attrs;
    if (fit.model.params.spec.kind == ModelKind::LogisticRegression) {
        attrs = linearShap(fit.model.params, encTrain, Xexplain, fit.columnMap);
    } else {
        int k = static_cast<int>(std::min<Eigen::Index>(10, encTrain.rows()));
        Eigen::MatrixXd bg = kmeansSummarize(encTrain, k, mixSeed(seed, 0x6267ULL));
        KernelShapConfig cfg;
        cfg.seed = mixSeed(seed, 0x7368ULL);
        attrs = kernelShap(fit.model.params, bg, Xexplain, fit.columnMap, cfg);
    }
    return normalizedImportance(attrs, fit.variableNames, 50);
}

nlohmann::ordered_json runSyntheticGeneralization(const ExperimentConfig& cfg) {
    ordered_json doc;
    doc["experiment"] = "synthetic_generalization";
    ordered_json cj;
    cj["seeds"] = cfg.seeds;
    cj["n_train"] = cfg.nTrain;
    cj["n_test"] = cfg.nTest;
    cj["alpha"] = 0.1;
    cj["acr_lambda_candidates"] = cfg.acrLambdaCandidates;
    doc["config"] = cj;

    std::vector<RosterSpec> roster = defaultRoster();

    ordered_json perSeed = ordered_json::array();
    std::map<std::string, ModelOutcome> outcomes;
    // ACR rows are also recorded at every candidate lambda, not only at the
    // validation winner, keyed by candidate index.
    std::map<std::string, std::map<size_t, ModelOutcome>> candidateOutcomes;
    for (uint64_t seed : cfg.seeds) {
        Dataset trainData = generateSynthetic({cfg.nTrain, DataMode::Train, seed});
        Dataset testData = generateSynthetic({cfg.nTest, DataMode::Test, seed});
        CausalMask mask = learnSyntheticMask(trainData);

        ordered_json sj;
        sj["seed"] = seed;
        sj["mask"] = maskJson(mask);

        for (const RosterSpec& spec : roster) {
            CellResult headline;
            if (spec.useAcr) {
                LambdaSelection sel = selectLambda(trainData, mask, spec,
                                                   cfg.acrLambdaCandidates, seed);
                ordered_json selj;
                selj["candidates"] = sel.candidates;
                selj["validation_f1"] = sel.validationF1;
                selj["chosen"] = sel.chosen;
                sj["lambda_selection"][spec.name] = selj;
                for (size_t c = 0; c < cfg.acrLambdaCandidates.size(); ++c) {
                    CellResult cell = runCell(trainData, testData, mask, spec,
                                              cfg.acrLambdaCandidates[c], seed);
                    auto& out = candidateOutcomes[spec.name][c];
                    out.cells.push_back(cell);
                    out.perRun.push_back(cellJson(seed, "seed", cell));
                    if (cfg.acrLambdaCandidates[c] == sel.chosen) headline = cell;
                }
            } else {
                headline = runCell(trainData, testData, mask, spec, 0.0, seed);
            }
            outcomes[spec.name].cells.push_back(headline);
            outcomes[spec.name].perRun.push_back(cellJson(seed, "seed", headline));
        }
        perSeed.push_back(sj);
    }

    doc["per_seed"] = perSeed;
    ordered_json models = ordered_json::object();
    for (const RosterSpec& spec : roster) {
        ordered_json mj = outcomeJson(outcomes[spec.name]);
        std::vector<ImportanceScores> imp;
        for (const auto& c : outcomes[spec.name].cells)
            if (c.hasImportance) imp.push_back(c.importance);
        if (!imp.empty())
            mj["importance_median"] = importanceJson(medianImportance(imp));
        if (spec.useAcr) {
            ordered_json cands = ordered_json::array();
            for (size_t c = 0; c < cfg.acrLambdaCandidates.size(); ++c) {
                const ModelOutcome& out = candidateOutcomes[spec.name][c];
                ordered_json cjEntry;
                cjEntry["lambda"] = cfg.acrLambdaCandidates[c];
                ordered_json oj = outcomeJson(out);
                for (auto& [key, value] : oj.items()) cjEntry[key] = value;
                std::vector<ImportanceScores> cimp;
                for (const auto& cell : out.cells)
                    if (cell.hasImportance) cimp.push_back(cell.importance);
                if (!cimp.empty())
                    cjEntry["importance_median"] = importanceJson(medianImportance(cimp));
                cands.push_back(cjEntry);
            }
            mj["per_candidate_lambda"] = cands;
        }
        models[spec.name] = mj;
    }
    models["CASTLE"] = "not implemented";
    doc["models"] = models;
    return doc;
}

nlohmann::ordered_json runLambdaSweep(const ExperimentConfig& cfg) {
    ordered_json doc;
    doc["experiment"] = "lambda_sweep";
    ordered_json cj;
    cj["seeds"] = cfg.seeds;
    cj["n_train"] = cfg.nTrain;
    cj["n_test"] = cfg.nTest;
    cj["lambda_grid"] = cfg.lambdaGrid;
    doc["config"] = cj;

    RosterSpec spec{"MLP_ACR", ModelKind::Mlp, 0.0, false, false, true, true};

    // Data and masks are shared across the grid, keyed by seed.
    std::vector<Dataset> trains, tests;
    std::vector<CausalMask> masks;
    for (uint64_t seed : cfg.seeds) {
        trains.push_back(generateSynthetic({cfg.nTrain, DataMode::Train, seed}));
        tests.push_back(generateSynthetic({cfg.nTest, DataMode::Test, seed}));
        masks.push_back(learnSyntheticMask(trains.back()));
    }

    ordered_json perLambda = ordered_json::array();
    for (double lambda : cfg.lambdaGrid) {
        ModelOutcome outcome;
        std::vector<ImportanceScores> imp;
        for (size_t s = 0; s < cfg.seeds.size(); ++s) {
            CellResult cell = runCell(trains[s], tests[s], masks[s], spec, lambda,
                                      cfg.seeds[s]);
            outcome.cells.push_back(cell);
            outcome.perRun.push_back(cellJson(cfg.seeds[s], "seed", cell));
            if (cell.hasImportance) imp.push_back(cell.importance);
        }
        ordered_json lj;
        lj["lambda"] = lambda;
        ordered_json oj = outcomeJson(outcome);
        for (auto& [key, value] : oj.items()) lj[key] = value;
        if (!imp.empty()) lj["importance_median"] = importanceJson(medianImportance(imp));
        perLambda.push_back(lj);
    }
    doc["per_lambda"] = perLambda;
    return doc;
}

nlohmann::ordered_json runSampleSizeSweep(const ExperimentConfig& cfg) {
    ordered_json doc;
    doc["experiment"] = "sample_size_sweep";
    ordered_json cj;
    cj["seeds"] = cfg.seeds;
    cj["sample_sizes"] = cfg.sampleSizes;
    cj["n_test"] = cfg.nTest;
    cj["acr_lambda_candidates"] = cfg.acrLambdaCandidates;
    doc["config"] = cj;

    RosterSpec spec{"MLP_ACR", ModelKind::Mlp, 0.0, false, false, true, false};

    ordered_json perSize = ordered_json::array();
    for (size_t n : cfg.sampleSizes) {
        ModelOutcome outcome;
        for (uint64_t seed : cfg.seeds) {
            Dataset trainData = generateSynthetic({n, DataMode::Train, seed});
            Dataset testData = generateSynthetic({cfg.nTest, DataMode::Test, seed});
            CausalMask mask = learnSyntheticMask(trainData);
            LambdaSelection sel =
                selectLambda(trainData, mask, spec, cfg.acrLambdaCandidates, seed);
            CellResult cell = runCell(trainData, testData, mask, spec, sel.chosen, seed);
            outcome.cells.push_back(cell);
            outcome.perRun.push_back(cellJson(seed, "seed", cell));
        }
        ordered_json nj;
        nj["n_train"] = n;
        ordered_json oj = outcomeJson(outcome);
        for (auto& [key, value] : oj.items()) nj[key] = value;
        perSize.push_back(nj);
    }
    doc["per_sample_size"] = perSize;
    return doc;
}

nlohmann::ordered_json runAlarmScenarios(const ExperimentConfig& cfg) {
    if (cfg.bifPath.empty())
        throw std::invalid_argument("alarm_scenarios: --bif path is required");
    BayesNet net = parseBifFile(cfg.bifPath);
    uint64_t seed = cfg.seeds.empty() ? 1 : cfg.seeds[0];
    Dataset sampled = ancestralSample(net, 100, seed);
    Dataset data = binarizeTarget(sampled, "BP", {"HIGH"});

    ordered_json doc;
    doc["experiment"] = "alarm_scenarios";
    ordered_json cj;
    cj["bif"] = std::filesystem::path(cfg.bifPath).filename().string();
    cj["n_samples"] = 100;
    cj["target"] = "BP";
    cj["positive_levels"] = {"HIGH"};
    cj["folds"] = cfg.folds;
    cj["seed"] = seed;
    doc["config"] = cj;

    auto folds = kfoldSplit(data, cfg.folds, seed);

    // FCI masks are fold-level artifacts, shared by both scenarios.
    std::vector<CausalMask> masks;
    FciOptions opts;
    opts.alpha = 0.1;
    for (const auto& [trainFold, testFold] : folds) {
        GSquaredTester tester(trainFold);
        Pag pag = runFci(tester, trainFold.names, opts);
        int t = trainFold.targetIndex();
        masks.push_back(extractMask(pag, trainFold.names[static_cast<size_t>(t)]));
    }

    std::vector<RosterSpec> roster = defaultRoster();
    const std::vector<std::pair<std::string, double>> scenarios{
        {"scenario_1", 1.0}, {"scenario_2", 1e-2}};

    ordered_json scenarioDoc = ordered_json::object();
    for (const auto& [scenarioName, lambda] : scenarios) {
        ordered_json models = ordered_json::object();
        for (const RosterSpec& spec : roster) {
            ModelOutcome outcome;
            std::vector<ImportanceScores> imp;
            for (size_t f = 0; f < folds.size(); ++f) {
                CellResult cell = runCell(folds[f].first, folds[f].second, masks[f],
                                          spec, lambda, mixSeed(seed, f));
                outcome.cells.push_back(cell);
                outcome.perRun.push_back(cellJson(f, "fold", cell));
                if (cell.hasImportance) imp.push_back(cell.importance);
            }
            ordered_json mj = outcomeJson(outcome);
            if (!imp.empty()) {
                ImportanceScores med = medianImportance(imp);
                mj["importance_median"] = importanceJson(med);
                std::vector<size_t> order(med.names.size());
                for (size_t i = 0; i < order.size(); ++i) order[i] = i;
                std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
                    return med.scores[a] > med.scores[b];
                });
                ordered_json top = ordered_json::array();
                for (size_t i = 0; i < order.size() && i < 5; ++i)
                    top.push_back(med.names[order[i]]);
                mj["top5"] = top;
            }
            models[spec.name] = mj;
        }
        scenarioDoc[scenarioName] = {{"lambda", lambda}, {"models", models}};
    }
    ordered_json maskArr = ordered_json::array();
    for (const auto& m : masks) maskArr.push_back(maskJson(m));
    doc["fold_masks"] = maskArr;
    doc["scenarios"] = scenarioDoc;
    return doc;
}

nlohmann::ordered_json runCustomCsv(const std::string& path, const std::string& target,
                                    double lambda, int folds, uint64_t seed) {
    Dataset data = loadCsvAutoSchema(path, target);

    ordered_json doc;
    doc["experiment"] = "custom_csv";
    ordered_json cj;
    cj["path"] = std::filesystem::path(path).filename().string();
    cj["target"] = target;
    cj["lambda"] = lambda;
    cj["folds"] = folds;
    cj["seed"] = seed;
    doc["config"] = cj;

    auto splits = kfoldSplit(data, folds, seed);
    std::vector<RosterSpec> roster = defaultRoster();
    FciOptions opts;
    opts.alpha = 0.1;

    std::vector<CausalMask> masks;
    for (const auto& [trainFold, testFold] : splits) {
        AutoTester tester(trainFold, {100, 10, seed});
        Pag pag = runFci(tester, trainFold.names, opts);
        int t = trainFold.targetIndex();
        masks.push_back(extractMask(pag, trainFold.names[static_cast<size_t>(t)]));
    }

    ordered_json models = ordered_json::object();
    for (const RosterSpec& spec : roster) {
        ModelOutcome outcome;
        std::vector<ImportanceScores> imp;
        for (size_t f = 0; f < splits.size(); ++f) {
            CellResult cell = runCell(splits[f].first, splits[f].second, masks[f], spec,
                                      lambda, mixSeed(seed, f));
            outcome.cells.push_back(cell);
            outcome.perRun.push_back(cellJson(f, "fold", cell));
            if (cell.hasImportance) imp.push_back(cell.importance);
        }
        ordered_json mj = outcomeJson(outcome);
        if (!imp.empty()) mj["importance_median"] = importanceJson(medianImportance(imp));
        models[spec.name] = mj;
    }
    ordered_json maskArr = ordered_json::array();
    for (const auto& m : masks) maskArr.push_back(maskJson(m));
    doc["fold_masks"] = maskArr;
    doc["models"] = models;
    return doc;
}

namespace {

// Flattened plot data, one CSV per figure.
void emitCsvs(const std::string& name, const ordered_json& doc,
              const std::filesystem::path& dir) {
    if (name == "synthetic_generalization") {
        std::string table = "model,train_f1_median,train_f1_min,train_f1_max,"
                            "test_f1_median,test_f1_min,test_f1_max\n";
        for (const auto& [model, mj] : doc["models"].items()) {
            if (!mj.is_object()) {
                table += model + ",,,,,,\n";
                continue;
            }
            const auto& tr = mj["train_aggregate"]["f1"];
            const auto& te = mj["test_aggregate"]["f1"];
            table += model;
            for (const char* k : {"median", "min", "max"})
                table += "," + formatDouble(tr[k].get<double>());
            for (const char* k : {"median", "min", "max"})
                table += "," + formatDouble(te[k].get<double>());
            table += "\n";
        }
        writeTextFile(dir / "table1.csv", table);

        std::string imp = "model,variable,importance_median\n";
        for (const auto& [model, mj] : doc["models"].items()) {
            if (!mj.is_object() || !mj.contains("importance_median")) continue;
            for (const auto& [var, score] : mj["importance_median"].items())
                imp += model + "," + var + "," + formatDouble(score.get<double>()) + "\n";
        }
        writeTextFile(dir / "importance.csv", imp);
    } else if (name == "lambda_sweep") {
        std::string curve = "lambda,train_f1_median,test_f1_median,gap_median\n";
        std::string imp = "lambda,variable,importance_median\n";
        for (const auto& lj : doc["per_lambda"]) {
            double trF = lj["train_aggregate"]["f1"]["median"].get<double>();
            double teF = lj["test_aggregate"]["f1"]["median"].get<double>();
            std::string lam = formatDouble(lj["lambda"].get<double>());
            curve += lam + "," + formatDouble(trF) + "," + formatDouble(teF) + "," +
                     formatDouble(trF - teF) + "\n";
            if (lj.contains("importance_median"))
                for (const auto& [var, score] : lj["importance_median"].items())
                    imp += lam + "," + var + "," + formatDouble(score.get<double>()) +
                           "\n";
        }
        writeTextFile(dir / "lambda_curve.csv", curve);
        writeTextFile(dir / "lambda_importance.csv", imp);
    } else if (name == "sample_size_sweep") {
        std::string curve = "n_train,train_f1_median,test_f1_median\n";
        for (const auto& nj : doc["per_sample_size"]) {
            curve += std::to_string(nj["n_train"].get<size_t>()) + "," +
                     formatDouble(nj["train_aggregate"]["f1"]["median"].get<double>()) +
                     "," +
                     formatDouble(nj["test_aggregate"]["f1"]["median"].get<double>()) +
                     "\n";
        }
        writeTextFile(dir / "sample_size_curve.csv", curve);
    } else if (name == "alarm_scenarios") {
        std::string table = "scenario,model,test_f1_median,test_f1_min,test_f1_max\n";
        std::string imp = "scenario,variable,importance_median\n";
        for (const auto& [scenario, sj] : doc["scenarios"].items()) {
            for (const auto& [model, mj] : sj["models"].items()) {
                const auto& te = mj["test_aggregate"]["f1"];
                table += scenario + "," + model;
                for (const char* k : {"median", "min", "max"})
                    table += "," + formatDouble(te[k].get<double>());
                table += "\n";
                if (model == "MLP_ACR" && mj.contains("importance_median"))
                    for (const auto& [var, score] : mj["importance_median"].items())
                        imp += scenario + "," + var + "," +
                               formatDouble(score.get<double>()) + "\n";
            }
        }
        writeTextFile(dir / "alarm_scenarios.csv", table);
        writeTextFile(dir / "alarm_importance.csv", imp);
    }
}

}  // namespace

nlohmann::ordered_json runExperiment(const std::string& name,
                                     const ExperimentConfig& cfg,
                                     const std::string& outDir) {
    for (double lambda : cfg.lambdaGrid)
        if (lambda < 0.0)
            throw std::invalid_argument("runExperiment: negative lambda in grid");
    if (cfg.seeds.empty())
        throw std::invalid_argument("runExperiment: need at least one seed");

    ordered_json doc;
    if (name == "synthetic_generalization") doc = runSyntheticGeneralization(cfg);
    else if (name == "lambda_sweep") doc = runLambdaSweep(cfg);
    else if (name == "sample_size_sweep") doc = runSampleSizeSweep(cfg);
    else if (name == "alarm_scenarios") doc = runAlarmScenarios(cfg);
    else if (name == "custom_csv")
        throw std::invalid_argument("custom_csv runs through runCustomCsv with an "
                                    "explicit path and target");
    else
        throw std::invalid_argument("unknown experiment: " + name);

    if (!outDir.empty()) {
        std::filesystem::path dir(outDir);
        std::filesystem::create_directories(dir);
        writeTextFile(dir / "results.json", doc.dump(2) + "\n");
        emitCsvs(name, doc, dir);
    }
    return doc;
}

}  // namespace care
