#pragma once

#include "care/Acr.h"
#include "care/Attribution.h"
#include "care/Dataset.h"
#include "care/Fci.h"
#include "care/Metrics.h"

#include <json.hpp>

#include <string>
#include <vector>

namespace care {

struct ExperimentConfig {
    std::vector<uint64_t> seeds{1, 2, 3};
    size_t nTrain = 1000;
    size_t nTest = 1000;
    std::vector<double> lambdaGrid{1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0};
    std::vector<double> acrLambdaCandidates{1e-2, 1e-1, 1.0};
    std::vector<size_t> sampleSizes{500, 1000, 1500, 2000, 2500};
    int folds = 5;
    std::string bifPath;
    double customLambda = 1e-2;
};

// One trained model evaluated on its train and test splits.
struct CellResult {
    MetricReport train;
    MetricReport test;
    double lambda = 0.0;
    bool hasImportance = false;
    ImportanceScores importance;
};

struct RosterSpec {
    std::string name;
    ModelKind kind = ModelKind::Mlp;
    double weightDecay = 0.0;
    bool earlyStopping = false;
    bool restrictToMask = false;  // "LR w/ causal FS"
    bool useAcr = false;
    bool wantImportance = false;
};

// The Table-I roster. acrLambda applies to the *_ACR rows.
std::vector<RosterSpec> defaultRoster();

CellResult runCell(const Dataset& trainData, const Dataset& testData,
                   const CausalMask& mask, const RosterSpec& roster, double acrLambda,
                   uint64_t seed);

// Learns the FCI mask on raw training variables with the Fisher-z tester.
CausalMask learnSyntheticMask(const Dataset& trainData, double alpha = 0.1);

// Importance scores for an already fitted pipeline (Linear SHAP for LR,
// Kernel SHAP over a k-means background for the MLP).
ImportanceScores pipelineImportance(const FittedPipeline& fit, const Dataset& trainData,
                                    const Dataset& testData, uint64_t seed);

nlohmann::ordered_json runSyntheticGeneralization(const ExperimentConfig& cfg);
nlohmann::ordered_json runLambdaSweep(const ExperimentConfig& cfg);
nlohmann::ordered_json runSampleSizeSweep(const ExperimentConfig& cfg);
nlohmann::ordered_json runAlarmScenarios(const ExperimentConfig& cfg);
nlohmann::ordered_json runCustomCsv(const std::string& path, const std::string& target,
                                    double lambda, int folds, uint64_t seed = 1);

// Dispatch by experiment name; writes results.json and per-figure CSVs when
// outDir is non-empty. Returns the results document.
nlohmann::ordered_json runExperiment(const std::string& name,
                                     const ExperimentConfig& cfg,
                                     const std::string& outDir);

}  // namespace care
