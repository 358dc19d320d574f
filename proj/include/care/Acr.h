#pragma once

#include "care/Attribution.h"
#include "care/Dataset.h"
#include "care/Fci.h"
#include "care/Model.h"

namespace care {

struct AcrConfig {
    double lambda = 0.0;
    ModelSpec spec;
    TrainConfig train;
};

// Mean absolute attribution mass on columns the mask leaves unprotected.
double acrPenalty(const AttributionMatrix& attrs, const Eigen::VectorXd& maskOnColumns);

// Standardization stats, encoding layout and mask travel with the model so
// test data can be pushed through the identical pipeline.
struct FittedPipeline {
    TrainedModel model;
    StandardizeStats stats;
    std::vector<int> columnMap;
    std::vector<std::string> variableNames;
    CausalMask mask;
    double lambda = 0.0;

    // Standardize with the training stats, encode, and return class-1
    // probabilities.
    Eigen::VectorXd predictProba(const Dataset& data) const;
    Eigen::MatrixXd encode(const Dataset& data) const;
};

FittedPipeline fitAcr(const Dataset& trainData, const CausalMask& mask,
                      const AcrConfig& cfg);
FittedPipeline fitAcr(const Dataset& trainData, const Pag& pag, const AcrConfig& cfg);

}  // namespace care
