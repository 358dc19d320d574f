#pragma once

#include "care/Model.h"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace care {

struct AttributionMatrix {
    Eigen::MatrixXd values;      // N x p, signed
    std::vector<int> columnMap;  // encoded column -> original variable index
};

struct ImportanceScores {
    std::vector<std::string> names;  // original variables
    std::vector<double> scores;      // in [0, 1]; max is 1 unless all zero
};

// S_ij = x_ij * d(logit_i)/d(x_ij)
AttributionMatrix gradXInput(const ModelParams& params, const Eigen::MatrixXd& X,
                             const std::vector<int>& columnMap);

// Lloyd's algorithm with seeded farthest-point initialization, 100-iteration cap.
Eigen::MatrixXd kmeansSummarize(const Eigen::MatrixXd& X, int k, uint64_t seed);

struct KernelShapConfig {
    int sampledCoalitions = 2048;
    uint64_t seed = 0;
    bool forceExact = false;  // exact enumeration allowed up to 25 features
};

// Shapley values on the logit with interventional (marginal) background
// replacement. Exact coalition enumeration for p <= 12 (or up to 25 when
// forced); weighted-least-squares sampling otherwise. Local accuracy holds by
// construction: sum_j phi_ij = logit(x_i) - mean background logit.
AttributionMatrix kernelShap(const ModelParams& params,
                             const Eigen::MatrixXd& background,
                             const Eigen::MatrixXd& Xexplain,
                             const std::vector<int>& columnMap,
                             const KernelShapConfig& cfg = {});

// Closed form for the linear model: phi_ij = w_j (x_ij - mean background_j).
AttributionMatrix linearShap(const ModelParams& params,
                             const Eigen::MatrixXd& background,
                             const Eigen::MatrixXd& X,
                             const std::vector<int>& columnMap);

// Mean absolute attribution over the first min(subsetSize, N) rows, summed
// per original variable and divided by the maximum.
ImportanceScores normalizedImportance(const AttributionMatrix& attrs,
                                      const std::vector<std::string>& variableNames,
                                      int subsetSize = 50);

}  // namespace care
