#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace care {

enum class ModelKind { LogisticRegression, Mlp };

struct ModelSpec {
    ModelKind kind = ModelKind::Mlp;
    int inputDim = 1;
    int hiddenDim = 32;  // MLP only
    uint64_t seed = 0;
};

// Flat parameter vector with shape metadata.
//   LR : [w (p), b]
//   MLP: [W1 (h x p, row-major), b1 (h), W2 (h), b2]
struct ModelParams {
    ModelSpec spec;
    Eigen::VectorXd flat;

    Eigen::Index size() const { return flat.size(); }
    static Eigen::Index parameterCount(const ModelSpec& spec);
};

struct EarlyStoppingConfig {
    bool enabled = false;
    int minIters = 100;
    int patience = 30;
    double tol = 1e-5;
};

struct TrainConfig {
    int maxIters = 1000;
    double learningRate = 1e-3;
    double weightDecay = 0.0;
    EarlyStoppingConfig earlyStopping;
    double lambda = 0.0;  // penalty strength
    uint64_t seed = 0;
};

struct TrainedModel {
    ModelParams params;
    std::vector<double> lossCurve;  // total objective per iteration
    TrainConfig config;
};

struct AdamState {
    Eigen::VectorXd m;
    Eigen::VectorXd v;
    int t = 0;

    static AdamState zero(Eigen::Index n) {
        return {Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n), 0};
    }
};

ModelParams initParams(const ModelSpec& spec);

Eigen::VectorXd forwardLogit(const ModelParams& params, const Eigen::MatrixXd& X);

struct LossGrad {
    double loss;
    Eigen::VectorXd grad;
};
// Mean binary cross-entropy on the sigmoid of the logit, log-sum-exp stable.
LossGrad lossAndGrad(const ModelParams& params, const Eigen::MatrixXd& X,
                     const Eigen::VectorXd& y);

// d(logit_i)/d(x_ij) per row.
Eigen::MatrixXd inputGradient(const ModelParams& params, const Eigen::MatrixXd& X);

struct PenaltyGrad {
    double value;
    Eigen::VectorXd grad;
};
// Mean absolute grad-times-input mass on columns with mask 0, differentiated
// through the input gradient with ReLU indicators and sign(.) held fixed.
PenaltyGrad penaltyValueAndParamGrad(const ModelParams& params,
                                     const Eigen::MatrixXd& X,
                                     const Eigen::VectorXd& maskOnColumns);

void adamStep(AdamState& state, ModelParams& params, const Eigen::VectorXd& grad,
              double lr);

TrainedModel train(const ModelSpec& spec, const TrainConfig& cfg,
                   const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                   const Eigen::VectorXd& maskOnColumns);

std::string trainedModelToJson(const TrainedModel& model);

}  // namespace care
