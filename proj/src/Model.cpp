#include "care/Model.h"

#include "care/Random.h"

#include <json.hpp>

#include <cmath>
#include <stdexcept>

namespace care {
namespace {

// Parameter layout views. W1 is stored row-major: W1(k, j) = flat[k * p + j].
struct MlpView {
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                   Eigen::RowMajor>> W1;
    Eigen::Map<const Eigen::VectorXd> b1;
    Eigen::Map<const Eigen::VectorXd> w2;
    double b2;
};

MlpView mlpView(const ModelParams& params) {
    const int p = params.spec.inputDim;
    const int h = params.spec.hiddenDim;
    const double* d = params.flat.data();
    return {{d, h, p}, {d + h * p, h}, {d + h * p + h, h}, d[h * p + h + h]};
}

struct LrView {
    Eigen::Map<const Eigen::VectorXd> w;
    double b;
};

LrView lrView(const ModelParams& params) {
    const int p = params.spec.inputDim;
    return {{params.flat.data(), p}, params.flat[p]};
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// log(1 + e^z) without overflow
double softplus(double z) {
    return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

void checkShape(const ModelParams& params, const Eigen::MatrixXd& X) {
    if (X.cols() != params.spec.inputDim)
        throw std::invalid_argument("model: X has " + std::to_string(X.cols()) +
                                    " columns, expected " +
                                    std::to_string(params.spec.inputDim));
}

}  // namespace

Eigen::Index ModelParams::parameterCount(const ModelSpec& spec) {
    if (spec.kind == ModelKind::LogisticRegression) return spec.inputDim + 1;
    return static_cast<Eigen::Index>(spec.hiddenDim) * spec.inputDim + spec.hiddenDim +
           spec.hiddenDim + 1;
}

ModelParams initParams(const ModelSpec& spec) {
    if (spec.inputDim < 1 || (spec.kind == ModelKind::Mlp && spec.hiddenDim < 1))
        throw std::invalid_argument("initParams: dims must be >= 1");
    ModelParams params;
    params.spec = spec;
    params.flat = Eigen::VectorXd::Zero(ModelParams::parameterCount(spec));
    Rng rng(mixSeed(spec.seed, 0x696e6974ULL));  // "init"

    auto xavier = [&](Eigen::Index count, int fanIn, int fanOut, Eigen::Index offset) {
        const double sd = std::sqrt(2.0 / static_cast<double>(fanIn + fanOut));
        for (Eigen::Index t = 0; t < count; ++t)
            params.flat[offset + t] = rng.normal(0.0, sd);
    };

    const int p = spec.inputDim;
    if (spec.kind == ModelKind::LogisticRegression) {
        xavier(p, p, 1, 0);  // bias stays zero
    } else {
        const int h = spec.hiddenDim;
        xavier(static_cast<Eigen::Index>(h) * p, p, h, 0);
        xavier(h, h, 1, static_cast<Eigen::Index>(h) * p + h);
    }
    return params;
}

Eigen::VectorXd forwardLogit(const ModelParams& params, const Eigen::MatrixXd& X) {
    checkShape(params, X);
    if (params.spec.kind == ModelKind::LogisticRegression) {
        auto v = lrView(params);
        return (X * v.w).array() + v.b;
    }
    auto v = mlpView(params);
    Eigen::MatrixXd Z = (X * v.W1.transpose()).rowwise() + v.b1.transpose();
    Eigen::MatrixXd A = Z.cwiseMax(0.0);
    return (A * v.w2).array() + v.b2;
}

LossGrad lossAndGrad(const ModelParams& params, const Eigen::MatrixXd& X,
                     const Eigen::VectorXd& y) {
    checkShape(params, X);
    const Eigen::Index n = X.rows();
    Eigen::VectorXd logits = forwardLogit(params, X);

    double loss = 0.0;
    Eigen::VectorXd dLogit(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        loss += softplus(logits[i]) - y[i] * logits[i];
        dLogit[i] = (sigmoid(logits[i]) - y[i]) / static_cast<double>(n);
    }
    loss /= static_cast<double>(n);

    Eigen::VectorXd grad = Eigen::VectorXd::Zero(params.size());
    const int p = params.spec.inputDim;
    if (params.spec.kind == ModelKind::LogisticRegression) {
        grad.head(p) = X.transpose() * dLogit;
        grad[p] = dLogit.sum();
        return {loss, std::move(grad)};
    }

    auto v = mlpView(params);
    const int h = params.spec.hiddenDim;
    Eigen::MatrixXd Z = (X * v.W1.transpose()).rowwise() + v.b1.transpose();
    Eigen::MatrixXd A = Z.cwiseMax(0.0);
    Eigen::MatrixXd active = (Z.array() > 0.0).cast<double>();

    Eigen::MatrixXd dZ = (dLogit * v.w2.transpose()).cwiseProduct(active);  // n x h
    Eigen::MatrixXd gW1 = dZ.transpose() * X;                               // h x p
    Eigen::VectorXd gb1 = dZ.colwise().sum().transpose();
    Eigen::VectorXd gw2 = A.transpose() * dLogit;
    double gb2 = dLogit.sum();

    for (int k = 0; k < h; ++k)
        for (int j = 0; j < p; ++j) grad[static_cast<Eigen::Index>(k) * p + j] = gW1(k, j);
    grad.segment(static_cast<Eigen::Index>(h) * p, h) = gb1;
    grad.segment(static_cast<Eigen::Index>(h) * p + h, h) = gw2;
    grad[static_cast<Eigen::Index>(h) * p + 2 * h] = gb2;
    return {loss, std::move(grad)};
}

Eigen::MatrixXd inputGradient(const ModelParams& params, const Eigen::MatrixXd& X) {
    checkShape(params, X);
    if (params.spec.kind == ModelKind::LogisticRegression) {
        auto v = lrView(params);
        return Eigen::VectorXd::Ones(X.rows()) * v.w.transpose();
    }
    auto v = mlpView(params);
    Eigen::MatrixXd Z = (X * v.W1.transpose()).rowwise() + v.b1.transpose();
    Eigen::MatrixXd active = (Z.array() > 0.0).cast<double>();
    Eigen::MatrixXd gate =
        (active.array().rowwise() * v.w2.transpose().array()).matrix();
    return gate * v.W1;  // n x p
}

PenaltyGrad penaltyValueAndParamGrad(const ModelParams& params,
                                     const Eigen::MatrixXd& X,
                                     const Eigen::VectorXd& maskOnColumns) {
    checkShape(params, X);
    if (maskOnColumns.size() != X.cols())
        throw std::invalid_argument("penalty: mask arity mismatch");
    const Eigen::Index n = X.rows();
    const int p = params.spec.inputDim;

    Eigen::MatrixXd G = inputGradient(params, X);
    Eigen::MatrixXd S = X.cwiseProduct(G);

    Eigen::VectorXd offWeight = (1.0 - maskOnColumns.array()).matrix();
    double value = (S.cwiseAbs() * offWeight).sum() / static_cast<double>(n);

    // C_ij = sign(S_ij) (1 - A_j) / n, with sign(0) = 0, held constant
    Eigen::MatrixXd C = S.unaryExpr([](double s) {
        return s > 0.0 ? 1.0 : (s < 0.0 ? -1.0 : 0.0);
    });
    C = (C.array().rowwise() * offWeight.transpose().array() / static_cast<double>(n))
            .matrix();

    Eigen::VectorXd grad = Eigen::VectorXd::Zero(params.size());
    if (params.spec.kind == ModelKind::LogisticRegression) {
        // Omega = sum_ij C_ij x_ij w_j
        grad.head(p) = C.cwiseProduct(X).colwise().sum().transpose();
        return {value, std::move(grad)};
    }

    auto v = mlpView(params);
    const int h = params.spec.hiddenDim;
    Eigen::MatrixXd Z = (X * v.W1.transpose()).rowwise() + v.b1.transpose();
    Eigen::MatrixXd active = (Z.array() > 0.0).cast<double>();  // n x h
    Eigen::MatrixXd T = C.cwiseProduct(X);                      // n x p

    // Omega = sum_i sum_j T_ij sum_k w2_k m_ik W1_kj  (m frozen)
    Eigen::MatrixXd gate =
        (active.array().rowwise() * v.w2.transpose().array()).matrix();  // n x h
    Eigen::MatrixXd gW1 = gate.transpose() * T;                                  // h x p
    Eigen::VectorXd gw2 =
        active.cwiseProduct(T * v.W1.transpose()).colwise().sum().transpose();

    for (int k = 0; k < h; ++k)
        for (int j = 0; j < p; ++j) grad[static_cast<Eigen::Index>(k) * p + j] = gW1(k, j);
    grad.segment(static_cast<Eigen::Index>(h) * p + h, h) = gw2;
    return {value, std::move(grad)};
}

void adamStep(AdamState& state, ModelParams& params, const Eigen::VectorXd& grad,
              double lr) {
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    if (state.m.size() != grad.size())
        throw std::invalid_argument("adamStep: state/grad shape mismatch");
    ++state.t;
    state.m = beta1 * state.m + (1.0 - beta1) * grad;
    state.v = beta2 * state.v + (1.0 - beta2) * grad.cwiseProduct(grad);
    const double c1 = 1.0 - std::pow(beta1, state.t);
    const double c2 = 1.0 - std::pow(beta2, state.t);
    Eigen::ArrayXd mhat = state.m.array() / c1;
    Eigen::ArrayXd vhat = state.v.array() / c2;
    params.flat.array() -= lr * mhat / (vhat.sqrt() + eps);
}

TrainedModel train(const ModelSpec& spec, const TrainConfig& cfg,
                   const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                   const Eigen::VectorXd& maskOnColumns) {
    if (cfg.maxIters < 1) throw std::invalid_argument("train: maxIters must be >= 1");
    if (cfg.lambda < 0.0) throw std::invalid_argument("train: lambda must be >= 0");
    if (X.rows() != y.size()) throw std::invalid_argument("train: X/y shape mismatch");

    ModelParams params = initParams(spec);
    AdamState adam = AdamState::zero(params.size());
    TrainedModel out;
    out.config = cfg;

    int streak = 0;
    double prevObjective = 0.0;
    for (int iter = 1; iter <= cfg.maxIters; ++iter) {
        auto [loss, grad] = lossAndGrad(params, X, y);
        double objective = loss;
        if (cfg.lambda > 0.0) {
            auto [pen, pgrad] = penaltyValueAndParamGrad(params, X, maskOnColumns);
            objective += cfg.lambda * pen;
            grad += cfg.lambda * pgrad;
        }
        if (!std::isfinite(objective))
            throw std::runtime_error(
                "train: objective diverged to a non-finite value at iteration " +
                std::to_string(iter) + "; reduce the learning rate");
        if (cfg.weightDecay > 0.0) grad += cfg.weightDecay * params.flat;

        adamStep(adam, params, grad, cfg.learningRate);
        out.lossCurve.push_back(objective);

        if (cfg.earlyStopping.enabled && iter > cfg.earlyStopping.minIters) {
            if (std::abs(objective - prevObjective) <= cfg.earlyStopping.tol)
                ++streak;
            else
                streak = 0;
            if (streak >= cfg.earlyStopping.patience) break;
        }
        prevObjective = objective;
    }
    out.params = std::move(params);
    return out;
}

std::string trainedModelToJson(const TrainedModel& model) {
    nlohmann::ordered_json j;
    j["spec"]["kind"] =
        model.params.spec.kind == ModelKind::Mlp ? "mlp" : "logistic_regression";
    j["spec"]["input_dim"] = model.params.spec.inputDim;
    j["spec"]["hidden_dim"] = model.params.spec.hiddenDim;
    j["spec"]["seed"] = model.params.spec.seed;
    j["config"]["max_iters"] = model.config.maxIters;
    j["config"]["learning_rate"] = model.config.learningRate;
    j["config"]["weight_decay"] = model.config.weightDecay;
    j["config"]["lambda"] = model.config.lambda;
    j["config"]["early_stopping"] = model.config.earlyStopping.enabled;
    j["params"] = std::vector<double>(model.params.flat.data(),
                                      model.params.flat.data() + model.params.size());
    j["loss_curve"] = model.lossCurve;
    return j.dump(2);
}

}  // namespace care
