#include "care/Acr.h"

#include <stdexcept>

namespace care {

double acrPenalty(const AttributionMatrix& attrs, const Eigen::VectorXd& maskOnColumns) {
    if (attrs.values.cols() != maskOnColumns.size())
        throw std::invalid_argument("acrPenalty: mask arity mismatch");
    Eigen::VectorXd offWeight = (1.0 - maskOnColumns.array()).matrix();
    return (attrs.values.cwiseAbs() * offWeight).sum() /
           static_cast<double>(attrs.values.rows());
}

Eigen::MatrixXd FittedPipeline::encode(const Dataset& data) const {
    auto [standardized, unused] = standardize(data, stats);
    (void)unused;
    return oneHotEncode(standardized).values;
}

Eigen::VectorXd FittedPipeline::predictProba(const Dataset& data) const {
    Eigen::VectorXd logits = forwardLogit(model.params, encode(data));
    return logits.unaryExpr([](double z) { return 1.0 / (1.0 + std::exp(-z)); });
}

FittedPipeline fitAcr(const Dataset& trainData, const CausalMask& mask,
                      const AcrConfig& cfg) {
    if (cfg.lambda < 0.0) throw std::invalid_argument("fitAcr: lambda must be >= 0");
    auto [standardized, stats] = standardize(trainData);
    EncodedMatrix enc = oneHotEncode(standardized);

    Eigen::VectorXd maskCols = broadcastMask(mask, enc.columnMap, enc.variableNames);

    ModelSpec spec = cfg.spec;
    spec.inputDim = static_cast<int>(enc.values.cols());
    TrainConfig trainCfg = cfg.train;
    trainCfg.lambda = cfg.lambda;

    auto y = trainData.target();
    Eigen::VectorXd yv(static_cast<Eigen::Index>(y.size()));
    for (size_t i = 0; i < y.size(); ++i)
        yv(static_cast<Eigen::Index>(i)) = static_cast<double>(y[i]);

    FittedPipeline fit;
    fit.model = train(spec, trainCfg, enc.values, yv, maskCols);
    fit.stats = std::move(stats);
    fit.columnMap = enc.columnMap;
    fit.variableNames = enc.variableNames;
    fit.mask = mask;
    fit.lambda = cfg.lambda;
    return fit;
}

FittedPipeline fitAcr(const Dataset& trainData, const Pag& pag, const AcrConfig& cfg) {
    int t = trainData.targetIndex();
    if (t < 0) throw std::invalid_argument("fitAcr: dataset has no target");
    return fitAcr(trainData, extractMask(pag, trainData.names[static_cast<size_t>(t)]),
                  cfg);
}

}  // namespace care
