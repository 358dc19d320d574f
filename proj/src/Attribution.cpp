#include "care/Attribution.h"

#include "care/Random.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace care {
namespace {

// t! (p-1-t)! / p!  computed in log space
double shapleyWeight(int t, int p) {
    return std::exp(std::lgamma(t + 1.0) + std::lgamma(p - t + 0.0) -
                    std::lgamma(p + 1.0));
}

// Mean model output over background rows with present features taken from x.
Eigen::VectorXd coalitionValues(const ModelParams& params, const Eigen::MatrixXd& bg,
                                const Eigen::RowVectorXd& x,
                                const std::vector<uint32_t>& masks) {
    const Eigen::Index B = bg.rows();
    const Eigen::Index p = bg.cols();
    Eigen::MatrixXd composite(static_cast<Eigen::Index>(masks.size()) * B, p);
    for (size_t m = 0; m < masks.size(); ++m) {
        for (Eigen::Index b = 0; b < B; ++b) {
            for (Eigen::Index j = 0; j < p; ++j)
                composite(static_cast<Eigen::Index>(m) * B + b, j) =
                    (masks[m] >> j) & 1u ? x(j) : bg(b, j);
        }
    }
    Eigen::VectorXd logits = forwardLogit(params, composite);
    Eigen::VectorXd out(static_cast<Eigen::Index>(masks.size()));
    for (size_t m = 0; m < masks.size(); ++m)
        out(static_cast<Eigen::Index>(m)) =
            logits.segment(static_cast<Eigen::Index>(m) * B, B).mean();
    return out;
}

Eigen::VectorXd exactShapleyRow(const ModelParams& params, const Eigen::MatrixXd& bg,
                                const Eigen::RowVectorXd& x) {
    const int p = static_cast<int>(bg.cols());
    const uint32_t total = 1u << p;
    std::vector<uint32_t> masks(total);
    for (uint32_t m = 0; m < total; ++m) masks[m] = m;
    Eigen::VectorXd v = coalitionValues(params, bg, x, masks);

    std::vector<double> weight(static_cast<size_t>(p));
    for (int t = 0; t < p; ++t) weight[static_cast<size_t>(t)] = shapleyWeight(t, p);

    Eigen::VectorXd phi = Eigen::VectorXd::Zero(p);
    for (uint32_t m = 0; m < total; ++m) {
        const int t = std::popcount(m);
        for (int j = 0; j < p; ++j) {
            if ((m >> j) & 1u) continue;
            phi(j) += weight[static_cast<size_t>(t)] * (v(m | (1u << j)) - v(m));
        }
    }
    return phi;
}

Eigen::VectorXd sampledShapleyRow(const ModelParams& params, const Eigen::MatrixXd& bg,
                                  const Eigen::RowVectorXd& x,
                                  const KernelShapConfig& cfg, Rng& rng) {
    const int p = static_cast<int>(bg.cols());
    const double phi0 = coalitionValues(params, bg, x, {0u})(0);
    const uint32_t full = p < 32 ? ((1u << p) - 1u) : 0u;
    // full coalition value computed directly (no background substitution)
    Eigen::MatrixXd xm = x;
    const double vFull = forwardLogit(params, xm)(0);
    const double delta = vFull - phi0;
    (void)full;

    // coalition sizes drawn proportional to the Shapley kernel mass per size
    std::vector<double> sizeWeight(static_cast<size_t>(p - 1));
    for (int s = 1; s < p; ++s)
        sizeWeight[static_cast<size_t>(s - 1)] =
            static_cast<double>(p - 1) / (static_cast<double>(s) * (p - s));

    const int m = cfg.sampledCoalitions;
    Eigen::MatrixXd Z(m, p);
    Z.setZero();
    std::vector<int> indices(static_cast<size_t>(p));
    for (int j = 0; j < p; ++j) indices[static_cast<size_t>(j)] = j;
    std::vector<std::vector<uint8_t>> rowsMask(static_cast<size_t>(m),
                                               std::vector<uint8_t>(static_cast<size_t>(p), 0));
    for (int k = 0; k < m; ++k) {
        int s = 1 + static_cast<int>(rng.categorical(sizeWeight));
        // partial Fisher-Yates for a uniform size-s subset
        for (int t = 0; t < s; ++t) {
            size_t r = static_cast<size_t>(t) +
                       rng.uniformIndex(static_cast<size_t>(p - t));
            std::swap(indices[static_cast<size_t>(t)], indices[r]);
            Z(k, indices[static_cast<size_t>(t)]) = 1.0;
            rowsMask[static_cast<size_t>(k)][static_cast<size_t>(indices[static_cast<size_t>(t)])] = 1;
        }
    }

    // model evaluations, batched over backgrounds per coalition
    const Eigen::Index B = bg.rows();
    Eigen::MatrixXd composite(static_cast<Eigen::Index>(m) * B, p);
    for (int k = 0; k < m; ++k)
        for (Eigen::Index b = 0; b < B; ++b)
            for (int j = 0; j < p; ++j)
                composite(static_cast<Eigen::Index>(k) * B + b, j) =
                    rowsMask[static_cast<size_t>(k)][static_cast<size_t>(j)] ? x(j)
                                                                             : bg(b, j);
    Eigen::VectorXd logits = forwardLogit(params, composite);
    Eigen::VectorXd v(m);
    for (int k = 0; k < m; ++k)
        v(k) = logits.segment(static_cast<Eigen::Index>(k) * B, B).mean();

    // least squares with the efficiency constraint eliminated through the
    // last feature: phi_last = delta - sum_{j<p-1} phi_j
    Eigen::MatrixXd A(m, p - 1);
    Eigen::VectorXd rhs(m);
    for (int k = 0; k < m; ++k) {
        const double zLast = Z(k, p - 1);
        for (int j = 0; j < p - 1; ++j) A(k, j) = Z(k, j) - zLast;
        rhs(k) = v(k) - phi0 - zLast * delta;
    }
    Eigen::VectorXd head = A.colPivHouseholderQr().solve(rhs);

    Eigen::VectorXd phi(p);
    phi.head(p - 1) = head;
    phi(p - 1) = delta - head.sum();
    return phi;
}

}  // namespace

AttributionMatrix gradXInput(const ModelParams& params, const Eigen::MatrixXd& X,
                             const std::vector<int>& columnMap) {
    AttributionMatrix out;
    out.values = X.cwiseProduct(inputGradient(params, X));
    out.columnMap = columnMap;
    return out;
}

Eigen::MatrixXd kmeansSummarize(const Eigen::MatrixXd& X, int k, uint64_t seed) {
    const Eigen::Index n = X.rows();
    if (k < 1 || static_cast<Eigen::Index>(k) > n)
        throw std::invalid_argument("kmeansSummarize: need 1 <= k <= N");
    Rng rng(mixSeed(seed, 0x6b6d65616e73ULL));  // "kmeans"

    // farthest-point initialization
    std::vector<Eigen::Index> chosen;
    std::vector<bool> isChosen(static_cast<size_t>(n), false);
    Eigen::Index first = static_cast<Eigen::Index>(rng.uniformIndex(static_cast<size_t>(n)));
    chosen.push_back(first);
    isChosen[static_cast<size_t>(first)] = true;
    Eigen::VectorXd minDist(n);
    for (Eigen::Index r = 0; r < n; ++r)
        minDist(r) = (X.row(r) - X.row(first)).squaredNorm();
    while (static_cast<int>(chosen.size()) < k) {
        Eigen::Index best = -1;
        double bestDist = -1.0;
        for (Eigen::Index r = 0; r < n; ++r) {
            if (isChosen[static_cast<size_t>(r)]) continue;
            if (minDist(r) > bestDist) { bestDist = minDist(r); best = r; }
        }
        chosen.push_back(best);
        isChosen[static_cast<size_t>(best)] = true;
        for (Eigen::Index r = 0; r < n; ++r)
            minDist(r) = std::min(minDist(r), (X.row(r) - X.row(best)).squaredNorm());
    }

    Eigen::MatrixXd centroids(k, X.cols());
    for (int c = 0; c < k; ++c) centroids.row(c) = X.row(chosen[static_cast<size_t>(c)]);

    std::vector<int> assign(static_cast<size_t>(n), -1);
    for (int iter = 0; iter < 100; ++iter) {
        bool moved = false;
        for (Eigen::Index r = 0; r < n; ++r) {
            int best = 0;
            double bestDist = (X.row(r) - centroids.row(0)).squaredNorm();
            for (int c = 1; c < k; ++c) {
                double d = (X.row(r) - centroids.row(c)).squaredNorm();
                if (d < bestDist) { bestDist = d; best = c; }
            }
            if (assign[static_cast<size_t>(r)] != best) {
                assign[static_cast<size_t>(r)] = best;
                moved = true;
            }
        }
        if (!moved) break;
        for (int c = 0; c < k; ++c) {
            Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(X.cols());
            int count = 0;
            for (Eigen::Index r = 0; r < n; ++r)
                if (assign[static_cast<size_t>(r)] == c) {
                    sum += X.row(r);
                    ++count;
                }
            if (count > 0) centroids.row(c) = sum / count;
        }
    }
    return centroids;
}

AttributionMatrix kernelShap(const ModelParams& params, const Eigen::MatrixXd& background,
                             const Eigen::MatrixXd& Xexplain,
                             const std::vector<int>& columnMap,
                             const KernelShapConfig& cfg) {
    const int p = static_cast<int>(Xexplain.cols());
    if (background.cols() != Xexplain.cols())
        throw std::invalid_argument("kernelShap: background/explain arity mismatch");
    const bool exact = p <= 12 || (cfg.forceExact && p <= 25);
    if (cfg.forceExact && p > 25)
        throw std::invalid_argument("kernelShap: exact path limited to 25 features");

    AttributionMatrix out;
    out.columnMap = columnMap;
    out.values.resize(Xexplain.rows(), p);
    Rng rng(mixSeed(cfg.seed, 0x73686170ULL));  // "shap"
    for (Eigen::Index r = 0; r < Xexplain.rows(); ++r) {
        if (p == 1) {
            // single feature takes the whole deviation from the baseline
            Eigen::MatrixXd xm = Xexplain.row(r);
            double vFull = forwardLogit(params, xm)(0);
            double v0 = coalitionValues(params, background, Xexplain.row(r), {0u})(0);
            out.values(r, 0) = vFull - v0;
        } else if (exact) {
            out.values.row(r) =
                exactShapleyRow(params, background, Xexplain.row(r)).transpose();
        } else {
            out.values.row(r) =
                sampledShapleyRow(params, background, Xexplain.row(r), cfg, rng)
                    .transpose();
        }
    }
    return out;
}

AttributionMatrix linearShap(const ModelParams& params, const Eigen::MatrixXd& background,
                             const Eigen::MatrixXd& X, const std::vector<int>& columnMap) {
    if (params.spec.kind != ModelKind::LogisticRegression)
        throw std::invalid_argument("linearShap: model must be logistic regression");
    Eigen::RowVectorXd mean = background.colwise().mean();
    Eigen::Map<const Eigen::VectorXd> w(params.flat.data(), params.spec.inputDim);
    AttributionMatrix out;
    out.columnMap = columnMap;
    out.values =
        ((X.rowwise() - mean).array().rowwise() * w.transpose().array()).matrix();
    return out;
}

ImportanceScores normalizedImportance(const AttributionMatrix& attrs,
                                      const std::vector<std::string>& variableNames,
                                      int subsetSize) {
    const Eigen::Index n = attrs.values.rows();
    if (n < 1) throw std::invalid_argument("normalizedImportance: empty attributions");
    const Eigen::Index rows = std::min<Eigen::Index>(subsetSize, n);

    ImportanceScores out;
    out.names = variableNames;
    out.scores.assign(variableNames.size(), 0.0);
    for (Eigen::Index c = 0; c < attrs.values.cols(); ++c) {
        double meanAbs = attrs.values.col(c).head(rows).cwiseAbs().mean();
        out.scores[static_cast<size_t>(attrs.columnMap[static_cast<size_t>(c)])] += meanAbs;
    }
    double maxScore = *std::max_element(out.scores.begin(), out.scores.end());
    if (maxScore > 0.0)
        for (double& s : out.scores) s /= maxScore;
    return out;
}

}  // namespace care
