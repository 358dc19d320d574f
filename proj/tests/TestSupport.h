#pragma once

#include "care/BayesNet.h"
#include "care/Dag.h"
#include "care/Dataset.h"

#include <Eigen/Dense>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace testsupport {

// Kolmogorov-Smirnov statistic against U(0,1).
inline double ksStatistic(std::vector<double> pValues) {
    std::sort(pValues.begin(), pValues.end());
    const double n = static_cast<double>(pValues.size());
    double d = 0.0;
    for (size_t i = 0; i < pValues.size(); ++i) {
        double hi = (static_cast<double>(i) + 1.0) / n - pValues[i];
        double lo = pValues[i] - static_cast<double>(i) / n;
        d = std::max(d, std::max(hi, lo));
    }
    return d;
}

// Asymptotic critical value; alpha = 0.01 -> c = 1.628.
inline bool ksUniformAt01(const std::vector<double>& pValues) {
    double d = ksStatistic(pValues);
    return d * std::sqrt(static_cast<double>(pValues.size())) < 1.628;
}

inline double chiSquarePValue(double statistic, double df) {
    if (statistic <= 0.0) return 1.0;
    return boost::math::gamma_q(df / 2.0, statistic / 2.0);
}

// Exact marginals by full joint enumeration; only for small nets.
inline std::vector<std::vector<double>> exactMarginals(const care::BayesNet& net) {
    const size_t d = net.nodes.size();
    std::vector<std::vector<double>> marg(d);
    for (size_t v = 0; v < d; ++v) marg[v].assign(net.nodes[v].levels.size(), 0.0);

    std::vector<int> assign(d, 0);
    const std::vector<int> order = net.topologicalOrder();
    std::function<void(size_t, double)> recurse = [&](size_t idx, double prob) {
        if (idx == d) {
            for (size_t v = 0; v < d; ++v)
                marg[v][static_cast<size_t>(assign[v])] += prob;
            return;
        }
        // Enumerate in an order where parents precede children.
        int node = order[idx];
        const auto& bn = net.nodes[static_cast<size_t>(node)];
        std::vector<int> parentLevels;
        for (int p : bn.parents) parentLevels.push_back(assign[static_cast<size_t>(p)]);
        const auto& row = bn.cpt[net.comboIndex(node, parentLevels)];
        for (size_t lv = 0; lv < bn.levels.size(); ++lv) {
            assign[static_cast<size_t>(node)] = static_cast<int>(lv);
            recurse(idx + 1, prob * row[lv]);
        }
        assign[static_cast<size_t>(node)] = 0;
    };
    recurse(0, 1.0);
    return marg;
}

// Central finite differences of a scalar function of a vector.
inline Eigen::VectorXd numericGradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                       const Eigen::VectorXd& x, double eps = 1e-6) {
    Eigen::VectorXd g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        Eigen::VectorXd hi = x, lo = x;
        hi(i) += eps;
        lo(i) -= eps;
        g(i) = (f(hi) - f(lo)) / (2.0 * eps);
    }
    return g;
}

inline double relError(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    double denom = std::max(a.norm(), b.norm());
    if (denom == 0.0) return 0.0;
    return (a - b).norm() / denom;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

inline std::vector<double> column(const care::Dataset& data, const std::string& name) {
    int c = data.columnIndex(name);
    std::vector<double> v;
    for (const auto& row : data.rows) v.push_back(row[static_cast<size_t>(c)]);
    return v;
}

// Reference d-separation by brute-force path enumeration; exponential, for
// cross-checking the Bayes-ball implementation on tiny graphs.
inline bool dSeparatedBruteForce(const care::Dag& g, int i, int j,
                                 const std::vector<int>& cond) {
    const int d = static_cast<int>(g.names.size());
    std::vector<bool> inCond(static_cast<size_t>(d), false);
    for (int c : cond) inCond[static_cast<size_t>(c)] = true;

    std::vector<bool> hasDescInCond(static_cast<size_t>(d), false);
    for (int v = 0; v < d; ++v) {
        std::vector<int> stack{v};
        std::vector<bool> seen(static_cast<size_t>(d), false);
        while (!stack.empty()) {
            int cur = stack.back();
            stack.pop_back();
            if (seen[static_cast<size_t>(cur)]) continue;
            seen[static_cast<size_t>(cur)] = true;
            if (inCond[static_cast<size_t>(cur)]) {
                hasDescInCond[static_cast<size_t>(v)] = true;
                break;
            }
            for (int ch : g.children(cur)) stack.push_back(ch);
        }
    }

    // Walk all simple undirected paths from i to j and test d-connection.
    std::vector<int> path{i};
    std::vector<bool> onPath(static_cast<size_t>(d), false);
    onPath[static_cast<size_t>(i)] = true;
    bool connected = false;

    auto isEdge = [&](int a, int b) {
        for (const auto& [f, t] : g.edges)
            if (f == a && t == b) return true;
        return false;
    };
    auto pathOpen = [&]() {
        for (size_t k = 1; k + 1 < path.size(); ++k) {
            int prev = path[k - 1], mid = path[k], next = path[k + 1];
            bool collider = isEdge(prev, mid) && isEdge(next, mid);
            if (collider) {
                if (!hasDescInCond[static_cast<size_t>(mid)]) return false;
            } else {
                if (inCond[static_cast<size_t>(mid)]) return false;
            }
        }
        return true;
    };
    std::function<void(int)> dfs = [&](int cur) {
        if (connected) return;
        if (cur == j) {
            if (pathOpen()) connected = true;
            return;
        }
        for (int next = 0; next < d; ++next) {
            if (onPath[static_cast<size_t>(next)]) continue;
            if (!isEdge(cur, next) && !isEdge(next, cur)) continue;
            path.push_back(next);
            onPath[static_cast<size_t>(next)] = true;
            dfs(next);
            path.pop_back();
            onPath[static_cast<size_t>(next)] = false;
        }
    };
    dfs(i);
    return !connected;
}

class TempFile {
public:
    explicit TempFile(const std::string& name, const std::string& contents) {
        path_ = (std::filesystem::temp_directory_path() / name).string();
        std::ofstream out(path_, std::ios::binary);
        out << contents;
    }
    ~TempFile() { std::remove(path_.c_str()); }
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

}  // namespace testsupport
