#include "care/SynthGen.h"

#include "care/Random.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace care {

int Dag::indexOf(const std::string& name) const {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw std::invalid_argument("Dag: unknown node " + name);
    return static_cast<int>(it - names.begin());
}

void Dag::addEdge(const std::string& from, const std::string& to) {
    edges.emplace_back(indexOf(from), indexOf(to));
}

std::vector<int> Dag::parents(int node) const {
    std::vector<int> out;
    for (auto [a, b] : edges)
        if (b == node) out.push_back(a);
    return out;
}

std::vector<int> Dag::children(int node) const {
    std::vector<int> out;
    for (auto [a, b] : edges)
        if (a == node) out.push_back(b);
    return out;
}

bool Dag::isAcyclic() const {
    const int n = static_cast<int>(names.size());
    std::vector<int> indeg(n, 0);
    for (auto [a, b] : edges) { (void)a; ++indeg[b]; }
    std::vector<int> queue;
    for (int v = 0; v < n; ++v)
        if (indeg[v] == 0) queue.push_back(v);
    int seen = 0;
    while (!queue.empty()) {
        int v = queue.back();
        queue.pop_back();
        ++seen;
        for (int c : children(v))
            if (--indeg[c] == 0) queue.push_back(c);
    }
    return seen == n;
}

bool dSeparated(const Dag& g, int i, int j, const std::vector<int>& cond) {
    const int n = static_cast<int>(g.names.size());
    std::vector<bool> inCond(n, false);
    for (int c : cond) inCond[c] = true;

    // ancestors of the conditioning set (including the set itself)
    std::vector<bool> condAncestor(n, false);
    std::vector<int> stack(cond.begin(), cond.end());
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        if (condAncestor[v]) continue;
        condAncestor[v] = true;
        for (int p : g.parents(v)) stack.push_back(p);
    }

    // Bayes-ball reachability from i; direction: 0 = arriving via child (up),
    // 1 = arriving via parent (down).
    std::vector<std::array<bool, 2>> visited(n, {false, false});
    std::vector<std::pair<int, int>> frontier{{i, 0}};
    while (!frontier.empty()) {
        auto [v, dir] = frontier.back();
        frontier.pop_back();
        if (visited[v][dir]) continue;
        visited[v][dir] = true;
        if (v == j && !inCond[v]) return false;

        if (dir == 0) {  // came from a child: v is being left upward
            if (!inCond[v]) {
                for (int p : g.parents(v)) frontier.push_back({p, 0});
                for (int c : g.children(v)) frontier.push_back({c, 1});
            }
        } else {  // came from a parent
            if (!inCond[v])
                for (int c : g.children(v)) frontier.push_back({c, 1});
            if (condAncestor[v])
                for (int p : g.parents(v)) frontier.push_back({p, 0});
        }
    }
    return true;
}

Dag groundTruthGraph() {
    Dag g;
    g.names = {"X1", "X2", "Xproxy", "Xspur", "Xnoise", "E", "Y"};
    g.addEdge("X1", "Y");
    g.addEdge("X2", "Y");
    g.addEdge("Y", "Xproxy");
    g.addEdge("Y", "Xspur");
    g.addEdge("E", "Xspur");
    return g;
}

Dataset generateSynthetic(const SynthConfig& cfg) {
    if (cfg.n < 1) throw std::invalid_argument("generateSynthetic: n must be >= 1");
    const bool test = cfg.mode == DataMode::Test;
    Rng rng(mixSeed(cfg.seed, test ? 2 : 1));

    const size_t n = cfg.n;
    std::vector<double> x1(n), x2(n), xnoise(n), xproxy(n), xspur(n);
    std::vector<int> y(n);

    // fixed draw order: X1, X2, Xnoise, Y, Xproxy, Xspur
    for (size_t i = 0; i < n; ++i) x1[i] = rng.normal();
    for (size_t i = 0; i < n; ++i) x2[i] = rng.normal();
    for (size_t i = 0; i < n; ++i) xnoise[i] = rng.normal();
    for (size_t i = 0; i < n; ++i) {
        double logit = 1.5 * x1[i] + 1.5 * x2[i] + 2.0 * x1[i] * x2[i];
        double pi = 1.0 / (1.0 + std::exp(-logit));
        y[i] = rng.bernoulli(pi) ? 1 : 0;
    }
    for (size_t i = 0; i < n; ++i) {
        double mu = y[i] == 1 ? 2.0 : -2.0;
        xproxy[i] = rng.normal(mu, 1.0);
    }
    for (size_t i = 0; i < n; ++i) {
        if (test) {
            xspur[i] = rng.normal(0.0, 3.0);  // variance 9
        } else {
            double mu = y[i] == 1 ? 2.0 : -2.0;
            xspur[i] = rng.normal(mu, 1.0);
        }
    }

    Dataset data;
    data.names = {"X1", "X2", "Xproxy", "Xspur", "Xnoise", "Y"};
    data.kinds = {ColumnKind::continuous(), ColumnKind::continuous(),
                  ColumnKind::continuous(), ColumnKind::continuous(),
                  ColumnKind::continuous(), ColumnKind::binaryTarget()};
    data.rows.reserve(n);
    for (size_t i = 0; i < n; ++i)
        data.rows.push_back({x1[i], x2[i], xproxy[i], xspur[i], xnoise[i],
                             static_cast<double>(y[i])});
    data.meta = {cfg.seed, cfg.mode};
    return data;
}

}  // namespace care
