#pragma once

#include "care/Dataset.h"

#include <set>
#include <string>
#include <vector>

namespace care {

// Discrete Bayesian network parsed from a BIF file. CPT rows are indexed by
// the mixed-radix code of the parent levels (parents in declared order, last
// parent varying fastest).
struct BayesNode {
    std::string name;
    std::vector<std::string> levels;
    std::vector<int> parents;                      // indices into nodes
    std::vector<std::vector<double>> cpt;          // one row per parent combo
};

struct BayesNet {
    std::vector<BayesNode> nodes;

    int indexOf(const std::string& name) const;
    size_t parentComboCount(int node) const;
    size_t comboIndex(int node, const std::vector<int>& parentLevels) const;
    std::vector<int> topologicalOrder() const;  // throws if cyclic
};

// Supported subset: network/variable/probability blocks, discrete variables,
// `table` entries and per-row `( L1, L2 ) p...;` entries. Properties and
// comments are ignored. Throws std::invalid_argument with a line number on
// syntax errors, rows not summing to 1 (tol 1e-4), or missing combos.
BayesNet parseBif(const std::string& text);
BayesNet parseBifFile(const std::string& path);

Dataset ancestralSample(const BayesNet& net, size_t n, uint64_t seed);

// Turns a categorical column into the binary target: 1 iff the row's level
// is in positiveLevels.
Dataset binarizeTarget(const Dataset& data, const std::string& var,
                       const std::set<std::string>& positiveLevels);

}  // namespace care
