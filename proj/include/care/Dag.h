#pragma once

#include <string>
#include <vector>

namespace care {

// Directed acyclic graph over named variables; used as the ground-truth
// structure for synthetic data and as the d-separation oracle in tests.
struct Dag {
    std::vector<std::string> names;
    std::vector<std::pair<int, int>> edges;  // (from, to)

    int indexOf(const std::string& name) const;
    void addEdge(const std::string& from, const std::string& to);
    std::vector<int> parents(int node) const;
    std::vector<int> children(int node) const;
    bool isAcyclic() const;
};

// True iff i and j are d-separated given the conditioning set.
bool dSeparated(const Dag& g, int i, int j, const std::vector<int>& cond);

}  // namespace care
