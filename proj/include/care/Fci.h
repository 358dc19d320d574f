#pragma once

#include "care/CiTest.h"
#include "care/Dataset.h"

#include <map>
#include <string>
#include <vector>

namespace care {

enum class EdgeMark { None, Tail, Arrow, Circle };

// Partial ancestral graph. mark(i, j) is the mark at the j-end of the edge
// between i and j; None at either end means the pair is non-adjacent.
struct Pag {
    std::vector<std::string> names;
    std::vector<std::vector<EdgeMark>> marks;

    explicit Pag(std::vector<std::string> variableNames);
    Pag() = default;

    int size() const { return static_cast<int>(names.size()); }
    EdgeMark mark(int i, int j) const { return marks[static_cast<size_t>(i)][static_cast<size_t>(j)]; }
    void setMark(int i, int j, EdgeMark m) { marks[static_cast<size_t>(i)][static_cast<size_t>(j)] = m; }
    bool adjacent(int i, int j) const { return i != j && mark(i, j) != EdgeMark::None; }
    void removeEdge(int i, int j);
    std::vector<int> adjacency(int i) const;
    int indexOf(const std::string& name) const;  // -1 if absent
};

using SepSets = std::map<std::pair<int, int>, std::vector<int>>;

struct Skeleton {
    std::vector<std::string> names;
    std::vector<std::vector<bool>> adjacency;
    SepSets sepsets;
};

struct CausalMask {
    std::vector<std::string> names;  // non-target variables
    std::vector<int> values;         // 0/1, parallel to names
};

struct FciOptions {
    double alpha = 0.1;
    int maxCondSize = 3;
};

// PC-style adjacency search: stable within levels, subsets enumerated in
// ascending size and lexicographic order over declaration-ordered adjacents.
Skeleton learnSkeleton(const CiTester& tester, const std::vector<std::string>& vars,
                       const FciOptions& opts);

// All marks start as Circle; unshielded non-sepset triples become colliders.
Pag orientVStructures(const Skeleton& skeleton);

// Possible-D-SEP re-testing of adjacencies followed by Zhang rules R1-R4 to
// fixpoint. sepsets is updated with any removals.
Pag applyFciRules(Pag pag, SepSets& sepsets, const CiTester& tester,
                  const FciOptions& opts);

Pag runFci(const CiTester& tester, const std::vector<std::string>& vars,
           const FciOptions& opts = {});
Pag runFci(const Dataset& data, const CiTester& tester, const FciOptions& opts = {});

CausalMask extractMask(const Pag& pag, const std::string& target);

std::string pagToJson(const Pag& pag);
std::string maskToJson(const CausalMask& mask);
CausalMask maskFromJson(const std::string& text);

// Expands a per-variable mask to one-hot encoded columns.
Eigen::VectorXd broadcastMask(const CausalMask& mask, const std::vector<int>& columnMap,
                              const std::vector<std::string>& variableNames);

}  // namespace care
