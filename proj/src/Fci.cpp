#include "care/Fci.h"

#include <json.hpp>

#include <algorithm>
#include <functional>
#include <set>
#include <stdexcept>

namespace care {
namespace {

std::pair<int, int> orderedPair(int i, int j) {
    return i < j ? std::pair{i, j} : std::pair{j, i};
}

// Lexicographic enumeration of size-k subsets of items (items already sorted).
// Callback returns true to stop early.
bool forEachSubset(const std::vector<int>& items, int k,
                   const std::function<bool(const std::vector<int>&)>& fn) {
    const int n = static_cast<int>(items.size());
    if (k > n) return false;
    std::vector<int> pick(static_cast<size_t>(k));
    std::function<bool(int, int)> rec = [&](int start, int depth) {
        if (depth == k) {
            std::vector<int> subset;
            for (int t = 0; t < k; ++t) subset.push_back(items[static_cast<size_t>(pick[static_cast<size_t>(t)])]);
            return fn(subset);
        }
        for (int s = start; s < n; ++s) {
            pick[static_cast<size_t>(depth)] = s;
            if (rec(s + 1, depth + 1)) return true;
        }
        return false;
    };
    return rec(0, 0);
}

}  // namespace

Pag::Pag(std::vector<std::string> variableNames) : names(std::move(variableNames)) {
    marks.assign(names.size(), std::vector<EdgeMark>(names.size(), EdgeMark::None));
}

void Pag::removeEdge(int i, int j) {
    setMark(i, j, EdgeMark::None);
    setMark(j, i, EdgeMark::None);
}

std::vector<int> Pag::adjacency(int i) const {
    std::vector<int> out;
    for (int j = 0; j < size(); ++j)
        if (adjacent(i, j)) out.push_back(j);
    return out;
}

int Pag::indexOf(const std::string& name) const {
    for (size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<int>(i);
    return -1;
}

Skeleton learnSkeleton(const CiTester& tester, const std::vector<std::string>& vars,
                       const FciOptions& opts) {
    if (opts.alpha <= 0.0 || opts.alpha >= 1.0)
        throw std::invalid_argument("learnSkeleton: alpha must be in (0,1)");
    const int n = static_cast<int>(vars.size());
    Skeleton sk;
    sk.names = vars;
    sk.adjacency.assign(static_cast<size_t>(n), std::vector<bool>(static_cast<size_t>(n), true));
    for (int v = 0; v < n; ++v) sk.adjacency[static_cast<size_t>(v)][static_cast<size_t>(v)] = false;

    auto adjOf = [&](const std::vector<std::vector<bool>>& adj, int v, int skip) {
        std::vector<int> out;
        for (int u = 0; u < n; ++u)
            if (u != v && u != skip && adj[static_cast<size_t>(v)][static_cast<size_t>(u)]) out.push_back(u);
        return out;
    };

    for (int level = 0; level <= opts.maxCondSize; ++level) {
        const auto snapshot = sk.adjacency;  // stable: removals land at level end
        std::vector<std::tuple<int, int, std::vector<int>>> removals;
        bool anyCandidate = false;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                if (!snapshot[static_cast<size_t>(i)][static_cast<size_t>(j)]) continue;
                bool removed = false;
                for (int side = 0; side < 2 && !removed; ++side) {
                    const int a = side == 0 ? i : j;
                    const int b = side == 0 ? j : i;
                    auto candidates = adjOf(snapshot, a, b);
                    if (static_cast<int>(candidates.size()) >= level) anyCandidate = true;
                    forEachSubset(candidates, level, [&](const std::vector<int>& subset) {
                        if (side == 1 && level == 0) return true;  // empty set already tried
                        if (tester.test(i, j, subset) > opts.alpha) {
                            removals.emplace_back(i, j, subset);
                            removed = true;
                        }
                        return removed;
                    });
                }
            }
        }
        for (auto& [i, j, subset] : removals) {
            sk.adjacency[static_cast<size_t>(i)][static_cast<size_t>(j)] = false;
            sk.adjacency[static_cast<size_t>(j)][static_cast<size_t>(i)] = false;
            sk.sepsets[orderedPair(i, j)] = subset;
        }
        if (!anyCandidate) break;
    }
    return sk;
}

Pag orientVStructures(const Skeleton& skeleton) {
    const int n = static_cast<int>(skeleton.names.size());
    Pag pag(skeleton.names);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && skeleton.adjacency[static_cast<size_t>(i)][static_cast<size_t>(j)])
                pag.setMark(i, j, EdgeMark::Circle);

    for (int k = 0; k < n; ++k) {
        for (int i = 0; i < n; ++i) {
            if (i == k || !pag.adjacent(i, k)) continue;
            for (int j = i + 1; j < n; ++j) {
                if (j == k || !pag.adjacent(j, k) || pag.adjacent(i, j)) continue;
                auto it = skeleton.sepsets.find(orderedPair(i, j));
                if (it == skeleton.sepsets.end()) continue;
                const auto& sep = it->second;
                if (std::find(sep.begin(), sep.end(), k) == sep.end()) {
                    pag.setMark(i, k, EdgeMark::Arrow);
                    pag.setMark(j, k, EdgeMark::Arrow);
                }
            }
        }
    }
    return pag;
}

namespace {

// Possible-D-SEP(v): nodes reachable along paths whose every internal vertex
// is either a collider on the path or part of a triangle with its neighbours.
std::vector<int> possibleDSep(const Pag& pag, int v) {
    const int n = pag.size();
    std::set<int> out;
    std::set<std::pair<int, int>> visited;  // (prev, cur) path states
    std::vector<std::pair<int, int>> frontier;
    for (int x = 0; x < n; ++x)
        if (pag.adjacent(v, x)) {
            frontier.push_back({v, x});
            out.insert(x);
        }
    while (!frontier.empty()) {
        auto [a, b] = frontier.back();
        frontier.pop_back();
        if (!visited.insert({a, b}).second) continue;
        for (int c = 0; c < n; ++c) {
            if (c == a || c == b || c == v || !pag.adjacent(b, c)) continue;
            bool collider = pag.mark(a, b) == EdgeMark::Arrow &&
                            pag.mark(c, b) == EdgeMark::Arrow;
            bool triangle = pag.adjacent(a, c);
            if (collider || triangle) {
                out.insert(c);
                frontier.push_back({b, c});
            }
        }
    }
    out.erase(v);
    return {out.begin(), out.end()};
}

bool applyR1(Pag& pag) {
    bool changed = false;
    const int n = pag.size();
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            if (a == b || !pag.adjacent(a, b) || pag.mark(a, b) != EdgeMark::Arrow)
                continue;
            for (int c = 0; c < n; ++c) {
                if (c == a || c == b || !pag.adjacent(b, c) || pag.adjacent(a, c))
                    continue;
                if (pag.mark(c, b) == EdgeMark::Circle) {
                    pag.setMark(c, b, EdgeMark::Tail);
                    pag.setMark(b, c, EdgeMark::Arrow);
                    changed = true;
                }
            }
        }
    return changed;
}

bool applyR2(Pag& pag) {
    bool changed = false;
    const int n = pag.size();
    for (int a = 0; a < n; ++a)
        for (int c = 0; c < n; ++c) {
            if (a == c || !pag.adjacent(a, c) || pag.mark(a, c) != EdgeMark::Circle)
                continue;
            for (int b = 0; b < n; ++b) {
                if (b == a || b == c || !pag.adjacent(a, b) || !pag.adjacent(b, c))
                    continue;
                bool chain1 = pag.mark(a, b) == EdgeMark::Arrow &&
                              pag.mark(b, a) == EdgeMark::Tail &&
                              pag.mark(b, c) == EdgeMark::Arrow;
                bool chain2 = pag.mark(a, b) == EdgeMark::Arrow &&
                              pag.mark(b, c) == EdgeMark::Arrow &&
                              pag.mark(c, b) == EdgeMark::Tail;
                if (chain1 || chain2) {
                    pag.setMark(a, c, EdgeMark::Arrow);
                    changed = true;
                    break;
                }
            }
        }
    return changed;
}

bool applyR3(Pag& pag) {
    bool changed = false;
    const int n = pag.size();
    for (int d = 0; d < n; ++d)
        for (int b = 0; b < n; ++b) {
            if (d == b || !pag.adjacent(d, b) || pag.mark(d, b) != EdgeMark::Circle)
                continue;
            bool oriented = false;
            for (int a = 0; a < n && !oriented; ++a) {
                if (a == d || a == b) continue;
                if (!pag.adjacent(a, b) || pag.mark(a, b) != EdgeMark::Arrow) continue;
                if (!pag.adjacent(a, d) || pag.mark(a, d) != EdgeMark::Circle) continue;
                for (int c = 0; c < n; ++c) {
                    if (c == a || c == b || c == d) continue;
                    if (!pag.adjacent(c, b) || pag.mark(c, b) != EdgeMark::Arrow) continue;
                    if (!pag.adjacent(c, d) || pag.mark(c, d) != EdgeMark::Circle) continue;
                    if (pag.adjacent(a, c)) continue;
                    pag.setMark(d, b, EdgeMark::Arrow);
                    changed = true;
                    oriented = true;
                    break;
                }
            }
        }
    return changed;
}

// Discriminating-path rule. Path <theta, ..., a, b, c>: every vertex between
// theta and b is a collider on the path and a parent of c; theta and c are
// non-adjacent. If b lies in sepset(theta, c), b is oriented toward c,
// otherwise the a-b-c triple becomes bidirected.
bool applyR4(Pag& pag, const SepSets& sepsets) {
    bool changed = false;
    const int n = pag.size();
    auto isParentOf = [&](int p, int c) {
        return pag.adjacent(p, c) && pag.mark(p, c) == EdgeMark::Arrow &&
               pag.mark(c, p) == EdgeMark::Tail;
    };
    for (int b = 0; b < n; ++b) {
        for (int c = 0; c < n; ++c) {
            if (b == c || !pag.adjacent(b, c)) continue;
            if (pag.mark(c, b) != EdgeMark::Circle) continue;
            for (int a = 0; a < n; ++a) {
                if (a == b || a == c) continue;
                if (!pag.adjacent(a, b) || pag.mark(a, b) != EdgeMark::Arrow) continue;
                if (!isParentOf(a, c)) continue;
                // walk backwards from a; every hop must keep the collider /
                // parent-of-c invariant until a vertex non-adjacent to c ends
                // the path
                std::set<int> visited{a, b, c};
                std::vector<int> frontier{a};
                int theta = -1;
                while (!frontier.empty() && theta < 0) {
                    int cur = frontier.back();
                    frontier.pop_back();
                    for (int q = 0; q < n; ++q) {
                        if (visited.count(q) || !pag.adjacent(q, cur)) continue;
                        if (pag.mark(q, cur) != EdgeMark::Arrow) continue;
                        if (!pag.adjacent(q, c)) { theta = q; break; }
                        if (isParentOf(q, c) && pag.mark(cur, q) == EdgeMark::Arrow) {
                            visited.insert(q);
                            frontier.push_back(q);
                        }
                    }
                }
                if (theta < 0) continue;
                auto it = sepsets.find(orderedPair(theta, c));
                if (it == sepsets.end()) continue;
                const auto& sep = it->second;
                if (std::find(sep.begin(), sep.end(), b) != sep.end()) {
                    pag.setMark(c, b, EdgeMark::Tail);
                    pag.setMark(b, c, EdgeMark::Arrow);
                } else {
                    pag.setMark(a, b, EdgeMark::Arrow);
                    pag.setMark(b, a, EdgeMark::Arrow);
                    pag.setMark(b, c, EdgeMark::Arrow);
                    pag.setMark(c, b, EdgeMark::Arrow);
                }
                changed = true;
                break;
            }
        }
    }
    return changed;
}

Skeleton skeletonFromPag(const Pag& pag, const SepSets& sepsets) {
    Skeleton sk;
    sk.names = pag.names;
    const int n = pag.size();
    sk.adjacency.assign(static_cast<size_t>(n), std::vector<bool>(static_cast<size_t>(n), false));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (pag.adjacent(i, j)) sk.adjacency[static_cast<size_t>(i)][static_cast<size_t>(j)] = true;
    sk.sepsets = sepsets;
    return sk;
}

}  // namespace

Pag applyFciRules(Pag pag, SepSets& sepsets, const CiTester& tester,
                  const FciOptions& opts) {
    const int n = pag.size();

    // Possible-D-SEP pruning of adjacencies kept after the skeleton phase.
    bool removedAny = false;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (!pag.adjacent(i, j)) continue;
            bool removed = false;
            for (int side = 0; side < 2 && !removed; ++side) {
                const int anchor = side == 0 ? i : j;
                auto pd = possibleDSep(pag, anchor);
                pd.erase(std::remove_if(pd.begin(), pd.end(),
                                        [&](int v) { return v == i || v == j; }),
                         pd.end());
                for (int size = 1; size <= opts.maxCondSize && !removed; ++size) {
                    forEachSubset(pd, size, [&](const std::vector<int>& subset) {
                        if (tester.test(i, j, subset) > opts.alpha) {
                            sepsets[orderedPair(i, j)] = subset;
                            removed = true;
                        }
                        return removed;
                    });
                }
            }
            if (removed) {
                pag.removeEdge(i, j);
                removedAny = true;
            }
        }
    }
    if (removedAny) pag = orientVStructures(skeletonFromPag(pag, sepsets));

    bool changed = true;
    while (changed) {
        changed = false;
        changed |= applyR1(pag);
        changed |= applyR2(pag);
        changed |= applyR3(pag);
        changed |= applyR4(pag, sepsets);
    }
    return pag;
}

Pag runFci(const CiTester& tester, const std::vector<std::string>& vars,
           const FciOptions& opts) {
    Skeleton sk = learnSkeleton(tester, vars, opts);
    Pag pag = orientVStructures(sk);
    SepSets sepsets = sk.sepsets;
    return applyFciRules(std::move(pag), sepsets, tester, opts);
}

Pag runFci(const Dataset& data, const CiTester& tester, const FciOptions& opts) {
    return runFci(tester, data.names, opts);
}

CausalMask extractMask(const Pag& pag, const std::string& target) {
    int y = pag.indexOf(target);
    if (y < 0) throw std::invalid_argument("extractMask: unknown target " + target);
    CausalMask mask;
    for (int j = 0; j < pag.size(); ++j) {
        if (j == y) continue;
        mask.names.push_back(pag.names[static_cast<size_t>(j)]);
        // A_j = 1 iff the edge into the target carries an arrowhead at the
        // target end; any mark at the feature end qualifies.
        bool in = pag.adjacent(j, y) && pag.mark(j, y) == EdgeMark::Arrow;
        mask.values.push_back(in ? 1 : 0);
    }
    return mask;
}

namespace {
const char* markName(EdgeMark m) {
    switch (m) {
        case EdgeMark::None: return "none";
        case EdgeMark::Tail: return "tail";
        case EdgeMark::Arrow: return "arrow";
        case EdgeMark::Circle: return "circle";
    }
    return "none";
}
}  // namespace

std::string pagToJson(const Pag& pag) {
    nlohmann::ordered_json j;
    j["variables"] = pag.names;
    j["edges"] = nlohmann::ordered_json::array();
    for (int a = 0; a < pag.size(); ++a)
        for (int b = a + 1; b < pag.size(); ++b)
            if (pag.adjacent(a, b)) {
                nlohmann::ordered_json e;
                e["from"] = pag.names[static_cast<size_t>(a)];
                e["to"] = pag.names[static_cast<size_t>(b)];
                e["mark_at_from"] = markName(pag.mark(b, a));
                e["mark_at_to"] = markName(pag.mark(a, b));
                j["edges"].push_back(e);
            }
    return j.dump(2);
}

std::string maskToJson(const CausalMask& mask) {
    nlohmann::ordered_json j;
    for (size_t i = 0; i < mask.names.size(); ++i) j[mask.names[i]] = mask.values[i];
    return j.dump(2);
}

CausalMask maskFromJson(const std::string& text) {
    auto j = nlohmann::ordered_json::parse(text);
    CausalMask mask;
    for (auto& [key, val] : j.items()) {
        mask.names.push_back(key);
        mask.values.push_back(val.get<int>());
    }
    return mask;
}

Eigen::VectorXd broadcastMask(const CausalMask& mask, const std::vector<int>& columnMap,
                              const std::vector<std::string>& variableNames) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(columnMap.size()));
    for (size_t e = 0; e < columnMap.size(); ++e) {
        const std::string& var = variableNames[static_cast<size_t>(columnMap[e])];
        auto it = std::find(mask.names.begin(), mask.names.end(), var);
        if (it == mask.names.end())
            throw std::invalid_argument("broadcastMask: mask has no entry for " + var);
        out(static_cast<Eigen::Index>(e)) =
            static_cast<double>(mask.values[static_cast<size_t>(it - mask.names.begin())]);
    }
    return out;
}

}  // namespace care
