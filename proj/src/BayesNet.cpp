#include "care/BayesNet.h"

#include "care/Random.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace care {
namespace {

struct Token {
    std::string text;
    int line;
};

std::vector<Token> tokenize(const std::string& text) {
    std::vector<Token> tokens;
    int line = 1;
    size_t i = 0;
    const size_t n = text.size();
    while (i < n) {
        char c = text[i];
        if (c == '\n') { ++line; ++i; continue; }
        if (std::isspace(static_cast<unsigned char>(c))) { ++i; continue; }
        if (c == '/' && i + 1 < n && text[i + 1] == '/') {
            while (i < n && text[i] != '\n') ++i;
            continue;
        }
        if (c == '/' && i + 1 < n && text[i + 1] == '*') {
            i += 2;
            while (i + 1 < n && !(text[i] == '*' && text[i + 1] == '/')) {
                if (text[i] == '\n') ++line;
                ++i;
            }
            i += 2;
            continue;
        }
        if (std::string("{}()[],;|=").find(c) != std::string::npos) {
            tokens.push_back({std::string(1, c), line});
            ++i;
            continue;
        }
        if (c == '"') {
            size_t j = i + 1;
            while (j < n && text[j] != '"') ++j;
            tokens.push_back({text.substr(i + 1, j - i - 1), line});
            i = j + 1;
            continue;
        }
        size_t j = i;
        while (j < n && !std::isspace(static_cast<unsigned char>(text[j])) &&
               std::string("{}()[],;|=\"").find(text[j]) == std::string::npos)
            ++j;
        tokens.push_back({text.substr(i, j - i), line});
        i = j;
    }
    return tokens;
}

class BifParser {
public:
    explicit BifParser(const std::string& text) : tokens_(tokenize(text)) {}

    BayesNet parse() {
        while (!atEnd()) {
            const Token& t = peek();
            if (t.text == "network") {
                skipBlock();
            } else if (t.text == "variable") {
                parseVariable();
            } else if (t.text == "probability") {
                parseProbability();
            } else {
                fail("unexpected token '" + t.text + "'");
            }
        }
        finalize();
        return std::move(net_);
    }

private:
    std::vector<Token> tokens_;
    size_t pos_ = 0;
    BayesNet net_;

    [[noreturn]] void fail(const std::string& msg) const {
        int line = pos_ < tokens_.size() ? tokens_[pos_].line
                                         : (tokens_.empty() ? 0 : tokens_.back().line);
        throw std::invalid_argument("BIF parse error at line " + std::to_string(line) +
                                    ": " + msg);
    }
    bool atEnd() const { return pos_ >= tokens_.size(); }
    const Token& peek() const {
        if (atEnd()) throw std::invalid_argument("BIF parse error: unexpected end of input");
        return tokens_[pos_];
    }
    Token next() {
        const Token& t = peek();
        ++pos_;
        return t;
    }
    void expect(const std::string& s) {
        if (next().text != s) { --pos_; fail("expected '" + s + "'"); }
    }

    void skipBlock() {
        while (!atEnd() && peek().text != "{") next();
        expect("{");
        int depth = 1;
        while (!atEnd() && depth > 0) {
            const std::string t = next().text;
            if (t == "{") ++depth;
            if (t == "}") --depth;
        }
    }

    void parseVariable() {
        expect("variable");
        BayesNode node;
        node.name = next().text;
        expect("{");
        while (peek().text != "}") {
            if (peek().text == "type") {
                next();
                expect("discrete");
                expect("[");
                int declared = std::stoi(next().text);
                expect("]");
                expect("{");
                while (peek().text != "}") {
                    if (peek().text == ",") { next(); continue; }
                    node.levels.push_back(next().text);
                }
                expect("}");
                expect(";");
                if (declared != static_cast<int>(node.levels.size()))
                    fail("variable " + node.name + " declares " +
                         std::to_string(declared) + " levels but lists " +
                         std::to_string(node.levels.size()));
            } else {
                // property or anything else: skip to ';'
                while (peek().text != ";") next();
                expect(";");
            }
        }
        expect("}");
        if (node.levels.empty()) fail("variable " + node.name + " has no levels");
        net_.nodes.push_back(std::move(node));
    }

    int nodeIndex(const std::string& name) {
        for (size_t i = 0; i < net_.nodes.size(); ++i)
            if (net_.nodes[i].name == name) return static_cast<int>(i);
        fail("unknown variable '" + name + "'");
    }

    std::vector<double> parseNumberList(const std::string& terminator) {
        std::vector<double> vals;
        while (peek().text != terminator) {
            if (peek().text == ",") { next(); continue; }
            const Token t = next();
            try {
                size_t used = 0;
                double v = std::stod(t.text, &used);
                if (used != t.text.size()) throw std::invalid_argument("");
                vals.push_back(v);
            } catch (...) {
                --pos_;
                fail("expected a number, got '" + t.text + "'");
            }
        }
        return vals;
    }

    void checkRow(const std::vector<double>& row, int childIdx) {
        const auto& node = net_.nodes[childIdx];
        if (row.size() != node.levels.size())
            fail("CPT row for " + node.name + " has " + std::to_string(row.size()) +
                 " entries, expected " + std::to_string(node.levels.size()));
        double sum = 0.0;
        for (double v : row) {
            if (v < 0.0) fail("negative probability in CPT of " + node.name);
            sum += v;
        }
        if (std::fabs(sum - 1.0) > 1e-4) {
            std::ostringstream os;
            os << "CPT row for " << node.name << " sums to " << sum;
            fail(os.str());
        }
    }

    void parseProbability() {
        expect("probability");
        expect("(");
        int child = nodeIndex(next().text);
        BayesNode& node = net_.nodes[child];
        if (!node.cpt.empty()) fail("duplicate probability block for " + node.name);
        if (peek().text == "|") {
            next();
            while (peek().text != ")") {
                if (peek().text == ",") { next(); continue; }
                node.parents.push_back(nodeIndex(next().text));
            }
        }
        expect(")");
        expect("{");

        const size_t combos = net_.parentComboCount(child);
        node.cpt.assign(combos, {});

        while (peek().text != "}") {
            if (peek().text == "table") {
                next();
                auto vals = parseNumberList(";");
                expect(";");
                if (vals.size() != combos * node.levels.size())
                    fail("table for " + node.name + " lists " +
                         std::to_string(vals.size()) + " values, expected " +
                         std::to_string(combos * node.levels.size()));
                for (size_t c = 0; c < combos; ++c) {
                    std::vector<double> row(vals.begin() + c * node.levels.size(),
                                            vals.begin() + (c + 1) * node.levels.size());
                    checkRow(row, child);
                    node.cpt[c] = std::move(row);
                }
            } else if (peek().text == "(") {
                next();
                std::vector<int> parentLevels;
                size_t pi = 0;
                while (peek().text != ")") {
                    if (peek().text == ",") { next(); continue; }
                    if (pi >= node.parents.size())
                        fail("too many parent levels in CPT row of " + node.name);
                    const auto& pnode = net_.nodes[node.parents[pi]];
                    const std::string lv = next().text;
                    auto it = std::find(pnode.levels.begin(), pnode.levels.end(), lv);
                    if (it == pnode.levels.end())
                        fail("unknown level '" + lv + "' of parent " + pnode.name);
                    parentLevels.push_back(static_cast<int>(it - pnode.levels.begin()));
                    ++pi;
                }
                expect(")");
                if (parentLevels.size() != node.parents.size())
                    fail("CPT row of " + node.name + " lists " +
                         std::to_string(parentLevels.size()) + " parent levels, expected " +
                         std::to_string(node.parents.size()));
                auto vals = parseNumberList(";");
                expect(";");
                checkRow(vals, child);
                node.cpt[net_.comboIndex(child, parentLevels)] = std::move(vals);
            } else {
                // property entries etc.
                while (peek().text != ";") next();
                expect(";");
            }
        }
        expect("}");

        for (size_t c = 0; c < combos; ++c)
            if (node.cpt[c].empty())
                fail("CPT of " + node.name + " is missing parent combination " +
                     std::to_string(c));
    }

    void finalize() {
        if (net_.nodes.empty())
            throw std::invalid_argument("BIF parse error: no variables declared");
        for (const auto& node : net_.nodes)
            if (node.cpt.empty())
                throw std::invalid_argument("BIF parse error: variable " + node.name +
                                            " has no probability block");
        net_.topologicalOrder();  // throws on cycles
    }
};

}  // namespace

int BayesNet::indexOf(const std::string& name) const {
    for (size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].name == name) return static_cast<int>(i);
    return -1;
}

size_t BayesNet::parentComboCount(int node) const {
    size_t combos = 1;
    for (int p : nodes[node].parents) combos *= nodes[p].levels.size();
    return combos;
}

size_t BayesNet::comboIndex(int node, const std::vector<int>& parentLevels) const {
    size_t idx = 0;
    const auto& parents = nodes[node].parents;
    for (size_t i = 0; i < parents.size(); ++i)
        idx = idx * nodes[parents[i]].levels.size() + static_cast<size_t>(parentLevels[i]);
    return idx;
}

std::vector<int> BayesNet::topologicalOrder() const {
    const int n = static_cast<int>(nodes.size());
    std::vector<int> indeg(n, 0);
    for (int v = 0; v < n; ++v) indeg[v] = static_cast<int>(nodes[v].parents.size());
    std::vector<std::vector<int>> childrenOf(n);
    for (int v = 0; v < n; ++v)
        for (int p : nodes[v].parents) childrenOf[p].push_back(v);
    std::vector<int> order;
    std::vector<int> ready;
    for (int v = 0; v < n; ++v)
        if (indeg[v] == 0) ready.push_back(v);
    // lowest index first keeps the order deterministic
    while (!ready.empty()) {
        std::sort(ready.begin(), ready.end(), std::greater<int>());
        int v = ready.back();
        ready.pop_back();
        order.push_back(v);
        for (int c : childrenOf[v])
            if (--indeg[c] == 0) ready.push_back(c);
    }
    if (order.size() != nodes.size())
        throw std::invalid_argument("BayesNet: parent structure is cyclic");
    return order;
}

BayesNet parseBif(const std::string& text) { return BifParser(text).parse(); }

BayesNet parseBifFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("parseBifFile: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parseBif(ss.str());
}

Dataset ancestralSample(const BayesNet& net, size_t n, uint64_t seed) {
    if (n < 1) throw std::invalid_argument("ancestralSample: n must be >= 1");
    Rng rng(mixSeed(seed, 0x626966ULL));  // "bif"
    const auto order = net.topologicalOrder();
    const size_t d = net.nodes.size();

    Dataset data;
    for (const auto& node : net.nodes) {
        data.names.push_back(node.name);
        data.kinds.push_back(ColumnKind::categorical(node.levels));
    }
    data.meta.seed = seed;
    data.rows.assign(n, std::vector<double>(d, 0.0));

    std::vector<int> levels(d, 0);
    for (size_t r = 0; r < n; ++r) {
        for (int v : order) {
            const auto& node = net.nodes[v];
            std::vector<int> parentLevels;
            parentLevels.reserve(node.parents.size());
            for (int p : node.parents) parentLevels.push_back(levels[p]);
            const auto& row = node.cpt[net.comboIndex(v, parentLevels)];
            levels[v] = static_cast<int>(rng.categorical(row));
            data.rows[r][static_cast<size_t>(v)] = static_cast<double>(levels[v]);
        }
    }
    return data;
}

Dataset binarizeTarget(const Dataset& data, const std::string& var,
                       const std::set<std::string>& positiveLevels) {
    int col = data.columnIndex(var);
    if (col < 0) throw std::invalid_argument("binarizeTarget: unknown variable " + var);
    if (data.kinds[col].role != ColumnRole::Categorical)
        throw std::invalid_argument("binarizeTarget: variable " + var +
                                    " is not categorical");
    const auto& levels = data.kinds[col].levels;
    for (const auto& lv : positiveLevels)
        if (std::find(levels.begin(), levels.end(), lv) == levels.end())
            throw std::invalid_argument("binarizeTarget: unknown level '" + lv + "' of " +
                                        var);
    std::vector<bool> positive(levels.size(), false);
    for (size_t i = 0; i < levels.size(); ++i)
        positive[i] = positiveLevels.count(levels[i]) > 0;

    Dataset out = data;
    out.kinds[col] = ColumnKind::binaryTarget();
    for (auto& row : out.rows)
        row[col] = positive[static_cast<size_t>(row[col])] ? 1.0 : 0.0;
    return out;
}

}  // namespace care
