#include "care/Dataset.h"

#include "care/Random.h"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace care {
namespace {

std::vector<std::string> splitCsvLine(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string trimmed(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

bool parseDouble(const std::string& s, double& out) {
    const std::string t = trimmed(s);
    if (t.empty()) return false;
    char* end = nullptr;
    out = std::strtod(t.c_str(), &end);
    return end == t.c_str() + t.size();
}

std::string formatCell(double v) {
    char buf[32];
    // shortest representation that round-trips
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    return buf;
}

}  // namespace

int Dataset::targetIndex() const {
    for (size_t c = 0; c < kinds.size(); ++c)
        if (kinds[c].role == ColumnRole::BinaryTarget) return static_cast<int>(c);
    return -1;
}

std::vector<int> Dataset::featureIndices() const {
    std::vector<int> idx;
    for (size_t c = 0; c < kinds.size(); ++c)
        if (kinds[c].role != ColumnRole::BinaryTarget) idx.push_back(static_cast<int>(c));
    return idx;
}

std::vector<int> Dataset::target() const {
    int t = targetIndex();
    if (t < 0) throw std::invalid_argument("Dataset has no target column");
    std::vector<int> y(rows.size());
    for (size_t r = 0; r < rows.size(); ++r) y[r] = static_cast<int>(rows[r][t]);
    return y;
}

int Dataset::columnIndex(const std::string& name) const {
    for (size_t c = 0; c < names.size(); ++c)
        if (names[c] == name) return static_cast<int>(c);
    return -1;
}

void Dataset::validate() const {
    if (names.size() != kinds.size())
        throw std::invalid_argument("Dataset: names/kinds arity mismatch");
    if (rows.empty()) throw std::invalid_argument("Dataset: N must be >= 1");
    int targets = 0;
    for (const auto& k : kinds) {
        if (k.role == ColumnRole::BinaryTarget) ++targets;
        if (k.role == ColumnRole::Categorical) {
            if (k.levels.empty())
                throw std::invalid_argument("Dataset: categorical column with no levels");
            std::set<std::string> uniq(k.levels.begin(), k.levels.end());
            if (uniq.size() != k.levels.size())
                throw std::invalid_argument("Dataset: duplicate categorical levels");
        }
    }
    if (targets > 1) throw std::invalid_argument("Dataset: more than one target column");
    for (size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != names.size())
            throw std::invalid_argument("Dataset: row " + std::to_string(r) +
                                        " has wrong arity");
        for (size_t c = 0; c < names.size(); ++c) {
            if (kinds[c].role == ColumnRole::Categorical) {
                double v = rows[r][c];
                if (v < 0 || v >= static_cast<double>(kinds[c].levels.size()) ||
                    v != std::floor(v))
                    throw std::invalid_argument("Dataset: invalid level index at row " +
                                                std::to_string(r) + " column " + names[c]);
            } else if (kinds[c].role == ColumnRole::BinaryTarget) {
                double v = rows[r][c];
                if (v != 0.0 && v != 1.0)
                    throw std::invalid_argument("Dataset: non-binary target at row " +
                                                std::to_string(r));
            }
        }
    }
}

Dataset loadCsv(const std::string& path, const std::vector<ColumnKind>& schema,
                const std::string& targetName) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("loadCsv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("loadCsv: empty file " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();

    Dataset data;
    data.names = splitCsvLine(line);
    for (auto& n : data.names) n = trimmed(n);
    if (data.names.size() != schema.size())
        throw std::invalid_argument("loadCsv: header arity " +
                                    std::to_string(data.names.size()) +
                                    " does not match schema arity " +
                                    std::to_string(schema.size()));
    data.kinds = schema;
    int targetCol = data.columnIndex(targetName);
    if (targetCol < 0)
        throw std::invalid_argument("loadCsv: target column '" + targetName +
                                    "' not in header");
    data.kinds[targetCol] = ColumnKind::binaryTarget();

    size_t rowNum = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++rowNum;
        auto cells = splitCsvLine(line);
        if (cells.size() != data.names.size())
            throw std::invalid_argument("loadCsv: row " + std::to_string(rowNum) +
                                        " has " + std::to_string(cells.size()) +
                                        " cells, expected " +
                                        std::to_string(data.names.size()));
        std::vector<double> row(cells.size());
        for (size_t c = 0; c < cells.size(); ++c) {
            const std::string cell = trimmed(cells[c]);
            const auto& kind = data.kinds[c];
            if (cell.empty())
                throw std::invalid_argument("loadCsv: empty cell at row " +
                                            std::to_string(rowNum) + " column " +
                                            data.names[c]);
            if (kind.role == ColumnRole::Continuous) {
                double v;
                if (!parseDouble(cell, v))
                    throw std::invalid_argument("loadCsv: unparsable number '" + cell +
                                                "' at row " + std::to_string(rowNum) +
                                                " column " + data.names[c]);
                row[c] = v;
            } else if (kind.role == ColumnRole::Categorical) {
                auto it = std::find(kind.levels.begin(), kind.levels.end(), cell);
                if (it == kind.levels.end())
                    throw std::invalid_argument("loadCsv: unknown level '" + cell +
                                                "' at row " + std::to_string(rowNum) +
                                                " column " + data.names[c]);
                row[c] = static_cast<double>(it - kind.levels.begin());
            } else {
                if (cell != "0" && cell != "1")
                    throw std::invalid_argument("loadCsv: non-binary target at row " +
                                                std::to_string(rowNum));
                row[c] = (cell == "1") ? 1.0 : 0.0;
            }
        }
        data.rows.push_back(std::move(row));
    }
    data.validate();
    return data;
}

void writeCsv(const Dataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("writeCsv: cannot open " + path);
    for (size_t c = 0; c < data.names.size(); ++c)
        out << (c ? "," : "") << data.names[c];
    out << "\n";
    for (const auto& row : data.rows) {
        for (size_t c = 0; c < row.size(); ++c) {
            if (c) out << ",";
            switch (data.kinds[c].role) {
                case ColumnRole::Continuous: out << formatCell(row[c]); break;
                case ColumnRole::Categorical:
                    out << data.kinds[c].levels[static_cast<size_t>(row[c])];
                    break;
                case ColumnRole::BinaryTarget:
                    out << (row[c] == 1.0 ? "1" : "0");
                    break;
            }
        }
        out << "\n";
    }
}

Dataset loadCsvAutoSchema(const std::string& path, const std::string& targetName) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("loadCsv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("loadCsv: empty file " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto header = splitCsvLine(line);
    size_t arity = header.size();

    std::vector<bool> numeric(arity, true);
    std::vector<std::set<std::string>> levels(arity);
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = splitCsvLine(line);
        if (cells.size() != arity)
            throw std::invalid_argument("loadCsv: inconsistent arity in " + path);
        for (size_t c = 0; c < arity; ++c) {
            double v;
            if (!parseDouble(cells[c], v)) numeric[c] = false;
            levels[c].insert(trimmed(cells[c]));
        }
    }

    std::vector<ColumnKind> schema(arity);
    for (size_t c = 0; c < arity; ++c) {
        if (numeric[c]) {
            schema[c] = ColumnKind::continuous();
        } else {
            schema[c] = ColumnKind::categorical(
                std::vector<std::string>(levels[c].begin(), levels[c].end()));
        }
    }
    return loadCsv(path, schema, targetName);
}

std::pair<Dataset, StandardizeStats> standardize(
    const Dataset& data, const std::optional<StandardizeStats>& stats) {
    StandardizeStats st;
    if (stats) {
        if (stats->mean.size() != data.columnCount() ||
            stats->stddev.size() != data.columnCount())
            throw std::invalid_argument("standardize: stats arity mismatch");
        st = *stats;
    } else {
        st.mean.assign(data.columnCount(), 0.0);
        st.stddev.assign(data.columnCount(), 1.0);
        const double n = static_cast<double>(data.rowCount());
        for (size_t c = 0; c < data.columnCount(); ++c) {
            if (data.kinds[c].role != ColumnRole::Continuous) continue;
            double sum = 0.0;
            for (const auto& row : data.rows) sum += row[c];
            double mean = sum / n;
            double ss = 0.0;
            for (const auto& row : data.rows) ss += (row[c] - mean) * (row[c] - mean);
            double sd = (n > 1) ? std::sqrt(ss / (n - 1.0)) : 0.0;
            st.mean[c] = mean;
            st.stddev[c] = std::max(sd, 1e-8);
        }
    }
    Dataset out = data;
    for (auto& row : out.rows)
        for (size_t c = 0; c < out.columnCount(); ++c)
            if (out.kinds[c].role == ColumnRole::Continuous)
                row[c] = (row[c] - st.mean[c]) / st.stddev[c];
    return {std::move(out), std::move(st)};
}

EncodedMatrix oneHotEncode(const Dataset& data) {
    EncodedMatrix enc;
    const auto feats = data.featureIndices();
    for (int c : feats) enc.variableNames.push_back(data.names[c]);

    size_t p = 0;
    for (size_t fi = 0; fi < feats.size(); ++fi) {
        const auto& kind = data.kinds[feats[fi]];
        if (kind.role == ColumnRole::Continuous) {
            enc.columnMap.push_back(static_cast<int>(fi));
            enc.columnNames.push_back(data.names[feats[fi]]);
            ++p;
        } else {
            for (const auto& level : kind.levels) {
                enc.columnMap.push_back(static_cast<int>(fi));
                enc.columnNames.push_back(data.names[feats[fi]] + "=" + level);
                ++p;
            }
        }
    }
    enc.values.resize(static_cast<Eigen::Index>(data.rowCount()),
                      static_cast<Eigen::Index>(p));
    enc.values.setZero();
    for (size_t r = 0; r < data.rowCount(); ++r) {
        size_t col = 0;
        for (int c : feats) {
            const auto& kind = data.kinds[c];
            if (kind.role == ColumnRole::Continuous) {
                enc.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col)) =
                    data.rows[r][c];
                ++col;
            } else {
                size_t level = static_cast<size_t>(data.rows[r][c]);
                enc.values(static_cast<Eigen::Index>(r),
                           static_cast<Eigen::Index>(col + level)) = 1.0;
                col += kind.levels.size();
            }
        }
    }
    return enc;
}

std::vector<std::pair<Dataset, Dataset>> kfoldSplit(const Dataset& data, int k,
                                                    uint64_t seed) {
    const size_t n = data.rowCount();
    if (k < 2) throw std::invalid_argument("kfoldSplit: k must be >= 2");
    if (static_cast<size_t>(k) > n)
        throw std::invalid_argument("kfoldSplit: k exceeds row count");

    Rng rng(mixSeed(seed, 0x6b666f6c64ULL));  // "kfold"
    auto order = rng.permutation(n);

    std::vector<std::vector<size_t>> folds(k);
    size_t base = n / static_cast<size_t>(k);
    size_t extra = n % static_cast<size_t>(k);
    size_t pos = 0;
    for (int f = 0; f < k; ++f) {
        size_t sz = base + (static_cast<size_t>(f) < extra ? 1 : 0);
        folds[f].assign(order.begin() + pos, order.begin() + pos + sz);
        std::sort(folds[f].begin(), folds[f].end());
        pos += sz;
    }

    std::vector<std::pair<Dataset, Dataset>> out;
    for (int f = 0; f < k; ++f) {
        Dataset train, test;
        train.names = test.names = data.names;
        train.kinds = test.kinds = data.kinds;
        train.meta = test.meta = data.meta;
        train.meta.mode = DataMode::Train;
        test.meta.mode = DataMode::Test;
        std::vector<bool> inTest(n, false);
        for (size_t i : folds[f]) inTest[i] = true;
        for (size_t r = 0; r < n; ++r)
            (inTest[r] ? test : train).rows.push_back(data.rows[r]);
        out.emplace_back(std::move(train), std::move(test));
    }
    return out;
}

std::string datasetToJson(const Dataset& data) {
    nlohmann::ordered_json j;
    j["names"] = data.names;
    j["kinds"] = nlohmann::ordered_json::array();
    for (const auto& k : data.kinds) {
        nlohmann::ordered_json kj;
        switch (k.role) {
            case ColumnRole::Continuous: kj["role"] = "continuous"; break;
            case ColumnRole::Categorical:
                kj["role"] = "categorical";
                kj["levels"] = k.levels;
                break;
            case ColumnRole::BinaryTarget: kj["role"] = "binary_target"; break;
        }
        j["kinds"].push_back(kj);
    }
    j["rows"] = data.rows;
    int t = data.targetIndex();
    if (t >= 0) j["target"] = data.target();
    j["meta"]["seed"] = data.meta.seed;
    j["meta"]["mode"] = data.meta.mode == DataMode::Train
                            ? "train"
                            : (data.meta.mode == DataMode::Test ? "test" : "none");
    return j.dump(2);
}

}  // namespace care
