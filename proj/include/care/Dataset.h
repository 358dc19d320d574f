#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace care {

enum class ColumnRole { Continuous, Categorical, BinaryTarget };

struct ColumnKind {
    ColumnRole role = ColumnRole::Continuous;
    std::vector<std::string> levels;  // Categorical only; non-empty, duplicate-free

    static ColumnKind continuous() { return {ColumnRole::Continuous, {}}; }
    static ColumnKind categorical(std::vector<std::string> lv) {
        return {ColumnRole::Categorical, std::move(lv)};
    }
    static ColumnKind binaryTarget() { return {ColumnRole::BinaryTarget, {}}; }

    bool operator==(const ColumnKind&) const = default;
};

enum class DataMode { None, Train, Test };

struct DatasetMeta {
    uint64_t seed = 0;
    DataMode mode = DataMode::None;
    bool operator==(const DatasetMeta&) const = default;
};

// Column-typed feature table with a binary target. Continuous cells hold
// the value, categorical cells hold the level index, the target cell is 0/1.
// Immutable by convention once built; all operations return fresh copies.
struct Dataset {
    std::vector<std::string> names;
    std::vector<ColumnKind> kinds;
    std::vector<std::vector<double>> rows;  // N x names.size()
    DatasetMeta meta;

    size_t rowCount() const { return rows.size(); }
    size_t columnCount() const { return names.size(); }

    // Index of the BinaryTarget column, or -1 if the dataset has none yet.
    int targetIndex() const;
    // Indices of the non-target columns, in declaration order.
    std::vector<int> featureIndices() const;
    // Target values as 0/1. Requires a target column.
    std::vector<int> target() const;
    int columnIndex(const std::string& name) const;  // -1 if absent

    // Throws std::invalid_argument on any structural violation.
    void validate() const;

    bool operator==(const Dataset&) const = default;
};

struct StandardizeStats {
    // Parallel to dataset columns; entries for non-continuous columns unused.
    std::vector<double> mean;
    std::vector<double> stddev;  // floored at 1e-8
};

struct EncodedMatrix {
    Eigen::MatrixXd values;                 // N x p
    std::vector<int> columnMap;             // encoded column -> original feature index
    std::vector<std::string> columnNames;   // encoded column labels
    std::vector<std::string> variableNames; // original feature names (columnMap codomain)
};

Dataset loadCsv(const std::string& path, const std::vector<ColumnKind>& schema,
                const std::string& targetName);
void writeCsv(const Dataset& data, const std::string& path);

// Reads a CSV and classifies each column: all-numeric columns become
// Continuous, the rest Categorical with sorted unique levels. The target
// column must be binary 0/1.
Dataset loadCsvAutoSchema(const std::string& path, const std::string& targetName);

std::pair<Dataset, StandardizeStats> standardize(
    const Dataset& data, const std::optional<StandardizeStats>& stats = std::nullopt);

EncodedMatrix oneHotEncode(const Dataset& data);

std::vector<std::pair<Dataset, Dataset>> kfoldSplit(const Dataset& data, int k,
                                                    uint64_t seed);

std::string datasetToJson(const Dataset& data);

}  // namespace care
