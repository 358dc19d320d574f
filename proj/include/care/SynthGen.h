#pragma once

#include "care/Dag.h"
#include "care/Dataset.h"

#include <cstdint>

namespace care {

struct SynthConfig {
    size_t n = 1000;
    DataMode mode = DataMode::Train;
    uint64_t seed = 0;
};

// Draws the five-feature synthetic table: two interacting causal parents,
// a proxy child of the label, a spurious feature that tracks the label in
// train mode but degenerates to wide noise in test mode, and pure noise.
Dataset generateSynthetic(const SynthConfig& cfg);

// Fixed generating structure, including the environment switch E.
Dag groundTruthGraph();

}  // namespace care
