#pragma once

#include <vector>

namespace care {

struct MetricReport {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool degenerate = false;  // a zero denominator was replaced by 0
};

struct AggregatedMetric {
    double median = 0.0;
    double min = 0.0;
    double max = 0.0;
};

struct AggregatedReport {
    AggregatedMetric precision;
    AggregatedMetric recall;
    AggregatedMetric f1;
};

// Positive class is 1; probabilities at or above the threshold predict 1.
MetricReport classificationMetrics(const std::vector<int>& yTrue,
                                   const std::vector<double>& yProb,
                                   double threshold = 0.5);

// Elementwise median and [min, max]; even counts take the lower median.
AggregatedReport aggregate(const std::vector<MetricReport>& reports);

}  // namespace care
