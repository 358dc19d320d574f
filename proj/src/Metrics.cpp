#include "care/Metrics.h"

#include <algorithm>
#include <stdexcept>

namespace care {
namespace {

double lowerMedian(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[(v.size() - 1) / 2];
}

AggregatedMetric aggregateOne(const std::vector<double>& values) {
    AggregatedMetric m;
    m.median = lowerMedian(values);
    m.min = *std::min_element(values.begin(), values.end());
    m.max = *std::max_element(values.begin(), values.end());
    return m;
}

}  // namespace

MetricReport classificationMetrics(const std::vector<int>& yTrue,
                                   const std::vector<double>& yProb,
                                   double threshold) {
    if (yTrue.size() != yProb.size())
        throw std::invalid_argument("classificationMetrics: length mismatch");
    long tp = 0, fp = 0, fn = 0;
    for (size_t i = 0; i < yTrue.size(); ++i) {
        if (yTrue[i] != 0 && yTrue[i] != 1)
            throw std::invalid_argument("classificationMetrics: non-binary label");
        const bool pred = yProb[i] >= threshold;
        if (pred && yTrue[i] == 1) ++tp;
        else if (pred && yTrue[i] == 0) ++fp;
        else if (!pred && yTrue[i] == 1) ++fn;
    }
    MetricReport r;
    if (tp + fp > 0) r.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    else r.degenerate = true;
    if (tp + fn > 0) r.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    else r.degenerate = true;
    if (r.precision + r.recall > 0.0)
        r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
    return r;
}

AggregatedReport aggregate(const std::vector<MetricReport>& reports) {
    if (reports.empty()) throw std::invalid_argument("aggregate: empty report list");
    std::vector<double> p, r, f;
    for (const auto& rep : reports) {
        p.push_back(rep.precision);
        r.push_back(rep.recall);
        f.push_back(rep.f1);
    }
    return {aggregateOne(p), aggregateOne(r), aggregateOne(f)};
}

}  // namespace care
