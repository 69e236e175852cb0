#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ebl/field.hpp"

namespace ebl {

struct Confusion {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t tn = 0;
    std::uint64_t fn = 0;

    std::uint64_t total() const { return tp + fp + tn + fn; }
    bool operator==(const Confusion&) const = default;
};

/// Ratios with a zero denominator are reported as 0.
struct MetricsReport {
    Confusion counts;
    double sensitivity = 0.0;
    double specificity = 0.0;
    double f1 = 0.0;
    double auc = 0.0;
};

/// Pixels with P >= threshold count as predicted foreground.
Confusion confusion(const ScalarField2D& prob, const BinaryMask& gt, double threshold = 0.5);

/// Sensitivity, specificity and F1 from counts; auc is left at 0.
MetricsReport derive(const Confusion& counts);

/// Mann-Whitney AUC with midranks for ties. Throws std::invalid_argument if G
/// lacks either class.
double roc_auc(const ScalarField2D& prob, const BinaryMask& gt);

MetricsReport evaluate(const ScalarField2D& prob, const BinaryMask& gt, double threshold = 0.5);

struct AggregateReport {
    /// Mean of per-image sensitivity, specificity, F1 and AUC; counts are summed.
    MetricsReport macro;
    /// Ratios from pooled counts; auc is the mean per-image AUC since ranks
    /// are not comparable across images.
    MetricsReport micro;
};

AggregateReport aggregate(const std::vector<MetricsReport>& reports);

struct MetricsRow {
    std::string method;
    std::string loss;
    std::string image_id;
    MetricsReport report;
};

/// CSV with header method,loss,image_id,sens,spec,f1,auc.
void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows);

}  // namespace ebl
