#include "ebl/metrics.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace ebl {

namespace {

double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

void check_same(const ScalarField2D& p, const BinaryMask& g, const char* who) {
    if (p.width() != g.width() || p.height() != g.height()) {
        throw std::invalid_argument(std::string(who) + ": dimension mismatch");
    }
}

}  // namespace

Confusion confusion(const ScalarField2D& prob, const BinaryMask& gt, double threshold) {
    check_same(prob, gt, "confusion");
    Confusion c;
    for (std::size_t i = 0; i < prob.size(); ++i) {
        const bool pred = prob[i] >= threshold;
        const bool truth = gt[i] != 0;
        if (pred && truth) ++c.tp;
        else if (pred) ++c.fp;
        else if (truth) ++c.fn;
        else ++c.tn;
    }
    return c;
}

MetricsReport derive(const Confusion& c) {
    MetricsReport r;
    r.counts = c;
    r.sensitivity = ratio(double(c.tp), double(c.tp + c.fn));
    r.specificity = ratio(double(c.tn), double(c.tn + c.fp));
    r.f1 = ratio(2.0 * double(c.tp), 2.0 * double(c.tp) + double(c.fp) + double(c.fn));
    return r;
}

double roc_auc(const ScalarField2D& prob, const BinaryMask& gt) {
    check_same(prob, gt, "roc_auc");
    const std::size_t n = prob.size();
    const std::size_t n_pos = gt.count();
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) {
        throw std::invalid_argument("roc_auc: ground truth needs both positive and negative pixels");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return prob[a] < prob[b]; });

    // Twice the midrank keeps every rank an integer.
    double rank_sum_x2 = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i + 1;
        while (j < n && prob[order[j]] == prob[order[i]]) ++j;
        const double midrank_x2 = double(i + 1 + j);  // (i+1) + j is twice the mean of ranks i+1..j
        for (std::size_t k = i; k < j; ++k) {
            if (gt[order[k]]) rank_sum_x2 += midrank_x2;
        }
        i = j;
    }
    const double u = 0.5 * rank_sum_x2 - 0.5 * double(n_pos) * double(n_pos + 1);
    return u / (double(n_pos) * double(n_neg));
}

MetricsReport evaluate(const ScalarField2D& prob, const BinaryMask& gt, double threshold) {
    MetricsReport r = derive(confusion(prob, gt, threshold));
    r.auc = roc_auc(prob, gt);
    return r;
}

AggregateReport aggregate(const std::vector<MetricsReport>& reports) {
    if (reports.empty()) throw std::invalid_argument("aggregate: no reports");
    AggregateReport out;
    Confusion pooled;
    double sens = 0.0, spec = 0.0, f1 = 0.0, auc = 0.0;
    for (const auto& r : reports) {
        pooled.tp += r.counts.tp;
        pooled.fp += r.counts.fp;
        pooled.tn += r.counts.tn;
        pooled.fn += r.counts.fn;
        sens += r.sensitivity;
        spec += r.specificity;
        f1 += r.f1;
        auc += r.auc;
    }
    const double n = double(reports.size());
    out.macro.counts = pooled;
    out.macro.sensitivity = sens / n;
    out.macro.specificity = spec / n;
    out.macro.f1 = f1 / n;
    out.macro.auc = auc / n;
    out.micro = derive(pooled);
    out.micro.auc = out.macro.auc;
    return out;
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows) {
    out << "method,loss,image_id,sens,spec,f1,auc\n";
    const auto old_precision = out.precision();
    out << std::setprecision(17);
    for (const auto& row : rows) {
        out << row.method << ',' << row.loss << ',' << row.image_id << ','
            << row.report.sensitivity << ',' << row.report.specificity << ',' << row.report.f1 << ','
            << row.report.auc << '\n';
    }
    out.precision(old_precision);
}

}  // namespace ebl
