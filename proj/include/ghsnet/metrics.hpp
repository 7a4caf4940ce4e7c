#pragma once

#include "ghsnet/types.hpp"

#include <iosfwd>
#include <vector>

namespace ghs {

struct PrecisionRecall {
    double precision = 1.0; ///< 1 when nothing is selected
    double recall = 1.0;    ///< 1 when the truth has no edges
};

PrecisionRecall precision_recall(const BoolMatrix& estimated, const BoolMatrix& truth);
PrecisionRecall precision_recall(const GraphEstimate& estimated, const BoolMatrix& truth);

/**
 * Mean of the two directed fractions: edges of a missing from b, and edges of
 * b missing from a. A graph without edges has no directed fraction, so one
 * empty graph against a non-empty one gives 1 and two empty graphs give 0.
 */
double edge_disagreement(const BoolMatrix& a, const BoolMatrix& b);
double edge_disagreement(const GraphEstimate& a, const GraphEstimate& b);

struct PrPoint {
    double threshold; ///< edges are the pairs with |score| >= threshold
    double recall;
    double precision;
};

struct PrCurve {
    std::vector<PrPoint> points; ///< starts at recall 0, ends at recall_cap or the last reachable recall
    double auprc = 0.0;
};

/**
 * Precision-recall curve from sweeping a threshold down over |score| (upper
 * triangle, tied scores enter together), truncated at `recall_cap` by linear
 * interpolation and integrated with the trapezoid rule. The curve starts at
 * (0, precision of the first group).
 */
PrCurve cutoff_pr_curve(const Matrix& scores, const BoolMatrix& truth, double recall_cap);

/// CSV with header threshold,recall,precision.
void write_pr_curve_csv(std::ostream& out, const PrCurve& curve);

} // namespace ghs
