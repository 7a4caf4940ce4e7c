#include "ghsnet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace ghs {

namespace {

void check_same_shape(const BoolMatrix& a, const BoolMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols()) {
        throw ContractError("adjacency matrices must be square with the same p");
    }
}

} // namespace

PrecisionRecall precision_recall(const BoolMatrix& estimated, const BoolMatrix& truth) {
    check_same_shape(estimated, truth);
    std::size_t tp = 0, fp = 0, fn = 0;
    for (Index j = 1; j < truth.cols(); ++j) {
        for (Index i = 0; i < j; ++i) {
            const bool e = estimated(i, j);
            const bool t = truth(i, j);
            tp += e && t;
            fp += e && !t;
            fn += !e && t;
        }
    }
    PrecisionRecall out;
    if (tp + fp > 0) out.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    if (tp + fn > 0) out.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    return out;
}

PrecisionRecall precision_recall(const GraphEstimate& estimated, const BoolMatrix& truth) {
    return precision_recall(estimated.adjacency, truth);
}

double edge_disagreement(const BoolMatrix& a, const BoolMatrix& b) {
    check_same_shape(a, b);
    std::size_t only_a = 0, only_b = 0, edges_a = 0, edges_b = 0;
    for (Index j = 1; j < a.cols(); ++j) {
        for (Index i = 0; i < j; ++i) {
            edges_a += a(i, j);
            edges_b += b(i, j);
            only_a += a(i, j) && !b(i, j);
            only_b += b(i, j) && !a(i, j);
        }
    }
    double sum = 0.0;
    int defined = 0;
    if (edges_a > 0) {
        sum += static_cast<double>(only_a) / static_cast<double>(edges_a);
        ++defined;
    }
    if (edges_b > 0) {
        sum += static_cast<double>(only_b) / static_cast<double>(edges_b);
        ++defined;
    }
    return defined == 0 ? 0.0 : sum / defined;
}

double edge_disagreement(const GraphEstimate& a, const GraphEstimate& b) {
    return edge_disagreement(a.adjacency, b.adjacency);
}

PrCurve cutoff_pr_curve(const Matrix& scores, const BoolMatrix& truth, double recall_cap) {
    if (scores.rows() != truth.rows() || scores.cols() != truth.cols()) {
        throw ContractError("score matrix and truth differ in shape");
    }
    check_same_shape(truth, truth);
    if (!(recall_cap > 0.0 && recall_cap <= 1.0)) throw ContractError("recall_cap must be in (0, 1]");

    struct Pair {
        double score;
        bool edge;
    };
    std::vector<Pair> pairs;
    std::size_t positives = 0;
    for (Index j = 1; j < truth.cols(); ++j) {
        for (Index i = 0; i < j; ++i) {
            pairs.push_back({std::abs(scores(i, j)), static_cast<bool>(truth(i, j))});
            positives += truth(i, j);
        }
    }
    if (positives == 0) throw ContractError("cutoff_pr_curve: truth has no edges");
    std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) { return x.score > y.score; });

    std::vector<PrPoint> raw;
    std::size_t tp = 0, selected = 0;
    for (std::size_t k = 0; k < pairs.size();) {
        const double threshold = pairs[k].score;
        for (; k < pairs.size() && pairs[k].score == threshold; ++k) {
            ++selected;
            tp += pairs[k].edge;
        }
        raw.push_back({threshold, static_cast<double>(tp) / static_cast<double>(positives),
                       static_cast<double>(tp) / static_cast<double>(selected)});
    }

    PrCurve curve;
    curve.points.push_back({raw.front().threshold, 0.0, raw.front().precision});
    for (const PrPoint& pt : raw) {
        const PrPoint& last = curve.points.back();
        if (pt.recall >= recall_cap) {
            PrPoint end = pt;
            if (pt.recall > recall_cap) {
                const double w = (recall_cap - last.recall) / (pt.recall - last.recall);
                end.precision = last.precision + w * (pt.precision - last.precision);
                end.recall = recall_cap;
            }
            curve.auprc += 0.5 * (end.recall - last.recall) * (end.precision + last.precision);
            curve.points.push_back(end);
            break;
        }
        curve.auprc += 0.5 * (pt.recall - last.recall) * (pt.precision + last.precision);
        curve.points.push_back(pt);
    }
    return curve;
}

void write_pr_curve_csv(std::ostream& out, const PrCurve& curve) {
    out << "threshold,recall,precision\n";
    const auto old = out.precision(17);
    for (const PrPoint& pt : curve.points) out << pt.threshold << ',' << pt.recall << ',' << pt.precision << '\n';
    out.precision(old);
}

} // namespace ghs
