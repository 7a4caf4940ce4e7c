#pragma once

#include "ghsnet/types.hpp"

#include <cstdint>

namespace ghs {

struct PartialRange {
    double low = 0.1;
    double high = 0.2;
};

enum class SignMode { Positive, Mixed };

/// Ground truth used by the simulation studies.
struct TrueModel {
    BoolMatrix adjacency;
    PrecisionMatrix precision;
    PartialRange partial_range;
    std::uint64_t seed = 0;

    Index p() const { return adjacency.rows(); }
};

/**
 * Scale-free graph with exactly p edges: a preferential-attachment tree
 * (one link per arriving node, target chosen proportionally to degree)
 * plus one extra edge whose endpoints are also chosen by degree.
 */
BoolMatrix generate_scale_free_graph(Index p, std::uint64_t seed);

/**
 * Precision matrix whose partial correlations are drawn from
 * U[low, high] on the edges of `adjacency` and are exactly zero elsewhere.
 * The result is rescaled so that its inverse has unit diagonal.
 */
PrecisionMatrix build_precision(const BoolMatrix& adjacency, PartialRange range, std::uint64_t seed,
                                SignMode signs = SignMode::Positive);

/// Scale-free graph plus precision, both derived from `seed`.
TrueModel make_true_model(Index p, PartialRange range, std::uint64_t seed,
                          SignMode signs = SignMode::Positive);

/**
 * Moves round(fraction * |E|) edges of `model` onto former non-edges, chosen
 * uniformly. Retained edges keep their partial correlations and moved edges
 * carry the values of the edges they replace.
 */
TrueModel perturb_graph(const TrueModel& model, double fraction, std::uint64_t seed);

/// n draws from N(0, precision^{-1}), returned centered as a Dataset.
Dataset sample_gaussian(const TrueModel& model, int n, std::uint64_t seed);

} // namespace ghs
