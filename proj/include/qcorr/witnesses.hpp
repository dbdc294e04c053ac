#pragma once

#include <array>
#include <string>

#include "qcorr/scenarios.hpp"

namespace qcorr {

/// Result of a reference witness. excluded means the value violates the
/// witness's bound (value > threshold). degenerate is set by the arcsin
/// criterion when a marginal sits at +/-1 with a nonzero covariance, in
/// which case no verdict is offered.
struct WitnessValue {
    double value = 0.0;
    double threshold = 0.0;
    bool excluded = false;
    bool degenerate = false;
};

/// Overlap-based dimension witness; threshold 2 for qubit systems. Returns
/// +infinity when an overlap sum vanishes (the data needs unbounded
/// dimension).
WitnessValue svw_witness(const BellCorrelation& corr);

/// |sum (-1)^(alpha beta) arcsin D| <= pi with D the covariance of the pair
/// normalized by the marginal variances; D is clamped to [-1, 1].
WitnessValue npa_arcsin(const BellCorrelation& corr, double tol = kTol);

/// 2x2 determinant witness on expectation-value differences
/// w_mn = A_m|rho_{2n} - A_m|rho_{2n+1}; threshold 1. The arrangement picks
/// the four states (two difference pairs) by row label or index.
WitnessValue bqb_det(const PMRecordSet& records,
                     const std::array<std::string, 4>& arrangement);
WitnessValue bqb_det(const PMRecordSet& records,
                     const std::array<std::size_t, 4>& arrangement);

}  // namespace qcorr
