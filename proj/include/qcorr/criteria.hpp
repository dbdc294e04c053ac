#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "qcorr/records.hpp"

namespace qcorr {

enum class CriterionMode { Pvm, Povm };

/// Grid search configuration for the offset pair (r_i, r_j).
struct GridConfig {
    int coarse_n = 101;      // points per axis on [-1, 1]
    int refine_rounds = 3;   // nested refinement rounds around the best cell
    int refine_n = 11;       // points per axis per refinement round
    double tol = kTol;       // feasibility slack tolerance
    /// Extra candidate cells evaluated alongside the grid (e.g. offsets known
    /// from a realization); refinement also runs around the best hint.
    std::vector<std::array<double, 2>> hints;
};

/// Outcome of a pairwise feasibility test. The margin is the signed slack
/// min g+ - max g-; feasible iff margin >= -tol. c_interval bounds the
/// common-angle quantity (c for sharp measurements, c*r'_i*r'_j for unsharp
/// ones) and is empty when infeasible.
struct FeasibilityReport {
    std::size_t i = 0;
    std::size_t j = 1;
    bool feasible = false;
    double margin = 0.0;
    double max_g_minus = 0.0;
    double min_g_plus = 0.0;
    std::optional<std::array<double, 2>> c_interval;

    struct WitnessParams {
        double r_i, r_j;
        double r_prime_i, r_prime_j;
        double c;
    };
    /// Parameters attaining feasibility (best grid cell for the POVM search);
    /// absent when infeasible.
    std::optional<WitnessParams> witness_params;
};

/// g-(ai,aj) = ai*aj - sqrt(1-ai^2)sqrt(1-aj^2), g+ the + branch.
/// Throws on inputs outside [-1, 1].
std::pair<double, double> g_pvm(double ai, double aj, double tol = kTol);

/// Unsharp version with offsets (ri, rj): products of (a - r) terms and
/// sqrt((1-|r|)^2 - (a-r)^2) terms. Throws "incompatible offset" when
/// |a - r| > 1 - |r| + tol.
std::pair<double, double> g_povm(double ai, double aj, double ri, double rj,
                                 double tol = kTol);

/// Single-cell evaluation used by the grid search and by inference.
/// coverage_ok is false when some row has |a - r| > 1 - |r| (the cell cannot
/// host the data); margin then carries a graded penalty below -2.
struct CellEval {
    double margin;
    double g_lo;   // max over rows of g-
    double g_hi;   // min over rows of g+
    bool coverage_ok;
};
CellEval povm_cell_eval(const PMRecordSet& records, std::size_t i, std::size_t j,
                        double r_i, double r_j, double tol = kTol);

/// Sharp-measurement criterion: the intersection over rows of [g-, g+] must
/// be nonempty. Throws on an empty record set.
FeasibilityReport pvm_feasible(const PMRecordSet& records, std::size_t i,
                               std::size_t j, double tol = kTol);

/// Unsharp criterion: searches offsets (r_i, r_j) on a refined grid; feasible
/// iff some cell has margin >= -cfg.tol. Ties prefer smaller |r_i| + |r_j|.
FeasibilityReport povm_feasible(const PMRecordSet& records, std::size_t i,
                                std::size_t j, const GridConfig& cfg = {});

struct PairwiseReport {
    bool feasible = true;
    std::vector<FeasibilityReport> pairs;
};

/// Applies the chosen criterion to every unordered measurement pair; the
/// overall verdict is the conjunction.
PairwiseReport pairwise_feasible(const PMRecordSet& records, CriterionMode mode,
                                 const GridConfig& cfg = {});

/// Converts d-outcome distributions (one per state) into d binary expectation
/// rows per state: entry k is 2 p(k) - 1.
std::vector<std::vector<double>> binarize(
    const std::vector<std::vector<double>>& distributions, double tol = kTol);

}  // namespace qcorr
