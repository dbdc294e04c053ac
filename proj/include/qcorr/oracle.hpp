#pragma once

#include <array>
#include <cstdint>

#include "qcorr/inference.hpp"
#include "qcorr/scenarios.hpp"

namespace qcorr {

/// Explicit single-qubit realization: one state per prepared row, one
/// observable per measurement.
struct PMRealization {
    std::vector<BlochState> states;
    std::vector<QubitObservable> observables;
};

/// Evaluates every (state, observable) expectation.
PMRecordSet realize_pm(const PMRealization& realization);

/// p(ab|alpha beta) = Tr(rho E_a^alpha (x) F_b^beta) with effects
/// (1 +/- A)/2. Throws when rho is not Hermitian PSD with unit trace.
BellCorrelation realize_bell(const Eigen::Matrix4cd& rho,
                             const std::array<QubitObservable, 2>& alice,
                             const std::array<QubitObservable, 2>& bob,
                             double tol = 1e-8);

/// pure: Haar-like random ket; otherwise a Ginibre-induced mixed state.
Eigen::Matrix4cd random_two_qubit_state(RngStream& rng, bool pure);

struct SamplePoint {
    double x = 0.0;
    double y = 0.0;
    double residual = 0.0;
};

/// Samples seeded realizations, projects each induced correlation onto the
/// two-parameter family by least squares and keeps points whose projection
/// residual is below tol. Half the draws are biased toward the structured
/// states that populate the family's extremal region; the rest are fully
/// random. projective restricts the sampled measurements to sharp ones.
std::vector<SamplePoint> sample_achievable(Family family, int n, std::uint64_t seed,
                                           bool projective, double tol = 1e-6);

struct BruteForceConfig {
    int offset_n = 13;    // coarse points per offset axis
    int scale_n = 7;      // coarse points per scale axis
    int angle_n = 13;     // coarse points for the axis angle
    int refine_rounds = 4;
    double tol = 5e-3;    // max |expectation error| accepted as feasible
};

struct BruteForceResult {
    bool feasible = false;
    double best_error = 0.0;
    // Best parameters found (axis gauge: a0 = z, a1 in the z-x plane).
    double r0 = 0.0, r_prime0 = 0.0;
    double r1 = 0.0, r_prime1 = 0.0;
    double c = 0.0;
    std::vector<Eigen::Vector3d> states;
};

/// Ground-truth search over explicit realizations: nested grids over the
/// gauge-reduced measurement parameters with an exact per-row state solve.
/// Intended for small instances (<= 4 states, 2 measurements).
BruteForceResult brute_force_feasible(const PMRecordSet& records,
                                      const BruteForceConfig& cfg = {});

}  // namespace qcorr
