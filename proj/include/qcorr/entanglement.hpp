#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "qcorr/inference.hpp"
#include "qcorr/scenarios.hpp"

namespace qcorr {

/// Real symmetric moment matrix over the operator list
/// {1, A0, A1, B0, B1, A0B0, A0B1, A1B0, A1B1} with doubly symmetrized
/// entries. Entries carry a status and an admissible box [lo, hi]; fixed
/// entries have a degenerate box. Entries whose operators coincide up to
/// ordering share one value; the canonical key below captures that tie.
struct MomentMatrix {
    static constexpr int kSize = 9;
    enum class Status { FixedPhysical, FixedByIdentity, Free };
    using Mat = Eigen::Matrix<double, kSize, kSize>;

    Mat value = Mat::Zero();
    Mat lo = Mat::Zero();
    Mat hi = Mat::Zero();
    std::array<std::array<Status, kSize>, kSize> status{};

    /// Operator factors of basis element idx: (alice, bob) in {0 = identity,
    /// 1, 2 = measurement index + 1}.
    static std::pair<int, int> factors(int idx);
    static const char* label(int idx);
    /// Canonical tie key of an entry: unordered Alice pair * 36 + Bob pair.
    static int entry_key(int i, int j);
};

/// Fills every entry that the data fixes for sharp measurements (squares
/// reduce to identity); entries containing a mixed product sym(A0 A1) or
/// sym(B0 B1) stay free with box [-1, 1]. Unsharp parameters re-fix all of
/// these through apply_measurement_identity.
MomentMatrix build_moment_matrix(const BellCorrelation& corr);

/// Inferred single-party measurement parameters, possibly interval-valued.
struct PartyParams {
    double r0 = 0.0;
    double r1 = 0.0;
    Interval rp0{1.0, 1.0};
    Interval rp1{1.0, 1.0};
    Interval c{-1.0, 1.0};
    bool c_unconstrained = false;

    static PartyParams sharp(double angle_cosine);
};

/// Parameters for one region cell, with the angle interval taken as the hull
/// over the admissible scale corners.
PartyParams party_params_from_cell(const PMRecordSet& records, const RegionCell& cell,
                                   double tol = kTol);

/// Re-fixes every parameter-dependent entry using the symmetrized product
/// rule sym(A0 A1) = r1 A0 + r0 A1 + (c r0' r1' - r0 r1) 1 (and the square
/// rule A^2 = 2 r A + (r'^2 - r^2) 1). Interval parameters produce entry
/// boxes via exact corner enumeration.
MomentMatrix apply_measurement_identity(const MomentMatrix& m, const PartyParams& alice,
                                        const PartyParams& bob);

struct CompletionResult {
    bool feasible = false;
    bool stalled = false;            // residual plateaued above 10 tol everywhere
    MomentMatrix::Mat completed = MomentMatrix::Mat::Zero();
    double residual = 0.0;
    int iterations = 0;
};

/// Alternating projections between the PSD cone and the box/tie constraint
/// set. Feasible iff the residual drops below tol; a residual plateau above
/// 10 tol across all restarts reports stalled (no PSD completion found).
CompletionResult psd_completion(const MomentMatrix& m, double tol = 1e-8,
                                int max_iter = 20000, int restarts = 8,
                                std::uint64_t seed = 0);

/// The eight observable numbers of the minimal scenario.
struct Correlators8 {
    std::array<std::array<double, 2>, 2> joint{};
    std::array<double, 2> alice_marginal{};
    std::array<double, 2> bob_marginal{};
};
Correlators8 correlators_from(const BellCorrelation& corr);

enum class Verdict { SeparableFeasible, Entangled, Inconclusive };

struct SeparabilityVerdict {
    Verdict verdict = Verdict::Inconclusive;
    double residual = 0.0;
    Eigen::Matrix4cd certificate = Eigen::Matrix4cd::Zero();
    int iterations = 0;
};

/// Exact separability oracle for two qubits: alternating projections onto
/// {correlator-matching Hermitian matrices} x {PSD} x {positive partial
/// transpose}. PPT is necessary and sufficient for separability here, so a
/// feasible point certifies a separable explanation; a residual plateau
/// above 10 tol across all restarts reports Entangled.
SeparabilityVerdict separable_feasibility(const Correlators8& correlators,
                                          const std::array<QubitObservable, 2>& alice,
                                          const std::array<QubitObservable, 2>& bob,
                                          double tol = 1e-8, int max_iter = 20000,
                                          int restarts = 8, std::uint64_t seed = 0);

struct VerdictReport {
    Verdict verdict = Verdict::Inconclusive;
    double residual = 0.0;
    PartyParams alice;
    PartyParams bob;
    bool inference_unique = false;
    std::optional<Eigen::Matrix4cd> certificate;
};

/// End-to-end pipeline: condition both parties, infer measurement
/// parameters, re-fix the moment matrix per region cell and test PSD
/// completability; Entangled only when every admissible cell fails. A PPT
/// oracle pass upgrades a completable cell to SeparableFeasible. Throws when
/// the correlation is signaling or not compatible with independent qubit
/// devices at all.
VerdictReport entanglement_verdict(const BellCorrelation& corr,
                                   const GridConfig& grid = {}, double tol = 1e-8,
                                   std::uint64_t seed = 0);

}  // namespace qcorr
