#pragma once

#include <array>

#include "qcorr/records.hpp"

namespace qcorr {

/// Joint distribution table p(a,b|alpha,beta) of a two-party, two-setting,
/// two-outcome scenario, indexed p[alpha][beta][a][b].
struct BellCorrelation {
    std::array<std::array<std::array<std::array<double, 2>, 2>, 2>, 2> p{};

    double& prob(int alpha, int beta, int a, int b) { return p[alpha][beta][a][b]; }
    double prob(int alpha, int beta, int a, int b) const {
        return p[alpha][beta][a][b];
    }

    /// sum_{ab} (-1)^(a+b) p(ab|alpha beta)
    double correlator(int alpha, int beta) const;
    /// sum_{ab} (-1)^a p(ab|alpha beta); non-signaling makes it beta-free.
    double marginal_alice(int alpha, int beta) const;
    double marginal_bob(int beta, int alpha) const;

    /// Entries in [0, 1] and each setting pair normalized. Throws otherwise.
    void validate(double tol = kTol) const;
};

enum class Party { Alice, Bob };

/// Records obtained by conditioning one party's states on the other party's
/// (setting, outcome). Row labels are "b|beta", weights are p(b|beta).
struct ConditionalPM {
    Party party;
    PMRecordSet records;
};

/// Max over parties, outcomes and setting pairs of the marginal difference
/// across the remote setting; <= tol means non-signaling.
double nonsignaling_check(const BellCorrelation& corr);

/// Conditions `party`'s states on the other party's outcomes. Rows whose
/// conditioning probability is <= tol are dropped. Throws if a conditioning
/// probability depends on this party's setting beyond tol (signaling data).
ConditionalPM bell_to_conditional(const BellCorrelation& corr, Party party,
                                  double tol = kTol);

/// Two-parameter family mixing a PR box (weight x), the deterministic
/// all-(0,0) point (weight y) and white noise. Throws when some entry leaves
/// [0, 1] (entry-wise validation, no hard-coded domain).
BellCorrelation qbell(double x, double y, double tol = kTol);

/// Four-state, two-measurement family of mean values with weights
/// (1 +/- y)/2. Throws when a mean leaves [-1, 1] or a weight is invalid.
PMRecordSet qpm(double x, double y, double tol = kTol);

}  // namespace qcorr
