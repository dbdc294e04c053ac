#include <doctest.h>

#include <cmath>

#include "qcorr/entanglement.hpp"
#include "qcorr/oracle.hpp"

using namespace qcorr;

namespace {

const double kCos12 = std::cos(M_PI / 12);

BellCorrelation pi12_correlation() {
    // Correlators (1, c; c, 1), vanishing marginals.
    BellCorrelation corr;
    const double e[2][2] = {{1.0, kCos12}, {kCos12, 1.0}};
    for (int al = 0; al < 2; ++al) {
        for (int be = 0; be < 2; ++be) {
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) {
                    corr.p[al][be][a][b] =
                        (1.0 + ((a + b) % 2 == 0 ? 1.0 : -1.0) * e[al][be]) / 4.0;
                }
            }
        }
    }
    return corr;
}

std::array<QubitObservable, 2> planar_pair(double t0, double t1) {
    return {QubitObservable::projective(
                Eigen::Vector3d(std::sin(t0), 0.0, std::cos(t0))),
            QubitObservable::projective(
                Eigen::Vector3d(std::sin(t1), 0.0, std::cos(t1)))};
}

Eigen::Matrix4cd phi_plus() {
    Eigen::Vector4cd psi = Eigen::Vector4cd::Zero();
    psi(0) = 1.0 / std::sqrt(2.0);
    psi(3) = 1.0 / std::sqrt(2.0);
    return psi * psi.adjoint();
}

int index_of(const char* name) {
    for (int k = 0; k < MomentMatrix::kSize; ++k) {
        if (std::string(MomentMatrix::label(k)) == name) return k;
    }
    return -1;
}

}  // namespace

TEST_CASE("build_moment_matrix: white noise and pi/12 entries") {
    const MomentMatrix white = build_moment_matrix(qbell(0.0, 0.0));
    for (int i = 0; i < 9; ++i) {
        for (int j = 0; j < 9; ++j) {
            if (white.status[i][j] == MomentMatrix::Status::Free) continue;
            CHECK(white.value(i, j) == doctest::Approx(i == j ? 1.0 : 0.0));
        }
    }

    const MomentMatrix m = build_moment_matrix(pi12_correlation());
    const int one = index_of("1");
    CHECK(m.value(one, index_of("A0B0")) == doctest::Approx(1.0));
    CHECK(m.value(one, index_of("A0B1")) == doctest::Approx(kCos12));
    CHECK(m.value(index_of("A0"), index_of("B1")) == doctest::Approx(kCos12));
    CHECK(m.status[index_of("A0")][index_of("A1")] == MomentMatrix::Status::Free);
    CHECK(m.status[index_of("A0B0")][index_of("A1B1")] == MomentMatrix::Status::Free);
    CHECK(m.status[one][index_of("A0B0")] == MomentMatrix::Status::FixedPhysical);
}

TEST_CASE("apply_measurement_identity anchors") {
    const MomentMatrix base = build_moment_matrix(pi12_correlation());

    // Sharp parties with pinned angle: the mixed product becomes c itself.
    const MomentMatrix pinned = apply_measurement_identity(
        base, PartyParams::sharp(kCos12), PartyParams::sharp(kCos12));
    CHECK(pinned.value(index_of("A0"), index_of("A1")) == doctest::Approx(kCos12));
    CHECK(pinned.status[index_of("A0")][index_of("A1")] ==
          MomentMatrix::Status::FixedByIdentity);
    // Doubly mixed entry factorizes into c_A c_B.
    CHECK(pinned.value(index_of("A0B0"), index_of("A1B1")) ==
          doctest::Approx(kCos12 * kCos12));

    // Constant first observable: sym(A0 A1) = A1 regardless of the angle.
    PartyParams constant;
    constant.r0 = 1.0;
    constant.rp0 = {0.0, 0.0};
    constant.r1 = 0.0;
    constant.rp1 = {1.0, 1.0};
    constant.c = {-1.0, 1.0};
    constant.c_unconstrained = true;
    const MomentMatrix ident = apply_measurement_identity(
        build_moment_matrix(qbell(0.3, 0.1)), constant, PartyParams::sharp(0.0));
    const double a1_marginal = ident.value(index_of("1"), index_of("A1"));
    CHECK(ident.value(index_of("A0"), index_of("A1")) ==
          doctest::Approx(a1_marginal).epsilon(1e-12));
    CHECK(ident.lo(index_of("A0"), index_of("A1")) ==
          doctest::Approx(ident.hi(index_of("A0"), index_of("A1"))).epsilon(1e-12));

    // Orthogonal sharp pair: the mixed product vanishes.
    const MomentMatrix ortho = apply_measurement_identity(
        base, PartyParams::sharp(0.0), PartyParams::sharp(0.0));
    CHECK(ortho.value(index_of("A0"), index_of("A1")) == doctest::Approx(0.0));
}

TEST_CASE("psd_completion: fixed identity, realization, triangle violation") {
    MomentMatrix eye;
    for (int i = 0; i < 9; ++i) {
        for (int j = 0; j < 9; ++j) {
            const double v = i == j ? 1.0 : 0.0;
            eye.value(i, j) = v;
            eye.lo(i, j) = v;
            eye.hi(i, j) = v;
            eye.status[i][j] = MomentMatrix::Status::FixedPhysical;
        }
    }
    const CompletionResult ok = psd_completion(eye);
    CHECK(ok.feasible);
    CHECK(ok.iterations <= 1);

    // A sampled sharp realization admits a completion.
    RngStream rng(2);
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::Matrix4cd rho = random_two_qubit_state(rng, trial % 2 == 0);
        const std::array<QubitObservable, 2> alice{random_povm(rng, true),
                                                   random_povm(rng, true)};
        const std::array<QubitObservable, 2> bob{random_povm(rng, true),
                                                 random_povm(rng, true)};
        const MomentMatrix m = build_moment_matrix(realize_bell(rho, alice, bob));
        const CompletionResult comp = psd_completion(m, 1e-8, 20000, 2);
        CHECK(comp.feasible);
        Eigen::SelfAdjointEigenSolver<MomentMatrix::Mat> es(comp.completed);
        CHECK(es.eigenvalues().minCoeff() >= -1e-6);
    }

    // Perfect correlations with an inconsistent cross correlator cannot be
    // completed once the local angles are pinned.
    BellCorrelation broken;
    const double e[2][2] = {{1.0, -1.0}, {0.0, 1.0}};
    for (int al = 0; al < 2; ++al)
        for (int be = 0; be < 2; ++be)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    broken.p[al][be][a][b] =
                        (1.0 + ((a + b) % 2 == 0 ? 1.0 : -1.0) * e[al][be]) / 4.0;
    const MomentMatrix bad = apply_measurement_identity(
        build_moment_matrix(broken), PartyParams::sharp(0.0),
        PartyParams::sharp(0.0));
    const CompletionResult fail = psd_completion(bad, 1e-8, 4000, 2);
    CHECK_FALSE(fail.feasible);
    CHECK(fail.residual > 1e-7);
}

TEST_CASE("separable_feasibility: pi/12 entangled, white noise separable") {
    const auto obs = planar_pair(M_PI / 4, M_PI / 3);
    const BellCorrelation reproduced = realize_bell(phi_plus(), obs, obs);
    const Correlators8 c8 = correlators_from(pi12_correlation());
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            CHECK(reproduced.correlator(a, b) ==
                  doctest::Approx(c8.joint[a][b]).epsilon(1e-9));
        }
    }
    // The reproducing state itself violates the partial-transpose test.
    Eigen::Matrix4cd pt;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    pt(2 * i + a, 2 * j + b) = phi_plus()(2 * i + b, 2 * j + a);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(pt);
    CHECK(es.eigenvalues().minCoeff() <= -0.49);

    const SeparabilityVerdict verdict = separable_feasibility(c8, obs, obs);
    CHECK(verdict.verdict == Verdict::Entangled);
    CHECK(verdict.residual > 1e-7);

    const Correlators8 noise = correlators_from(qbell(0.0, 0.0));
    const SeparabilityVerdict sep = separable_feasibility(noise, obs, obs);
    CHECK(sep.verdict == Verdict::SeparableFeasible);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> ec(sep.certificate);
    CHECK(ec.eigenvalues().minCoeff() >= -1e-6);
    CHECK(sep.certificate.trace().real() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("separable_feasibility accepts product-state correlations") {
    RngStream rng(33);
    for (int trial = 0; trial < 8; ++trial) {
        const BlochState sa = random_state(rng, false);
        const BlochState sb = random_state(rng, false);
        Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
        const Eigen::Matrix2cd da = to_density(sa);
        const Eigen::Matrix2cd db = to_density(sb);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) rho.block<2, 2>(2 * i, 2 * j) = da(i, j) * db;
        const std::array<QubitObservable, 2> alice{random_povm(rng, true),
                                                   random_povm(rng, true)};
        const std::array<QubitObservable, 2> bob{random_povm(rng, true),
                                                 random_povm(rng, true)};
        const Correlators8 c8 = correlators_from(realize_bell(rho, alice, bob));
        const SeparabilityVerdict verdict = separable_feasibility(c8, alice, bob);
        CHECK(verdict.verdict == Verdict::SeparableFeasible);
    }
}

TEST_CASE("separable_feasibility is invariant under outcome relabeling") {
    const auto obs = planar_pair(M_PI / 4, M_PI / 3);
    Correlators8 c8 = correlators_from(pi12_correlation());
    // Negate Alice's first observable and the correlators it enters.
    Correlators8 flipped = c8;
    flipped.joint[0][0] *= -1.0;
    flipped.joint[0][1] *= -1.0;
    flipped.alice_marginal[0] *= -1.0;
    const std::array<QubitObservable, 2> alice_neg{
        QubitObservable(0.0, 1.0, -obs[0].axis), obs[1]};
    const SeparabilityVerdict a = separable_feasibility(c8, obs, obs);
    const SeparabilityVerdict b = separable_feasibility(flipped, alice_neg, obs);
    CHECK(a.verdict == b.verdict);
}

TEST_CASE("pi/12 correlation is local (all CHSH symmetrizations within 2)") {
    const Correlators8 c8 = correlators_from(pi12_correlation());
    double worst = 0.0;
    for (int s0 = -1; s0 <= 1; s0 += 2) {
        for (int s1 = -1; s1 <= 1; s1 += 2) {
            for (int s2 = -1; s2 <= 1; s2 += 2) {
                const double v = std::abs(s0 * c8.joint[0][0] + s1 * c8.joint[0][1] +
                                          s2 * c8.joint[1][0] -
                                          s0 * s1 * s2 * c8.joint[1][1]);
                worst = std::max(worst, v);
            }
        }
    }
    CHECK(worst <= 2.0 + 1e-12);
}

TEST_CASE("entanglement_verdict pipeline") {
    const VerdictReport pi12 = entanglement_verdict(pi12_correlation());
    CHECK(pi12.verdict == Verdict::Entangled);
    CHECK(pi12.inference_unique);
    CHECK(pi12.alice.c.mid() == doctest::Approx(kCos12).epsilon(1e-9));

    // The same verdict must come out of the realized correlation directly,
    // and for other relative angles with the same perfect-correlation
    // structure (the data stays local for small angles yet rigid enough to
    // pin the devices).
    for (double delta : {M_PI / 12, 0.2, 0.7}) {
        const auto obs = planar_pair(M_PI / 4, M_PI / 4 + delta);
        const VerdictReport realized =
            entanglement_verdict(realize_bell(phi_plus(), obs, obs));
        CHECK(realized.verdict == Verdict::Entangled);
    }

    const VerdictReport local = entanglement_verdict(qbell(0.5, 0.0));
    CHECK(local.verdict != Verdict::Entangled);

    const VerdictReport det = entanglement_verdict(qbell(0.0, 1.0));
    CHECK(det.verdict == Verdict::SeparableFeasible);

    // Product-state correlations must come out separable-feasible.
    RngStream rng(71);
    for (int trial = 0; trial < 3; ++trial) {
        const BlochState sa = random_state(rng, false);
        const BlochState sb = random_state(rng, false);
        Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
        const Eigen::Matrix2cd da = to_density(sa);
        const Eigen::Matrix2cd db = to_density(sb);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) rho.block<2, 2>(2 * i, 2 * j) = da(i, j) * db;
        const auto obs = planar_pair(0.3, 1.1);
        const VerdictReport rep =
            entanglement_verdict(realize_bell(rho, obs, obs));
        CHECK(rep.verdict == Verdict::SeparableFeasible);
    }

    BellCorrelation sig = qbell(0.0, 0.0);
    sig.p[0][1][0][0] += 0.1;
    sig.p[0][1][0][1] += 0.1;
    sig.p[0][1][1][0] -= 0.1;
    sig.p[0][1][1][1] -= 0.1;
    CHECK_THROWS_AS(entanglement_verdict(sig), std::invalid_argument);
}
