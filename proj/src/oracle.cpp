#include "qcorr/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qcorr {

PMRecordSet realize_pm(const PMRealization& realization) {
    PMRecordSet out;
    for (std::size_t i = 0; i < realization.observables.size(); ++i) {
        out.measurement_labels.push_back("A" + std::to_string(i));
    }
    for (std::size_t k = 0; k < realization.states.size(); ++k) {
        PMRecordSet::Row row;
        row.label = "rho_" + std::to_string(k);
        for (const auto& obs : realization.observables) {
            row.expectations.push_back(expectation(obs, realization.states[k]));
        }
        out.rows.push_back(std::move(row));
    }
    out.validate(1e-9);
    return out;
}

namespace {

Eigen::Matrix4cd kron2(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
    Eigen::Matrix4cd out;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
        }
    }
    return out;
}

}  // namespace

BellCorrelation realize_bell(const Eigen::Matrix4cd& rho,
                             const std::array<QubitObservable, 2>& alice,
                             const std::array<QubitObservable, 2>& bob, double tol) {
    if ((rho - rho.adjoint()).norm() > tol) {
        throw std::invalid_argument("realize_bell: state is not Hermitian");
    }
    if (std::abs(rho.trace().real() - 1.0) > tol) {
        throw std::invalid_argument("realize_bell: state trace != 1");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(rho);
    if (es.eigenvalues().minCoeff() < -tol) {
        throw std::invalid_argument("realize_bell: state is not PSD");
    }

    std::array<Eigen::Matrix2cd, 2> ae, be;
    BellCorrelation corr;
    for (int alpha = 0; alpha < 2; ++alpha) ae[alpha] = to_hermitian(alice[alpha]);
    for (int beta = 0; beta < 2; ++beta) be[beta] = to_hermitian(bob[beta]);
    for (int alpha = 0; alpha < 2; ++alpha) {
        for (int beta = 0; beta < 2; ++beta) {
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) {
                    const Eigen::Matrix2cd ea =
                        0.5 * (id2() + (a == 0 ? 1.0 : -1.0) * ae[alpha]);
                    const Eigen::Matrix2cd fb =
                        0.5 * (id2() + (b == 0 ? 1.0 : -1.0) * be[beta]);
                    corr.p[alpha][beta][a][b] =
                        (rho * kron2(ea, fb)).trace().real();
                }
            }
        }
    }
    corr.validate(1e-7);
    return corr;
}

Eigen::Matrix4cd random_two_qubit_state(RngStream& rng, bool pure) {
    using namespace std::complex_literals;
    if (pure) {
        Eigen::Vector4cd psi;
        for (int k = 0; k < 4; ++k) psi(k) = rng.gaussian() + 1i * rng.gaussian();
        psi.normalize();
        return psi * psi.adjoint();
    }
    Eigen::Matrix4cd g;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) g(i, j) = rng.gaussian() + 1i * rng.gaussian();
    }
    Eigen::Matrix4cd rho = g * g.adjoint();
    return rho / rho.trace().real();
}

namespace {

// Distance of a row's target pair from what the measurement parameters can
// reach with some state in the unit disk of the axis plane (exact inner
// solve; a0 = z, a1 at angle phi).
double row_error(double r0, double rp0, double r1, double rp1, double c,
                 double T0, double T1, Eigen::Vector2d* arg_state = nullptr) {
    const double sq = std::sqrt(std::max(1.0 - c * c, 0.0));
    const bool deg0 = rp0 < 1e-12;
    const bool deg1 = rp1 < 1e-12;
    auto err_at = [&](double sz, double sx) {
        const double e0 = std::abs(r0 + rp0 * sz - T0);
        const double e1 = std::abs(r1 + rp1 * (c * sz + sq * sx) - T1);
        return std::max(e0, e1);
    };
    if (deg0 && deg1) {
        if (arg_state) *arg_state = {0.0, 0.0};
        return std::max(std::abs(r0 - T0), std::abs(r1 - T1));
    }
    if (deg0 || deg1) {
        // One expectation is constant; the other reaches [r - r', r + r'].
        const double fixed = deg0 ? std::abs(r0 - T0) : std::abs(r1 - T1);
        const double need = deg0 ? (T1 - r1) / std::max(rp1, 1e-300)
                                 : (T0 - r0) / std::max(rp0, 1e-300);
        const double reach = std::clamp(need, -1.0, 1.0);
        const double live = deg0 ? rp1 * std::abs(need - reach)
                                 : rp0 * std::abs(need - reach);
        if (arg_state) {
            // State along the live axis reaches the clamped value exactly.
            *arg_state = deg0 ? Eigen::Vector2d(reach * c, reach * sq)
                              : Eigen::Vector2d(reach, 0.0);
        }
        return std::max(fixed, live);
    }
    const double U = (T0 - r0) / rp0;
    const double V = (T1 - r1) / rp1;
    // Reachable (u, v) pairs form the ellipse u^2 + v^2 - 2 c u v <= 1 - c^2.
    if (U * U + V * V - 2.0 * c * U * V <= 1.0 - c * c + 1e-15) {
        if (arg_state) {
            const double sx = sq > 1e-12 ? (V - c * U) / sq : 0.0;
            *arg_state = {U, sx};
        }
        return 0.0;
    }
    // Otherwise the optimum sits on the pure-state circle.
    double best = std::numeric_limits<double>::infinity();
    double best_psi = 0.0;
    constexpr int kCoarse = 96;
    for (int k = 0; k < kCoarse; ++k) {
        const double psi = 2.0 * M_PI * k / kCoarse;
        const double e = err_at(std::cos(psi), std::sin(psi));
        if (e < best) {
            best = e;
            best_psi = psi;
        }
    }
    double span = 2.0 * M_PI / kCoarse;
    for (int round = 0; round < 24; ++round) {
        const double lo = best_psi - span;
        const double hi = best_psi + span;
        for (int k = 0; k <= 8; ++k) {
            const double psi = lo + (hi - lo) * k / 8.0;
            const double e = err_at(std::cos(psi), std::sin(psi));
            if (e < best) {
                best = e;
                best_psi = psi;
            }
        }
        span /= 4.0;
    }
    if (arg_state) *arg_state = {std::cos(best_psi), std::sin(best_psi)};
    return best;
}

struct Candidate {
    double r0, rp0, r1, rp1, phi;
};

double candidate_error(const PMRecordSet& records, const Candidate& cand,
                       double early_exit) {
    const double c = std::cos(cand.phi);
    double worst = 0.0;
    for (const auto& row : records.rows) {
        worst = std::max(worst, row_error(cand.r0, cand.rp0, cand.r1, cand.rp1, c,
                                          row.expectations[0], row.expectations[1]));
        if (worst > early_exit) return worst;
    }
    return worst;
}

}  // namespace

BruteForceResult brute_force_feasible(const PMRecordSet& records,
                                      const BruteForceConfig& cfg) {
    records.validate();
    if (records.measurement_count() != 2) {
        throw std::invalid_argument("brute_force_feasible: needs exactly 2 measurements");
    }
    if (records.rows.empty() || records.rows.size() > 4) {
        throw std::invalid_argument("brute_force_feasible: supports 1..4 states");
    }

    Candidate best{0, 1, 0, 1, M_PI / 2};
    double best_err = std::numeric_limits<double>::infinity();

    auto scan = [&](double c_r0, double s_r0, double c_rp0, double s_rp0,
                    double c_r1, double s_r1, double c_rp1, double s_rp1,
                    double c_phi, double s_phi, int n_off, int n_sc, int n_ang) {
        for (int a = 0; a < n_off; ++a) {
            const double r0 = std::clamp(c_r0 + s_r0 * (a - (n_off - 1) / 2.0), -1.0, 1.0);
            for (int b = 0; b < n_sc; ++b) {
                const double rp0 = std::clamp(c_rp0 + s_rp0 * (b - (n_sc - 1) / 2.0),
                                              0.0, 1.0 - std::abs(r0));
                for (int d = 0; d < n_off; ++d) {
                    const double r1 =
                        std::clamp(c_r1 + s_r1 * (d - (n_off - 1) / 2.0), -1.0, 1.0);
                    for (int e = 0; e < n_sc; ++e) {
                        const double rp1 = std::clamp(
                            c_rp1 + s_rp1 * (e - (n_sc - 1) / 2.0), 0.0,
                            1.0 - std::abs(r1));
                        for (int f = 0; f < n_ang; ++f) {
                            const double phi = std::clamp(
                                c_phi + s_phi * (f - (n_ang - 1) / 2.0), 0.0, M_PI);
                            const Candidate cand{r0, rp0, r1, rp1, phi};
                            const double err =
                                candidate_error(records, cand, best_err);
                            if (err < best_err) {
                                best_err = err;
                                best = cand;
                            }
                        }
                    }
                }
            }
        }
    };

    // Coarse pass over the full gauge-reduced space.
    const int n_off = std::max(cfg.offset_n, 3);
    const int n_sc = std::max(cfg.scale_n, 3);
    const int n_ang = std::max(cfg.angle_n, 3);
    scan(0.0, 2.0 / (n_off - 1), 0.5, 1.0 / (n_sc - 1), 0.0, 2.0 / (n_off - 1), 0.5,
         1.0 / (n_sc - 1), M_PI / 2, M_PI / (n_ang - 1), n_off, n_sc, n_ang);

    double s_off = 2.0 / (n_off - 1);
    double s_sc = 1.0 / (n_sc - 1);
    double s_ang = M_PI / (n_ang - 1);
    for (int round = 0; round < cfg.refine_rounds; ++round) {
        s_off /= 3.0;
        s_sc /= 3.0;
        s_ang /= 3.0;
        scan(best.r0, s_off, best.rp0, s_sc, best.r1, s_off, best.rp1, s_sc, best.phi,
             s_ang, 7, 7, 7);
    }

    BruteForceResult out;
    out.best_error = best_err;
    out.feasible = best_err <= cfg.tol;
    out.r0 = best.r0;
    out.r_prime0 = best.rp0;
    out.r1 = best.r1;
    out.r_prime1 = best.rp1;
    out.c = std::cos(best.phi);
    for (const auto& row : records.rows) {
        Eigen::Vector2d szx;  // (s_z, s_x), the axis plane
        row_error(best.r0, best.rp0, best.r1, best.rp1, out.c, row.expectations[0],
                  row.expectations[1], &szx);
        out.states.emplace_back(szx.y(), 0.0, szx.x());
    }
    return out;
}

namespace {

// Least-squares projection of a joint table onto the two-parameter Bell
// family: p = w + x dPR + y dL with fixed direction vectors.
SamplePoint project_qbell(const BellCorrelation& corr) {
    double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
    for (int alpha = 0; alpha < 2; ++alpha) {
        for (int beta = 0; beta < 2; ++beta) {
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) {
                    const double pr = ((a ^ b) == (alpha & beta)) ? 0.5 : 0.0;
                    const double pl = (a == 0 && b == 0) ? 1.0 : 0.0;
                    const double dpr = pr - 0.25;
                    const double dl = pl - 0.25;
                    const double dp = corr.p[alpha][beta][a][b] - 0.25;
                    a11 += dpr * dpr;
                    a12 += dpr * dl;
                    a22 += dl * dl;
                    b1 += dpr * dp;
                    b2 += dl * dp;
                }
            }
        }
    }
    const double det = a11 * a22 - a12 * a12;
    SamplePoint pt;
    pt.x = (b1 * a22 - b2 * a12) / det;
    pt.y = (a11 * b2 - a12 * b1) / det;
    double sse = 0.0;
    for (int alpha = 0; alpha < 2; ++alpha) {
        for (int beta = 0; beta < 2; ++beta) {
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) {
                    const double pr = ((a ^ b) == (alpha & beta)) ? 0.5 : 0.0;
                    const double pl = (a == 0 && b == 0) ? 1.0 : 0.0;
                    const double model =
                        0.25 + pt.x * (pr - 0.25) + pt.y * (pl - 0.25);
                    const double diff = corr.p[alpha][beta][a][b] - model;
                    sse += diff * diff;
                }
            }
        }
    }
    pt.residual = std::sqrt(sse);
    return pt;
}

double qpm_sse(const PMRecordSet& rec, double x, double y) {
    PMRecordSet model;
    try {
        model = qpm(x, y);
    } catch (const std::invalid_argument&) {
        return std::numeric_limits<double>::infinity();
    }
    double sse = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
        for (int m = 0; m < 2; ++m) {
            const double diff =
                rec.rows[k].expectations[m] - model.rows[k].expectations[m];
            sse += diff * diff;
        }
    }
    return sse;
}

SamplePoint project_qpm(const PMRecordSet& rec) {
    double bx = 0, by = 0, bsse = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 60; ++i) {
        for (int j = 0; j <= 60; ++j) {
            const double x = -0.2 + 1.4 * i / 60.0;
            const double y = -0.9 + 1.8 * j / 60.0;
            const double sse = qpm_sse(rec, x, y);
            if (sse < bsse) {
                bsse = sse;
                bx = x;
                by = y;
            }
        }
    }
    double span = 1.4 / 60.0;
    for (int round = 0; round < 12; ++round) {
        for (int i = -4; i <= 4; ++i) {
            for (int j = -4; j <= 4; ++j) {
                const double x = bx + span * i / 4.0;
                const double y = by + span * j / 4.0;
                const double sse = qpm_sse(rec, x, y);
                if (sse < bsse) {
                    bsse = sse;
                    bx = x;
                    by = y;
                }
            }
        }
        span /= 4.0;
    }
    return {bx, by, std::sqrt(bsse)};
}

QubitObservable planar_observable(double angle, double r, double r_prime) {
    return QubitObservable(r, r_prime,
                           Eigen::Vector3d(std::sin(angle), 0.0, std::cos(angle)));
}

}  // namespace

std::vector<SamplePoint> sample_achievable(Family family, int n, std::uint64_t seed,
                                           bool projective, double tol) {
    std::vector<SamplePoint> out;
    RngStream root(seed);
    for (int trial = 0; trial < n; ++trial) {
        RngStream rng = root.split(trial);
        // Even trials are biased toward the family's own realizations (the
        // noisy maximally-entangled edge and the aligned deterministic edge);
        // odd trials are fully random for coverage.
        const int kind = trial % 4;
        if (family == Family::QBell) {
            Eigen::Matrix4cd rho;
            std::array<QubitObservable, 2> aobs = {
                QubitObservable::projective(Eigen::Vector3d::UnitZ()),
                QubitObservable::projective(Eigen::Vector3d::UnitX())};
            std::array<QubitObservable, 2> bobs = aobs;
            if (kind == 0) {
                // Noisy maximally entangled state with the standard planar
                // setting geometry lands exactly on the y = 0 slice.
                const double v = rng.uniform();
                Eigen::Vector4cd psi = Eigen::Vector4cd::Zero();
                psi(0) = psi(3) = 1.0 / std::sqrt(2.0);
                rho = v * (psi * psi.adjoint()) +
                      (1.0 - v) * 0.25 * Eigen::Matrix4cd::Identity();
                double ra = 1.0, rb = 1.0;
                if (!projective) {
                    ra = rng.uniform(0.25, 1.0);
                    rb = rng.uniform(0.25, 1.0);
                }
                aobs = {planar_observable(0.0, 0.0, ra),
                        planar_observable(M_PI / 2, 0.0, ra)};
                bobs = {planar_observable(M_PI / 4, 0.0, rb),
                        planar_observable(-M_PI / 4, 0.0, rb)};
            } else if (kind == 2) {
                // Noisy aligned deterministic point: the x = 0 column.
                const double w = rng.uniform();
                Eigen::Matrix4cd det = Eigen::Matrix4cd::Zero();
                det(0, 0) = 1.0;
                rho = w * det + (1.0 - w) * 0.25 * Eigen::Matrix4cd::Identity();
                aobs = {planar_observable(0.0, 0.0, 1.0),
                        planar_observable(0.0, 0.0, 1.0)};
                bobs = aobs;
            } else {
                rho = random_two_qubit_state(rng, rng.uniform() < 0.5);
                for (int k = 0; k < 2; ++k) {
                    aobs[k] = random_povm(rng, projective);
                    bobs[k] = random_povm(rng, projective);
                }
            }
            SamplePoint pt = project_qbell(realize_bell(rho, aobs, bobs));
            if (pt.residual < tol) out.push_back(pt);
        } else {
            PMRealization real;
            if (kind == 0 && !projective) {
                // Exact y = 0 family members via half-offset effects on the
                // four planar states (+-x, 0, +-x).
                const double x = rng.uniform(0.0, 1.0 / std::sqrt(2.0));
                real.observables = {planar_observable(0.0, 0.5, 0.5),
                                    planar_observable(M_PI / 2, 0.5, 0.5)};
                for (auto [sx, sz] : {std::pair{x, x}, {-x, -x}, {-x, x}, {x, -x}}) {
                    real.states.push_back(BlochState(Eigen::Vector3d(sx, 0.0, sz)));
                }
            } else if (kind == 2 && !projective) {
                // Exact x = 0 column: identical measurements, two states on
                // the shared axis.
                const double y = rng.uniform(0.0, 0.95);
                const QubitObservable m = planar_observable(0.0, 0.5, 0.5);
                real.observables = {m, m};
                const double sz = 2.0 * y / (1.0 + y);
                real.states.push_back(BlochState(Eigen::Vector3d(0, 0, sz)));
                real.states.push_back(BlochState(Eigen::Vector3d(0, 0, 0)));
                real.states.push_back(BlochState(Eigen::Vector3d(0, 0, sz)));
                real.states.push_back(BlochState(Eigen::Vector3d(0, 0, 0)));
            } else {
                for (int k = 0; k < 2; ++k) {
                    real.observables.push_back(random_povm(rng, projective));
                }
                for (int k = 0; k < 4; ++k) {
                    real.states.push_back(random_state(rng, rng.uniform() < 0.5));
                }
            }
            SamplePoint pt = project_qpm(realize_pm(real));
            if (pt.residual < tol) out.push_back(pt);
        }
    }
    return out;
}

}  // namespace qcorr
