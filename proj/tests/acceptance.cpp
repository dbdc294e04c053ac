// Acceptance suite: runs every gate criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exits nonzero if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "qcorr/entanglement.hpp"
#include "qcorr/inference.hpp"
#include "qcorr/oracle.hpp"
#include "qcorr/witnesses.hpp"

using namespace qcorr;

namespace {

struct Criterion {
    std::string name;
    std::function<bool(std::string&)> run;
};

const double kCos12 = std::cos(M_PI / 12);
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

bool check(bool ok, std::string& detail, const std::string& msg) {
    if (!ok && detail.empty()) detail = msg;
    return ok;
}

BellCorrelation pi12_correlation() {
    BellCorrelation corr;
    const double e[2][2] = {{1.0, kCos12}, {kCos12, 1.0}};
    for (int al = 0; al < 2; ++al)
        for (int be = 0; be < 2; ++be)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    corr.p[al][be][a][b] =
                        (1.0 + ((a + b) % 2 == 0 ? 1.0 : -1.0) * e[al][be]) / 4.0;
    return corr;
}

PMRecordSet pi12_records() {
    return make_records(
        {{1.0, kCos12}, {-1.0, -kCos12}, {kCos12, 1.0}, {-kCos12, -1.0}});
}

std::array<QubitObservable, 2> planar_pair(double t0, double t1) {
    return {QubitObservable::projective(
                Eigen::Vector3d(std::sin(t0), 0.0, std::cos(t0))),
            QubitObservable::projective(
                Eigen::Vector3d(std::sin(t1), 0.0, std::cos(t1)))};
}

// 1. Sharp/unsharp separation on the minimal-protocol records.
bool criterion_separation(std::string& detail) {
    const PMRecordSet rec = make_records({{1, 1}, {1, -1}});
    const FeasibilityReport pvm = pvm_feasible(rec, 0, 1);
    bool ok = check(std::abs(pvm.max_g_minus - 1.0) <= 1e-12, detail,
                    "max g- != 1");
    ok &= check(std::abs(pvm.min_g_plus + 1.0) <= 1e-12, detail, "min g+ != -1");
    ok &= check(!pvm.feasible, detail, "sharp criterion did not reject");
    const FeasibilityReport povm = povm_feasible(rec, 0, 1);
    ok &= check(povm.feasible, detail, "unsharp criterion rejected");
    ok &= check(povm.witness_params &&
                    std::abs(povm.witness_params->r_i - 1.0) <= 1e-9 &&
                    std::abs(povm.witness_params->r_j) <= 1e-9,
                detail, "attaining offsets are not (1, 0)");
    return ok;
}

// 2. Sharp threshold of the mixing family at y = 0.
bool criterion_threshold(std::string& detail) {
    const auto pts = scan_boundary(Family::QBell, CriterionMode::Pvm, {0.0}, 1e-6,
                                   ScanAxis::LargestXForY);
    return check(pts.size() == 1 && std::abs(pts[0].star - 0.707107) <= 1e-4,
                 detail,
                 "x* = " + std::to_string(pts.empty() ? -1.0 : pts[0].star));
}

// 3. Arcsin criterion anchors plus closed-form agreement on a 50 x 50 grid.
bool criterion_arcsin(std::string& detail) {
    bool ok = check(std::abs(npa_arcsin(qbell(kInvSqrt2, 0.0)).value - M_PI) <= 1e-9,
                    detail, "value at (1/sqrt2, 0) is not pi");
    ok &= check(std::abs(npa_arcsin(qbell(1.0, 0.0)).value - 2.0 * M_PI) <= 1e-9,
                detail, "value at (1, 0) is not 2 pi");
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        for (int j = 0; j < 50; ++j) {
            const double x = 0.95 * i / 49.0;
            const double y = j / 49.0 * (0.95 - x);
            const double d1 = (x + y - y * y) / (1.0 - y * y);
            const double d2 = (y - x - y * y) / (1.0 - y * y);
            const double closed = std::abs(3.0 * std::asin(d1) - std::asin(d2));
            worst = std::max(worst,
                             std::abs(npa_arcsin(qbell(x, y)).value - closed));
        }
    }
    ok &= check(worst <= 1e-9, detail,
                "closed-form mismatch " + std::to_string(worst));
    return ok;
}

// 4. Determinant witness closed form and saturation.
bool criterion_bqb(std::string& detail) {
    const std::array<std::string, 4> arr{"0|0", "1|0", "0|1", "1|1"};
    RngStream rng(404);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const double y = rng.uniform(0.0, 0.85);
        const double x = rng.uniform(0.0, 0.95 - y);
        const double closed =
            2.0 * x * (x + y - y * y) / ((1.0 - y * y) * (1.0 - y * y));
        worst = std::max(worst, std::abs(bqb_det(qpm(x, y), arr).value - closed));
    }
    bool ok = check(worst <= 1e-9, detail,
                    "closed-form mismatch " + std::to_string(worst));
    ok &= check(std::abs(bqb_det(qpm(kInvSqrt2, 0.0), arr).value - 1.0) <= 1e-9,
                detail, "no saturation at (1/sqrt2, 0)");
    return ok;
}

// 5. Parametric boundary: feasible on the curve, infeasible 0.01 above, and
// the closed-form offset sits in the inferred region.
bool criterion_sm_boundary(std::string& detail) {
    GridConfig cfg;
    cfg.tol = 1e-6;
    cfg.refine_rounds = 8;
    const double theta_lo = 1.075;  // inside the validity branch
    const double theta_hi = 0.495 * M_PI;
    for (int k = 0; k < 20; ++k) {
        const double theta = theta_lo + (theta_hi - theta_lo) * k / 19.0;
        const SmBoundaryPoint p = sm_boundary(theta);
        if (!check(p.on_branch, detail, "theta off the validity branch")) {
            return false;
        }
        const PMRecordSet on =
            bell_to_conditional(qbell(p.family_x, p.family_y), Party::Alice).records;
        GridConfig hinted = cfg;
        hinted.hints.push_back({0.0, p.r});
        if (!check(povm_feasible(on, 0, 1, hinted).feasible, detail,
                   "curve point infeasible at theta " + std::to_string(theta))) {
            return false;
        }
        const PMRecordSet above =
            bell_to_conditional(qbell(p.family_x, p.family_y + 1e-2), Party::Alice)
                .records;
        if (!check(!povm_feasible(above, 0, 1, hinted).feasible, detail,
                   "point above the curve is feasible at theta " +
                       std::to_string(theta))) {
            return false;
        }
        const ParamRegion region = infer_r_region(on, 0, 1, hinted);
        bool found = false;
        for (const auto& cell : region.cells) {
            if (std::abs(cell.r_i) <= region.grid_step &&
                std::abs(cell.r_j - p.r) <= region.grid_step) {
                found = true;
                break;
            }
        }
        if (!check(found, detail,
                   "closed-form offset outside the region at theta " +
                       std::to_string(theta))) {
            return false;
        }
    }
    return true;
}

// 6. Monte Carlo soundness over seeded realizations.
bool criterion_soundness(std::string& detail) {
    RngStream root(20260810);
    int criterion_violations = 0;
    int signaling_violations = 0;
    int witness_violations = 0;

    for (int trial = 0; trial < 50000; ++trial) {
        RngStream rng = root.split(trial);
        PMRealization real;
        const bool projective = trial % 2 == 0;
        real.observables = {random_povm(rng, projective),
                            random_povm(rng, projective)};
        const int n_states = 1 + static_cast<int>(rng.uniform() * 4.0);
        for (int k = 0; k < n_states; ++k) {
            real.states.push_back(random_state(rng, k % 2 == 0));
        }
        const PMRecordSet rec = realize_pm(real);
        const double true_c = real.observables[0].axis.dot(real.observables[1].axis);
        if (projective) {
            const FeasibilityReport rep = pvm_feasible(rec, 0, 1);
            if (!rep.feasible) ++criterion_violations;
            // The true angle must lie in the reported interval.
            if (rep.feasible && ((*rep.c_interval)[0] > true_c + 1e-9 ||
                                 (*rep.c_interval)[1] < true_c - 1e-9)) {
                ++criterion_violations;
            }
        } else {
            // The offsets of the sampled devices witness feasibility exactly,
            // and their g-interval must contain the scaled true angle.
            const CellEval at = povm_cell_eval(rec, 0, 1, real.observables[0].r,
                                               real.observables[1].r);
            if (!(at.coverage_ok && at.margin >= -1e-9)) {
                ++criterion_violations;
            } else {
                const double scaled =
                    true_c * real.observables[0].r_prime * real.observables[1].r_prime;
                if (scaled < at.g_lo - 1e-9 || scaled > at.g_hi + 1e-9) {
                    ++criterion_violations;
                }
            }
            if (trial % 50 == 1) {
                // Exercise the full grid search on a subsample.
                GridConfig cfg;
                cfg.hints.push_back(
                    {real.observables[0].r, real.observables[1].r});
                if (!povm_feasible(rec, 0, 1, cfg).feasible) ++criterion_violations;
            }
        }
    }

    RngStream broot(1168);
    for (int trial = 0; trial < 50000; ++trial) {
        RngStream rng = broot.split(trial);
        const bool projective = trial % 2 == 0;
        const Eigen::Matrix4cd rho = random_two_qubit_state(rng, trial % 3 != 0);
        const std::array<QubitObservable, 2> alice{random_povm(rng, projective),
                                                   random_povm(rng, projective)};
        const std::array<QubitObservable, 2> bob{random_povm(rng, projective),
                                                 random_povm(rng, projective)};
        const BellCorrelation corr = realize_bell(rho, alice, bob);
        if (nonsignaling_check(corr) > 1e-9) ++signaling_violations;
        if (svw_witness(corr).value > 2.0 + 1e-9) ++witness_violations;

        const ConditionalPM cond = bell_to_conditional(corr, Party::Alice);
        if (cond.records.rows.size() >= 2) {
            if (projective) {
                if (!pvm_feasible(cond.records, 0, 1).feasible) {
                    ++criterion_violations;
                }
            } else {
                const CellEval at =
                    povm_cell_eval(cond.records, 0, 1, alice[0].r, alice[1].r);
                if (!(at.coverage_ok && at.margin >= -1e-9)) ++criterion_violations;
            }
        }
        if (cond.records.rows.size() == 4) {
            // Qubit bound of the determinant witness on probability
            // differences (a quarter of the expectation-difference value).
            const double det =
                bqb_det(cond.records, std::array<std::size_t, 4>{0, 1, 2, 3}).value;
            if (det / 4.0 > 1.0 + 1e-9) ++witness_violations;
        }
    }

    bool ok = check(criterion_violations == 0, detail,
                    std::to_string(criterion_violations) + " criterion violations");
    ok &= check(signaling_violations == 0, detail,
                std::to_string(signaling_violations) + " signaling violations");
    ok &= check(witness_violations == 0, detail,
                std::to_string(witness_violations) + " witness-bound violations");
    return ok;
}

// 7. Brute-force search and grid criterion agree on the fixture battery.
bool criterion_oracle_agreement(std::string& detail) {
    std::vector<PMRecordSet> battery;
    RngStream root(7070);
    // 25 realizable instances with comfortable margins.
    for (int trial = 0; trial < 25; ++trial) {
        RngStream rng = root.split(trial);
        PMRealization real;
        for (int k = 0; k < 2; ++k) {
            const double r = rng.uniform(-0.6, 0.6);
            const double rp = rng.uniform(0.3, 1.0 - std::abs(r));
            Eigen::Vector3d axis(rng.gaussian(), rng.gaussian(), rng.gaussian());
            axis.normalize();
            real.observables.push_back(QubitObservable(r, rp, axis));
        }
        const int n_states = 2 + trial % 3;
        for (int k = 0; k < n_states; ++k) {
            BlochState s = random_state(rng, false);
            real.states.push_back(BlochState(0.9 * s.s));
        }
        battery.push_back(realize_pm(real));
    }
    // 15 family instances beyond the frontier plus 10 discrete pathologies.
    for (int k = 0; k < 15; ++k) {
        const double x = 0.80 + 0.18 * k / 14.0;
        battery.push_back(make_records({{x, x}, {-x, -x}, {x, -x}, {-x, x}}));
    }
    for (int k = 0; k < 10; ++k) {
        const double a = 0.3 + 0.06 * k;
        battery.push_back(make_records({{1, a}, {1, -a}, {-1, 0.9}}));
    }

    for (std::size_t k = 0; k < battery.size(); ++k) {
        const bool criterion = povm_feasible(battery[k], 0, 1).feasible;
        const bool brute = brute_force_feasible(battery[k]).feasible;
        if (!check(criterion == brute, detail,
                   "verdict mismatch on instance " + std::to_string(k) +
                       " (criterion " + std::to_string(criterion) + ", oracle " +
                       std::to_string(brute) + ")")) {
            return false;
        }
    }
    return true;
}

// 8. Inference pins the parameters of the two uniqueness fixtures.
bool criterion_uniqueness(std::string& detail) {
    const CInterval ci = infer_c_interval(pi12_records(), 0, 1, 0, 0, 1, 1);
    bool ok = check(ci.c.width() < 1e-6, detail, "pi/12 angle interval too wide");
    ok &= check(std::abs(ci.c.mid() - kCos12) <= 1e-6, detail,
                "pi/12 angle is not cos(pi/12)");

    const ParamRegion region =
        infer_r_region(make_records({{1, 1}, {1, -1}}), 0, 1);
    ok &= check(region.cells.size() == 1 && region.unique, detail,
                "minimal-protocol region is not unique");
    if (ok) {
        ok &= check(std::abs(region.cells[0].r_i - 1.0) <= 1e-12 &&
                        std::abs(region.cells[0].r_j) <= 1e-12,
                    detail, "minimal-protocol offsets are not (1, 0)");
        ok &= check(std::abs(region.cells[0].r_prime_j.lo - 1.0) <= 1e-12 &&
                        std::abs(region.cells[0].r_prime_j.hi - 1.0) <= 1e-12,
                    detail, "second scale is not pinned to 1");
    }
    return ok;
}

// 9. State reconstruction is exact and saturates the norm at the t-bound.
bool criterion_reconstruction(std::string& detail) {
    RngStream rng(909);
    int done = 0;
    while (done < 1000) {
        const double A0 = rng.uniform(-1.0, 1.0);
        const double A1 = rng.uniform(-1.0, 1.0);
        const double c = rng.uniform(-1.0, 1.0);
        if ((1.0 - A0 * A0) * (1.0 - A1 * A1) - (c - A0 * A1) * (c - A0 * A1) <
            1e-8) {
            continue;
        }
        ++done;
        const Eigen::Vector3d a0 = Eigen::Vector3d::UnitZ();
        const Eigen::Vector3d a1(std::sqrt(1.0 - c * c), 0.0, c);
        const double tb = t_bound(A0, A1, c);
        for (double t : {-tb, 0.0, tb}) {
            const BlochState s = reconstruct_state(A0, A1, a0, a1, t);
            if (!check(std::abs(a0.dot(s.s) - A0) <= 1e-12 &&
                           std::abs(a1.dot(s.s) - A1) <= 1e-12,
                       detail, "expectation not reproduced to 1e-12")) {
                return false;
            }
        }
        if (!check(std::abs(reconstruct_state(A0, A1, a0, a1, tb).s.norm() - 1.0) <=
                           1e-9 &&
                       std::abs(reconstruct_state(A0, A1, a0, a1, -tb).s.norm() -
                                1.0) <= 1e-9,
                   detail, "|s(+/- t_bound)| != 1")) {
            return false;
        }
    }
    return true;
}

// 10. Entanglement pipeline end to end.
bool criterion_entanglement(std::string& detail) {
    const VerdictReport pi12 = entanglement_verdict(pi12_correlation());
    bool ok = check(pi12.verdict == Verdict::Entangled, detail,
                    "pi/12 verdict is not entangled");
    ok &= check(pi12.residual > 1e-7, detail, "pi/12 residual did not plateau");

    const auto obs = planar_pair(M_PI / 4, M_PI / 3);
    Eigen::Vector4cd psi = Eigen::Vector4cd::Zero();
    psi(0) = 1.0 / std::sqrt(2.0);
    psi(3) = 1.0 / std::sqrt(2.0);
    const Eigen::Matrix4cd phi = psi * psi.adjoint();
    const BellCorrelation reproduced = realize_bell(phi, obs, obs);
    const Correlators8 want = correlators_from(pi12_correlation());
    const Correlators8 got = correlators_from(reproduced);
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            ok &= check(std::abs(got.joint[a][b] - want.joint[a][b]) <= 1e-9, detail,
                        "correlator mismatch");
        }
        ok &= check(std::abs(got.alice_marginal[a] - want.alice_marginal[a]) <= 1e-9 &&
                        std::abs(got.bob_marginal[a] - want.bob_marginal[a]) <= 1e-9,
                    detail, "marginal mismatch");
    }
    Eigen::Matrix4cd pt;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    pt(2 * i + a, 2 * j + b) = phi(2 * i + b, 2 * j + a);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(pt);
    ok &= check(es.eigenvalues().minCoeff() <= -0.49, detail,
                "partial transpose not violated");

    RngStream rng(55);
    for (int trial = 0; trial < 5; ++trial) {
        const BlochState sa = random_state(rng, false);
        const BlochState sb = random_state(rng, false);
        Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
        const Eigen::Matrix2cd da = to_density(sa);
        const Eigen::Matrix2cd db = to_density(sb);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) rho.block<2, 2>(2 * i, 2 * j) = da(i, j) * db;
        const auto meas = planar_pair(rng.uniform(0.0, M_PI), rng.uniform(0.0, M_PI));
        const VerdictReport rep = entanglement_verdict(realize_bell(rho, meas, meas));
        ok &= check(rep.verdict == Verdict::SeparableFeasible, detail,
                    "product fixture " + std::to_string(trial) +
                        " is not separable-feasible");
    }
    return ok;
}

}  // namespace

int main() {
    std::vector<Criterion> criteria = {
        {"sharp/unsharp separation fixture", criterion_separation},
        {"sharp threshold x* = 1/sqrt(2) at y = 0", criterion_threshold},
        {"arcsin criterion anchors and closed form", criterion_arcsin},
        {"determinant witness closed form", criterion_bqb},
        {"parametric boundary vs criterion", criterion_sm_boundary},
        {"Monte Carlo soundness (1e5 realizations)", criterion_soundness},
        {"oracle/criterion agreement on 50 instances", criterion_oracle_agreement},
        {"inference uniqueness fixtures", criterion_uniqueness},
        {"state reconstruction exactness", criterion_reconstruction},
        {"entanglement pipeline", criterion_entanglement},
    };

    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = criteria[k].run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        std::printf("[%2zu] %-45s %s (%.2f s)%s%s\n", k + 1, criteria[k].name.c_str(),
                    ok ? "PASS" : "FAIL", seconds, detail.empty() ? "" : " -- ",
                    detail.c_str());
        if (!ok) ++failures;
    }
    if (failures > 0) {
        std::printf("%d of %zu criteria failed\n", failures, criteria.size());
        return 1;
    }
    std::printf("all %zu criteria passed\n", criteria.size());
    return 0;
}
