#include "qcorr/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qcorr {

std::pair<int, int> MomentMatrix::factors(int idx) {
    static constexpr std::pair<int, int> table[kSize] = {
        {0, 0}, {1, 0}, {2, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 1}, {2, 2}};
    return table[idx];
}

const char* MomentMatrix::label(int idx) {
    static const char* names[kSize] = {"1",    "A0",   "A1",   "B0",  "B1",
                                       "A0B0", "A0B1", "A1B0", "A1B1"};
    return names[idx];
}

namespace {

// Unordered pair code over {0, 1, 2}: 00,01,02,11,12,22 -> 0..5.
int pair_code(int a, int b) {
    if (a > b) std::swap(a, b);
    if (a == 0) return b;          // 00, 01, 02
    if (a == 1) return 2 + b;      // 11 -> 3, 12 -> 4
    return 5;                      // 22
}

constexpr int kMixed = 4;  // the sym(X0 X1) pair code

}  // namespace

int MomentMatrix::entry_key(int i, int j) {
    auto [ei, fi] = factors(i);
    auto [ej, fj] = factors(j);
    return pair_code(ei, ej) * 6 + pair_code(fi, fj);
}

namespace {

// Data table D[e][f] = <X_e Y_f> with X, Y in {1, first, second measurement}.
using DataTable = std::array<std::array<double, 3>, 3>;

DataTable data_table(const BellCorrelation& corr) {
    DataTable d{};
    d[0][0] = 1.0;
    for (int a = 0; a < 2; ++a) {
        d[a + 1][0] =
            0.5 * (corr.marginal_alice(a, 0) + corr.marginal_alice(a, 1));
        d[0][a + 1] = 0.5 * (corr.marginal_bob(a, 0) + corr.marginal_bob(a, 1));
    }
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) d[a + 1][b + 1] = corr.correlator(a, b);
    }
    return d;
}

// Coefficients of sym(X_e X_e') on {1, X_1, X_2} for sharp measurements.
std::array<double, 3> sharp_rep(int code) {
    switch (code) {
        case 0: return {1.0, 0.0, 0.0};   // 1 * 1
        case 1: return {0.0, 1.0, 0.0};   // X1
        case 2: return {0.0, 0.0, 1.0};   // X2
        case 3: return {1.0, 0.0, 0.0};   // X1^2 = 1
        case 5: return {1.0, 0.0, 0.0};   // X2^2 = 1
        default: return {0.0, 0.0, 0.0};  // mixed product: unknown
    }
}

// Coefficients for a given parameter corner (rp0, rp1, c all scalars).
std::array<double, 3> param_rep(int code, double r0, double r1, double rp0,
                                double rp1, double c) {
    switch (code) {
        case 0: return {1.0, 0.0, 0.0};
        case 1: return {0.0, 1.0, 0.0};
        case 2: return {0.0, 0.0, 1.0};
        case 3: return {rp0 * rp0 - r0 * r0, 2.0 * r0, 0.0};
        case 5: return {rp1 * rp1 - r1 * r1, 0.0, 2.0 * r1};
        default: return {c * rp0 * rp1 - r0 * r1, r1, r0};
    }
}

}  // namespace

MomentMatrix build_moment_matrix(const BellCorrelation& corr) {
    corr.validate();
    const DataTable d = data_table(corr);
    MomentMatrix m;
    for (int i = 0; i < MomentMatrix::kSize; ++i) {
        for (int j = 0; j < MomentMatrix::kSize; ++j) {
            auto [ei, fi] = MomentMatrix::factors(i);
            auto [ej, fj] = MomentMatrix::factors(j);
            const int code_a = pair_code(ei, ej);
            const int code_b = pair_code(fi, fj);
            if (code_a == kMixed || code_b == kMixed) {
                m.status[i][j] = MomentMatrix::Status::Free;
                m.value(i, j) = 0.0;
                m.lo(i, j) = -1.0;
                m.hi(i, j) = 1.0;
                continue;
            }
            const auto ka = sharp_rep(code_a);
            const auto kb = sharp_rep(code_b);
            double v = 0.0;
            for (int a = 0; a < 3; ++a) {
                for (int b = 0; b < 3; ++b) v += ka[a] * kb[b] * d[a][b];
            }
            m.status[i][j] = MomentMatrix::Status::FixedPhysical;
            m.value(i, j) = v;
            m.lo(i, j) = v;
            m.hi(i, j) = v;
        }
    }
    return m;
}

PartyParams PartyParams::sharp(double angle_cosine) {
    PartyParams p;
    p.r0 = 0.0;
    p.r1 = 0.0;
    p.rp0 = {1.0, 1.0};
    p.rp1 = {1.0, 1.0};
    p.c = {angle_cosine, angle_cosine};
    return p;
}

PartyParams party_params_from_cell(const PMRecordSet& records, const RegionCell& cell,
                                   double tol) {
    PartyParams p;
    p.r0 = cell.r_i;
    p.r1 = cell.r_j;
    p.rp0 = cell.r_prime_i;
    p.rp1 = cell.r_prime_j;
    p.c_unconstrained = cell.c_unconstrained;
    if (p.c_unconstrained) {
        p.c = {-1.0, 1.0};
        return p;
    }
    // Hull of the angle interval over the admissible scale corners. A corner
    // whose bounds are genuinely inconsistent contributes nothing; the
    // (hi, hi) corner always matches the cell's own interval, so the hull
    // is never empty when the scale product is meaningful.
    double lo = 1.0, hi = -1.0;
    for (double rpi : {cell.r_prime_i.lo, cell.r_prime_i.hi}) {
        for (double rpj : {cell.r_prime_j.lo, cell.r_prime_j.hi}) {
            if (rpi * rpj <= tol) continue;
            try {
                const CInterval ci = infer_c_interval(records, 0, 1, cell.r_i,
                                                      cell.r_j, rpi, rpj, tol);
                lo = std::min(lo, ci.c.lo);
                hi = std::max(hi, ci.c.hi);
            } catch (const std::domain_error&) {
                continue;
            }
        }
    }
    if (lo > hi) {
        p.c = {-1.0, 1.0};
        p.c_unconstrained = true;
    } else {
        p.c = {lo, hi};
    }
    return p;
}

MomentMatrix apply_measurement_identity(const MomentMatrix& m, const PartyParams& alice,
                                        const PartyParams& bob) {
    MomentMatrix out = m;
    // Recover the data table from the first row/column (these entries are
    // parameter-free).
    DataTable d{};
    d[0][0] = 1.0;
    d[1][0] = m.value(0, 1);
    d[2][0] = m.value(0, 2);
    d[0][1] = m.value(0, 3);
    d[0][2] = m.value(0, 4);
    d[1][1] = m.value(0, 5);
    d[1][2] = m.value(0, 6);
    d[2][1] = m.value(0, 7);
    d[2][2] = m.value(0, 8);

    auto corners = [](const PartyParams& p) {
        std::vector<std::array<double, 3>> out_corners;
        for (double rp0 : {p.rp0.lo, p.rp0.hi}) {
            for (double rp1 : {p.rp1.lo, p.rp1.hi}) {
                for (double c : {p.c.lo, p.c.hi}) {
                    out_corners.push_back({rp0, rp1, c});
                }
            }
        }
        return out_corners;
    };
    const auto ca = corners(alice);
    const auto cb = corners(bob);

    for (int i = 0; i < MomentMatrix::kSize; ++i) {
        for (int j = 0; j < MomentMatrix::kSize; ++j) {
            auto [ei, fi] = MomentMatrix::factors(i);
            auto [ej, fj] = MomentMatrix::factors(j);
            const int code_a = pair_code(ei, ej);
            const int code_b = pair_code(fi, fj);
            const bool param_a = code_a >= 3;  // squares and mixed products
            const bool param_b = code_b >= 3;
            if (!param_a && !param_b) continue;  // pure data entry
            double lo = std::numeric_limits<double>::infinity();
            double hi = -lo;
            for (const auto& pa : ca) {
                const auto ka = param_rep(code_a, alice.r0, alice.r1, pa[0], pa[1],
                                          pa[2]);
                for (const auto& pb : cb) {
                    const auto kb =
                        param_rep(code_b, bob.r0, bob.r1, pb[0], pb[1], pb[2]);
                    double v = 0.0;
                    for (int a = 0; a < 3; ++a) {
                        for (int b = 0; b < 3; ++b) v += ka[a] * kb[b] * d[a][b];
                    }
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
            }
            out.lo(i, j) = lo;
            out.hi(i, j) = hi;
            out.value(i, j) = 0.5 * (lo + hi);
            out.status[i][j] = MomentMatrix::Status::FixedByIdentity;
        }
    }
    return out;
}

namespace {

using Mat9 = MomentMatrix::Mat;

// Projection onto {symmetric, tied entries equal, each tie inside its box}.
Mat9 project_box(const MomentMatrix& m, const Mat9& x) {
    std::array<double, 36> sum{};
    std::array<double, 36> count{};
    for (int i = 0; i < 9; ++i) {
        for (int j = 0; j < 9; ++j) {
            const int k = MomentMatrix::entry_key(i, j);
            sum[k] += x(i, j);
            count[k] += 1.0;
        }
    }
    std::array<double, 36> val{};
    std::array<bool, 36> seen{};
    Mat9 out;
    for (int i = 0; i < 9; ++i) {
        for (int j = 0; j < 9; ++j) {
            const int k = MomentMatrix::entry_key(i, j);
            if (!seen[k]) {
                seen[k] = true;
                val[k] = std::clamp(sum[k] / count[k], m.lo(i, j), m.hi(i, j));
            }
            out(i, j) = val[k];
        }
    }
    return out;
}

Mat9 project_psd(const Mat9& x) {
    Eigen::SelfAdjointEigenSolver<Mat9> es(0.5 * (x + x.transpose()));
    Eigen::Matrix<double, 9, 1> ev = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

CompletionResult psd_completion(const MomentMatrix& m, double tol, int max_iter,
                                int restarts, std::uint64_t seed) {
    CompletionResult result;
    result.residual = std::numeric_limits<double>::infinity();
    bool all_stalled = true;
    RngStream root(seed, 0xc0417);

    for (int restart = 0; restart < std::max(restarts, 1); ++restart) {
        RngStream rng = root.split(restart);
        Mat9 x;
        for (int i = 0; i < 9; ++i) {
            for (int j = 0; j <= i; ++j) {
                double v = 0.5 * (m.lo(i, j) + m.hi(i, j));
                if (m.status[i][j] == MomentMatrix::Status::Free && restart > 0) {
                    v = rng.uniform(m.lo(i, j), m.hi(i, j));
                }
                x(i, j) = x(j, i) = v;
            }
        }
        double prev_window = std::numeric_limits<double>::infinity();
        double res = std::numeric_limits<double>::infinity();
        bool stalled = false;
        int it = 0;
        for (; it < max_iter; ++it) {
            const Mat9 boxed = project_box(m, x);
            const Mat9 psd = project_psd(boxed);
            res = (psd - project_box(m, psd)).norm();
            x = psd;
            if (res < tol) break;
            if (it % 100 == 99) {
                if (res > 10.0 * tol &&
                    (prev_window - res) < 1e-6 * std::max(res, 1e-300)) {
                    stalled = true;
                    break;
                }
                prev_window = res;
            }
        }
        if (res < result.residual) {
            result.residual = res;
            result.completed = project_box(m, x);
            result.iterations = it;
        }
        if (res < tol) {
            result.feasible = true;
            result.stalled = false;
            return result;
        }
        all_stalled = all_stalled && stalled;
    }
    result.stalled = all_stalled && result.residual > 10.0 * tol;
    return result;
}

Correlators8 correlators_from(const BellCorrelation& corr) {
    corr.validate();
    Correlators8 c;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) c.joint[a][b] = corr.correlator(a, b);
        c.alice_marginal[a] =
            0.5 * (corr.marginal_alice(a, 0) + corr.marginal_alice(a, 1));
        c.bob_marginal[a] = 0.5 * (corr.marginal_bob(a, 0) + corr.marginal_bob(a, 1));
    }
    return c;
}

namespace {

Eigen::Matrix4cd kron2(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
    Eigen::Matrix4cd out;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    }
    return out;
}

Eigen::Matrix4cd partial_transpose_b(const Eigen::Matrix4cd& x) {
    Eigen::Matrix4cd out;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) {
                    out(2 * i + a, 2 * j + b) = x(2 * i + b, 2 * j + a);
                }
            }
        }
    }
    return out;
}

Eigen::Matrix4cd project_psd4(const Eigen::Matrix4cd& x) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(0.5 * (x + x.adjoint()));
    Eigen::Vector4d ev = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

SeparabilityVerdict separable_feasibility(const Correlators8& correlators,
                                          const std::array<QubitObservable, 2>& alice,
                                          const std::array<QubitObservable, 2>& bob,
                                          double tol, int max_iter, int restarts,
                                          std::uint64_t seed) {
    // Affine constraints <G_k, X> = c_k.
    std::vector<Eigen::Matrix4cd> ops;
    std::vector<double> rhs;
    ops.push_back(Eigen::Matrix4cd::Identity());
    rhs.push_back(1.0);
    std::array<Eigen::Matrix2cd, 2> am, bm;
    for (int k = 0; k < 2; ++k) {
        am[k] = to_hermitian(alice[k]);
        bm[k] = to_hermitian(bob[k]);
    }
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            ops.push_back(kron2(am[a], bm[b]));
            rhs.push_back(correlators.joint[a][b]);
        }
    }
    for (int a = 0; a < 2; ++a) {
        ops.push_back(kron2(am[a], Eigen::Matrix2cd::Identity()));
        rhs.push_back(correlators.alice_marginal[a]);
        ops.push_back(kron2(Eigen::Matrix2cd::Identity(), bm[a]));
        rhs.push_back(correlators.bob_marginal[a]);
    }
    const int n = static_cast<int>(ops.size());
    Eigen::MatrixXd gram(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            gram(i, j) = (ops[i].adjoint() * ops[j]).trace().real();
        }
    }
    // Coinciding observables (pinned angle +/-1) make the constraint set
    // rank-deficient; a tiny ridge keeps the projection stable.
    gram.diagonal().array() += 1e-12;
    Eigen::LDLT<Eigen::MatrixXd> solver(gram);

    auto project_affine = [&](Eigen::Matrix4cd x) {
        x = 0.5 * (x + x.adjoint());
        Eigen::VectorXd defect(n);
        for (int k = 0; k < n; ++k) {
            defect(k) = rhs[k] - (ops[k].adjoint() * x).trace().real();
        }
        const Eigen::VectorXd mu = solver.solve(defect);
        for (int k = 0; k < n; ++k) x += mu(k) * ops[k];
        return x;
    };
    auto violation = [&](const Eigen::Matrix4cd& x) {
        double v = 0.0;
        for (int k = 0; k < n; ++k) {
            v = std::max(v, std::abs(rhs[k] - (ops[k].adjoint() * x).trace().real()));
        }
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(0.5 * (x + x.adjoint()));
        v = std::max(v, -es.eigenvalues().minCoeff());
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> et(
            partial_transpose_b(0.5 * (x + x.adjoint())));
        v = std::max(v, -et.eigenvalues().minCoeff());
        return v;
    };

    SeparabilityVerdict result;
    result.residual = std::numeric_limits<double>::infinity();
    bool all_stalled = true;
    RngStream root(seed, 0x5e9a);
    for (int restart = 0; restart < std::max(restarts, 1); ++restart) {
        RngStream rng = root.split(restart);
        Eigen::Matrix4cd x = 0.25 * Eigen::Matrix4cd::Identity();
        if (restart > 0) {
            using namespace std::complex_literals;
            Eigen::Matrix4cd noise;
            for (int i = 0; i < 4; ++i) {
                for (int j = 0; j < 4; ++j) {
                    noise(i, j) = 0.2 * (rng.gaussian() + 1i * rng.gaussian());
                }
            }
            x += 0.5 * (noise + noise.adjoint());
        }
        double prev_window = std::numeric_limits<double>::infinity();
        double res = std::numeric_limits<double>::infinity();
        bool stalled = false;
        int it = 0;
        for (; it < max_iter; ++it) {
            x = project_affine(x);
            x = project_psd4(x);
            x = partial_transpose_b(project_psd4(partial_transpose_b(x)));
            res = violation(x);
            if (res < tol) break;
            if (it % 100 == 99) {
                if (res > 10.0 * tol &&
                    (prev_window - res) < 1e-6 * std::max(res, 1e-300)) {
                    stalled = true;
                    break;
                }
                prev_window = res;
            }
        }
        if (res < result.residual) {
            result.residual = res;
            result.certificate = x;
            result.iterations = it;
        }
        if (res < tol) {
            result.verdict = Verdict::SeparableFeasible;
            return result;
        }
        all_stalled = all_stalled && stalled;
    }
    result.verdict = (all_stalled && result.residual > 10.0 * tol)
                         ? Verdict::Entangled
                         : Verdict::Inconclusive;
    return result;
}

VerdictReport entanglement_verdict(const BellCorrelation& corr, const GridConfig& grid,
                                   double tol, std::uint64_t seed) {
    corr.validate();
    if (nonsignaling_check(corr) > 1e-6) {
        throw std::invalid_argument("entanglement_verdict: signaling correlation");
    }
    const ConditionalPM cond_a = bell_to_conditional(corr, Party::Alice);
    const ConditionalPM cond_b = bell_to_conditional(corr, Party::Bob);
    const ParamRegion region_a = infer_r_region(cond_a.records, 0, 1, grid);
    const ParamRegion region_b = infer_r_region(cond_b.records, 0, 1, grid);
    if (region_a.cells.empty() || region_b.cells.empty()) {
        throw std::invalid_argument(
            "entanglement_verdict: correlation is not compatible with independent "
            "qubit devices");
    }

    // Representative cells, best margin first, most mixed first among ties.
    auto representatives = [](const ParamRegion& region, std::size_t cap) {
        std::vector<const RegionCell*> cells;
        cells.reserve(region.cells.size());
        for (const auto& c : region.cells) cells.push_back(&c);
        std::stable_sort(cells.begin(), cells.end(),
                         [](const RegionCell* a, const RegionCell* b) {
                             if (a->margin != b->margin) return a->margin > b->margin;
                             return std::abs(a->r_i) + std::abs(a->r_j) <
                                    std::abs(b->r_i) + std::abs(b->r_j);
                         });
        if (cells.size() > cap) cells.resize(cap);
        return cells;
    };
    // "Entangled" demands exhaustion over the full region; keep that claim
    // only when the region is small enough to enumerate.
    constexpr std::size_t kExhaustiveCap = 16;
    const bool exhaustive = region_a.cells.size() <= kExhaustiveCap &&
                            region_b.cells.size() <= kExhaustiveCap;
    const auto cells_a = representatives(region_a, kExhaustiveCap);
    const auto cells_b = representatives(region_b, kExhaustiveCap);

    const MomentMatrix base = build_moment_matrix(corr);
    const Correlators8 c8 = correlators_from(corr);

    VerdictReport report;
    report.inference_unique = region_a.unique && region_b.unique;
    report.alice = party_params_from_cell(cond_a.records, *cells_a.front());
    report.bob = party_params_from_cell(cond_b.records, *cells_b.front());

    bool all_stalled = true;
    double best_residual = std::numeric_limits<double>::infinity();
    double worst_plateau = 0.0;
    int oracle_attempts = 0;
    constexpr int kMaxOracleAttempts = 6;

    for (const RegionCell* ca : cells_a) {
        for (const RegionCell* cb : cells_b) {
            const PartyParams pa = party_params_from_cell(cond_a.records, *ca);
            const PartyParams pb = party_params_from_cell(cond_b.records, *cb);
            const MomentMatrix mm = apply_measurement_identity(base, pa, pb);
            const CompletionResult comp = psd_completion(mm, tol, 20000, 8, seed);
            best_residual = std::min(best_residual, comp.residual);
            if (!comp.feasible) {
                all_stalled = all_stalled && comp.stalled;
                worst_plateau = std::max(worst_plateau, comp.residual);
                continue;
            }
            all_stalled = false;
            if (oracle_attempts >= kMaxOracleAttempts) continue;
            ++oracle_attempts;
            // A completable cell is a candidate separable explanation; ask
            // the exact oracle with representative observables.
            auto observable = [](double r, const Interval& rp, double angle) {
                return QubitObservable(
                    r, std::clamp(rp.mid(), 0.0, 1.0 - std::abs(r)),
                    Eigen::Vector3d(std::sin(angle), 0.0, std::cos(angle)));
            };
            const double ang_a = std::acos(std::clamp(pa.c.mid(), -1.0, 1.0));
            const double ang_b = std::acos(std::clamp(pb.c.mid(), -1.0, 1.0));
            const std::array<QubitObservable, 2> obs_a = {
                observable(pa.r0, pa.rp0, 0.0), observable(pa.r1, pa.rp1, ang_a)};
            const std::array<QubitObservable, 2> obs_b = {
                observable(pb.r0, pb.rp0, 0.0), observable(pb.r1, pb.rp1, ang_b)};
            const SeparabilityVerdict sep =
                separable_feasibility(c8, obs_a, obs_b, tol, 20000, 8, seed);
            if (sep.verdict == Verdict::SeparableFeasible) {
                report.verdict = Verdict::SeparableFeasible;
                report.residual = sep.residual;
                report.alice = pa;
                report.bob = pb;
                report.certificate = sep.certificate;
                return report;
            }
        }
    }

    if (all_stalled && exhaustive) {
        report.verdict = Verdict::Entangled;
        report.residual = worst_plateau > 0.0 ? worst_plateau : best_residual;
    } else {
        report.verdict = Verdict::Inconclusive;
        report.residual = best_residual;
    }
    return report;
}

}  // namespace qcorr
