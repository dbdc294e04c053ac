#include "qcorr/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qcorr {

namespace {

void check_pair_indices(const PMRecordSet& records, std::size_t i, std::size_t j) {
    records.validate();
    if (records.rows.empty()) {
        throw std::invalid_argument("criterion: empty record set");
    }
    const std::size_t m = records.measurement_count();
    if (i >= m || j >= m || i == j) {
        throw std::invalid_argument("criterion: bad measurement pair");
    }
}

}  // namespace

std::pair<double, double> g_pvm(double ai, double aj, double tol) {
    if (std::abs(ai) > 1.0 + tol || std::abs(aj) > 1.0 + tol) {
        throw std::invalid_argument("g_pvm: expectation outside [-1, 1]");
    }
    ai = std::clamp(ai, -1.0, 1.0);
    aj = std::clamp(aj, -1.0, 1.0);
    const double root = std::sqrt(1.0 - ai * ai) * std::sqrt(1.0 - aj * aj);
    return {ai * aj - root, ai * aj + root};
}

std::pair<double, double> g_povm(double ai, double aj, double ri, double rj,
                                 double tol) {
    if (std::abs(ri) > 1.0 + tol || std::abs(rj) > 1.0 + tol) {
        throw std::invalid_argument("g_povm: offset outside [-1, 1]");
    }
    const double rbar_i = 1.0 - std::abs(ri);
    const double rbar_j = 1.0 - std::abs(rj);
    const double di = ai - ri;
    const double dj = aj - rj;
    const double vi = rbar_i * rbar_i - di * di;
    const double vj = rbar_j * rbar_j - dj * dj;
    if (vi < -tol * 4.0 || vj < -tol * 4.0) {
        throw std::domain_error("g_povm: incompatible offset (|a - r| > 1 - |r|)");
    }
    const double root = clamped_sqrt(std::max(vi, 0.0), tol) *
                        clamped_sqrt(std::max(vj, 0.0), tol);
    return {di * dj - root, di * dj + root};
}

CellEval povm_cell_eval(const PMRecordSet& records, std::size_t i, std::size_t j,
                        double r_i, double r_j, double tol) {
    const double rbar_i = 1.0 - std::abs(r_i);
    const double rbar_j = 1.0 - std::abs(r_j);
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    double worst_violation = 0.0;
    for (const auto& row : records.rows) {
        const double di = row.expectations[i] - r_i;
        const double dj = row.expectations[j] - r_j;
        const double vi = rbar_i * rbar_i - di * di;
        const double vj = rbar_j * rbar_j - dj * dj;
        if (vi < -tol || vj < -tol) {
            worst_violation = std::max(worst_violation, std::max(-vi, -vj));
            continue;
        }
        const double root = std::sqrt(std::max(vi, 0.0)) * std::sqrt(std::max(vj, 0.0));
        lo = std::max(lo, di * dj - root);
        hi = std::min(hi, di * dj + root);
    }
    if (worst_violation > 0.0) {
        // Graded penalty keeps refinement pointed toward valid cells.
        return {-2.0 - worst_violation, 0.0, 0.0, false};
    }
    return {hi - lo, lo, hi, true};
}

FeasibilityReport pvm_feasible(const PMRecordSet& records, std::size_t i,
                               std::size_t j, double tol) {
    check_pair_indices(records, i, j);
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (const auto& row : records.rows) {
        auto [gm, gp] = g_pvm(row.expectations[i], row.expectations[j], tol);
        lo = std::max(lo, gm);
        hi = std::min(hi, gp);
    }
    FeasibilityReport rep;
    rep.i = i;
    rep.j = j;
    rep.max_g_minus = lo;
    rep.min_g_plus = hi;
    rep.margin = hi - lo;
    rep.feasible = rep.margin >= -tol;
    if (rep.feasible) {
        rep.c_interval = {{lo, std::max(lo, hi)}};
        rep.witness_params = FeasibilityReport::WitnessParams{
            0.0, 0.0, 1.0, 1.0, std::clamp(0.5 * (lo + hi), -1.0, 1.0)};
    }
    return rep;
}

namespace {

struct BestCell {
    double margin = -std::numeric_limits<double>::infinity();
    double r_i = 0.0, r_j = 0.0;
    double g_lo = 0.0, g_hi = 0.0;

    // Ties break toward the most projective explanation, then toward a
    // deterministic scan order.
    bool better(double m, double ri, double rj, double tie_tol) const {
        if (m > margin + tie_tol) return true;
        if (m < margin - tie_tol) return false;
        const double a = std::abs(ri) + std::abs(rj);
        const double b = std::abs(r_i) + std::abs(r_j);
        if (a < b - 1e-15) return true;
        if (a > b + 1e-15) return false;
        if (ri != r_i) return ri < r_i;
        return rj < r_j;
    }
};

void consider(const PMRecordSet& records, std::size_t i, std::size_t j, double ri,
              double rj, double tol, BestCell& best) {
    const CellEval ev = povm_cell_eval(records, i, j, ri, rj, tol);
    if (best.better(ev.margin, ri, rj, 1e-12)) {
        best = {ev.margin, ri, rj, ev.g_lo, ev.g_hi};
    }
}

}  // namespace

FeasibilityReport povm_feasible(const PMRecordSet& records, std::size_t i,
                                std::size_t j, const GridConfig& cfg) {
    check_pair_indices(records, i, j);
    const int n = std::max(cfg.coarse_n, 3);
    BestCell best;
    const double step0 = 2.0 / (n - 1);
    for (int a = 0; a < n; ++a) {
        const double ri = -1.0 + step0 * a;
        for (int b = 0; b < n; ++b) {
            consider(records, i, j, ri, -1.0 + step0 * b, cfg.tol, best);
        }
    }
    for (const auto& h : cfg.hints) {
        consider(records, i, j, std::clamp(h[0], -1.0, 1.0),
                 std::clamp(h[1], -1.0, 1.0), cfg.tol, best);
    }
    double window = step0;
    for (int round = 0; round < cfg.refine_rounds; ++round) {
        const int m = std::max(cfg.refine_n, 3);
        const double ci = best.r_i;
        const double cj = best.r_j;
        const double lo_i = std::max(-1.0, ci - window);
        const double hi_i = std::min(1.0, ci + window);
        const double lo_j = std::max(-1.0, cj - window);
        const double hi_j = std::min(1.0, cj + window);
        for (int a = 0; a < m; ++a) {
            const double ri = lo_i + (hi_i - lo_i) * a / (m - 1);
            for (int b = 0; b < m; ++b) {
                consider(records, i, j, ri, lo_j + (hi_j - lo_j) * b / (m - 1),
                         cfg.tol, best);
            }
        }
        window = (hi_i - lo_i) / (m - 1);
    }

    FeasibilityReport rep;
    rep.i = i;
    rep.j = j;
    rep.margin = best.margin;
    rep.max_g_minus = best.g_lo;
    rep.min_g_plus = best.g_hi;
    rep.feasible = best.margin >= -cfg.tol;
    if (rep.feasible) {
        const double lo = std::clamp(best.g_lo, -1.0, 1.0);
        const double hi = std::clamp(std::max(best.g_lo, best.g_hi), -1.0, 1.0);
        rep.c_interval = {{lo, hi}};
        // Scales must cover every observed deviation from the offsets.
        double need_i = 0.0, need_j = 0.0;
        for (const auto& row : records.rows) {
            need_i = std::max(need_i, std::abs(row.expectations[i] - best.r_i));
            need_j = std::max(need_j, std::abs(row.expectations[j] - best.r_j));
        }
        const double cap_i = 1.0 - std::abs(best.r_i);
        const double cap_j = 1.0 - std::abs(best.r_j);
        const double rp_i = 0.5 * (need_i + cap_i);
        const double rp_j = 0.5 * (need_j + cap_j);
        double c = 0.0;
        if (rp_i * rp_j > kTol) {
            c = std::clamp(0.5 * (lo + hi) / (rp_i * rp_j), -1.0, 1.0);
        }
        rep.witness_params =
            FeasibilityReport::WitnessParams{best.r_i, best.r_j, rp_i, rp_j, c};
    }
    return rep;
}

PairwiseReport pairwise_feasible(const PMRecordSet& records, CriterionMode mode,
                                 const GridConfig& cfg) {
    records.validate();
    const std::size_t m = records.measurement_count();
    if (m < 2) throw std::invalid_argument("pairwise_feasible: need >= 2 measurements");
    PairwiseReport out;
    for (std::size_t i = 0; i + 1 < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            FeasibilityReport rep = mode == CriterionMode::Pvm
                                        ? pvm_feasible(records, i, j, cfg.tol)
                                        : povm_feasible(records, i, j, cfg);
            out.feasible = out.feasible && rep.feasible;
            out.pairs.push_back(std::move(rep));
        }
    }
    return out;
}

std::vector<std::vector<double>> binarize(
    const std::vector<std::vector<double>>& distributions, double tol) {
    std::vector<std::vector<double>> out;
    out.reserve(distributions.size());
    std::size_t d = 0;
    for (const auto& dist : distributions) {
        if (dist.empty()) throw std::invalid_argument("binarize: empty distribution");
        if (d == 0) d = dist.size();
        if (dist.size() != d) {
            throw std::invalid_argument("binarize: ragged distributions");
        }
        double sum = 0.0;
        for (double p : dist) {
            if (p < -tol || p > 1.0 + tol) {
                throw std::invalid_argument("binarize: probability outside [0, 1]");
            }
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-6) {
            throw std::invalid_argument("binarize: distribution sums to " +
                                        std::to_string(sum));
        }
        std::vector<double> row(d);
        for (std::size_t k = 0; k < d; ++k) row[k] = 2.0 * dist[k] - 1.0;
        out.push_back(std::move(row));
    }
    return out;
}

}  // namespace qcorr
