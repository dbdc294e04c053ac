#include "qcorr/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qcorr/scenarios.hpp"

namespace qcorr {

std::optional<Interval> infer_rprime_bounds(const PMRecordSet& records,
                                            std::size_t i, double r_i, double tol) {
    double need = 0.0;
    for (const auto& row : records.rows) {
        need = std::max(need, std::abs(row.expectations[i] - r_i));
    }
    const double cap = 1.0 - std::abs(r_i);
    if (need > cap + tol) return std::nullopt;
    return Interval{need, std::max(need, cap)};
}

ParamRegion infer_r_region(const PMRecordSet& records, std::size_t i, std::size_t j,
                           const GridConfig& cfg) {
    records.validate();
    if (records.rows.empty()) {
        throw std::invalid_argument("infer_r_region: empty record set");
    }
    ParamRegion region;
    const int n = std::max(cfg.coarse_n, 3);
    const double step = 2.0 / (n - 1);
    region.grid_step = step;

    auto try_cell = [&](double ri, double rj) {
        const CellEval ev = povm_cell_eval(records, i, j, ri, rj, cfg.tol);
        if (!ev.coverage_ok || ev.margin < -cfg.tol) return;
        auto bi = infer_rprime_bounds(records, i, ri, cfg.tol);
        auto bj = infer_rprime_bounds(records, j, rj, cfg.tol);
        if (!bi || !bj) return;
        RegionCell cell;
        cell.r_i = ri;
        cell.r_j = rj;
        cell.r_prime_i = *bi;
        cell.r_prime_j = *bj;
        cell.margin = ev.margin;
        cell.scaled_c = {std::clamp(ev.g_lo, -1.0, 1.0),
                         std::clamp(std::max(ev.g_lo, ev.g_hi), -1.0, 1.0)};
        cell.c_unconstrained = bi->hi * bj->hi <= cfg.tol;
        region.cells.push_back(cell);
    };

    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            try_cell(-1.0 + step * a, -1.0 + step * b);
        }
    }
    for (const auto& h : cfg.hints) {
        try_cell(std::clamp(h[0], -1.0, 1.0), std::clamp(h[1], -1.0, 1.0));
    }

    if (!region.cells.empty()) {
        double ri_lo = 1.0, ri_hi = -1.0, rj_lo = 1.0, rj_hi = -1.0;
        double c_lo = 1.0, c_hi = -1.0;
        bool any_c = false;
        for (const auto& cell : region.cells) {
            ri_lo = std::min(ri_lo, cell.r_i);
            ri_hi = std::max(ri_hi, cell.r_i);
            rj_lo = std::min(rj_lo, cell.r_j);
            rj_hi = std::max(rj_hi, cell.r_j);
            if (!cell.c_unconstrained) {
                any_c = true;
                const double denom = std::max(cell.r_prime_i.mid() * cell.r_prime_j.mid(),
                                              cfg.tol);
                c_lo = std::min(c_lo, cell.scaled_c.lo / denom);
                c_hi = std::max(c_hi, cell.scaled_c.hi / denom);
            }
        }
        double diameter = std::max(ri_hi - ri_lo, rj_hi - rj_lo);
        if (any_c) diameter = std::max(diameter, c_hi - c_lo);
        region.unique = diameter < 10.0 * step;
    }
    return region;
}

CInterval infer_c_interval(const PMRecordSet& records, std::size_t i, std::size_t j,
                           double r_i, double r_j, double rp_i, double rp_j,
                           double tol) {
    records.validate();
    CInterval out;
    if (rp_i * rp_j <= tol) {
        out.c = {-1.0, 1.0};
        out.unconstrained = true;
        return out;
    }
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (const auto& row : records.rows) {
        const double di = row.expectations[i] - r_i;
        const double dj = row.expectations[j] - r_j;
        const double vi = rp_i * rp_i - di * di;
        const double vj = rp_j * rp_j - dj * dj;
        if (vi < -tol || vj < -tol) {
            throw std::domain_error(
                "infer_c_interval: scale cannot cover a recorded deviation");
        }
        const double root =
            std::sqrt(std::max(vi, 0.0)) * std::sqrt(std::max(vj, 0.0));
        lo = std::max(lo, di * dj - root);
        hi = std::min(hi, di * dj + root);
    }
    if (hi < lo) {
        // Bounds that cross within tolerance are a pinched interval
        // (roundoff on saturated rows); beyond that the scales are
        // inconsistent with the records.
        if (lo - hi > 4.0 * tol) {
            throw std::domain_error(
                "infer_c_interval: the angle bounds do not intersect");
        }
        lo = hi = 0.5 * (lo + hi);
    }
    const double denom = rp_i * rp_j;
    out.c = {std::clamp(lo / denom, -1.0, 1.0),
             std::clamp(hi / denom, -1.0, 1.0)};
    return out;
}

double t_bound(double A0, double A1, double c, double tol) {
    const double v = (1.0 - A0 * A0) * (1.0 - A1 * A1) - (c - A0 * A1) * (c - A0 * A1);
    if (v < -tol) {
        throw std::domain_error("t_bound: inputs violate the uncertainty relation");
    }
    return std::sqrt(std::max(v, 0.0));
}

BlochState reconstruct_state(double A0, double A1, const Eigen::Vector3d& a0,
                             const Eigen::Vector3d& a1, double t, double tol) {
    const Eigen::Vector3d w = a0.cross(a1);
    const double w2 = w.squaredNorm();
    if (w2 <= tol * tol) {
        const double c = a0.dot(a1);  // +/-1 up to tolerance
        if (std::abs(A0 - c * A1) > 1e-6) {
            throw std::invalid_argument(
                "reconstruct_state: collinear axes with inconsistent expectations");
        }
        Eigen::Vector3d perp = a0.unitOrthogonal();
        Eigen::Vector3d s = A0 * a0 + t * perp;
        if (s.norm() > 1.0 + 1e-9) {
            throw std::domain_error("reconstruct_state: |t| beyond the physical bound");
        }
        return BlochState(s, 1e-9);
    }
    const Eigen::Vector3d base = (A0 * a1 - A1 * a0).cross(w) / w2;
    const Eigen::Vector3d s = base + (t / w2) * w;
    if (s.norm() > 1.0 + 1e-7) {
        throw std::domain_error("reconstruct_state: |t| beyond the physical bound");
    }
    return BlochState(s, 1e-7);
}

SmBoundaryPoint sm_boundary(double theta, double tol) {
    const double st = std::sin(theta);
    const double ct = std::cos(theta);
    if (ct <= tol) {
        throw std::domain_error(
            "sm_boundary: cos(theta) <= tolerance (limit point (x, y) -> (0, 1))");
    }
    if (theta <= 0.0) {
        throw std::domain_error("sm_boundary: theta must lie in (0, pi/2)");
    }
    SmBoundaryPoint p;
    p.theta = theta;
    p.u = (std::sqrt(1.0 + 3.0 * st) - std::sqrt(1.0 - st)) /
          (2.0 * std::sqrt(1.0 + st));
    const double inv_x =
        1.0 + (1.0 / ct) * (2.0 * (1.0 + st) * (1.0 - ct)) /
                  (2.0 + ct + std::sqrt((1.0 + st) * (1.0 + 3.0 * st)));
    p.x = 1.0 / inv_x;
    p.y = 1.0 - p.x / p.u;
    p.r = p.u / std::sqrt(1.0 - p.u * p.u) - p.u * p.u / (1.0 - p.u * p.u);
    p.family_x = p.u * (1.0 - p.x);
    p.family_y = p.x;
    p.on_branch = p.y >= -tol && p.y <= 1.0 + tol;
    return p;
}

namespace {

bool family_feasible(Family family, CriterionMode mode, double x, double y,
                     const GridConfig& cfg) {
    PMRecordSet records;
    try {
        if (family == Family::QBell) {
            records = bell_to_conditional(qbell(x, y), Party::Alice).records;
        } else {
            records = qpm(x, y);
        }
    } catch (const std::invalid_argument&) {
        return false;  // outside the family's valid domain
    }
    if (records.rows.empty() || records.measurement_count() < 2) return true;
    if (mode == CriterionMode::Pvm) {
        return pvm_feasible(records, 0, 1, cfg.tol).feasible;
    }
    return povm_feasible(records, 0, 1, cfg).feasible;
}

double domain_cap(double fixed) {
    // Both families require x + y <= 1; stay just inside so the conditional
    // weights remain positive.
    return std::max(0.0, 1.0 - fixed - 1e-9);
}

}  // namespace

std::vector<BoundaryPoint> scan_boundary(Family family, CriterionMode mode,
                                         const std::vector<double>& grid,
                                         double tol, ScanAxis axis,
                                         const GridConfig& cfg) {
    std::vector<BoundaryPoint> out;
    out.reserve(grid.size());
    for (double fixed : grid) {
        auto feas = [&](double v) {
            return axis == ScanAxis::LargestYForX
                       ? family_feasible(family, mode, fixed, v, cfg)
                       : family_feasible(family, mode, v, fixed, cfg);
        };
        BoundaryPoint pt;
        pt.fixed = fixed;
        const double cap = domain_cap(fixed);
        if (!feas(0.0)) {
            pt.star = -1.0;  // nothing feasible on this slice
            pt.margin = 0.0;
            out.push_back(pt);
            continue;
        }
        double lo = 0.0;
        double hi = cap;
        if (feas(hi)) {
            pt.star = hi;
        } else {
            while (hi - lo > tol) {
                const double mid = 0.5 * (lo + hi);
                (feas(mid) ? lo : hi) = mid;
            }
            pt.star = lo;
        }
        // Report the slack at the boundary estimate.
        const double bx = axis == ScanAxis::LargestYForX ? fixed : pt.star;
        const double by = axis == ScanAxis::LargestYForX ? pt.star : fixed;
        try {
            PMRecordSet records = family == Family::QBell
                                      ? bell_to_conditional(qbell(bx, by), Party::Alice)
                                            .records
                                      : qpm(bx, by);
            pt.margin = mode == CriterionMode::Pvm
                            ? pvm_feasible(records, 0, 1, cfg.tol).margin
                            : povm_feasible(records, 0, 1, cfg).margin;
        } catch (const std::invalid_argument&) {
            pt.margin = 0.0;
        }
        out.push_back(pt);
    }
    return out;
}

}  // namespace qcorr
