#pragma once

#include <optional>
#include <vector>

#include "qcorr/criteria.hpp"

namespace qcorr {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
};

/// One surviving offset cell with the scale intervals that cover the data and
/// the induced bounds on c * r'_i * r'_j. c_unconstrained marks cells whose
/// scale product vanishes (the angle carries no meaning there).
struct RegionCell {
    double r_i = 0.0;
    double r_j = 0.0;
    Interval r_prime_i;
    Interval r_prime_j;
    Interval scaled_c;
    double margin = 0.0;
    bool c_unconstrained = false;
};

/// Offset-region output of inference. unique is set when the surviving
/// region's extent in (r_i, r_j, c) stays below 10 grid steps; cells with an
/// unconstrained angle contribute no c-extent.
struct ParamRegion {
    std::vector<RegionCell> cells;
    bool unique = false;
    double grid_step = 0.0;
};

/// All grid cells (r_i, r_j) whose feasibility slack is >= -cfg.tol and whose
/// scale intervals are nonempty for both measurements.
ParamRegion infer_r_region(const PMRecordSet& records, std::size_t i, std::size_t j,
                           const GridConfig& cfg = {});

/// Valid scale range at a given offset: [max_rho |A - r|, 1 - |r|]. Empty
/// (nullopt) means the offset cannot host the data.
std::optional<Interval> infer_rprime_bounds(const PMRecordSet& records,
                                            std::size_t i, double r_i,
                                            double tol = kTol);

struct CInterval {
    Interval c;
    bool unconstrained = false;
};

/// Bounds for the measurement angle c given offsets and scales, intersected
/// with [-1, 1]. Scale products <= tol leave c unconstrained ([-1, 1],
/// flagged). Throws when a scale cannot cover a row.
CInterval infer_c_interval(const PMRecordSet& records, std::size_t i, std::size_t j,
                           double r_i, double r_j, double rp_i, double rp_j,
                           double tol = kTol);

/// Bloch vector compatible with two sharp expectations:
///   s = ((A0 a1 - A1 a0) x (a0 x a1) + t (a0 x a1)) / |a0 x a1|^2.
/// a0.s = A0 and a1.s = A1 hold exactly for every t; |s| <= 1 iff
/// |t| <= t_bound. Collinear axes are accepted only when A0 and A1 are
/// consistent (A0 = c A1), in which case t moves s along a fixed direction
/// orthogonal to a0. Throws for |t| beyond the physical bound.
BlochState reconstruct_state(double A0, double A1, const Eigen::Vector3d& a0,
                             const Eigen::Vector3d& a1, double t, double tol = kTol);

/// sqrt((1 - A0^2)(1 - A1^2) - (c - A0 A1)^2), clamped at -tol.
double t_bound(double A0, double A1, double c, double tol = kTol);

/// Closed-form boundary curve parametrized by the measurement angle
/// cos(theta). x and y are the published closed forms; the curve point on
/// the correlation family's own (x, y) axes is (family_x, family_y) =
/// (u (1 - x), x) -- the published labels are rotated relative to the family
/// parametrization. r is the inferred offset of the unsharp measurement
/// (its scale is 1 - r), on_branch requires y in [0, 1].
struct SmBoundaryPoint {
    double theta = 0.0;
    double x = 0.0;
    double y = 0.0;
    double u = 0.0;
    double r = 0.0;
    double family_x = 0.0;
    double family_y = 0.0;
    bool on_branch = false;
};
SmBoundaryPoint sm_boundary(double theta, double tol = kTol);

enum class Family { QBell, QPm };
enum class ScanAxis { LargestYForX, LargestXForY };

/// One scan result: `fixed` is the value on the scanned axis, `star` the
/// largest feasible value of the other coordinate (negative when even 0 is
/// infeasible), `margin` the slack at `star`.
struct BoundaryPoint {
    double fixed = 0.0;
    double star = 0.0;
    double margin = 0.0;
};

/// Maps the feasible frontier of a correlation family by bisection on the
/// chosen criterion, to absolute tolerance `tol` on the scanned coordinate.
std::vector<BoundaryPoint> scan_boundary(Family family, CriterionMode mode,
                                         const std::vector<double>& grid,
                                         double tol, ScanAxis axis,
                                         const GridConfig& cfg = {});

}  // namespace qcorr
