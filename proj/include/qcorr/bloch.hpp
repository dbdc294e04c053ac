#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace qcorr {

/// Global tolerance used by invariant checks unless a caller overrides it.
inline constexpr double kTol = 1e-9;

/// sqrt with clamping for arguments that are analytically >= 0 but may come
/// out slightly negative numerically. Arguments below -tol throw.
double clamped_sqrt(double v, double tol = kTol);

/// Deterministic counter-based random stream (splitmix64 core). Streams can
/// be split into disjoint child streams so parallel workers stay reproducible.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

    /// Child stream derived from (this stream, index); independent of calls
    /// already made on the parent.
    RngStream split(std::uint64_t child) const;

    std::uint64_t next_u64();
    double uniform();                    // [0, 1)
    double uniform(double a, double b);  // [a, b)
    double gaussian();                   // standard normal

  private:
    RngStream() = default;
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Qubit state as a Bloch vector, |s| <= 1. |s| = 1 is a pure state.
struct BlochState {
    Eigen::Vector3d s;

    explicit BlochState(const Eigen::Vector3d& v, double tol = kTol);
    bool is_pure(double tol = kTol) const;
};

/// Binary qubit measurement encoded by its effect pair {(1 +/- A)/2} with
/// A = r_prime * axis.sigma + r * 1. Validity: r_prime >= 0, |r| <= 1,
/// r_prime + |r| <= 1. r_prime = 1, r = 0 is the sharp (projective) case.
struct QubitObservable {
    double r;               // identity offset
    double r_prime;         // scale of the sharp part
    Eigen::Vector3d axis;   // unit vector

    QubitObservable(double r, double r_prime, const Eigen::Vector3d& axis,
                    double tol = kTol);
    static QubitObservable projective(const Eigen::Vector3d& axis);
    bool is_projective(double tol = kTol) const;
};

/// <A>_rho = r + r_prime * (axis . s). Always in [r - r_prime, r + r_prime].
double expectation(const QubitObservable& obs, const BlochState& st);

/// 2x2 Hermitian matrix of the observable.
Eigen::Matrix2cd to_hermitian(const QubitObservable& obs);

/// Density matrix (1 + s.sigma)/2 of the state.
Eigen::Matrix2cd to_density(const BlochState& st);

/// pure = true: uniform on the unit sphere; otherwise uniform in the ball.
BlochState random_state(RngStream& rng, bool pure);

/// projective = true: r = 0, r_prime = 1, uniform axis. Otherwise (|r|,
/// r_prime) uniform on the validity simplex r_prime + |r| <= 1, sign of r
/// uniform, uniform axis.
QubitObservable random_povm(RngStream& rng, bool projective);

const Eigen::Matrix2cd& sigma_x();
const Eigen::Matrix2cd& sigma_y();
const Eigen::Matrix2cd& sigma_z();
const Eigen::Matrix2cd& id2();

}  // namespace qcorr
