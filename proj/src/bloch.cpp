#include "qcorr/bloch.hpp"

#include <cmath>
#include <stdexcept>

namespace qcorr {

double clamped_sqrt(double v, double tol) {
    if (v < -tol) {
        throw std::domain_error("clamped_sqrt: argument " + std::to_string(v) +
                                " below -tolerance");
    }
    return std::sqrt(v > 0.0 ? v : 0.0);
}

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream) {
    // Mix seed and stream id so different streams are unrelated.
    std::uint64_t x = seed;
    std::uint64_t a = splitmix64(x);
    x = stream ^ 0x6a09e667f3bcc909ULL;
    std::uint64_t b = splitmix64(x);
    state_ = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
}

RngStream RngStream::split(std::uint64_t child) const {
    RngStream out;
    std::uint64_t x = state_ ^ (0x94d049bb133111ebULL * (child + 1));
    out.state_ = splitmix64(x);
    return out;
}

std::uint64_t RngStream::next_u64() { return splitmix64(state_); }

double RngStream::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double a, double b) { return a + (b - a) * uniform(); }

double RngStream::gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    double mag = std::sqrt(-2.0 * std::log(u1));
    spare_ = mag * std::sin(2.0 * M_PI * u2);
    has_spare_ = true;
    return mag * std::cos(2.0 * M_PI * u2);
}

BlochState::BlochState(const Eigen::Vector3d& v, double tol) : s(v) {
    if (s.norm() > 1.0 + tol) {
        throw std::invalid_argument("BlochState: |s| = " + std::to_string(s.norm()) +
                                    " exceeds 1");
    }
}

bool BlochState::is_pure(double tol) const { return std::abs(s.norm() - 1.0) <= tol; }

QubitObservable::QubitObservable(double r_, double r_prime_,
                                 const Eigen::Vector3d& axis_, double tol)
    : r(r_), r_prime(r_prime_), axis(axis_) {
    if (std::abs(axis.norm() - 1.0) > tol) {
        throw std::invalid_argument("QubitObservable: axis is not a unit vector");
    }
    if (r_prime < -tol || std::abs(r) > 1.0 + tol || r_prime + std::abs(r) > 1.0 + tol) {
        throw std::invalid_argument(
            "QubitObservable: (r, r') violates r' >= 0, |r| <= 1, r' + |r| <= 1");
    }
}

QubitObservable QubitObservable::projective(const Eigen::Vector3d& axis) {
    return QubitObservable(0.0, 1.0, axis);
}

bool QubitObservable::is_projective(double tol) const {
    return std::abs(r) <= tol && std::abs(r_prime - 1.0) <= tol;
}

double expectation(const QubitObservable& obs, const BlochState& st) {
    return obs.r + obs.r_prime * obs.axis.dot(st.s);
}

const Eigen::Matrix2cd& sigma_x() {
    static const Eigen::Matrix2cd m = (Eigen::Matrix2cd() << 0, 1, 1, 0).finished();
    return m;
}

const Eigen::Matrix2cd& sigma_y() {
    using namespace std::complex_literals;
    static const Eigen::Matrix2cd m = (Eigen::Matrix2cd() << 0, -1i, 1i, 0).finished();
    return m;
}

const Eigen::Matrix2cd& sigma_z() {
    static const Eigen::Matrix2cd m = (Eigen::Matrix2cd() << 1, 0, 0, -1).finished();
    return m;
}

const Eigen::Matrix2cd& id2() {
    static const Eigen::Matrix2cd m = Eigen::Matrix2cd::Identity();
    return m;
}

Eigen::Matrix2cd to_hermitian(const QubitObservable& obs) {
    return obs.r_prime * (obs.axis.x() * sigma_x() + obs.axis.y() * sigma_y() +
                          obs.axis.z() * sigma_z()) +
           obs.r * id2();
}

Eigen::Matrix2cd to_density(const BlochState& st) {
    return 0.5 * (id2() + st.s.x() * sigma_x() + st.s.y() * sigma_y() +
                  st.s.z() * sigma_z());
}

BlochState random_state(RngStream& rng, bool pure) {
    Eigen::Vector3d g(rng.gaussian(), rng.gaussian(), rng.gaussian());
    while (g.norm() < 1e-12) {
        g = Eigen::Vector3d(rng.gaussian(), rng.gaussian(), rng.gaussian());
    }
    g.normalize();
    if (!pure) {
        g *= std::cbrt(rng.uniform());
    }
    return BlochState(g);
}

QubitObservable random_povm(RngStream& rng, bool projective) {
    Eigen::Vector3d g(rng.gaussian(), rng.gaussian(), rng.gaussian());
    while (g.norm() < 1e-12) {
        g = Eigen::Vector3d(rng.gaussian(), rng.gaussian(), rng.gaussian());
    }
    g.normalize();
    if (projective) {
        return QubitObservable::projective(g);
    }
    // Uniform over the triangle {(|r|, r') : |r| + r' <= 1, both >= 0}.
    double a = rng.uniform();
    double b = rng.uniform();
    if (a + b > 1.0) {
        a = 1.0 - a;
        b = 1.0 - b;
    }
    double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    return QubitObservable(sign * a, b, g);
}

}  // namespace qcorr
