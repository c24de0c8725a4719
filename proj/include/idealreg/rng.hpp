#pragma once

// Self-contained deterministic RNG so identical seeds give identical output
// regardless of standard-library version or thread count.
//
// Core generator: SplitMix64 (Steele, Lea, Flood; public domain reference
// constants).  State advances by the 64-bit golden-ratio increment and each
// output is the finalizer mix64(state).  Substreams are keyed as
// mix64(seed + (index + 1) * 0x9E3779B97F4A7C15), which scrambles the key
// before it becomes generator state.
//
// Derived draws, in consumption order:
//   uniform():  ((next() >> 11) + 1) * 2^-53, a double in (0, 1]
//   gaussian(): Box-Muller pair from two uniforms; the second value of each
//               pair is cached and returned by the following call.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>

namespace idealreg {

namespace detail {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;

inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace detail

class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

  std::uint64_t next() {
    state_ += detail::kGoldenGamma;
    return detail::mix64(state_);
  }

  // Uniform double in (0, 1]; never 0 so it is log-safe.
  double uniform() {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Integer uniform on [lo, hi], both ends included; rejection-free modulo
  // with negligible bias for the small ranges used here.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(next() % span);
  }

  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  Rng substream(std::uint64_t index) const {
    return Rng(detail::mix64(state_ + (index + 1) * detail::kGoldenGamma));
  }

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

inline Rng substream(std::uint64_t seed, std::uint64_t index) {
  return Rng(seed).substream(index);
}

inline Eigen::MatrixXd random_gaussian_matrix(Eigen::Index rows,
                                              Eigen::Index cols, Rng& rng) {
  Eigen::MatrixXd a(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = rng.gaussian();
  return a;
}

// Haar-distributed orthogonal matrix: QR of a Gaussian draw with column
// signs fixed so the R diagonal is positive (makes Q unique).
inline Eigen::MatrixXd random_orthogonal(Eigen::Index n, Rng& rng) {
  Eigen::MatrixXd g = random_gaussian_matrix(n, n, rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

// Symmetric positive-definite matrix with eigenvalues uniform in [lo, hi].
inline Eigen::MatrixXd random_spd(Eigen::Index n, double lo, double hi,
                                  Rng& rng) {
  Eigen::MatrixXd q = random_orthogonal(n, rng);
  Eigen::VectorXd eigs(n);
  for (Eigen::Index i = 0; i < n; ++i) eigs(i) = rng.uniform(lo, hi);
  return q * eigs.asDiagonal() * q.transpose();
}

}  // namespace idealreg
