#pragma once

// Exact matrix rank over F_p for integer matrices, by Gaussian elimination.
//
// For an integer matrix, rank over F_p never exceeds rank over Q, so a
// mod-p rank equal to a proven upper bound certifies the rational rank.
// The elimination core is templated on the prime so the compiler lowers
// the reductions to multiply-shift sequences instead of hardware division.

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace idealreg {

using MatrixXi64 = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using VectorXi64 = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

// 31-bit primes; products of two residues fit comfortably in 64 bits.
inline constexpr std::array<std::uint32_t, 3> kRankPrimes{
    2147483647u, 2147483629u, 2147483587u};

namespace detail {

template <std::uint32_t P>
std::uint32_t modpow(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t acc = 1;
  base %= P;
  while (exp) {
    if (exp & 1) acc = acc * base % P;
    base = base * base % P;
    exp >>= 1;
  }
  return static_cast<std::uint32_t>(acc);
}

template <std::uint32_t P>
int eliminate(std::vector<std::uint32_t>& m, std::int64_t rows,
              std::int64_t cols) {
  int rank = 0;
  for (std::int64_t col = 0; col < cols && rank < rows; ++col) {
    std::int64_t pivot = -1;
    for (std::int64_t r = rank; r < rows; ++r) {
      if (m[r * cols + col]) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) continue;
    if (pivot != rank) {
      for (std::int64_t k = col; k < cols; ++k)
        std::swap(m[pivot * cols + k], m[rank * cols + k]);
    }
    std::uint64_t inv = modpow<P>(m[rank * cols + col], P - 2);
    for (std::int64_t k = col; k < cols; ++k)
      m[rank * cols + k] =
          static_cast<std::uint32_t>(m[rank * cols + k] * inv % P);
    for (std::int64_t r = rank + 1; r < rows; ++r) {
      std::uint64_t f = m[r * cols + col];
      if (!f) continue;
      std::uint64_t neg = P - f;
      const std::uint32_t* prow = &m[rank * cols];
      std::uint32_t* rrow = &m[r * cols];
      for (std::int64_t k = col; k < cols; ++k)
        rrow[k] = static_cast<std::uint32_t>((rrow[k] + neg * prow[k]) % P);
    }
    ++rank;
  }
  return rank;
}

template <std::uint32_t P>
int rank_mod_prime(const MatrixXi64& a) {
  std::int64_t rows = a.rows(), cols = a.cols();
  if (rows == 0 || cols == 0) return 0;
  std::vector<std::uint32_t> m(static_cast<std::size_t>(rows * cols));
  for (std::int64_t r = 0; r < rows; ++r) {
    for (std::int64_t c = 0; c < cols; ++c) {
      std::int64_t v = a(r, c) % static_cast<std::int64_t>(P);
      if (v < 0) v += P;
      m[r * cols + c] = static_cast<std::uint32_t>(v);
    }
  }
  return eliminate<P>(m, rows, cols);
}

}  // namespace detail

// Rank of an integer matrix over F_p, a lower bound on its rational rank.
inline int rank_mod_p(const MatrixXi64& a, int which_prime = 0) {
  switch (which_prime) {
    case 0:
      return detail::rank_mod_prime<kRankPrimes[0]>(a);
    case 1:
      return detail::rank_mod_prime<kRankPrimes[1]>(a);
    case 2:
      return detail::rank_mod_prime<kRankPrimes[2]>(a);
    default:
      throw std::invalid_argument("rank_mod_p: prime index out of range");
  }
}

}  // namespace idealreg
