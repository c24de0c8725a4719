#pragma once

// Truncated integer power series supporting the degree-bound calculation.
//
// The series of interest is
//
//     prod_i (1 - t^{d_i}) / (1 - t)^D  -  1 / (1 - t)^d
//
// whose coefficient at t^k predicts dim s_k - dim I_k for generic forms of
// degrees d_i inside the vanishing ideal s of a d-dimensional subspace.  The
// first non-positive coefficient locates the degree at which the generated
// ideal is expected to fill s, which is the multiplication depth the
// saturation algorithms need.  All arithmetic is exact 64-bit with overflow
// detection; nothing here is floating point.

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "idealreg/errors.hpp"
#include "idealreg/monomials.hpp"

namespace idealreg {

namespace detail {

inline int64_t checked_add(int64_t a, int64_t b) {
  int64_t r;
  if (__builtin_add_overflow(a, b, &r))
    throw overflow_error("series coefficient exceeds 64-bit range");
  return r;
}

inline int64_t checked_sub(int64_t a, int64_t b) {
  int64_t r;
  if (__builtin_sub_overflow(a, b, &r))
    throw overflow_error("series coefficient exceeds 64-bit range");
  return r;
}

}  // namespace detail

// Coefficients c[0..order] of a power series truncated after t^order.
class TruncatedSeries {
 public:
  explicit TruncatedSeries(std::vector<int64_t> coeffs)
      : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty())
      throw std::invalid_argument("TruncatedSeries: needs at least c[0]");
  }

  static TruncatedSeries one(int order) {
    std::vector<int64_t> c(static_cast<std::size_t>(order) + 1, 0);
    c[0] = 1;
    return TruncatedSeries(std::move(c));
  }

  int order() const { return static_cast<int>(coeffs_.size()) - 1; }

  int64_t at(int k) const {
    if (k < 0 || k > order())
      throw std::invalid_argument("TruncatedSeries: index out of range");
    return coeffs_[static_cast<std::size_t>(k)];
  }

  const std::vector<int64_t>& coeffs() const { return coeffs_; }

  // In-place product with (1 - t^p).
  void multiply_one_minus_power(int p) {
    if (p < 1) throw std::invalid_argument("multiply_one_minus_power: p >= 1");
    for (int k = order(); k >= p; --k)
      coeffs_[k] = detail::checked_sub(coeffs_[k], coeffs_[k - p]);
  }

  // In-place product with 1 / (1 - t), i.e. running sums.
  void divide_one_minus_t() {
    for (int k = 1; k <= order(); ++k)
      coeffs_[k] = detail::checked_add(coeffs_[k], coeffs_[k - 1]);
  }

  void subtract(const TruncatedSeries& other) {
    if (other.order() != order())
      throw std::invalid_argument("TruncatedSeries: order mismatch");
    for (int k = 0; k <= order(); ++k)
      coeffs_[k] = detail::checked_sub(coeffs_[k], other.coeffs_[k]);
  }

 private:
  std::vector<int64_t> coeffs_;
};

// dim of the degree-k slice of the vanishing ideal of a d-dimensional linear
// subspace of a D-dimensional space: simplex(k, D) - simplex(k, d), with the
// d = 0 case reading 1/(1-t)^0 = 1.
inline int64_t linear_ideal_dim(int k, int D, int d) {
  if (k < 0) throw std::invalid_argument("linear_ideal_dim: degree must be >= 0");
  if (D < 1 || d < 0 || d > D)
    throw std::invalid_argument("linear_ideal_dim: need 0 <= d <= D, D >= 1");
  int64_t ambient = simplex_number(k, D);
  int64_t sub = (d == 0) ? (k == 0 ? 1 : 0) : simplex_number(k, d);
  return ambient - sub;
}

// Coefficients 0..order of prod_i (1-t^{d_i}) / (1-t)^D - 1/(1-t)^d.
inline TruncatedSeries expected_difference_series(
    const std::vector<int>& degrees, int D, int d, int order) {
  if (D < 1) throw std::invalid_argument("expected_difference_series: D >= 1");
  if (d < 0 || d >= D)
    throw std::invalid_argument("expected_difference_series: need 0 <= d < D");
  if (order < 0)
    throw std::invalid_argument("expected_difference_series: order >= 0");
  for (int di : degrees)
    if (di < 1)
      throw std::invalid_argument(
          "expected_difference_series: generator degrees must be >= 1");

  TruncatedSeries s = TruncatedSeries::one(order);
  for (int di : degrees) s.multiply_one_minus_power(di);
  for (int i = 0; i < D; ++i) s.divide_one_minus_t();

  std::vector<int64_t> sub(static_cast<std::size_t>(order) + 1, 0);
  for (int k = 0; k <= order; ++k)
    sub[k] = (d == 0) ? (k == 0 ? 1 : 0) : simplex_number(k, d);
  s.subtract(TruncatedSeries(std::move(sub)));
  return s;
}

// Zero out the tail starting at the first non-positive coefficient that
// follows a positive one; leading zeros survive.  Applying the rule twice
// changes nothing.
inline TruncatedSeries froberg_truncate(const TruncatedSeries& s) {
  std::vector<int64_t> c = s.coeffs();
  bool seen_positive = false;
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (c[k] > 0) {
      seen_positive = true;
    } else if (seen_positive) {
      std::fill(c.begin() + static_cast<std::ptrdiff_t>(k), c.end(), 0);
      break;
    }
  }
  return TruncatedSeries(std::move(c));
}

struct DegreeBound {
  int n = 0;                     // first degree with non-positive coefficient
  bool conjectural = false;      // outside the proven regime d_i <= 2, D <= 11
  bool span_guaranteed = false;  // n_polys > D, the filling theorem's premise
  int k_min = 0;                 // scan start: first k with dim s_k > 0
  std::vector<int64_t> series;   // coefficient prefix 0..n
};

// Degree at which generic forms of the given degrees are expected to span the
// full slice s_N.  The index is a property of the series alone and is
// computed for any degree list; the guarantee that the generated ideal really
// fills s_N additionally needs more generators than variables, reported via
// span_guaranteed.  The truncation order starts at 4 * max(d_i) * D and
// doubles as needed up to a hard cap.
inline DegreeBound degree_bound(const std::vector<int>& degrees, int D, int d) {
  if (D < 1 || d < 0 || d >= D)
    throw std::invalid_argument("degree_bound: need 0 <= d < D");
  constexpr int kOrderCap = 512;

  int max_deg = 1;
  for (int di : degrees) max_deg = std::max(max_deg, di);

  DegreeBound result;
  result.conjectural = D > 11;
  for (int di : degrees)
    if (di > 2) result.conjectural = true;
  result.span_guaranteed = static_cast<int>(degrees.size()) > D;

  int k_min = 0;
  while (linear_ideal_dim(k_min, D, d) <= 0) ++k_min;
  result.k_min = k_min;

  int order = std::min(std::max(4 * max_deg * D, k_min + 1), kOrderCap);
  for (;;) {
    TruncatedSeries s = expected_difference_series(degrees, D, d, order);
    for (int k = k_min; k <= order; ++k) {
      if (s.at(k) <= 0) {
        result.n = k;
        result.series.assign(s.coeffs().begin(), s.coeffs().begin() + k + 1);
        return result;
      }
    }
    if (order >= kOrderCap)
      throw no_convergence(
          "degree_bound: no non-positive coefficient up to order " +
          std::to_string(kOrderCap));
    order = std::min(order * 2, kOrderCap);
  }
}

// Smallest degree at which the count of multiplied generators reaches the
// slice dimension: sum_i simplex(k - d_i, D) >= dim s_k.  A row-count
// diagnostic only; rank deficiencies usually push the usable degree higher.
inline int row_count_crossing(const std::vector<int>& degrees, int D, int d) {
  if (degrees.empty())
    throw std::invalid_argument("row_count_crossing: needs generators");
  constexpr int kOrderCap = 512;
  for (int k = 1; k <= kOrderCap; ++k) {
    int64_t rows = 0;
    for (int di : degrees)
      rows = detail::checked_add(rows, simplex_number(k - di, D));
    if (rows >= linear_ideal_dim(k, D, d)) return k;
  }
  throw no_convergence("row_count_crossing: no crossing up to order 512");
}

}  // namespace idealreg
