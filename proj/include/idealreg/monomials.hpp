#pragma once

// Monomial combinatorics for dense homogeneous polynomial spaces.
//
// Monomials of a fixed degree k in D variables are kept in graded reverse
// lexicographic order, descending within the degree, so T1^2 > T1*T2 > T2^2.
// Positions in that order are computed by combinatorial ranking, never by
// searching, which keeps products of basis elements O(D + k) to locate.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "idealreg/errors.hpp"

namespace idealreg {

using std::int64_t;

namespace detail {

// C(n, k) in exact 64-bit arithmetic.  Intermediates use 128 bits, so the
// only failure mode is the value itself leaving the signed 64-bit range.
inline int64_t binomial_checked(int64_t n, int64_t k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 c = 1;
  for (int64_t i = 0; i < k; ++i) {
    c = c * static_cast<unsigned __int128>(n - i);
    c /= static_cast<unsigned __int128>(i + 1);
    if (c > static_cast<unsigned __int128>(std::numeric_limits<int64_t>::max()))
      throw overflow_error("binomial(" + std::to_string(n) + ", " +
                           std::to_string(k) + ") exceeds 64-bit range");
  }
  return static_cast<int64_t>(c);
}

}  // namespace detail

// Number of degree-a monomials in b variables: C(a+b-1, a).  Zero for a < 0,
// which lets dimension formulas treat out-of-range degrees uniformly.
inline int64_t simplex_number(int64_t a, int64_t b) {
  if (b < 1)
    throw std::invalid_argument("simplex_number: variable count must be >= 1");
  if (a < 0) return 0;
  return detail::binomial_checked(a + b - 1, a);
}

// Exponent vector of a monomial; entry v is the power of variable v.
struct MultiIndex {
  std::vector<int> exponents;

  int degree() const {
    return std::accumulate(exponents.begin(), exponents.end(), 0);
  }

  bool operator==(const MultiIndex&) const = default;
};

namespace detail {

// Rank of an exponent vector among all monomials of its degree, in the
// descending grevlex enumeration.  Monomials are grouped by the exponent of
// the last variable, ascending; each group is the same enumeration one
// variable down.
inline int64_t grevlex_rank(const std::vector<int>& e) {
  int64_t rank = 0;
  int k = std::accumulate(e.begin(), e.end(), 0);
  for (int v = static_cast<int>(e.size()) - 1; v >= 1; --v) {
    for (int j = 0; j < e[v]; ++j) rank += simplex_number(k - j, v);
    k -= e[v];
  }
  return rank;
}

inline void grevlex_fill(int vars, int degree, std::vector<int>& prefix,
                         std::vector<MultiIndex>& out) {
  if (vars == 1) {
    MultiIndex m;
    m.exponents.reserve(prefix.size() + 1);
    m.exponents.push_back(degree);
    m.exponents.insert(m.exponents.end(), prefix.rbegin(), prefix.rend());
    out.push_back(std::move(m));
    return;
  }
  for (int last = 0; last <= degree; ++last) {
    prefix.push_back(last);
    grevlex_fill(vars - 1, degree - last, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace detail

// All monomials of one degree, materialized in canonical order.  position_of
// inverts index_at by ranking, so round trips cost no searches.
class MonomialBasis {
 public:
  MonomialBasis(int vars, int degree) : vars_(vars), degree_(degree) {
    if (vars < 1) throw std::invalid_argument("MonomialBasis: vars must be >= 1");
    if (degree < 0)
      throw std::invalid_argument("MonomialBasis: degree must be >= 0");
    entries_.reserve(static_cast<std::size_t>(simplex_number(degree, vars)));
    std::vector<int> prefix;
    detail::grevlex_fill(vars, degree, prefix, entries_);
  }

  int vars() const { return vars_; }
  int degree() const { return degree_; }
  int64_t size() const { return static_cast<int64_t>(entries_.size()); }

  const MultiIndex& index_at(int64_t i) const {
    if (i < 0 || i >= size())
      throw std::invalid_argument("MonomialBasis: index out of range");
    return entries_[static_cast<std::size_t>(i)];
  }

  int64_t position_of(const MultiIndex& m) const {
    if (static_cast<int>(m.exponents.size()) != vars_)
      throw std::invalid_argument("MonomialBasis: wrong variable count");
    for (int e : m.exponents)
      if (e < 0) throw std::invalid_argument("MonomialBasis: negative exponent");
    if (m.degree() != degree_)
      throw std::invalid_argument("MonomialBasis: wrong degree");
    return detail::grevlex_rank(m.exponents);
  }

  const std::vector<MultiIndex>& entries() const { return entries_; }

 private:
  int vars_;
  int degree_;
  std::vector<MultiIndex> entries_;
};

inline MonomialBasis enumerate_basis(int vars, int degree) {
  return MonomialBasis(vars, degree);
}

// Position of basis_a[i] * basis_b[j] inside the degree-(ka+kb) enumeration.
inline int64_t product_index(const MonomialBasis& basis_a,
                             const MonomialBasis& basis_b, int64_t i,
                             int64_t j) {
  if (basis_a.vars() != basis_b.vars())
    throw std::invalid_argument("product_index: mixed variable counts");
  const MultiIndex& a = basis_a.index_at(i);
  const MultiIndex& b = basis_b.index_at(j);
  std::vector<int> sum(a.exponents.size());
  for (std::size_t v = 0; v < sum.size(); ++v)
    sum[v] = a.exponents[v] + b.exponents[v];
  return detail::grevlex_rank(sum);
}

}  // namespace idealreg
