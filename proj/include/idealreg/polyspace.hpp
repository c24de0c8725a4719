#pragma once

// Dense homogeneous polynomials and the multiplied-up coefficient matrix Q.
//
// A polynomial of degree k in D variables is a vector of length
// simplex_number(k, D) indexed by enumerate_basis(D, k).  Multiplying by a
// monomial only permutes coefficients into a higher-degree layout, so the
// matrix Q of all products f_i * M is assembled without arithmetic.

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "idealreg/errors.hpp"
#include "idealreg/monomials.hpp"

namespace idealreg {

struct HomoPoly {
  int vars = 0;
  int degree = 0;
  Eigen::VectorXd coeffs;

  HomoPoly() = default;

  HomoPoly(int vars_, int degree_, Eigen::VectorXd coeffs_)
      : vars(vars_), degree(degree_), coeffs(std::move(coeffs_)) {
    if (coeffs.size() != simplex_number(degree, vars))
      throw std::invalid_argument("HomoPoly: coefficient length mismatch");
  }

  static HomoPoly zero(int vars, int degree) {
    return HomoPoly(
        vars, degree,
        Eigen::VectorXd::Zero(simplex_number(degree, vars)));
  }

  bool is_zero() const { return coeffs.size() == 0 || coeffs.isZero(0.0); }
};

// Rows are coefficient vectors sharing one degree.
struct CoeffMatrix {
  int vars = 0;
  int degree = 0;
  Eigen::MatrixXd rows;

  CoeffMatrix() = default;

  CoeffMatrix(int vars_, int degree_, Eigen::MatrixXd rows_)
      : vars(vars_), degree(degree_), rows(std::move(rows_)) {
    if (rows.cols() != simplex_number(degree, vars))
      throw std::invalid_argument("CoeffMatrix: column count mismatch");
  }

  Eigen::Index row_count() const { return rows.rows(); }
};

// Coefficients of p * M; every entry moves to its product position.
inline HomoPoly multiply_by_monomial(const HomoPoly& p, const MultiIndex& m) {
  if (static_cast<int>(m.exponents.size()) != p.vars)
    throw std::invalid_argument("multiply_by_monomial: variable mismatch");
  int out_degree = p.degree + m.degree();
  Eigen::VectorXd out =
      Eigen::VectorXd::Zero(simplex_number(out_degree, p.vars));
  MonomialBasis basis = enumerate_basis(p.vars, p.degree);
  for (Eigen::Index i = 0; i < p.coeffs.size(); ++i) {
    if (p.coeffs(i) == 0.0) continue;
    std::vector<int> sum = basis.index_at(i).exponents;
    for (std::size_t v = 0; v < sum.size(); ++v) sum[v] += m.exponents[v];
    out(detail::grevlex_rank(sum)) += p.coeffs(i);
  }
  return HomoPoly(p.vars, out_degree, std::move(out));
}

// The matrix whose rows are f_i * M over all monomials M of degree
// N - deg f_i, input-major and monomial-minor, so layouts are reproducible.
// Rows are scaled to unit length unless normalize is cleared; monomial
// multiplication changes row norms but not the ideal, and unnormalized rows
// would let high-degree products dominate every singular direction.
inline CoeffMatrix build_macaulay(const std::vector<HomoPoly>& polys, int N,
                                  bool normalize = true) {
  if (polys.empty())
    throw std::invalid_argument("build_macaulay: no input polynomials");
  const int D = polys.front().vars;
  for (const HomoPoly& p : polys) {
    if (p.vars != D)
      throw std::invalid_argument("build_macaulay: mixed variable counts");
    if (p.degree > N)
      throw std::invalid_argument(
          "build_macaulay: target degree below an input degree");
  }

  const int64_t cols = simplex_number(N, D);
  int64_t total_rows = 0;
  for (const HomoPoly& p : polys)
    total_rows += simplex_number(N - p.degree, D);

  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(total_rows, cols);

  // Product positions depend only on the input degree; build each map once.
  std::map<int, std::vector<std::vector<int64_t>>> position_maps;
  std::map<int, MonomialBasis> mult_bases;
  for (const HomoPoly& p : polys) {
    if (position_maps.count(p.degree)) continue;
    MonomialBasis src = enumerate_basis(D, p.degree);
    MonomialBasis mult = enumerate_basis(D, N - p.degree);
    std::vector<std::vector<int64_t>> maps(
        static_cast<std::size_t>(mult.size()));
    for (int64_t m = 0; m < mult.size(); ++m) {
      auto& row_map = maps[static_cast<std::size_t>(m)];
      row_map.resize(static_cast<std::size_t>(src.size()));
      for (int64_t i = 0; i < src.size(); ++i)
        row_map[static_cast<std::size_t>(i)] = product_index(src, mult, i, m);
    }
    position_maps.emplace(p.degree, std::move(maps));
    mult_bases.emplace(p.degree, std::move(mult));
  }

  int64_t r = 0;
  for (const HomoPoly& p : polys) {
    const auto& maps = position_maps.at(p.degree);
    for (const auto& row_map : maps) {
      for (Eigen::Index i = 0; i < p.coeffs.size(); ++i)
        q(r, row_map[static_cast<std::size_t>(i)]) = p.coeffs(i);
      if (normalize) {
        double norm = q.row(r).norm();
        if (norm == 0.0)
          throw degenerate_input(
              "build_macaulay: zero polynomial cannot be normalized");
        q.row(r) /= norm;
      }
      ++r;
    }
  }
  return CoeffMatrix(D, N, std::move(q));
}

inline double evaluate(const HomoPoly& p, const Eigen::VectorXd& x) {
  if (x.size() != p.vars)
    throw std::invalid_argument("evaluate: point dimension mismatch");
  MonomialBasis basis = enumerate_basis(p.vars, p.degree);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < p.coeffs.size(); ++i) {
    if (p.coeffs(i) == 0.0) continue;
    double term = p.coeffs(i);
    const MultiIndex& m = basis.index_at(i);
    for (int v = 0; v < p.vars; ++v)
      for (int e = 0; e < m.exponents[v]; ++e) term *= x(v);
    sum += term;
  }
  return sum;
}

}  // namespace idealreg
