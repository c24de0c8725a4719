#pragma once

// Generic sampling inside the vanishing ideal of a linear subspace, and the
// computer-verification routines built on it: checking that generic forms of
// prescribed degrees achieve the rank the truncated difference series
// predicts, and finding the spanning degree empirically.
//
// Two sampling flavors.  Float: orthonormal subspace data, Gaussian
// coefficients, ranks by SVD threshold.  Integer: bounded integer
// coefficients so Macaulay ranks can be certified exactly.  A rank over a
// prime field never exceeds the rank over the rationals, and the rational
// rank never exceeds the series prediction, so hitting the prediction
// modulo one prime certifies equality.

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "idealreg/approxla.hpp"
#include "idealreg/errors.hpp"
#include "idealreg/modrank.hpp"
#include "idealreg/monomials.hpp"
#include "idealreg/polyspace.hpp"
#include "idealreg/rng.hpp"
#include "idealreg/series.hpp"

namespace idealreg {

// Orthonormal subspace bases plus the random stream used to draw generic
// ideal elements.  The complement rows are the coefficient vectors of the
// linear forms vanishing on the subspace.
class GenericSampler {
 public:
  GenericSampler(Eigen::MatrixXd subspace_basis, Rng rng)
      : s_(std::move(subspace_basis)), rng_(rng) {
    const Eigen::Index d = s_.rows();
    const Eigen::Index D = s_.cols();
    if (d < 1 || d > D)
      throw std::invalid_argument("GenericSampler: need a d x D basis, 1 <= d <= D");
    if ((s_ * s_.transpose() - Eigen::MatrixXd::Identity(d, d))
            .cwiseAbs()
            .maxCoeff() > 1e-10)
      throw std::invalid_argument("GenericSampler: basis rows must be orthonormal");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(s_, Eigen::ComputeFullV);
    ell_ = svd.matrixV().rightCols(D - d).transpose();
    detail::fix_row_signs(ell_);
  }

  // Uniformly random d-dimensional subspace; the complement comes from the
  // same orthogonal frame, so the two bases annihilate each other exactly.
  static GenericSampler random(int D, int d, Rng rng) {
    if (d < 1 || d > D)
      throw std::invalid_argument("GenericSampler: need 1 <= d <= D");
    Eigen::MatrixXd q = random_orthogonal(D, rng);
    GenericSampler s;
    s.s_ = q.topRows(d);
    s.ell_ = q.bottomRows(D - d);
    s.rng_ = rng;
    return s;
  }

  int vars() const { return static_cast<int>(s_.cols()); }
  int dim() const { return static_cast<int>(s_.rows()); }
  const Eigen::MatrixXd& subspace_basis() const { return s_; }
  const Eigen::MatrixXd& complement_basis() const { return ell_; }
  Rng& rng() { return rng_; }

 private:
  GenericSampler() = default;

  Eigen::MatrixXd s_;    // d x D
  Eigen::MatrixXd ell_;  // (D-d) x D
  Rng rng_{0};
};

// Generic degree-k elements of the ideal: each output is sum_j ell_j * g_j
// with independent standard-Gaussian coefficient polynomials g_j of degree
// k-1, so every output vanishes on the subspace by construction.
inline std::vector<HomoPoly> sample_in_ideal(GenericSampler& s, int degree,
                                             int count) {
  if (degree < 1)
    throw std::invalid_argument("sample_in_ideal: degree must be >= 1");
  if (count < 0)
    throw std::invalid_argument("sample_in_ideal: count must be >= 0");
  if (s.dim() == s.vars())
    throw std::invalid_argument(
        "sample_in_ideal: no linear forms vanish on a full-dimensional subspace");

  const int D = s.vars();
  const Eigen::MatrixXd& ell = s.complement_basis();
  const MonomialBasis gb = enumerate_basis(D, degree - 1);

  std::vector<HomoPoly> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    HomoPoly f = HomoPoly::zero(D, degree);
    for (Eigen::Index j = 0; j < ell.rows(); ++j) {
      Eigen::VectorXd g(gb.size());
      for (Eigen::Index t = 0; t < g.size(); ++t) g(t) = s.rng().gaussian();
      HomoPoly gp(D, degree - 1, std::move(g));
      for (int v = 0; v < D; ++v) {
        if (ell(j, v) == 0.0) continue;
        std::vector<int> e(static_cast<std::size_t>(D), 0);
        e[static_cast<std::size_t>(v)] = 1;
        f.coeffs += ell(j, v) * multiply_by_monomial(gp, MultiIndex{e}).coeffs;
      }
    }
    out.push_back(std::move(f));
  }
  return out;
}

// Integer analogue for exact rank certification: the subspace is the common
// zero set of (D-d) random bounded-integer linear forms, and every sampled
// polynomial is an integer combination sum_j ell_j * g_j.
struct IntPolySet {
  int vars = 0;
  std::vector<int> degrees;
  MatrixXi64 lin_forms;              // (D-d) x D, full row rank
  std::vector<VectorXi64> coeffs;    // packed degree-d_i coefficient vectors
};

inline IntPolySet sample_in_ideal_int(int D, int d,
                                      const std::vector<int>& degrees,
                                      Rng rng,
                                      std::int64_t bound = 1000000) {
  if (d < 1 || d >= D)
    throw std::invalid_argument("sample_in_ideal_int: need 1 <= d < D");
  if (bound < 1)
    throw std::invalid_argument("sample_in_ideal_int: bound must be >= 1");
  for (int di : degrees)
    if (di < 1)
      throw std::invalid_argument("sample_in_ideal_int: degrees must be >= 1");

  IntPolySet ps;
  ps.vars = D;
  ps.degrees = degrees;

  // Random integer forms are full-rank off a measure-zero set; certify with
  // one prime and redraw on the unlucky event.
  const int codim = D - d;
  for (int attempt = 0; attempt < 16; ++attempt) {
    MatrixXi64 l(codim, D);
    for (int i = 0; i < codim; ++i)
      for (int v = 0; v < D; ++v) l(i, v) = rng.uniform_int(-bound, bound);
    if (rank_mod_p(l) == codim) {
      ps.lin_forms = std::move(l);
      break;
    }
  }
  if (ps.lin_forms.rows() != codim)
    throw degenerate_input(
        "sample_in_ideal_int: could not draw independent linear forms");

  for (int di : degrees) {
    const MonomialBasis gb = enumerate_basis(D, di - 1);
    const MonomialBasis fb = enumerate_basis(D, di);
    VectorXi64 f = VectorXi64::Zero(fb.size());
    for (int j = 0; j < codim; ++j) {
      VectorXi64 g(gb.size());
      for (Eigen::Index t = 0; t < g.size(); ++t)
        g(t) = rng.uniform_int(-bound, bound);
      for (Eigen::Index t = 0; t < gb.size(); ++t) {
        for (int v = 0; v < D; ++v) {
          if (ps.lin_forms(j, v) == 0) continue;
          std::vector<int> e = gb.index_at(t).exponents;
          ++e[static_cast<std::size_t>(v)];
          f(detail::grevlex_rank(e)) += ps.lin_forms(j, v) * g(t);
        }
      }
    }
    ps.coeffs.push_back(std::move(f));
  }
  return ps;
}

// Integer Macaulay matrix at degree k: every polynomial times every monomial
// of the complementary degree, coefficients placed by grevlex position.  No
// row scaling, so ranks over prime fields are meaningful.  Polynomials of
// degree above k contribute no rows when skip_higher is set and are an error
// otherwise.
inline MatrixXi64 build_macaulay_int(const IntPolySet& ps, int k,
                                     bool skip_higher = false) {
  if (k < 1)
    throw std::invalid_argument("build_macaulay_int: degree must be >= 1");
  const int D = ps.vars;
  std::int64_t total_rows = 0;
  for (int di : ps.degrees) {
    if (di > k) {
      if (skip_higher) continue;
      throw std::invalid_argument(
          "build_macaulay_int: target degree below a generator degree");
    }
    total_rows += simplex_number(k - di, D);
  }

  const MonomialBasis out_basis = enumerate_basis(D, k);
  MatrixXi64 m = MatrixXi64::Zero(total_rows, out_basis.size());
  std::int64_t row = 0;
  for (std::size_t i = 0; i < ps.degrees.size(); ++i) {
    const int di = ps.degrees[i];
    if (di > k) continue;
    const MonomialBasis pb = enumerate_basis(D, di);
    const MonomialBasis sb = enumerate_basis(D, k - di);
    for (Eigen::Index g = 0; g < sb.size(); ++g) {
      for (Eigen::Index t = 0; t < pb.size(); ++t) {
        const std::int64_t c = ps.coeffs[i](t);
        if (c == 0) continue;
        m(row, product_index(pb, sb, t, g)) += c;
      }
      ++row;
    }
  }
  return m;
}

namespace detail {

// Series prediction for the Macaulay rank at degree k: the slice dimension
// minus the truncated difference coefficient (clamped at zero for degree
// lists whose series never goes positive).
inline std::int64_t predicted_rank(const std::vector<int>& degrees, int D,
                                   int d, int k) {
  TruncatedSeries trunc =
      froberg_truncate(expected_difference_series(degrees, D, d, k));
  return linear_ideal_dim(k, D, d) - std::max<std::int64_t>(0, trunc.at(k));
}

}  // namespace detail

struct FrobergCheck {
  bool verified = false;
  std::int64_t rank = 0;      // best rank seen across attempts
  std::int64_t expected = 0;  // series prediction
  int attempts = 0;
};

// Does a generic draw of the given degrees achieve the predicted rank at
// degree k?  Exact mode certifies with integer coefficients over prime
// fields; float mode measures an SVD rank with a conservative threshold
// (1e-6 relative, documented as heuristic).  Redraws up to a retry cap, so
// a single unlucky draw or prime cannot fail the check.
inline FrobergCheck check_froberg(const std::vector<int>& degrees, int D,
                                  int d, int k, std::uint64_t seed,
                                  bool exact) {
  if (d < 1 || d >= D)
    throw std::invalid_argument("check_froberg: need 1 <= d < D");
  if (k < 1) throw std::invalid_argument("check_froberg: degree must be >= 1");
  if (degrees.empty())
    throw std::invalid_argument("check_froberg: needs generator degrees");

  // Generators of degree above k contribute no rows at degree k, and the
  // series prediction at k does not see them either.
  std::vector<int> active;
  for (int di : degrees)
    if (di <= k) active.push_back(di);

  FrobergCheck result;
  result.expected = detail::predicted_rank(degrees, D, d, k);

  constexpr int kRetryCap = 5;
  for (int attempt = 0; attempt < kRetryCap; ++attempt) {
    result.attempts = attempt + 1;
    Rng stream = substream(seed, static_cast<std::uint64_t>(attempt));
    if (active.empty()) {
      result.rank = 0;
    } else if (exact) {
      IntPolySet ps = sample_in_ideal_int(D, d, active, stream);
      MatrixXi64 m = build_macaulay_int(ps, k);
      for (int prime = 0; prime < 3; ++prime) {
        std::int64_t r = rank_mod_p(m, prime);
        result.rank = std::max(result.rank, r);
        if (r == result.expected) break;
      }
    } else {
      GenericSampler s = GenericSampler::random(D, d, stream);
      std::vector<HomoPoly> polys;
      for (int di : active) {
        std::vector<HomoPoly> drawn = sample_in_ideal(s, di, 1);
        polys.push_back(std::move(drawn.front()));
      }
      CoeffMatrix q = build_macaulay(polys, k);
      result.rank = std::max<std::int64_t>(
          result.rank, numerical_rank(q.rows, 1e-6));
    }
    if (result.rank == result.expected) {
      result.verified = true;
      return result;
    }
  }
  return result;
}

// Smallest degree at which one generic integer draw certifiably spans the
// full slice.  Starts from the series bound and walks upward; the row space
// always sits inside the slice, so hitting the slice dimension over one
// prime is an exact certificate.
inline int compute_N_empirical(const std::vector<int>& degrees, int D, int d,
                               std::uint64_t seed) {
  if (d < 1 || d >= D)
    throw std::invalid_argument("compute_N_empirical: need 1 <= d < D");
  if (degrees.empty())
    throw std::invalid_argument("compute_N_empirical: needs generator degrees");

  const int k0 = degree_bound(degrees, D, d).n;
  IntPolySet ps = sample_in_ideal_int(D, d, degrees, substream(seed, 0));

  constexpr int kDegreeCap = 64;
  for (int k = k0; k <= kDegreeCap; ++k) {
    const std::int64_t dim = linear_ideal_dim(k, D, d);
    MatrixXi64 m = build_macaulay_int(ps, k, /*skip_higher=*/true);
    if (m.rows() == 0) continue;
    for (int prime = 0; prime < 3; ++prime) {
      if (rank_mod_p(m, prime) == dim) return k;
    }
  }
  throw no_convergence(
      "compute_N_empirical: no spanning degree up to " +
      std::to_string(kDegreeCap));
}

}  // namespace idealreg
