#pragma once

// Noise-robust linear algebra: approximate row spans, approximate left null
// spaces and numerical ranks, all through the SVD.
//
// For A = U S V^T, the approximate row span of rank r is the top r right
// singular vectors as rows; the approximate left null space of rank r is the
// last r left singular directions as rows, counting directions beyond
// min(shape) as exact nulls.  Singular vectors get a fixed sign (largest
// magnitude entry positive) so identical inputs produce identical bits.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "idealreg/errors.hpp"

namespace idealreg {

struct RankSpec {
  enum class Mode { kFixed, kThreshold };

  Mode mode = Mode::kFixed;
  Eigen::Index rank = 0;
  double tau = 0.0;

  static RankSpec fixed(Eigen::Index r) {
    if (r < 0) throw std::invalid_argument("RankSpec: rank must be >= 0");
    RankSpec s;
    s.mode = Mode::kFixed;
    s.rank = r;
    return s;
  }

  static RankSpec threshold(double tau) {
    if (!(tau > 0.0 && tau < 1.0))
      throw std::invalid_argument("RankSpec: threshold must lie in (0,1)");
    RankSpec s;
    s.mode = Mode::kThreshold;
    s.tau = tau;
    return s;
  }
};

// Relative cutoff for exact-input workflows; noisy pipelines pass explicit
// ranks or a calibrated threshold instead.
inline double default_threshold(Eigen::Index rows, Eigen::Index cols) {
  return 1e-8 * static_cast<double>(std::max<Eigen::Index>(
                    1, std::max(rows, cols)));
}

// Optional per-call report; the saturation pipeline records one per rank
// decision.
struct SvdDiag {
  Eigen::VectorXd singular_values;
  Eigen::Index rank_used = 0;
  bool tie_warning = false;  // cut fell on (near-)equal singular values
  double gap = 0.0;          // sigma_r / sigma_{r+1}, +inf when clean
};

// Divide-and-conquer SVD can misresolve a tight cluster of equal singular
// values (stacked orthonormal bases of one subspace are the worst case),
// reporting spurious directions outside the true row space.  Callers whose
// inputs carry such multiplicities must request kJacobi; kAuto picks Jacobi
// only when the problem is small enough that it costs nothing.
enum class SvdEngine { kAuto, kJacobi, kBdc };

namespace detail {

constexpr double kTieTolerance = 1e-14;

inline bool use_jacobi(SvdEngine engine, Eigen::Index rows,
                       Eigen::Index cols) {
  if (engine == SvdEngine::kJacobi) return true;
  if (engine == SvdEngine::kBdc) return false;
  return rows * cols <= 64 * 64;
}

inline void fix_row_signs(Eigen::MatrixXd& rows) {
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index j = 0; j < rows.cols(); ++j) {
      double mag = std::abs(rows(i, j));
      if (mag > best) {
        best = mag;
        arg = j;
      }
    }
    if (rows(i, arg) < 0.0) rows.row(i) = -rows.row(i);
  }
}

// Padded singular value: zero beyond min(shape).
inline double sigma_at(const Eigen::VectorXd& sv, Eigen::Index i) {
  return (i >= 0 && i < sv.size()) ? sv(i) : 0.0;
}

inline void record_cut(const Eigen::VectorXd& sv, Eigen::Index cut_before,
                       Eigen::Index padded_len, SvdDiag* diag) {
  if (diag == nullptr) return;
  diag->singular_values = sv;
  if (cut_before <= 0 || cut_before >= padded_len) {
    diag->tie_warning = false;
    diag->gap = std::numeric_limits<double>::infinity();
    return;
  }
  double hi = sigma_at(sv, cut_before - 1);
  double lo = sigma_at(sv, cut_before);
  double scale = sv.size() > 0 ? sv(0) : 0.0;
  diag->tie_warning = (hi - lo) <= kTieTolerance * scale;
  diag->gap = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

inline Eigen::Index count_above(const Eigen::VectorXd& sv, double tau) {
  if (sv.size() == 0 || sv(0) <= 0.0) return 0;
  double cut = tau * sv(0);
  Eigen::Index r = 0;
  while (r < sv.size() && sv(r) > cut) ++r;
  return r;
}

}  // namespace detail

inline Eigen::Index numerical_rank(const Eigen::MatrixXd& a, double tau,
                                   SvdEngine engine = SvdEngine::kAuto) {
  if (!(tau > 0.0 && tau < 1.0))
    throw std::invalid_argument("numerical_rank: threshold must lie in (0,1)");
  if (a.rows() == 0 || a.cols() == 0 || a.isZero(0.0)) return 0;
  Eigen::VectorXd sv;
  if (detail::use_jacobi(engine, a.rows(), a.cols()))
    sv = Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues();
  else
    sv = Eigen::BDCSVD<Eigen::MatrixXd>(a).singularValues();
  return detail::count_above(sv, tau);
}

// Orthonormal rows spanning the dominant row space of a.
inline Eigen::MatrixXd approx_row_span(const Eigen::MatrixXd& a,
                                       const RankSpec& spec,
                                       SvdDiag* diag = nullptr,
                                       SvdEngine engine = SvdEngine::kAuto) {
  if (a.rows() == 0 || a.cols() == 0 || a.isZero(0.0))
    throw degenerate_input("approx_row_span: matrix is zero");

  Eigen::VectorXd sv;
  Eigen::MatrixXd v;
  if (detail::use_jacobi(engine, a.rows(), a.cols())) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinV);
    sv = svd.singularValues();
    v = svd.matrixV();
  } else {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinV);
    sv = svd.singularValues();
    v = svd.matrixV();
  }

  Eigen::Index r;
  if (spec.mode == RankSpec::Mode::kFixed) {
    r = spec.rank;
    if (r > std::min(a.rows(), a.cols()))
      throw std::invalid_argument("approx_row_span: rank exceeds min(shape)");
  } else {
    r = detail::count_above(sv, spec.tau);
  }

  detail::record_cut(sv, r, std::min(a.rows(), a.cols()), diag);
  if (diag != nullptr) diag->rank_used = r;

  Eigen::MatrixXd rows = v.leftCols(r).transpose();
  detail::fix_row_signs(rows);
  return rows;
}

// Orthonormal rows L with L*a ~ 0; the trailing r left singular directions.
inline Eigen::MatrixXd approx_left_null(const Eigen::MatrixXd& a,
                                        const RankSpec& spec,
                                        SvdDiag* diag = nullptr,
                                        SvdEngine engine = SvdEngine::kAuto) {
  if (a.rows() == 0 || a.cols() == 0 || a.isZero(0.0))
    throw degenerate_input("approx_left_null: matrix is zero");

  Eigen::VectorXd sv;
  Eigen::MatrixXd u;
  if (detail::use_jacobi(engine, a.rows(), a.cols())) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullU);
    sv = svd.singularValues();
    u = svd.matrixU();
  } else {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullU);
    sv = svd.singularValues();
    u = svd.matrixU();
  }

  const Eigen::Index m = a.rows();
  Eigen::Index r;
  if (spec.mode == RankSpec::Mode::kFixed) {
    r = spec.rank;
    if (r > m)
      throw std::invalid_argument("approx_left_null: rank exceeds row count");
  } else {
    r = m - detail::count_above(sv, spec.tau);
  }

  detail::record_cut(sv, m - r, m, diag);
  if (diag != nullptr) diag->rank_used = r;

  Eigen::MatrixXd rows = u.rightCols(r).transpose();
  detail::fix_row_signs(rows);
  return rows;
}

}  // namespace idealreg
