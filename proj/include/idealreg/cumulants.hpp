#pragma once

// Symmetric cumulant tensors, their transformation under linear maps,
// order-1/2 estimation from samples, and the difference polynomials whose
// common zeros encode the subspace on which all epochs agree.
//
// A symmetric order-k tensor over D variables has one independent entry
// per exponent vector of degree k, so it is stored packed over the degree-k
// monomial basis; full-tensor layouts exist only at conversion boundaries.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "idealreg/errors.hpp"
#include "idealreg/monomials.hpp"
#include "idealreg/polyspace.hpp"

namespace idealreg {

namespace detail {

inline std::vector<int> exponents_of_tuple(const std::vector<int>& idx,
                                           int vars) {
  std::vector<int> e(static_cast<std::size_t>(vars), 0);
  for (int j : idx) {
    if (j < 0 || j >= vars)
      throw std::invalid_argument("tensor index out of range");
    ++e[static_cast<std::size_t>(j)];
  }
  return e;
}

// k! / prod(alpha_i!) as an exact double (tiny k).
inline double multinomial(int k, const std::vector<int>& alpha) {
  double c = 1.0;
  for (int j = 2; j <= k; ++j) c *= j;
  for (int a : alpha)
    for (int j = 2; j <= a; ++j) c /= j;
  return c;
}

}  // namespace detail

class CumulantTensor {
 public:
  CumulantTensor(int order, int vars, Eigen::VectorXd packed)
      : order_(order), vars_(vars), packed_(std::move(packed)) {
    if (order < 1 || vars < 1)
      throw std::invalid_argument("CumulantTensor: order and D must be >= 1");
    if (packed_.size() != simplex_number(order_, vars_))
      throw std::invalid_argument("CumulantTensor: packed length mismatch");
  }

  static CumulantTensor zero(int order, int vars) {
    return CumulantTensor(
        order, vars, Eigen::VectorXd::Zero(simplex_number(order, vars)));
  }

  static CumulantTensor from_vector(const Eigen::VectorXd& v) {
    return CumulantTensor(1, static_cast<int>(v.size()), v);
  }

  // Order-2 packing; requires symmetry within 1e-12 of the entry scale.
  static CumulantTensor from_matrix(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols())
      throw std::invalid_argument("CumulantTensor: matrix must be square");
    int vars = static_cast<int>(m.rows());
    double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
      throw std::invalid_argument("CumulantTensor: matrix is not symmetric");
    MonomialBasis basis = enumerate_basis(vars, 2);
    Eigen::VectorXd packed(basis.size());
    for (Eigen::Index p = 0; p < basis.size(); ++p) {
      const std::vector<int>& e = basis.index_at(p).exponents;
      int a = -1, b = -1;
      for (int v = 0; v < vars; ++v) {
        for (int c = 0; c < e[static_cast<std::size_t>(v)]; ++c) {
          (a < 0 ? a : b) = v;
        }
      }
      packed(p) = 0.5 * (m(a, b) + m(b, a));
    }
    return CumulantTensor(2, vars, std::move(packed));
  }

  // Packs a dense order-k tensor laid out row-major (first index slowest).
  // Entries within each symmetry class must agree within 1e-12 of the
  // overall entry scale; the class mean is stored.
  static CumulantTensor from_full(int order, int vars,
                                  const std::vector<double>& full) {
    std::size_t want = 1;
    for (int i = 0; i < order; ++i) want *= static_cast<std::size_t>(vars);
    if (full.size() != want)
      throw std::invalid_argument("CumulantTensor: full length mismatch");
    double scale = 1.0;
    for (double v : full) scale = std::max(scale, std::abs(v));

    Eigen::VectorXd sums =
        Eigen::VectorXd::Zero(simplex_number(order, vars));
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(sums.size());
    std::vector<int> idx(static_cast<std::size_t>(order), 0);
    for (std::size_t flat = 0; flat < full.size(); ++flat) {
      std::size_t rem = flat;
      for (int l = order - 1; l >= 0; --l) {
        idx[static_cast<std::size_t>(l)] =
            static_cast<int>(rem % static_cast<std::size_t>(vars));
        rem /= static_cast<std::size_t>(vars);
      }
      std::int64_t p =
          detail::grevlex_rank(detail::exponents_of_tuple(idx, vars));
      sums(p) += full[flat];
      counts(p) += 1.0;
    }
    Eigen::VectorXd packed = sums.cwiseQuotient(counts);

    // Second pass: symmetrization residual against the class means.
    for (std::size_t flat = 0; flat < full.size(); ++flat) {
      std::size_t rem = flat;
      for (int l = order - 1; l >= 0; --l) {
        idx[static_cast<std::size_t>(l)] =
            static_cast<int>(rem % static_cast<std::size_t>(vars));
        rem /= static_cast<std::size_t>(vars);
      }
      std::int64_t p =
          detail::grevlex_rank(detail::exponents_of_tuple(idx, vars));
      if (std::abs(full[flat] - packed(p)) > 1e-12 * scale)
        throw std::invalid_argument("CumulantTensor: tensor is not symmetric");
    }
    return CumulantTensor(order, vars, std::move(packed));
  }

  int order() const { return order_; }
  int vars() const { return vars_; }
  const Eigen::VectorXd& packed() const { return packed_; }

  double at(const std::vector<int>& idx) const {
    if (static_cast<int>(idx.size()) != order_)
      throw std::invalid_argument("CumulantTensor: index arity mismatch");
    return packed_(
        detail::grevlex_rank(detail::exponents_of_tuple(idx, vars_)));
  }

  Eigen::VectorXd to_vector() const {
    if (order_ != 1)
      throw std::invalid_argument("CumulantTensor: not an order-1 tensor");
    return packed_;
  }

  Eigen::MatrixXd to_matrix() const {
    if (order_ != 2)
      throw std::invalid_argument("CumulantTensor: not an order-2 tensor");
    Eigen::MatrixXd m(vars_, vars_);
    for (int a = 0; a < vars_; ++a)
      for (int b = 0; b < vars_; ++b) m(a, b) = at({a, b});
    return m;
  }

  std::vector<double> to_full() const {
    std::size_t total = 1;
    for (int i = 0; i < order_; ++i) total *= static_cast<std::size_t>(vars_);
    std::vector<double> full(total);
    std::vector<int> idx(static_cast<std::size_t>(order_), 0);
    for (std::size_t flat = 0; flat < total; ++flat) {
      std::size_t rem = flat;
      for (int l = order_ - 1; l >= 0; --l) {
        idx[static_cast<std::size_t>(l)] =
            static_cast<int>(rem % static_cast<std::size_t>(vars_));
        rem /= static_cast<std::size_t>(vars_);
      }
      full[flat] = at(idx);
    }
    return full;
  }

 private:
  int order_;
  int vars_;
  Eigen::VectorXd packed_;
};

// (A o T)_{i1..ik} = sum_j A_{i1 j1} ... A_{ik jk} T_{j1..jk}.
inline CumulantTensor apply_matrix(const Eigen::MatrixXd& a,
                                   const CumulantTensor& t) {
  if (a.cols() != t.vars())
    throw std::invalid_argument("apply_matrix: column count mismatch");
  if (a.rows() < 1)
    throw std::invalid_argument("apply_matrix: empty output dimension");
  int d = static_cast<int>(a.rows());
  if (t.order() == 1)
    return CumulantTensor::from_vector(a * t.to_vector());
  if (t.order() == 2) {
    Eigen::MatrixXd m = a * t.to_matrix() * a.transpose();
    m = 0.5 * (m + m.transpose());
    return CumulantTensor::from_matrix(m);
  }

  // General order: repeatedly matricize along the leading mode, multiply,
  // and rotate that mode to the back; k rotations restore the axis order.
  std::vector<double> flat = t.to_full();
  int k = t.order();
  for (int mode = 0; mode < k; ++mode) {
    // The leading axis is always a not-yet-transformed input mode.
    Eigen::Index lead = t.vars();
    Eigen::Index rest = static_cast<Eigen::Index>(flat.size()) / lead;
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                   Eigen::RowMajor>>
        m(flat.data(), lead, rest);
    Eigen::MatrixXd out = a * m;
    std::vector<double> rotated(static_cast<std::size_t>(out.size()));
    for (Eigen::Index r = 0; r < rest; ++r)
      for (Eigen::Index i = 0; i < d; ++i)
        rotated[static_cast<std::size_t>(r * d + i)] = out(i, r);
    flat = std::move(rotated);
  }
  return CumulantTensor::from_full(k, d, flat);
}

// One stationary/nonstationary epoch: raw samples or supplied moments.
struct EpochData {
  bool has_samples = false;
  Eigen::MatrixXd samples;  // rows are observations
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;

  static EpochData from_samples(Eigen::MatrixXd s) {
    if (s.cols() < 1)
      throw std::invalid_argument("EpochData: samples need >= 1 column");
    EpochData e;
    e.has_samples = true;
    e.samples = std::move(s);
    return e;
  }

  static EpochData from_moments(Eigen::VectorXd mean, Eigen::MatrixXd cov) {
    if (cov.rows() != cov.cols() || cov.rows() != mean.size())
      throw std::invalid_argument("EpochData: moment shape mismatch");
    double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
      throw std::invalid_argument("EpochData: covariance is not symmetric");
    EpochData e;
    e.mean = std::move(mean);
    e.covariance = std::move(cov);
    return e;
  }

  int dim() const {
    return has_samples ? static_cast<int>(samples.cols())
                       : static_cast<int>(mean.size());
  }
};

struct CumulantPair {
  CumulantTensor k1;
  CumulantTensor k2;
};

// Sample mean and unbiased (n-1) covariance, or moment passthrough.
inline CumulantPair estimate_cumulants(const EpochData& e) {
  if (!e.has_samples) {
    return CumulantPair{CumulantTensor::from_vector(e.mean),
                        CumulantTensor::from_matrix(e.covariance)};
  }
  Eigen::Index n = e.samples.rows();
  if (n < 2)
    throw insufficient_data(
        "estimate_cumulants: need at least 2 samples for covariance");
  Eigen::VectorXd mean = e.samples.colwise().mean();
  Eigen::MatrixXd centered = e.samples.rowwise() - mean.transpose();
  Eigen::MatrixXd cov =
      centered.transpose() * centered / static_cast<double>(n - 1);
  cov = 0.5 * (cov + cov.transpose());
  return CumulantPair{CumulantTensor::from_vector(mean),
                      CumulantTensor::from_matrix(cov)};
}

enum class PairScheme {
  kLastReference,  // pairs (i, m-1) for i < m-1
  kAllPairs,       // pairs (i, j) for all i < j
};

// The homogeneous polynomial v -> v o T for a symmetric tensor T:
// coefficient of the monomial with exponents alpha is multinomial(k; alpha)
// times the packed tensor entry at alpha.
inline HomoPoly tensor_polynomial(const CumulantTensor& t) {
  MonomialBasis basis = enumerate_basis(t.vars(), t.order());
  Eigen::VectorXd coeffs(basis.size());
  for (Eigen::Index p = 0; p < basis.size(); ++p)
    coeffs(p) = detail::multinomial(t.order(),
                                    basis.index_at(p).exponents) *
                t.packed()(p);
  return HomoPoly(t.vars(), t.order(), std::move(coeffs));
}

// Cumulant-difference polynomials across epochs, epoch-pair major and
// requested order minor, ascending in both.
inline std::vector<HomoPoly> difference_polynomials(
    const std::vector<EpochData>& epochs, std::vector<int> orders = {2},
    PairScheme scheme = PairScheme::kLastReference) {
  if (epochs.size() < 2)
    throw std::invalid_argument("difference_polynomials: need >= 2 epochs");
  int D = epochs.front().dim();
  for (const EpochData& e : epochs)
    if (e.dim() != D)
      throw std::invalid_argument(
          "difference_polynomials: epochs have mixed dimensions");
  std::sort(orders.begin(), orders.end());
  for (int k : orders)
    if (k != 1 && k != 2)
      throw std::invalid_argument(
          "difference_polynomials: only orders 1 and 2 are estimated");

  std::vector<CumulantPair> cums;
  cums.reserve(epochs.size());
  for (const EpochData& e : epochs) cums.push_back(estimate_cumulants(e));

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::size_t m = epochs.size();
  if (scheme == PairScheme::kLastReference) {
    for (std::size_t i = 0; i + 1 < m; ++i) pairs.emplace_back(i, m - 1);
  } else {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j) pairs.emplace_back(i, j);
  }

  std::vector<HomoPoly> polys;
  polys.reserve(pairs.size() * orders.size());
  for (auto [i, j] : pairs) {
    for (int k : orders) {
      const CumulantTensor& ti = (k == 1) ? cums[i].k1 : cums[i].k2;
      const CumulantTensor& tj = (k == 1) ? cums[j].k1 : cums[j].k2;
      CumulantTensor diff(k, D, ti.packed() - tj.packed());
      polys.push_back(tensor_polynomial(diff));
    }
  }
  return polys;
}

}  // namespace idealreg
