#pragma once
// Diffusion-maps estimate of the Markov generator and its truncated eigenbasis.
//
// K_ij = exp(-|x_i - x_j|^2 / 4t), renormalised by the kernel density estimate q^alpha on both
// sides, then row-normalised into a Markov matrix P. The generator eigenvalues are
// lambda = (1 - eta) / t for the Markov eigenvalues eta. Eigenfunctions are normalised so that
// (1/n) sum_s phi_i(s) phi_j(s) D(s) = delta_ij, where D is the stationary density (mean 1).

#include "diffgeo/core.hpp"
#include "diffgeo/point_cloud.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace diffgeo {

struct KernelConfig {
  std::optional<double> bandwidth;  ///< t; nullopt selects it from the data
  double alpha = 1.0;               ///< density renormalisation exponent
  std::optional<Index> knn;         ///< symmetric k-NN sparsification of K
  Index n0 = 35;                    ///< retained eigenpairs
  Index bandwidth_neighbours = 8;   ///< k used by the automatic bandwidth rule
};

struct MarkovOperator {
  Mat kernel;      ///< symmetric Gaussian kernel (after optional k-NN truncation)
  Mat transition;  ///< row-stochastic P_t
  Vec density;     ///< stationary density, mean 1
  double bandwidth = 0.0;
};

struct SpectralBasis {
  Vec eigenvalues;     ///< ascending generator eigenvalues, eigenvalues[0] == 0
  Mat eigenfunctions;  ///< n x n0, column i is phi_i sampled at the points
  Vec density;         ///< stationary density D, mean 1
  double bandwidth = 0.0;

  Index size() const { return eigenvalues.size(); }
  Index points() const { return eigenfunctions.rows(); }
  double phi0() const { return eigenfunctions(0, 0); }
};

namespace detail {

inline Mat squared_distances(const Mat& pts) {
  const Index n = pts.rows();
  Mat d2(n, n);
  for (Index j = 0; j < n; ++j) {
    d2(j, j) = 0.0;
    for (Index i = j + 1; i < n; ++i) {
      const double v = (pts.row(i) - pts.row(j)).squaredNorm();
      d2(i, j) = v;
      d2(j, i) = v;
    }
  }
  return d2;
}

// Squared distance from each point to its k-th nearest other point.
inline Vec kth_neighbour_sq(const Mat& d2, Index k) {
  const Index n = d2.rows();
  Vec out(n);
  std::vector<double> row(static_cast<std::size_t>(n - 1));
  for (Index i = 0; i < n; ++i) {
    std::size_t m = 0;
    for (Index j = 0; j < n; ++j)
      if (j != i) row[m++] = d2(j, i);
    std::nth_element(row.begin(), row.begin() + (k - 1), row.end());
    out(i) = row[std::size_t(k - 1)];
  }
  return out;
}

// Zero every K_ij unless j is among the k nearest neighbours of i or vice versa.
inline void knn_truncate(Mat& kernel, const Mat& d2, Index k) {
  const Index n = kernel.rows();
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> keep =
      Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n, n, false);
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) order[std::size_t(j)] = j;
    std::nth_element(order.begin(), order.begin() + k, order.end(),
                     [&](Index a, Index b) { return d2(a, i) < d2(b, i); });
    for (Index m = 0; m <= k; ++m) {
      keep(order[std::size_t(m)], i) = true;
      keep(i, order[std::size_t(m)]) = true;
    }
    keep(i, i) = true;
  }
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i)
      if (!keep(i, j)) kernel(i, j) = 0.0;
}

// Largest `count` eigenpairs of the symmetric matrix `a` (destroyed), in descending order.
inline void top_eigenpairs(Mat& a, Index count, Vec& values, Mat& vectors) {
  const auto n = lapack_int(a.rows());
  const auto m = lapack_int(count);
  Vec w(n);
  Mat z(n, m);
  std::vector<lapack_int> support(static_cast<std::size_t>(2 * m));
  lapack_int found = 0;
  const lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', n, a.data(), n, 0.0, 0.0,
                                         n - m + 1, n, 0.0, &found, w.data(), z.data(), n, support.data());
  if (info != 0 || found != m)
    throw NumericError("symmetric eigensolver failed (info=" + std::to_string(info) + ", found " +
                       std::to_string(found) + " of " + std::to_string(m) + " eigenpairs)");
  values.resize(m);
  vectors.resize(n, m);
  for (lapack_int i = 0; i < m; ++i) {
    values(i) = w(m - 1 - i);
    vectors.col(i) = z.col(m - 1 - i);
  }
}

inline void validate_kernel_config(const KernelConfig& cfg, Index n) {
  require(cfg.alpha >= 0.0 && cfg.alpha <= 1.0, "alpha must lie in [0, 1]");
  require(cfg.n0 >= 1 && cfg.n0 <= n, "n0 must satisfy 1 <= n0 <= n");
  if (cfg.bandwidth) require(*cfg.bandwidth > 0.0, "bandwidth must be positive");
  if (cfg.knn) require(*cfg.knn >= 1 && *cfg.knn < n, "knn must satisfy 1 <= knn < n");
}

// k <- diag(s) k diag(s), without a temporary.
inline void scale_symmetric(Mat& k, const Vec& s) {
  for (Index j = 0; j < k.cols(); ++j)
    for (Index i = 0; i < k.rows(); ++i) k(i, j) *= s(i) * s(j);
}

// Renormalise the kernel in place; returns the row sums of the renormalised kernel.
inline Vec renormalise(Mat& k, double alpha) {
  const Vec q = k.colwise().sum().transpose();
  if (alpha > 0.0) scale_symmetric(k, q.array().pow(-alpha).matrix());
  return k.colwise().sum().transpose();
}

// Converts the descending Markov spectrum of the conjugated operator into a SpectralBasis.
inline SpectralBasis finish_basis(const Vec& eta, const Mat& psi, const Vec& density, double t) {
  const Index n = psi.rows();
  const Index m = eta.size();
  SpectralBasis b;
  b.bandwidth = t;
  b.density = density;
  b.eigenvalues.resize(m);
  b.eigenfunctions.resize(n, m);
  const Vec inv_sqrt_d = density.array().rsqrt().matrix();
  const double scale = std::sqrt(double(n));
  for (Index i = 0; i < m; ++i) {
    b.eigenvalues(i) = (1.0 - eta(i)) / t;
    Vec phi = scale * psi.col(i).cwiseProduct(inv_sqrt_d);
    Index arg = 0;
    phi.cwiseAbs().maxCoeff(&arg);
    if (phi(arg) < 0.0) phi = -phi;
    b.eigenfunctions.col(i) = phi;
  }
  // The top Markov eigenvector is exactly proportional to sqrt(D); pin it.
  b.eigenvalues(0) = 0.0;
  b.eigenfunctions.col(0).setOnes();
  for (Index i = 1; i < m; ++i) b.eigenvalues(i) = std::max(b.eigenvalues(i), 0.0);
  return b;
}

}  // namespace detail

struct BandwidthMethod {
  Index neighbours = 8;  ///< t = 0.5 * mean squared distance to this neighbour
};

inline double select_bandwidth(const PointCloud& pc, BandwidthMethod method = {}) {
  validate(pc);
  detail::require(pc.size() >= 2, "bandwidth selection needs at least two points");
  detail::require(method.neighbours >= 1, "bandwidth neighbour count must be positive");
  const Index k = std::min(method.neighbours, pc.size() - 1);
  const Vec kth = detail::kth_neighbour_sq(detail::squared_distances(pc.points), k);
  const double t = 0.5 * kth.mean();
  if (!(t > 0.0)) throw InvalidArgument("zero bandwidth: points are duplicated at the neighbour scale");
  return t;
}

inline double resolve_bandwidth(const PointCloud& pc, const KernelConfig& cfg) {
  if (cfg.bandwidth) return *cfg.bandwidth;
  return select_bandwidth(pc, {cfg.bandwidth_neighbours});
}

inline MarkovOperator build_markov(const PointCloud& pc, const KernelConfig& cfg) {
  validate(pc);
  const Index n = pc.size();
  if (cfg.bandwidth) detail::require(*cfg.bandwidth > 0.0, "bandwidth must be positive");
  detail::require(cfg.alpha >= 0.0 && cfg.alpha <= 1.0, "alpha must lie in [0, 1]");
  if (cfg.knn) detail::require(*cfg.knn >= 1 && *cfg.knn < n, "knn must satisfy 1 <= knn < n");
  MarkovOperator op;
  op.bandwidth = n == 1 ? cfg.bandwidth.value_or(1.0) : resolve_bandwidth(pc, cfg);
  const Mat d2 = detail::squared_distances(pc.points);
  op.kernel = (-d2.array() / (4.0 * op.bandwidth)).exp().matrix();
  if (cfg.knn) detail::knn_truncate(op.kernel, d2, *cfg.knn);
  Mat renorm = op.kernel;
  const Vec rows = detail::renormalise(renorm, cfg.alpha);
  op.transition = rows.cwiseInverse().asDiagonal() * renorm;
  op.density = rows / rows.mean();
  return op;
}

/// Truncated eigenbasis of an already built Markov operator.
inline SpectralBasis spectral_basis(const MarkovOperator& op, Index n0) {
  const Index n = op.transition.rows();
  detail::require(n0 >= 1 && n0 <= n, "n0 must satisfy 1 <= n0 <= n");
  const Vec sqrt_d = op.density.cwiseSqrt();
  Mat a = sqrt_d.asDiagonal() * op.transition * sqrt_d.cwiseInverse().asDiagonal();
  a = 0.5 * (a + a.transpose()).eval();
  Vec eta;
  Mat psi;
  detail::top_eigenpairs(a, n0, eta, psi);
  return detail::finish_basis(eta, psi, op.density, op.bandwidth);
}

/// Symmetric conjugate D^{1/2} P D^{-1/2} of the Markov matrix, built in one n x n buffer, with
/// the renormalised row sums it was scaled by.
struct ConjugatedKernel {
  Mat matrix;
  Vec row_sums;
  double bandwidth = 0.0;
};

inline ConjugatedKernel conjugated_kernel(const PointCloud& pc, const KernelConfig& cfg) {
  validate(pc);
  const Index n = pc.size();
  detail::validate_kernel_config(cfg, n);
  ConjugatedKernel out;
  out.bandwidth = n == 1 ? cfg.bandwidth.value_or(1.0) : resolve_bandwidth(pc, cfg);
  const double t = out.bandwidth;
  Mat& a = out.matrix;
  a = detail::squared_distances(pc.points);
  if (cfg.knn) {
    const Mat d2 = a;
    a = (-d2.array() / (4.0 * t)).exp().matrix();
    detail::knn_truncate(a, d2, *cfg.knn);
  } else {
    a = (-a.array() / (4.0 * t)).exp().matrix();
  }
  out.row_sums = detail::renormalise(a, cfg.alpha);
  detail::scale_symmetric(a, out.row_sums.cwiseSqrt().cwiseInverse());
  return out;
}

/// Eigensolve of a conjugated kernel; the buffer is consumed.
inline SpectralBasis spectral_basis(ConjugatedKernel&& kernel, Index n0) {
  const Index n = kernel.matrix.rows();
  detail::require(n0 >= 1 && n0 <= n, "n0 must satisfy 1 <= n0 <= n");
  Vec eta;
  Mat psi;
  detail::top_eigenpairs(kernel.matrix, n0, eta, psi);
  kernel.matrix.resize(0, 0);
  return detail::finish_basis(eta, psi, kernel.row_sums / kernel.row_sums.mean(), kernel.bandwidth);
}

/// Builds the basis straight from the cloud, holding a single n x n buffer.
inline SpectralBasis spectral_basis(const PointCloud& pc, const KernelConfig& cfg) {
  return spectral_basis(conjugated_kernel(pc, cfg), cfg.n0);
}

/// Dense discrete generator L = (I - P_t) / t acting on sample values.
inline Mat generator_matrix(const MarkovOperator& op) {
  const Index n = op.transition.rows();
  return (Mat::Identity(n, n) - op.transition) / op.bandwidth;
}

}  // namespace diffgeo
