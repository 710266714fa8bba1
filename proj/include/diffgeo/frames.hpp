#pragma once
// k-form frames phi_{i0} dphi_{j1} ^ ... ^ dphi_{jk}, their Gram matrices and pseudo-inverses.
//
// Frame layout: element I = i0 * W + w, where w enumerates the strictly increasing wedge
// multi-indices j1 < ... < jk drawn from {1, ..., n2} in lexicographic order and W is their
// count. dphi_0 vanishes, so the constant is never used as a differential. Degree 0 frames are
// just phi_0..phi_{n0-1}.
//
// Inner products reduce to "determinant functions"
//   W(p, q) = sum_sigma sgn(sigma) prod_m Gamma(phi_{p_sigma(m)}, phi_{q_m})
// formed with truncated products, so that for instance
//   <alpha_I, alpha_J> = <phi_{i0} phi_{j0}, W(I_wedge, J_wedge)> = sum_u c_{i0 j0 u} W_u.

#include "diffgeo/algebra.hpp"
#include "diffgeo/core.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <ostream>
#include <span>
#include <vector>

namespace diffgeo {

struct TruncationConfig {
  Index n0 = 35;  ///< function basis size
  Index n1 = 10;  ///< coefficient functions phi_i, i < n1
  Index n2 = 4;   ///< differentials dphi_j, 1 <= j <= n2
};

inline void validate(const TruncationConfig& cfg) {
  detail::require(cfg.n0 >= 1, "n0 must be positive");
  detail::require(cfg.n1 >= 1 && cfg.n1 <= cfg.n0, "n1 must satisfy 1 <= n1 <= n0");
  detail::require(cfg.n2 >= 0 && cfg.n2 < cfg.n0, "n2 must satisfy 0 <= n2 < n0");
}

struct Frame {
  Index degree = 0;
  Index coeff_limit = 0;                     ///< i0 ranges over [0, coeff_limit)
  std::vector<std::vector<Index>> wedges;    ///< distinct wedge multi-indices, lexicographic

  Index wedge_count() const { return Index(wedges.size()); }
  Index size() const { return coeff_limit * wedge_count(); }
  Index coeff(Index I) const { return I / wedge_count(); }
  Index wedge_id(Index I) const { return I % wedge_count(); }
  const std::vector<Index>& wedge(Index I) const { return wedges[std::size_t(wedge_id(I))]; }
  Index position(Index coeff_index, Index wedge_index) const { return coeff_index * wedge_count() + wedge_index; }

  /// Position of a wedge multi-index, or -1 when it is not part of the frame.
  Index find_wedge(const std::vector<Index>& w) const {
    auto it = std::lower_bound(wedges.begin(), wedges.end(), w);
    return (it != wedges.end() && *it == w) ? Index(it - wedges.begin()) : -1;
  }
};

namespace detail {

inline void combinations(Index lo, Index hi, Index k, std::vector<Index>& cur, std::vector<std::vector<Index>>& out) {
  if (Index(cur.size()) == k) {
    out.push_back(cur);
    return;
  }
  for (Index v = lo; v <= hi; ++v) {
    cur.push_back(v);
    combinations(v + 1, hi, k, cur, out);
    cur.pop_back();
  }
}

inline int permutation_sign(const std::vector<Index>& perm) {
  int inversions = 0;
  for (std::size_t a = 0; a < perm.size(); ++a)
    for (std::size_t b = a + 1; b < perm.size(); ++b)
      if (perm[a] > perm[b]) ++inversions;
  return inversions % 2 ? -1 : 1;
}

}  // namespace detail

inline Frame build_frame(Index degree, const TruncationConfig& cfg) {
  validate(cfg);
  detail::require(degree >= 0, "frame degree must be non-negative");
  detail::require(degree <= cfg.n2, "frame degree exceeds the number of differentials n2");
  Frame f;
  f.degree = degree;
  f.coeff_limit = degree == 0 ? cfg.n0 : cfg.n1;
  std::vector<Index> cur;
  detail::combinations(1, cfg.n2, degree, cur, f.wedges);
  return f;
}

/// Determinant function W(rows, cols) as a coefficient vector.
inline Vec det_product(const SpectralGeometry& g, std::span<const Index> rows, std::span<const Index> cols) {
  const std::size_t m = rows.size();
  detail::require(cols.size() == m, "det_product: rows and cols differ in length");
  if (m == 0) return g.one();
  if (m == 1) return g.gamma().fibre(rows[0], cols[0]);
  std::vector<Index> perm(m);
  std::iota(perm.begin(), perm.end(), Index(0));
  Vec out = Vec::Zero(g.size());
  do {
    Vec term = g.gamma().fibre(rows[std::size_t(perm[0])], cols[0]);
    for (std::size_t c = 1; c < m; ++c)
      term = multiply(term, Vec(g.gamma().fibre(rows[std::size_t(perm[c])], cols[c])), g.structure);
    out += double(detail::permutation_sign(perm)) * term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

/// Integral of W(rows, cols) against the stationary measure.
inline double det_integral(const SpectralGeometry& g, std::span<const Index> rows, std::span<const Index> cols) {
  const std::size_t m = rows.size();
  detail::require(cols.size() == m, "det_integral: rows and cols differ in length");
  if (m == 0) return g.integrate(g.one());
  if (m == 1) return g.integrate(g.gamma().fibre(rows[0], cols[0]));
  std::vector<Index> perm(m);
  std::iota(perm.begin(), perm.end(), Index(0));
  double total = 0.0;
  do {
    Vec head = g.gamma().fibre(rows[std::size_t(perm[0])], cols[0]);
    for (std::size_t c = 1; c + 1 < m; ++c)
      head = multiply(head, Vec(g.gamma().fibre(rows[std::size_t(perm[c])], cols[c])), g.structure);
    // The orthonormal basis makes the integral of a product of two functions a dot product.
    total += double(detail::permutation_sign(perm)) * head.dot(g.gamma().fibre(rows[std::size_t(perm[m - 1])], cols[m - 1]));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

struct GramOptions {
  std::size_t memory_budget = std::size_t(2) << 30;  ///< bytes
};

inline std::size_t gram_bytes(const Frame& a, const Frame& b, Index algebra_size) {
  return sizeof(double) * std::size_t(a.size() * b.size() + a.wedge_count() * b.wedge_count() * algebra_size);
}

/// Cross Gram matrix <alpha_I, beta_J> between two frames of the same degree.
inline Mat gram(const Frame& rows, const Frame& cols, const SpectralGeometry& g, GramOptions opts = {}) {
  detail::require(rows.degree == cols.degree, "gram: frames have different degrees");
  detail::require(rows.coeff_limit <= g.size() && cols.coeff_limit <= g.size(), "gram: frame exceeds the algebra size");
  for (const auto* fr : {&rows, &cols})
    for (const auto& w : fr->wedges)
      for (Index j : w) detail::require(j < g.size(), "gram: differential index exceeds the algebra size");
  const std::size_t bytes = gram_bytes(rows, cols, g.size());
  if (bytes > opts.memory_budget) throw ResourceError("Gram assembly exceeds the memory budget", bytes);

  Mat out(rows.size(), cols.size());
  for (Index p = 0; p < rows.wedge_count(); ++p) {
    for (Index q = 0; q < cols.wedge_count(); ++q) {
      const Vec w = det_product(g, rows.wedges[std::size_t(p)], cols.wedges[std::size_t(q)]);
      for (Index i0 = 0; i0 < rows.coeff_limit; ++i0)
        for (Index j0 = 0; j0 < cols.coeff_limit; ++j0)
          out(rows.position(i0, p), cols.position(j0, q)) = g.c().fibre(i0, j0).dot(w);
    }
  }
  return out;
}

inline Mat gram(const Frame& frame, const SpectralGeometry& g, GramOptions opts = {}) {
  Mat G = gram(frame, frame, g, opts);
  return 0.5 * (G + G.transpose());
}

struct Projector {
  Mat rows;      ///< r x N, orthonormal rows spanning the kept eigenspaces
  Vec inv_diag;  ///< reciprocals of the kept eigenvalues
  Vec kept;      ///< kept eigenvalues, descending
  double max_eigenvalue = 0.0;

  Index rank() const { return rows.rows(); }
};

/// Spectral projector onto the eigenspaces of G with eigenvalue above tau * max eigenvalue.
inline Projector projector(const Mat& G, double tau) {
  detail::require(G.rows() == G.cols(), "projector: matrix is not square");
  detail::require(tau >= 0.0, "projector: threshold must be non-negative");
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (G + G.transpose()));
  if (es.info() != Eigen::Success) throw NumericError("projector: eigendecomposition failed");
  const Vec& ev = es.eigenvalues();
  const double top = ev.size() ? ev(ev.size() - 1) : 0.0;
  if (!(top > 0.0)) throw DegenerateSpaceError("projector: matrix has no positive eigenvalue");
  std::vector<Index> keep;
  for (Index i = ev.size() - 1; i >= 0; --i)
    if (ev(i) > tau * top) keep.push_back(i);
  Projector p;
  p.max_eigenvalue = top;
  p.rows.resize(Index(keep.size()), G.rows());
  p.inv_diag.resize(Index(keep.size()));
  p.kept.resize(Index(keep.size()));
  for (std::size_t r = 0; r < keep.size(); ++r) {
    p.rows.row(Index(r)) = es.eigenvectors().col(keep[r]).transpose();
    p.kept(Index(r)) = ev(keep[r]);
    p.inv_diag(Index(r)) = 1.0 / ev(keep[r]);
  }
  return p;
}

struct FormSpace {
  Frame frame;
  Mat gram;
  double tau = 1e-8;
  Projector proj;

  Index degree() const { return frame.degree; }
  Index size() const { return frame.size(); }
  Index rank() const { return proj.rank(); }
};

inline FormSpace make_form_space(Frame frame, const SpectralGeometry& g, double tau = 1e-8, GramOptions opts = {}) {
  FormSpace s;
  s.gram = gram(frame, g, opts);
  s.frame = std::move(frame);
  s.tau = tau;
  s.proj = projector(s.gram, tau);
  return s;
}

/// Moore-Penrose application G^+ w = P^T diag(1/d) P w.
inline Vec pinv_apply(const Projector& p, const Vec& w) {
  detail::require(w.size() == p.rows.cols(), "pinv_apply: vector length does not match the frame");
  return p.rows.transpose() * p.inv_diag.cwiseProduct(p.rows * w);
}

inline Vec pinv_apply(const FormSpace& s, const Vec& w) { return pinv_apply(s.proj, w); }

inline Mat pinv_apply(const FormSpace& s, const Mat& w) {
  detail::require(w.rows() == s.size(), "pinv_apply: matrix rows do not match the frame");
  return s.proj.rows.transpose() * (s.proj.inv_diag.asDiagonal() * (s.proj.rows * w));
}

/// Orthogonal projection onto the positive-definite subspace.
inline Vec project_positive(const FormSpace& s, const Vec& v) { return s.proj.rows.transpose() * (s.proj.rows * v); }

inline double inner(const FormSpace& s, const Vec& a, const Vec& b) { return a.dot(s.gram * b); }
inline double norm(const FormSpace& s, const Vec& a) { return std::sqrt(std::max(0.0, inner(s, a, a))); }

/// Norm in the kept (positive) eigenspaces of G only; ignores the indefinite part a truncated
/// Gram can carry.
inline double positive_norm(const FormSpace& s, const Vec& a) {
  detail::require(a.size() == s.size(), "positive_norm: coefficient length mismatch");
  const Vec pa = s.proj.rows * a;
  return std::sqrt(pa.dot(s.proj.kept.cwiseProduct(pa)));
}

/// Flat binary export: frame (degree, coeff_limit, wedge count, wedge indices), then G, P, Dinv
/// each as uint64 rank + dims + row-major float64 data.
inline void write_flat(std::ostream& out, const FormSpace& s) {
  auto put_u64 = [&](std::uint64_t v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); };
  auto put_matrix = [&](const Mat& m) {
    put_u64(2);
    put_u64(std::uint64_t(m.rows()));
    put_u64(std::uint64_t(m.cols()));
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
    out.write(reinterpret_cast<const char*>(rm.data()), std::streamsize(rm.size() * sizeof(double)));
  };
  put_u64(std::uint64_t(s.frame.degree));
  put_u64(std::uint64_t(s.frame.coeff_limit));
  put_u64(std::uint64_t(s.frame.wedge_count()));
  for (const auto& w : s.frame.wedges)
    for (Index j : w) put_u64(std::uint64_t(j));
  put_matrix(s.gram);
  put_matrix(s.proj.rows);
  put_u64(1);
  put_u64(std::uint64_t(s.proj.inv_diag.size()));
  out.write(reinterpret_cast<const char*>(s.proj.inv_diag.data()), std::streamsize(s.proj.inv_diag.size() * sizeof(double)));
}

}  // namespace diffgeo
