#pragma once
// Hodge Laplacian on k-forms: weak assembly, regularised Galerkin eigenproblem, harmonic forms,
// Betti estimates, Hodge decomposition of 1-forms and cup-product norms.

#include "diffgeo/algebra.hpp"
#include "diffgeo/core.hpp"
#include "diffgeo/exterior.hpp"
#include "diffgeo/frames.hpp"

#include <algorithm>
#include <optional>
#include <vector>

namespace diffgeo {

/// Up energy <d alpha_I, d alpha_J> on a frame, through the integrated determinant functions.
inline Mat up_energy(const SpectralGeometry& g, const Frame& frame) {
  detail::require(frame.coeff_limit <= g.size(), "up_energy: frame exceeds the algebra");
  const Index N = frame.size();
  Mat out(N, N);
  std::vector<Index> rows, cols;
  for (Index I = 0; I < N; ++I) {
    rows.assign(1, frame.coeff(I));
    rows.insert(rows.end(), frame.wedge(I).begin(), frame.wedge(I).end());
    for (Index J = I; J < N; ++J) {
      cols.assign(1, frame.coeff(J));
      cols.insert(cols.end(), frame.wedge(J).begin(), frame.wedge(J).end());
      out(I, J) = out(J, I) = det_integral(g, rows, cols);
    }
  }
  return out;
}

struct HodgeOperator {
  Index degree = 0;
  Mat up;
  Mat down;
  Mat laplacian;  ///< up + down
  Mat sobolev;    ///< G + up + down
  double epsilon = 0.0;
};

/// Default regulariser: 1e-6 times the mean diagonal of the Sobolev Gram.
inline double default_epsilon(const Mat& sobolev) {
  return sobolev.rows() ? 1e-6 * sobolev.trace() / double(sobolev.rows()) : 0.0;
}

inline HodgeOperator assemble(const FormComplex& cx, Index k, std::optional<double> epsilon = std::nullopt) {
  const FormSpace& space = cx.space(k);
  HodgeOperator op;
  op.degree = k;
  op.up = up_energy(cx.geom(), space.frame);
  if (k == 0) {
    op.down = Mat::Zero(space.size(), space.size());
  } else {
    const Mat& dw = cx.weak(k - 1);
    op.down = dw * pinv_apply(cx.space(k - 1), Mat(dw.transpose()));
    op.down = 0.5 * (op.down + op.down.transpose()).eval();
  }
  op.laplacian = op.up + op.down;
  op.sobolev = space.gram + op.laplacian;
  op.epsilon = epsilon ? *epsilon : default_epsilon(op.sobolev);
  detail::require(op.epsilon >= 0.0, "epsilon must be non-negative");
  return op;
}

struct HodgeSpectrum {
  Index degree = 0;
  Vec eigenvalues;       ///< ascending, clipped at zero
  Mat eigenforms;        ///< columns, G-orthonormal, largest-magnitude coefficient positive
  double epsilon = 0.0;
  bool truncated = false;  ///< fewer pairs than requested were available

  Index size() const { return eigenvalues.size(); }
};

/// Relative threshold for the Sobolev projector used by solve(). Frame directions whose Sobolev
/// norm falls below it carry truncation noise in both G and the Laplacian, and left in they show
/// up as spurious near-zero eigenvalues.
inline constexpr double default_solve_tau = 1e-3;

/// Regularised Galerkin eigenproblem (Lap + eps S) v = lam G v on the S-positive subspace.
inline HodgeSpectrum solve(const HodgeOperator& op, const FormSpace& space, Index count,
                           double tau = default_solve_tau) {
  detail::require(count >= 1, "solve: eigenpair count must be positive");
  detail::require(op.sobolev.rows() == space.size(), "solve: operator does not match the form space");
  const Projector ps = projector(op.sobolev, tau);
  // Whiten by the Sobolev Gram: with y = S_r^{1/2} P v the reduced G and Lap satisfy
  // G_hat + L_hat = I, so (Lap + eps S) v = lam G v becomes L_hat y = ell y with
  // lam = (ell + eps) / (1 - ell). ell -> 1 marks G-null directions (infinite eigenvalues).
  const Mat W = ps.inv_diag.cwiseSqrt().asDiagonal() * ps.rows;
  Mat L = W * op.laplacian * W.transpose();
  L = 0.5 * (L + L.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Mat> es(L);
  if (es.info() != Eigen::Success) throw NumericError("Hodge eigensolve failed");
  const Vec& ell = es.eigenvalues();
  std::vector<Index> finite;
  for (Index i = 0; i < ell.size(); ++i)
    if (ell(i) < 1.0 - 1e-10) finite.push_back(i);

  HodgeSpectrum out;
  out.degree = op.degree;
  out.epsilon = op.epsilon;
  const Index m = std::min<Index>(count, Index(finite.size()));
  out.truncated = m < count;
  out.eigenvalues.resize(m);
  out.eigenforms.resize(space.size(), m);
  for (Index r = 0; r < m; ++r) {
    const Index i = finite[std::size_t(r)];
    const double lam = (ell(i) + op.epsilon) / (1.0 - ell(i));
    // (1 + eps) Lap v + eps G v = lam G v
    out.eigenvalues(r) = std::max(0.0, (lam - op.epsilon) / (1.0 + op.epsilon));
    Vec v = W.transpose() * es.eigenvectors().col(i);
    v /= std::sqrt(v.dot(space.gram * v));
    Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
    out.eigenforms.col(r) = v;
  }
  return out;
}

struct GapRule {
  Index candidates = 8;          ///< look for the gap among this many leading eigenvalues
  double min_ratio = 3.0;        ///< a gap must multiply the eigenvalue by at least this much
  std::optional<double> absolute;  ///< if set, count eigenvalues below this threshold instead
};

/// Number of eigenvalues below the largest relative gap among the first candidates.
inline Index harmonic_count(const Vec& eigenvalues, const GapRule& rule = {}) {
  if (eigenvalues.size() == 0) return 0;
  if (rule.absolute) return Index((eigenvalues.array() < *rule.absolute).count());
  const Index m = std::min<Index>(rule.candidates, eigenvalues.size());
  if (m < 2) return 0;
  const double floor = 1e-12 * std::max(eigenvalues.head(m).maxCoeff(), 1e-300);
  Index best = 0;
  double best_ratio = rule.min_ratio;
  for (Index h = 1; h < m; ++h) {
    const double ratio = eigenvalues(h) / std::max(eigenvalues(h - 1), floor);
    if (ratio >= best_ratio) {
      best_ratio = ratio;
      best = h;
    }
  }
  return best;
}

inline std::vector<Vec> harmonic_forms(const HodgeSpectrum& spec, const GapRule& rule = {}) {
  detail::require(spec.size() > 0, "harmonic_forms: empty spectrum");
  const Index h = harmonic_count(spec.eigenvalues, rule);
  std::vector<Vec> out;
  for (Index i = 0; i < h; ++i) out.push_back(spec.eigenforms.col(i));
  return out;
}

inline Index betti(const HodgeSpectrum& spec, const GapRule& rule = {}) { return harmonic_count(spec.eigenvalues, rule); }

/// Number of connected components read off the function spectrum (lambda_0 = 0 always counts).
inline Index betti0(const Vec& function_eigenvalues, double min_ratio = 100.0, Index candidates = 8) {
  const Index m = std::min<Index>(candidates, function_eigenvalues.size());
  if (m < 2) return 1;
  const double floor = 1e-12 * std::max(function_eigenvalues.head(m).maxCoeff(), 1e-300);
  Index best = 1;
  double best_ratio = min_ratio;
  for (Index h = 2; h < m; ++h) {
    const double ratio = function_eigenvalues(h) / std::max(function_eigenvalues(h - 1), floor);
    if (ratio >= best_ratio) {
      best_ratio = ratio;
      best = h;
    }
  }
  return best;
}

struct HodgeDecomposition {
  Vec exact;      ///< d f
  Vec remainder;  ///< alpha - d f
  Vec potential;  ///< f
};

/// Splits a 1-form into its gradient part and the G-orthogonal rest.
///
/// The potential solves the frame-consistent Poisson problem L f = d*alpha, with
/// L = d~_0^T (G^1)^+ d~_0 the function Laplacian as seen by the 1-form frame and its zero
/// eigenvalues dropped. When the frame resolves every dphi_i this is diag(lambda).
inline HodgeDecomposition hodge_decompose(const FormComplex& cx, const Vec& alpha) {
  const FormSpace& ones = cx.space(1);
  detail::require(alpha.size() == ones.size(), "hodge_decompose: expects a 1-form");
  const Mat& dw = cx.weak(0);
  const Mat dstrong = pinv_apply(ones, dw);
  Mat lap = dw.transpose() * dstrong;
  lap = 0.5 * (lap + lap.transpose()).eval();
  const Vec rhs = dstrong.transpose() * (ones.gram * alpha);
  HodgeDecomposition out;
  Eigen::SelfAdjointEigenSolver<Mat> es(lap);
  if (es.info() != Eigen::Success) throw NumericError("hodge_decompose: eigensolve failed");
  const Vec& ev = es.eigenvalues();
  const double top = ev.size() ? ev.maxCoeff() : 0.0;
  Vec proj = es.eigenvectors().transpose() * rhs;
  for (Index i = 0; i < ev.size(); ++i) proj(i) = ev(i) > cx.tau * top ? proj(i) / ev(i) : 0.0;
  out.potential = es.eigenvectors() * proj;
  out.exact = dstrong * out.potential;
  out.remainder = alpha - out.exact;
  return out;
}

/// Norm of h1 ^ h2 in the positive eigenspaces of the Gram of `two_forms`.
inline double cup_norm(const SpectralGeometry& g, const FormSpace& one_forms, const Vec& h1, const Vec& h2,
                       const FormSpace& two_forms) {
  if (two_forms.frame.degree != 2)
    throw InvalidArgument("cup_norm: needs a degree-2 form space; build one with build_frame(2, ...)");
  const Vec w = wedge(g, one_forms, h1, one_forms, h2, two_forms);
  return positive_norm(two_forms, w);
}

/// Degree-2 space used for cup norms: the coefficient range is the whole algebra so the
/// products phi_i phi_j are not truncated further.
inline FormSpace cup_space(const SpectralGeometry& g, const TruncationConfig& cfg, double tau = 1e-8) {
  TruncationConfig wide = cfg;
  wide.n1 = cfg.n0;
  return make_form_space(build_frame(2, wide), g, tau);
}

}  // namespace diffgeo
