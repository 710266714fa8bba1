#pragma once
// Exterior calculus on the truncated frames: pointwise metric, wedge, d and its adjoint,
// musical isomorphisms, interior products and vector-field action.
//
// Vector fields are n0 x n0 matrices X with X(k, l) the coefficient of phi_k in X(phi_l).

#include "diffgeo/algebra.hpp"
#include "diffgeo/core.hpp"
#include "diffgeo/frames.hpp"

#include <memory>
#include <vector>

namespace diffgeo {

using VectorFieldMatrix = Mat;

/// Pointwise metric g(alpha, beta) as function coefficients.
inline Vec metric_pointwise(const SpectralGeometry& g, const FormSpace& a_space, const Vec& alpha,
                            const FormSpace& b_space, const Vec& beta) {
  const Frame& fa = a_space.frame;
  const Frame& fb = b_space.frame;
  detail::require(fa.degree == fb.degree, "metric_pointwise: forms have different degrees");
  detail::require(alpha.size() == fa.size() && beta.size() == fb.size(), "metric_pointwise: coefficient length mismatch");
  // Collect the coefficient function in front of each wedge monomial.
  auto coefficient_functions = [&](const Frame& f, const Vec& v) {
    std::vector<Vec> out(static_cast<std::size_t>(f.wedge_count()), Vec::Zero(g.size()));
    for (Index I = 0; I < f.size(); ++I) out[std::size_t(f.wedge_id(I))](f.coeff(I)) += v(I);
    return out;
  };
  const auto ca = coefficient_functions(fa, alpha);
  const auto cb = coefficient_functions(fb, beta);
  Vec out = Vec::Zero(g.size());
  for (Index p = 0; p < fa.wedge_count(); ++p) {
    if (ca[std::size_t(p)].isZero(0.0)) continue;
    for (Index q = 0; q < fb.wedge_count(); ++q) {
      if (cb[std::size_t(q)].isZero(0.0)) continue;
      const Vec w = det_product(g, fa.wedges[std::size_t(p)], fb.wedges[std::size_t(q)]);
      out += multiply(multiply(ca[std::size_t(p)], cb[std::size_t(q)], g), w, g);
    }
  }
  return out;
}

namespace detail {

// Sorts `w` in place and returns the permutation sign, or 0 when an index repeats.
inline int sort_wedge(std::vector<Index>& w) {
  int sign = 1;
  for (std::size_t a = 1; a < w.size(); ++a)
    for (std::size_t b = a; b > 0 && w[b - 1] >= w[b]; --b) {
      if (w[b - 1] == w[b]) return 0;
      std::swap(w[b - 1], w[b]);
      sign = -sign;
    }
  return sign;
}

}  // namespace detail

/// alpha ^ beta expanded in the frame of `target`.
inline Vec wedge(const SpectralGeometry& g, const FormSpace& a_space, const Vec& alpha, const FormSpace& b_space,
                 const Vec& beta, const FormSpace& target) {
  const Frame& fa = a_space.frame;
  const Frame& fb = b_space.frame;
  const Frame& ft = target.frame;
  detail::require(alpha.size() == fa.size() && beta.size() == fb.size(), "wedge: coefficient length mismatch");
  detail::require(ft.degree == fa.degree + fb.degree, "wedge: target degree must be the sum of the input degrees");
  const Index limit = std::min(ft.coeff_limit, g.size());
  Vec out = Vec::Zero(ft.size());
  std::vector<Index> merged;
  for (Index I = 0; I < fa.size(); ++I) {
    if (alpha(I) == 0.0) continue;
    for (Index J = 0; J < fb.size(); ++J) {
      if (beta(J) == 0.0) continue;
      merged = fa.wedge(I);
      merged.insert(merged.end(), fb.wedge(J).begin(), fb.wedge(J).end());
      const int sign = detail::sort_wedge(merged);
      if (sign == 0) continue;
      const Index wid = ft.find_wedge(merged);
      if (wid < 0) throw InvalidArgument("wedge: product leaves the target frame; raise n2");
      const auto prod = g.c().fibre(fa.coeff(I), fb.coeff(J));
      const double w = sign * alpha(I) * beta(J);
      for (Index s = 0; s < limit; ++s) out(ft.position(s, wid)) += w * prod(s);
    }
  }
  return out;
}

/// Weak exterior derivative: entries <alpha_I, d beta_J> for alpha_I in `to`, beta_J in `from`.
inline Mat ext_derivative_weak(const SpectralGeometry& g, const Frame& from, const Frame& to) {
  detail::require(to.degree == from.degree + 1, "ext_derivative_weak: frames must have consecutive degrees");
  detail::require(from.coeff_limit <= g.size() && to.coeff_limit <= g.size(), "ext_derivative_weak: frame exceeds the algebra");
  Mat out = Mat::Zero(to.size(), from.size());
  std::vector<Index> cols;
  for (Index q = 0; q < from.wedge_count(); ++q) {
    for (Index j0 = 0; j0 < from.coeff_limit; ++j0) {
      cols.assign(1, j0);
      const auto& jw = from.wedges[std::size_t(q)];
      cols.insert(cols.end(), jw.begin(), jw.end());
      const Index J = from.position(j0, q);
      for (Index p = 0; p < to.wedge_count(); ++p) {
        const Vec w = det_product(g, to.wedges[std::size_t(p)], cols);
        for (Index i0 = 0; i0 < to.coeff_limit; ++i0) out(to.position(i0, p), J) = w(i0);
      }
    }
  }
  return out;
}

/// Form spaces of degree 0..max_degree with the weak derivatives between them.
struct FormComplex {
  std::shared_ptr<const SpectralGeometry> geometry;
  TruncationConfig truncation;
  double tau = 1e-8;
  std::vector<FormSpace> spaces;  ///< spaces[k] holds k-forms
  std::vector<Mat> weak_d;        ///< weak_d[k] maps k-forms to (k+1)-forms

  const SpectralGeometry& geom() const { return *geometry; }
  Index max_degree() const { return Index(spaces.size()) - 1; }
  const FormSpace& space(Index k) const {
    detail::require(k >= 0 && k <= max_degree(), "form degree " + std::to_string(k) + " is not built");
    return spaces[std::size_t(k)];
  }
  const Mat& weak(Index k) const {
    detail::require(k >= 0 && k < max_degree(), "weak derivative from degree " + std::to_string(k) + " is not built");
    return weak_d[std::size_t(k)];
  }
};

inline FormComplex build_complex(std::shared_ptr<const SpectralGeometry> geometry, const TruncationConfig& cfg,
                                 Index max_degree, double tau = 1e-8, GramOptions opts = {}) {
  detail::require(geometry != nullptr, "build_complex: geometry is null");
  validate(cfg);
  detail::require(cfg.n0 <= geometry->size(), "build_complex: n0 exceeds the algebra size");
  detail::require(max_degree >= 0 && max_degree <= cfg.n2, "build_complex: degree must lie in [0, n2]");
  FormComplex cx;
  cx.geometry = std::move(geometry);
  cx.truncation = cfg;
  cx.tau = tau;
  for (Index k = 0; k <= max_degree; ++k) cx.spaces.push_back(make_form_space(build_frame(k, cfg), cx.geom(), tau, opts));
  for (Index k = 0; k < max_degree; ++k)
    cx.weak_d.push_back(ext_derivative_weak(cx.geom(), cx.spaces[std::size_t(k)].frame, cx.spaces[std::size_t(k + 1)].frame));
  return cx;
}

/// Strong exterior derivative of a k-form.
inline Vec ext_derivative(const FormComplex& cx, Index k, const Vec& v) {
  detail::require(v.size() == cx.space(k).size(), "ext_derivative: coefficient length mismatch");
  return pinv_apply(cx.space(k + 1), Vec(cx.weak(k) * v));
}

/// Codifferential of a k-form, k >= 1.
inline Vec codifferential(const FormComplex& cx, Index k, const Vec& v) {
  detail::require(k >= 1, "codifferential is undefined on 0-forms");
  detail::require(v.size() == cx.space(k).size(), "codifferential: coefficient length mismatch");
  return pinv_apply(cx.space(k - 1), Vec(cx.weak(k - 1).transpose() * v));
}

/// Dual vector field of a 1-form on the full n0 x n0 index square.
inline VectorFieldMatrix sharp(const SpectralGeometry& g, const FormSpace& one_forms, const Vec& v) {
  const Frame& f = one_forms.frame;
  detail::require(f.degree == 1, "sharp: expects a 1-form");
  detail::require(v.size() == f.size(), "sharp: coefficient length mismatch");
  const Index m = g.size();
  VectorFieldMatrix X = VectorFieldMatrix::Zero(m, m);
  Mat weighted(m, m);
  for (Index p = 0; p < f.wedge_count(); ++p) {
    // weighted(k, s) = sum_j0 v_(j0, p) c(j0, k, s); X(k, l) += sum_s weighted(k, s) Gamma(j1, l, s)
    weighted.setZero();
    for (Index j0 = 0; j0 < f.coeff_limit; ++j0) {
      const double a = v(f.position(j0, p));
      if (a != 0.0) weighted += a * g.c().slice(j0);
    }
    X.noalias() += weighted * g.gamma().slice(f.wedges[std::size_t(p)][0]).transpose();
  }
  return X;
}

/// Weak pairing <alpha_J, X^flat> = coefficient of phi_{j0} in X(phi_{j1}).
inline Vec restrict_to_frame(const FormSpace& one_forms, const VectorFieldMatrix& X) {
  const Frame& f = one_forms.frame;
  detail::require(f.degree == 1, "restrict_to_frame: expects the 1-form space");
  Vec w(f.size());
  for (Index J = 0; J < f.size(); ++J) {
    const Index j0 = f.coeff(J);
    const Index j1 = f.wedge(J)[0];
    detail::require(j0 < X.rows() && j1 < X.cols(), "restrict_to_frame: vector field smaller than the frame");
    w(J) = X(j0, j1);
  }
  return w;
}

/// Dual 1-form of a vector field.
inline Vec flat(const FormSpace& one_forms, const VectorFieldMatrix& X) {
  return pinv_apply(one_forms, restrict_to_frame(one_forms, X));
}

/// Gradient field: X(phi_l) = Gamma(f, phi_l).
inline VectorFieldMatrix gradient_field(const SpectralGeometry& g, const Vec& f) {
  const Index m = g.size();
  detail::require(f.size() <= m, "gradient_field: coefficient vector longer than the algebra");
  VectorFieldMatrix X = VectorFieldMatrix::Zero(m, m);
  for (Index i = 0; i < f.size(); ++i)
    if (f(i) != 0.0) X += f(i) * g.gamma().slice(i).transpose();
  return X;
}

/// X applied to a function.
inline Vec vf_apply(const VectorFieldMatrix& X, const Vec& f) {
  detail::require(f.size() <= X.cols(), "vf_apply: function has more coefficients than the field");
  return X.leftCols(f.size()) * f;
}

/// Interior product i_X alpha of a k-form (k >= 1), expanded in the frame of `target`.
inline Vec interior_product(const SpectralGeometry& g, const VectorFieldMatrix& X, const FormSpace& space,
                            const Vec& alpha, const FormSpace& target) {
  const Frame& f = space.frame;
  const Frame& ft = target.frame;
  detail::require(f.degree >= 1, "interior product of a 0-form is zero; expects degree >= 1");
  detail::require(ft.degree == f.degree - 1, "interior_product: target must have degree k - 1");
  detail::require(alpha.size() == f.size(), "interior_product: coefficient length mismatch");
  const Index limit = std::min(ft.coeff_limit, g.size());
  Vec out = Vec::Zero(ft.size());
  std::vector<Index> rest;
  for (Index I = 0; I < f.size(); ++I) {
    if (alpha(I) == 0.0) continue;
    const auto& w = f.wedge(I);
    for (std::size_t m = 0; m < w.size(); ++m) {
      rest = w;
      rest.erase(rest.begin() + std::ptrdiff_t(m));
      const Index wid = ft.find_wedge(rest);
      if (wid < 0) throw InvalidArgument("interior_product: result leaves the target frame");
      const Vec coeff = multiply(g.unit(f.coeff(I)), vf_apply(X, g.unit(w[m])), g);
      const double s = (m % 2 ? -1.0 : 1.0) * alpha(I);
      for (Index t = 0; t < limit; ++t) out(ft.position(t, wid)) += s * coeff(t);
    }
  }
  return out;
}

}  // namespace diffgeo
