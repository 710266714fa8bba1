#pragma once
// Second- and third-order calculus on vector fields: Lie bracket, Hessian, Levi-Civita
// connection through the Koszul formula, second covariant derivative and Riemann curvature.
//
// A vector field is carried as its n0 x n0 action matrix (column l holds X(phi_l)) together
// with its flat 1-form in the 1-form frame.

#include "diffgeo/algebra.hpp"
#include "diffgeo/core.hpp"
#include "diffgeo/exterior.hpp"
#include "diffgeo/frames.hpp"

#include <vector>

namespace diffgeo {

/// A vector field paired with its flat 1-form; flat == diffgeo::flat(space, matrix).
struct FieldPair {
  VectorFieldMatrix matrix;
  Vec flat;
};

inline FieldPair make_field(const FormSpace& one_forms, VectorFieldMatrix matrix) {
  FieldPair out;
  out.flat = flat(one_forms, matrix);
  out.matrix = std::move(matrix);
  return out;
}

/// Dual field of a 1-form.
inline FieldPair field_from_form(const SpectralGeometry& g, const FormSpace& one_forms, const Vec& v) {
  return make_field(one_forms, sharp(g, one_forms, v));
}

/// Gradient of a function.
inline FieldPair gradient(const SpectralGeometry& g, const FormSpace& one_forms, const Vec& f) {
  return make_field(one_forms, gradient_field(g, f));
}

inline VectorFieldMatrix commutator(const VectorFieldMatrix& x, const VectorFieldMatrix& y) {
  detail::require(x.rows() == y.rows() && x.cols() == y.cols(), "commutator: field shapes differ");
  return x * y - y * x;
}

/// Lie bracket of the dual fields of two 1-forms, returned as a 1-form.
inline Vec lie_bracket(const SpectralGeometry& g, const FormSpace& one_forms, const Vec& v, const Vec& w) {
  return flat(one_forms, commutator(sharp(g, one_forms, v), sharp(g, one_forms, w)));
}

inline FieldPair lie_bracket(const FormSpace& one_forms, const FieldPair& x, const FieldPair& y) {
  return make_field(one_forms, commutator(x.matrix, y.matrix));
}

/// g(X, Y) as a function.
inline Vec field_metric(const SpectralGeometry& g, const FormSpace& one_forms, const FieldPair& x,
                        const FieldPair& y) {
  return metric_pointwise(g, one_forms, x.flat, one_forms, y.flat);
}

/// Integrated <X, Y>.
inline double field_inner(const FormSpace& one_forms, const FieldPair& x, const FieldPair& y) {
  return inner(one_forms, x.flat, y.flat);
}

/// H(f)(X, Y) = (g(X, [Y, grad f]) + g(Y, [X, grad f]) + Gamma(f, g(X, Y))) / 2.
inline Vec hessian_eval(const SpectralGeometry& g, const FormSpace& one_forms, const Vec& f, const FieldPair& x,
                        const FieldPair& y) {
  const VectorFieldMatrix grad = gradient_field(g, f);
  const FieldPair yg = lie_bracket(one_forms, y, {grad, Vec()});
  const FieldPair xg = lie_bracket(one_forms, x, {grad, Vec()});
  const Vec gxy = field_metric(g, one_forms, x, y);
  Vec out = field_metric(g, one_forms, x, yg) + field_metric(g, one_forms, y, xg) + carre(f, gxy, g);
  return 0.5 * out;
}

/// Levi-Civita connection on the 1-form frame. The dual fields of the frame elements are
/// built once and reused by every covariant derivative.
class Connection {
 public:
  Connection(const SpectralGeometry& g, const FormSpace& one_forms) : g_(&g), space_(&one_forms) {
    detail::require(one_forms.frame.degree == 1, "Connection: expects the 1-form space");
    const Index n = one_forms.size();
    frame_.reserve(std::size_t(n));
    for (Index J = 0; J < n; ++J) {
      Vec e = Vec::Zero(n);
      e(J) = 1.0;
      frame_.push_back(field_from_form(g, one_forms, e));
    }
  }

  const SpectralGeometry& geometry() const { return *g_; }
  const FormSpace& space() const { return *space_; }

  FieldPair field(const Vec& one_form) const { return field_from_form(*g_, *space_, one_form); }
  FieldPair gradient(const Vec& f) const { return diffgeo::gradient(*g_, *space_, f); }
  FieldPair bracket(const FieldPair& x, const FieldPair& y) const { return lie_bracket(*space_, x, y); }

  /// Weak values <nabla_X Y, Z_J> for every frame element Z_J, from the Koszul formula with the
  /// derivative-of-metric terms integrated against the stationary measure.
  Vec koszul(const FieldPair& x, const FieldPair& y) const {
    const SpectralGeometry& g = *g_;
    const Index n = space_->size();
    const Vec gxy = field_metric(g, *space_, x, y);
    const VectorFieldMatrix xy = commutator(x.matrix, y.matrix);
    const Vec xy_weak = restrict_to_frame(*space_, xy);
    Vec out(n);
    for (Index J = 0; J < n; ++J) {
      const FieldPair& z = frame_[std::size_t(J)];
      const double t1 = g.integrate(vf_apply(x.matrix, field_metric(g, *space_, y, z)));
      const double t2 = g.integrate(vf_apply(y.matrix, field_metric(g, *space_, z, x)));
      const double t3 = g.integrate(vf_apply(z.matrix, gxy));
      const double b1 = xy_weak(J);
      const double b2 = restrict_to_frame(*space_, commutator(y.matrix, z.matrix)).dot(x.flat);
      const double b3 = restrict_to_frame(*space_, commutator(z.matrix, x.matrix)).dot(y.flat);
      out(J) = 0.5 * (t1 + t2 - t3 + b1 - b2 + b3);
    }
    return out;
  }

  /// nabla_X Y.
  FieldPair covariant_derivative(const FieldPair& x, const FieldPair& y) const {
    FieldPair out;
    out.flat = pinv_apply(*space_, koszul(x, y));
    out.matrix = sharp(*g_, *space_, out.flat);
    return out;
  }

  /// nabla^2_{X,Y} Z = nabla_X nabla_Y Z - nabla_{nabla_X Y} Z.
  FieldPair second_cov(const FieldPair& x, const FieldPair& y, const FieldPair& z) const {
    const FieldPair yz = covariant_derivative(y, z);
    const FieldPair xy = covariant_derivative(x, y);
    const FieldPair a = covariant_derivative(x, yz);
    const FieldPair b = covariant_derivative(xy, z);
    return {a.matrix - b.matrix, a.flat - b.flat};
  }

  /// nabla^2_{X,Y} f = X(Y f) - (nabla_X Y) f.
  Vec second_cov(const FieldPair& x, const FieldPair& y, const Vec& f) const {
    const FieldPair xy = covariant_derivative(x, y);
    return vf_apply(x.matrix, vf_apply(y.matrix, f)) - vf_apply(xy.matrix, f);
  }

  /// R(X, Y) Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_{[X,Y]} Z.
  FieldPair riemann(const FieldPair& x, const FieldPair& y, const FieldPair& z) const {
    const FieldPair a = covariant_derivative(x, covariant_derivative(y, z));
    const FieldPair b = covariant_derivative(y, covariant_derivative(x, z));
    const FieldPair c = covariant_derivative(bracket(x, y), z);
    return {a.matrix - b.matrix - c.matrix, a.flat - b.flat - c.flat};
  }

  /// Integrated <R(X, Y) Y, X>.
  double sectional_proxy(const FieldPair& x, const FieldPair& y) const {
    return field_inner(*space_, riemann(x, y, y), x);
  }

  /// <nabla_X Y - nabla_Y X - [X, Y]> in the G-norm, relative to |[X, Y]| + |nabla_X Y|.
  double torsion_residual(const FieldPair& x, const FieldPair& y) const {
    const FieldPair a = covariant_derivative(x, y);
    const FieldPair b = covariant_derivative(y, x);
    const FieldPair c = bracket(x, y);
    const double scale = norm(*space_, c.flat) + norm(*space_, a.flat) + norm(*space_, b.flat);
    const double r = norm(*space_, a.flat - b.flat - c.flat);
    return scale > 0.0 ? r / scale : r;
  }

  /// |int X(g(Y, Z)) - g(nabla_X Y, Z) - g(Y, nabla_X Z)| relative to the largest term.
  double compatibility_residual(const FieldPair& x, const FieldPair& y, const FieldPair& z) const {
    const double t = g_->integrate(vf_apply(x.matrix, field_metric(*g_, *space_, y, z)));
    const double a = field_inner(*space_, covariant_derivative(x, y), z);
    const double b = field_inner(*space_, y, covariant_derivative(x, z));
    const double scale = std::max({std::abs(t), std::abs(a), std::abs(b), 1e-300});
    return std::abs(t - a - b) / scale;
  }

 private:
  const SpectralGeometry* g_;
  const FormSpace* space_;
  std::vector<FieldPair> frame_;
};

}  // namespace diffgeo
