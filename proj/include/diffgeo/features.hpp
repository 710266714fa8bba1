#pragma once
// Geometric feature vectors built from spectra, eigenforms and operator combinations, plus a
// PCA projection with a sparsified weight vector.

#include "diffgeo/algebra.hpp"
#include "diffgeo/core.hpp"
#include "diffgeo/exterior.hpp"
#include "diffgeo/hodge.hpp"
#include "diffgeo/point_cloud.hpp"
#include "diffgeo/second_order.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace diffgeo {

enum class ScaleNormalisation {
  none,    ///< eigenvalues as estimated, in units of inverse squared length
  radius,  ///< eigenvalues multiplied by the squared RMS radius of the cloud
};

/// Declarative feature schedule. Counts of zero switch a block off.
struct FeatureConfig {
  Index function_eigenvalues = 0;                    ///< lambda0_i for i = 1..count
  std::vector<double> function_heat_times{1.0, 10.0, 50.0};
  Index form_eigenvalues = 0;                        ///< lambda1_i for i = 1..count
  std::vector<double> form_heat_times{1.0, 10.0};
  Index dirichlet = 0;                               ///< |d phi_i|^2 for i = 1..count
  Index inner_products = 0;                          ///< <alpha_a, d phi_b> for a, b = 1..count
  Index cup_forms = 0;                               ///< cup norms of all pairs among this many leading 1-eigenforms
  Index hessian = 0;                                 ///< int H(phi_a)(grad phi_b, grad phi_b) for a, b = 1..count
  bool biomarker = false;                            ///< the combined compactness/connectedness/hollowness entry
  ScaleNormalisation scale = ScaleNormalisation::radius;
  double degenerate_gap = 0.01;                      ///< relative eigenvalue gap below which eigenfunction entries are excluded

  bool needs_forms() const { return form_eigenvalues > 0 || inner_products > 0 || cup_forms > 0 || biomarker; }
  bool needs_complex() const { return needs_forms() || hessian > 0; }
};

/// Named schedules: "empty", "eigenvalues", "biomarker" and "full".
inline FeatureConfig feature_preset(const std::string& name) {
  FeatureConfig c;
  if (name == "empty") return c;
  if (name == "eigenvalues") {
    c.function_eigenvalues = 10;
    return c;
  }
  if (name == "biomarker") {
    c.function_eigenvalues = 2;
    c.form_eigenvalues = 1;
    c.dirichlet = 2;
    c.biomarker = true;
    return c;
  }
  if (name == "full") {
    c.function_eigenvalues = 10;
    c.form_eigenvalues = 5;
    c.dirichlet = 5;
    c.inner_products = 3;
    c.cup_forms = 2;
    c.hessian = 2;
    c.biomarker = true;
    return c;
  }
  throw InvalidArgument("unknown feature preset '" + name + "' (expected empty, eigenvalues, biomarker or full)");
}

struct FeatureVector {
  std::vector<std::string> names;
  Vec values;
  std::vector<std::string> excluded;  ///< entries zeroed by the degenerate-spectrum guard

  Index size() const { return values.size(); }
  double at(const std::string& name) const {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw InvalidArgument("no feature named '" + name + "'");
    return values(it - names.begin());
  }
};

/// Upstream results a feature build may draw on. Only the geometry is always required.
struct FeatureInputs {
  const SpectralGeometry* geometry = nullptr;
  const FormComplex* complex = nullptr;       ///< degree >= 1, needed for form and Hessian entries
  const HodgeSpectrum* one_forms = nullptr;   ///< 1-form Hodge spectrum
  double rms_radius = 1.0;                    ///< used by ScaleNormalisation::radius
};

/// Root mean squared distance to the centroid.
inline double rms_radius(const PointCloud& pc) {
  validate(pc);
  const Eigen::RowVectorXd centre = pc.points.colwise().mean();
  return std::sqrt((pc.points.rowwise() - centre).rowwise().squaredNorm().mean());
}

namespace detail {

// True when value i is separated from its neighbours by at least `gap` relative.
inline bool simple_eigenvalue(const Vec& ev, Index i, double gap) {
  const double scale = std::max(std::abs(ev(i)), 1e-300);
  if (i > 0 && std::abs(ev(i) - ev(i - 1)) < gap * scale) return false;
  if (i + 1 < ev.size() && std::abs(ev(i + 1) - ev(i)) < gap * scale) return false;
  return true;
}

inline std::string fmt_time(double t) {
  std::string s = std::to_string(t);
  s.erase(s.find_last_not_of('0') + 1);
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

}  // namespace detail

inline FeatureVector build_features(const FeatureInputs& in, const FeatureConfig& cfg) {
  FeatureVector out;
  std::vector<double> values;
  auto push = [&](std::string name, double v) {
    if (!std::isfinite(v)) throw NumericError("feature '" + name + "' is not finite");
    out.names.push_back(std::move(name));
    values.push_back(v);
  };
  auto excluded = [&](std::string name) {
    out.excluded.push_back(name);
    push(std::move(name), 0.0);
  };
  const bool any = cfg.function_eigenvalues > 0 || cfg.dirichlet > 0 || cfg.hessian > 0 || cfg.needs_forms();
  if (!any) {
    out.values.resize(0);
    return out;
  }
  if (in.geometry == nullptr) throw InvalidArgument("features: the spectral basis is missing; run the basis stage");
  if (cfg.needs_complex() && in.complex == nullptr)
    throw InvalidArgument("features: the 1-form space is missing; run the forms stage");
  if (cfg.needs_forms() && in.one_forms == nullptr)
    throw InvalidArgument("features: the 1-form Hodge spectrum is missing; run the hodge stage with --degree 1");
  const SpectralGeometry& g = *in.geometry;
  const double scale = cfg.scale == ScaleNormalisation::radius ? in.rms_radius * in.rms_radius : 1.0;
  const Vec lam0 = g.eigenvalues() * scale;
  const Index n0 = g.size();

  auto need0 = [&](Index count, const char* what) {
    if (count >= n0) throw InvalidArgument(std::string("features: ") + what + " asks for more eigenfunctions than n0 - 1");
  };

  need0(cfg.function_eigenvalues, "function_eigenvalues");
  for (Index i = 1; i <= cfg.function_eigenvalues; ++i) push("lambda0_" + std::to_string(i), lam0(i));
  for (double t : cfg.function_heat_times)
    for (Index i = 1; i <= cfg.function_eigenvalues; ++i)
      push("heat0_t" + detail::fmt_time(t) + "_" + std::to_string(i), std::exp(-t * lam0(i)));

  Vec lam1;
  if (cfg.needs_forms()) lam1 = in.one_forms->eigenvalues * scale;
  if (cfg.form_eigenvalues > 0 || cfg.biomarker) {
    const Index need = std::max<Index>(cfg.form_eigenvalues, cfg.biomarker ? 1 : 0);
    if (lam1.size() < need) throw InvalidArgument("features: the 1-form spectrum has fewer eigenvalues than requested");
  }
  for (Index i = 1; i <= cfg.form_eigenvalues; ++i) push("lambda1_" + std::to_string(i), lam1(i - 1));
  for (double t : cfg.form_heat_times)
    for (Index i = 1; i <= cfg.form_eigenvalues; ++i)
      push("heat1_t" + detail::fmt_time(t) + "_" + std::to_string(i), std::exp(-t * lam1(i - 1)));

  need0(cfg.dirichlet, "dirichlet");
  auto dirichlet = [&](Index i) { return scale * g.integrate(carre(g.unit(i), g.unit(i), g)); };
  for (Index i = 1; i <= cfg.dirichlet; ++i) push("dirichlet_" + std::to_string(i), dirichlet(i));

  if (cfg.inner_products > 0) {
    need0(cfg.inner_products, "inner_products");
    const FormComplex& cx = *in.complex;
    const HodgeSpectrum& hs = *in.one_forms;
    if (hs.size() < cfg.inner_products) throw InvalidArgument("features: too few 1-eigenforms for inner_products");
    for (Index a = 1; a <= cfg.inner_products; ++a) {
      const Vec weak = cx.weak(0).transpose() * hs.eigenforms.col(a - 1);
      for (Index b = 1; b <= cfg.inner_products; ++b) {
        const std::string name = "inner_" + std::to_string(a) + "_" + std::to_string(b);
        if (!detail::simple_eigenvalue(hs.eigenvalues, a - 1, cfg.degenerate_gap) ||
            !detail::simple_eigenvalue(g.eigenvalues(), b, cfg.degenerate_gap))
          excluded(name);
        else
          push(name, std::sqrt(scale) * weak(b));
      }
    }
  }

  if (cfg.cup_forms > 0) {
    const HodgeSpectrum& hs = *in.one_forms;
    if (hs.size() < cfg.cup_forms) throw InvalidArgument("features: too few 1-eigenforms for cup_forms");
    const FormComplex& cx = *in.complex;
    const FormSpace two = cup_space(g, cx.truncation, cx.tau);
    for (Index a = 0; a < cfg.cup_forms; ++a)
      for (Index b = a + 1; b < cfg.cup_forms; ++b)
        push("cup_" + std::to_string(a + 1) + "_" + std::to_string(b + 1),
             cup_norm(g, cx.space(1), hs.eigenforms.col(a), hs.eigenforms.col(b), two));
  }

  if (cfg.hessian > 0) {
    need0(cfg.hessian, "hessian");
    const FormSpace& ones = in.complex->space(1);
    for (Index a = 1; a <= cfg.hessian; ++a)
      for (Index b = 1; b <= cfg.hessian; ++b) {
        const std::string name = "hessian_" + std::to_string(a) + "_" + std::to_string(b);
        if (!detail::simple_eigenvalue(g.eigenvalues(), a, cfg.degenerate_gap) ||
            !detail::simple_eigenvalue(g.eigenvalues(), b, cfg.degenerate_gap)) {
          excluded(name);
          continue;
        }
        const FieldPair grad = gradient(g, ones, g.unit(b));
        push(name, scale * g.integrate(hessian_eval(g, ones, g.unit(a), grad, grad)));
      }
  }

  if (cfg.biomarker) {
    need0(2, "biomarker");
    const double l1 = lam0(1), l2 = lam0(2), m1 = lam1(0);
    push("biomarker", dirichlet(1) + dirichlet(2) + (l1 - std::exp(-l1) - std::exp(-10.0 * l1) - std::exp(-50.0 * l1)) +
                          l2 + (m1 - std::exp(-m1) - std::exp(-10.0 * m1)));
  }

  out.values = Eigen::Map<const Vec>(values.data(), Index(values.size()));
  return out;
}

struct PcaResult {
  Mat scores;                      ///< one row per input vector, `dim` columns
  Mat components;                  ///< feature-length columns, zero on dropped features
  Vec weights;                     ///< first component
  Vec sparse_weights;              ///< first component with all but the largest `keep` entries zeroed
  Vec explained_variance;          ///< per retained component
  std::vector<Index> dropped;      ///< constant columns
  std::vector<std::string> warnings;
};

/// Standardises the columns, drops constant ones, and projects onto the leading principal directions.
inline PcaResult pca_project(const std::vector<FeatureVector>& vectors, Index dim, Index keep = 5) {
  detail::require(vectors.size() >= 2, "pca_project: needs at least two vectors");
  const Index m = Index(vectors.size());
  const Index p = vectors.front().size();
  for (const auto& v : vectors)
    detail::require(v.size() == p, "pca_project: feature vectors have different lengths");
  detail::require(dim >= 1 && dim <= p, "pca_project: dim must lie in [1, vector length]");
  detail::require(keep >= 1, "pca_project: keep must be positive");
  Mat X(m, p);
  for (Index r = 0; r < m; ++r) X.row(r) = vectors[std::size_t(r)].values.transpose();

  PcaResult out;
  std::vector<Index> kept;
  const Eigen::RowVectorXd mean = X.colwise().mean();
  Mat Z(m, p);
  for (Index c = 0; c < p; ++c) {
    const Vec centred = X.col(c).array() - mean(c);
    const double sd = std::sqrt(centred.squaredNorm() / double(m));
    if (!(sd > 1e-12 * (1.0 + std::abs(mean(c))))) {
      out.dropped.push_back(c);
      const auto& names = vectors.front().names;
      out.warnings.push_back("dropped constant feature '" +
                             (c < Index(names.size()) ? names[std::size_t(c)] : std::to_string(c)) + "'");
      continue;
    }
    Z.col(Index(kept.size())) = centred / sd;
    kept.push_back(c);
  }
  const Index q = Index(kept.size());
  if (q == 0) throw InvalidArgument("pca_project: every feature is constant");
  detail::require(dim <= std::min(q, m), "pca_project: dim exceeds the number of informative directions");
  Eigen::JacobiSVD<Mat> svd(Z.leftCols(q), Eigen::ComputeThinU | Eigen::ComputeThinV);
  Mat V = svd.matrixV().leftCols(dim);
  for (Index k = 0; k < dim; ++k) {
    Index arg = 0;
    V.col(k).cwiseAbs().maxCoeff(&arg);
    if (V(arg, k) < 0.0) V.col(k) = -V.col(k);
  }
  out.scores = Z.leftCols(q) * V;
  out.components = Mat::Zero(p, dim);
  for (Index j = 0; j < q; ++j) out.components.row(kept[std::size_t(j)]) = V.row(j);
  out.weights = out.components.col(0);
  out.explained_variance = svd.singularValues().head(dim).array().square() / double(m);

  std::vector<Index> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), Index(0));
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return std::abs(out.weights(a)) > std::abs(out.weights(b)); });
  out.sparse_weights = Vec::Zero(p);
  for (Index r = 0; r < std::min(keep, p); ++r) out.sparse_weights(order[std::size_t(r)]) = out.weights(order[std::size_t(r)]);
  return out;
}

}  // namespace diffgeo
