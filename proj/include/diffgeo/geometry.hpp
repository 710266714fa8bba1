#pragma once
// Pointwise metric of the ambient coordinate functions: per-point spectra for dimension
// estimates, singularity scores and tangent directions.

#include "diffgeo/algebra.hpp"
#include "diffgeo/core.hpp"
#include "diffgeo/point_cloud.hpp"

#include <algorithm>
#include <vector>

namespace diffgeo {

struct PointMetricField {
  std::vector<Mat> matrices;  ///< per point, d x d, M_ab = Gamma(x_a, x_b)
  Mat eigenvalues;            ///< n x d, each row descending, clipped at zero
  std::vector<Mat> eigenvectors;  ///< per point, columns ordered like the eigenvalues
  double max_clip = 0.0;      ///< largest clipped negative eigenvalue relative to the largest eigenvalue

  Index points() const { return eigenvalues.rows(); }
  Index dim() const { return eigenvalues.cols(); }
};

/// Builds Gamma(x_a, x_b) at every point from the mean-centred coordinates expanded in the basis.
inline PointMetricField coordinate_metric(const PointCloud& pc, const SpectralGeometry& g) {
  validate(pc);
  detail::require(pc.size() == g.basis.points(), "coordinate_metric: cloud and basis have different sizes");
  const Index n = pc.size();
  const Index d = pc.dim();
  const Index m = g.size();
  std::vector<Vec> coords;
  for (Index a = 0; a < d; ++a) {
    const Vec centred = pc.points.col(a).array() - pc.points.col(a).mean();
    coords.push_back(expand(centred, g.basis).head(m));
  }
  std::vector<Vec> entries(std::size_t(d * d));
  for (Index a = 0; a < d; ++a)
    for (Index b = a; b < d; ++b) {
      entries[std::size_t(a * d + b)] = eval(carre(coords[std::size_t(a)], coords[std::size_t(b)], g), g.basis);
      entries[std::size_t(b * d + a)] = entries[std::size_t(a * d + b)];
    }

  PointMetricField out;
  out.matrices.resize(std::size_t(n));
  out.eigenvectors.resize(std::size_t(n));
  out.eigenvalues.resize(n, d);
  double top = 0.0, clip = 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> es;
  for (Index s = 0; s < n; ++s) {
    Mat M(d, d);
    for (Index a = 0; a < d; ++a)
      for (Index b = 0; b < d; ++b) M(a, b) = entries[std::size_t(a * d + b)](s);
    es.compute(M);
    const Vec ev = es.eigenvalues().reverse();
    const Mat vecs = es.eigenvectors().rowwise().reverse();
    top = std::max(top, ev(0));
    clip = std::max(clip, -ev.minCoeff());
    out.eigenvalues.row(s) = ev.cwiseMax(0.0).transpose();
    out.eigenvectors[std::size_t(s)] = vecs;
    out.matrices[std::size_t(s)] = std::move(M);
  }
  out.max_clip = top > 0.0 ? clip / top : clip;
  return out;
}

/// Largest metric eigenvalue at each point divided by its median over the cloud.
inline Vec singularity_score(const PointMetricField& field) {
  detail::require(field.points() > 0, "singularity_score: empty field");
  Vec top = field.eigenvalues.col(0);
  std::vector<double> sorted(top.data(), top.data() + top.size());
  const std::size_t mid = sorted.size() / 2;
  std::nth_element(sorted.begin(), sorted.begin() + std::ptrdiff_t(mid), sorted.end());
  double median = sorted[mid];
  if (sorted.size() % 2 == 0) median = 0.5 * (median + *std::max_element(sorted.begin(), sorted.begin() + std::ptrdiff_t(mid)));
  if (!(median > 0.0)) throw NumericError("singularity_score: median of the top metric eigenvalue is not positive");
  return top / median;
}

struct TangentField {
  Mat directions;               ///< n x d unit vectors
  std::vector<bool> degenerate;  ///< top two eigenvalues within 10%
};

/// Leading metric eigenvector per point, with its first nonzero component made positive.
inline TangentField tangent_field(const PointMetricField& field, double degeneracy = 0.1) {
  const Index n = field.points();
  const Index d = field.dim();
  TangentField out;
  out.directions.resize(n, d);
  out.degenerate.resize(std::size_t(n));
  for (Index s = 0; s < n; ++s) {
    Vec v = field.eigenvectors[std::size_t(s)].col(0);
    for (Index a = 0; a < d; ++a) {
      if (std::abs(v(a)) > 1e-12) {
        if (v(a) < 0.0) v = -v;
        break;
      }
    }
    out.directions.row(s) = v.normalized().transpose();
    const double l0 = field.eigenvalues(s, 0);
    out.degenerate[std::size_t(s)] = d >= 2 && l0 > 0.0 && field.eigenvalues(s, 1) >= (1.0 - degeneracy) * l0;
  }
  return out;
}

}  // namespace diffgeo
