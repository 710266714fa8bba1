#pragma once
// Point clouds: synthetic generators for the test shapes, and CSV interchange.

#include "diffgeo/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace diffgeo {

/// n samples in ambient dimension d, stored one point per row.
struct PointCloud {
  Mat points;
  std::optional<std::uint64_t> seed;
  std::string label;

  Index size() const { return points.rows(); }
  Index dim() const { return points.cols(); }
};

inline void validate(const PointCloud& pc) {
  detail::require(pc.size() >= 1, "point cloud must contain at least one point");
  detail::require(pc.dim() >= 1, "point cloud must have ambient dimension >= 1");
  detail::require(pc.points.allFinite(), "point cloud contains non-finite coordinates");
}

namespace detail {

inline void add_noise(Mat& pts, double sigma, std::mt19937_64& rng) {
  if (sigma <= 0.0) return;
  std::normal_distribution<double> normal(0.0, sigma);
  for (Index i = 0; i < pts.rows(); ++i)
    for (Index j = 0; j < pts.cols(); ++j) pts(i, j) += normal(rng);
}

inline Eigen::Vector3d random_unit3(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Vector3d v;
  do {
    v = {normal(rng), normal(rng), normal(rng)};
  } while (v.norm() < 1e-12);
  return v.normalized();
}

// Orthonormal pair spanning the plane perpendicular to `normal`.
inline std::pair<Eigen::Vector3d, Eigen::Vector3d> plane_basis(const Eigen::Vector3d& normal) {
  Eigen::Vector3d n = normal.normalized();
  Eigen::Vector3d helper = std::abs(n.x()) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
  Eigen::Vector3d u = (helper - helper.dot(n) * n).normalized();
  return {u, n.cross(u)};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Simple shapes

/// Points on a circle of the given radius in the plane. Angles are evenly spaced unless
/// `random_angles` is set, in which case they are drawn uniformly.
inline PointCloud gen_circle(Index n, double radius, double noise_sigma, std::uint64_t seed,
                             bool random_angles = false) {
  detail::require(n >= 1, "gen_circle: n must be positive");
  detail::require(radius > 0.0, "gen_circle: radius must be positive");
  detail::require(noise_sigma >= 0.0, "gen_circle: noise_sigma must be non-negative");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 2.0 * std::numbers::pi);
  PointCloud pc;
  pc.points.resize(n, 2);
  for (Index i = 0; i < n; ++i) {
    const double theta = random_angles ? uniform(rng) : 2.0 * std::numbers::pi * double(i) / double(n);
    pc.points(i, 0) = radius * std::cos(theta);
    pc.points(i, 1) = radius * std::sin(theta);
  }
  detail::add_noise(pc.points, noise_sigma, rng);
  pc.seed = seed;
  pc.label = "circle";
  return pc;
}

/// Torus in R^3 sampled uniformly in its two angles.
inline PointCloud gen_torus(Index n, double major_radius, double minor_radius, double noise_sigma,
                            std::uint64_t seed) {
  detail::require(n >= 1, "gen_torus: n must be positive");
  detail::require(minor_radius > 0.0 && major_radius > minor_radius,
                  "gen_torus: requires major_radius > minor_radius > 0");
  detail::require(noise_sigma >= 0.0, "gen_torus: noise_sigma must be non-negative");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 2.0 * std::numbers::pi);
  PointCloud pc;
  pc.points.resize(n, 3);
  for (Index i = 0; i < n; ++i) {
    const double u = uniform(rng);
    const double v = uniform(rng);
    const double ring = major_radius + minor_radius * std::cos(v);
    pc.points(i, 0) = ring * std::cos(u);
    pc.points(i, 1) = ring * std::sin(u);
    pc.points(i, 2) = minor_radius * std::sin(v);
  }
  detail::add_noise(pc.points, noise_sigma, rng);
  pc.seed = seed;
  pc.label = "torus";
  return pc;
}

/// Unit 2-sphere with two unit circles attached at its poles: one in the xz-plane touching
/// the north pole, one in the yz-plane touching the south pole. Counts follow the measure
/// ratio 4*pi : 2*pi : 2*pi.
inline PointCloud gen_sphere_with_circles(Index n, double noise_sigma, std::uint64_t seed) {
  detail::require(n >= 3, "gen_sphere_with_circles: n must be at least 3");
  detail::require(noise_sigma >= 0.0, "gen_sphere_with_circles: noise_sigma must be non-negative");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 2.0 * std::numbers::pi);
  const Index n_circle = std::max<Index>(1, n / 4);
  const Index n_sphere = n - 2 * n_circle;
  PointCloud pc;
  pc.points.resize(n, 3);
  Index row = 0;
  for (Index i = 0; i < n_sphere; ++i) pc.points.row(row++) = detail::random_unit3(rng).transpose();
  for (Index i = 0; i < n_circle; ++i) {
    const double a = uniform(rng);
    pc.points.row(row++) = Eigen::RowVector3d(std::cos(a), 0.0, 2.0 + std::sin(a));
  }
  for (Index i = 0; i < n_circle; ++i) {
    const double a = uniform(rng);
    pc.points.row(row++) = Eigen::RowVector3d(0.0, std::cos(a), -2.0 + std::sin(a));
  }
  detail::add_noise(pc.points, noise_sigma, rng);
  pc.seed = seed;
  pc.label = "sphere_with_circles";
  return pc;
}

/// Planar annulus with uniform area density.
inline PointCloud gen_annulus(Index n, double inner_radius, double outer_radius, double noise_sigma,
                              std::uint64_t seed) {
  detail::require(n >= 1, "gen_annulus: n must be positive");
  detail::require(inner_radius >= 0.0 && outer_radius > inner_radius,
                  "gen_annulus: requires outer_radius > inner_radius >= 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  PointCloud pc;
  pc.points.resize(n, 2);
  const double r2_lo = inner_radius * inner_radius;
  const double r2_hi = outer_radius * outer_radius;
  for (Index i = 0; i < n; ++i) {
    const double r = std::sqrt(r2_lo + (r2_hi - r2_lo) * uniform(rng));
    const double a = 2.0 * std::numbers::pi * uniform(rng);
    pc.points(i, 0) = r * std::cos(a);
    pc.points(i, 1) = r * std::sin(a);
  }
  detail::add_noise(pc.points, noise_sigma, rng);
  pc.seed = seed;
  pc.label = "annulus";
  return pc;
}

/// Uniform samples from the axis-aligned square [-half_width, half_width]^2.
inline PointCloud gen_square(Index n, double half_width, double noise_sigma, std::uint64_t seed) {
  detail::require(n >= 1, "gen_square: n must be positive");
  detail::require(half_width > 0.0, "gen_square: half_width must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-half_width, half_width);
  PointCloud pc;
  pc.points.resize(n, 2);
  for (Index i = 0; i < n; ++i) {
    pc.points(i, 0) = uniform(rng);
    pc.points(i, 1) = uniform(rng);
  }
  detail::add_noise(pc.points, noise_sigma, rng);
  pc.seed = seed;
  pc.label = "square";
  return pc;
}

/// Uniform samples from the unit 2-sphere.
inline PointCloud gen_sphere(Index n, double radius, double noise_sigma, std::uint64_t seed) {
  detail::require(n >= 1, "gen_sphere: n must be positive");
  detail::require(radius > 0.0, "gen_sphere: radius must be positive");
  std::mt19937_64 rng(seed);
  PointCloud pc;
  pc.points.resize(n, 3);
  for (Index i = 0; i < n; ++i) pc.points.row(i) = radius * detail::random_unit3(rng).transpose();
  detail::add_noise(pc.points, noise_sigma, rng);
  pc.seed = seed;
  pc.label = "sphere";
  return pc;
}

/// Isotropic Gaussian blob (contractible; no loops).
inline PointCloud gen_blob(Index n, Index dim, double sigma, std::uint64_t seed) {
  detail::require(n >= 1 && dim >= 1, "gen_blob: n and dim must be positive");
  detail::require(sigma > 0.0, "gen_blob: sigma must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, sigma);
  PointCloud pc;
  pc.points.resize(n, dim);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < dim; ++j) pc.points(i, j) = normal(rng);
  pc.seed = seed;
  pc.label = "blob";
  return pc;
}

// ---------------------------------------------------------------------------
// Unions of intersecting primitives with ground-truth singular points

struct CirclePrimitive {
  Eigen::Vector2d center{0.0, 0.0};
  double radius = 1.0;
};
struct SegmentPrimitive {
  Eigen::Vector2d a{0.0, 0.0};
  Eigen::Vector2d b{1.0, 0.0};
};
/// Graph of y = amplitude * sin(frequency * x) + offset over [x_min, x_max].
struct SineCurvePrimitive {
  double amplitude = 0.5;
  double frequency = 1.0;
  double offset = 0.0;
  double x_min = -1.0;
  double x_max = 1.0;
};
struct SpherePrimitive {
  Eigen::Vector3d center{0.0, 0.0, 0.0};
  double radius = 1.0;
};
struct SpatialCirclePrimitive {
  Eigen::Vector3d center{0.0, 0.0, 0.0};
  Eigen::Vector3d normal{0.0, 0.0, 1.0};
  double radius = 1.0;
};

using PrimitiveShape = std::variant<CirclePrimitive, SegmentPrimitive, SineCurvePrimitive,
                                    SpherePrimitive, SpatialCirclePrimitive>;

struct Primitive {
  PrimitiveShape shape;
  Index count = 0;
};

struct IntersectingSample {
  PointCloud cloud;
  Mat intersections;  ///< one ground-truth singular point per row
  std::vector<Index> primitive_of_point;
};

namespace detail {

inline Index primitive_dim(const PrimitiveShape& s) {
  return std::holds_alternative<SpherePrimitive>(s) || std::holds_alternative<SpatialCirclePrimitive>(s) ? 3 : 2;
}

struct Polyline {
  std::vector<Eigen::Vector2d> pts;
};

inline Polyline sine_polyline(const SineCurvePrimitive& s, int segments = 4000) {
  Polyline p;
  p.pts.reserve(segments + 1);
  for (int i = 0; i <= segments; ++i) {
    const double x = s.x_min + (s.x_max - s.x_min) * double(i) / segments;
    p.pts.emplace_back(x, s.amplitude * std::sin(s.frequency * x) + s.offset);
  }
  return p;
}

inline void circle_circle(const CirclePrimitive& a, const CirclePrimitive& b, std::vector<Eigen::VectorXd>& out) {
  const Eigen::Vector2d delta = b.center - a.center;
  const double d = delta.norm();
  if (d < 1e-14 || d > a.radius + b.radius || d < std::abs(a.radius - b.radius)) return;
  const double along = (a.radius * a.radius - b.radius * b.radius + d * d) / (2.0 * d);
  const double h = std::sqrt(std::max(0.0, a.radius * a.radius - along * along));
  const Eigen::Vector2d mid = a.center + along * delta / d;
  const Eigen::Vector2d perp(-delta.y() / d, delta.x() / d);
  out.push_back(mid + h * perp);
  if (h > 1e-14) out.push_back(mid - h * perp);
}

inline void segment_circle(const Eigen::Vector2d& p, const Eigen::Vector2d& q, const CirclePrimitive& c,
                           std::vector<Eigen::VectorXd>& out, bool half_open = false) {
  const Eigen::Vector2d dir = q - p;
  const Eigen::Vector2d f = p - c.center;
  const double A = dir.squaredNorm();
  const double B = 2.0 * f.dot(dir);
  const double C = f.squaredNorm() - c.radius * c.radius;
  const double disc = B * B - 4 * A * C;
  if (A == 0.0 || disc < 0.0) return;
  const double sq = std::sqrt(disc);
  for (double t : {(-B - sq) / (2 * A), (-B + sq) / (2 * A)}) {
    if (t >= 0.0 && (half_open ? t < 1.0 : t <= 1.0)) out.push_back(p + t * dir);
    if (disc == 0.0) break;
  }
}

inline void segment_segment(const Eigen::Vector2d& p, const Eigen::Vector2d& q, const Eigen::Vector2d& r,
                            const Eigen::Vector2d& s, std::vector<Eigen::VectorXd>& out, bool half_open = false) {
  const Eigen::Vector2d d1 = q - p;
  const Eigen::Vector2d d2 = s - r;
  const double denom = d1.x() * d2.y() - d1.y() * d2.x();
  if (std::abs(denom) < 1e-300) return;
  const Eigen::Vector2d w = r - p;
  const double t = (w.x() * d2.y() - w.y() * d2.x()) / denom;
  const double u = (w.x() * d1.y() - w.y() * d1.x()) / denom;
  const bool t_ok = half_open ? (t >= 0.0 && t < 1.0) : (t >= 0.0 && t <= 1.0);
  const bool u_ok = half_open ? (u >= 0.0 && u < 1.0) : (u >= 0.0 && u <= 1.0);
  if (t_ok && u_ok) out.push_back(p + t * d1);
}

inline void polyline_vs(const Polyline& line, const PrimitiveShape& other, std::vector<Eigen::VectorXd>& out) {
  for (std::size_t i = 0; i + 1 < line.pts.size(); ++i) {
    const auto& p = line.pts[i];
    const auto& q = line.pts[i + 1];
    if (const auto* c = std::get_if<CirclePrimitive>(&other)) {
      segment_circle(p, q, *c, out, true);
    } else if (const auto* s = std::get_if<SegmentPrimitive>(&other)) {
      segment_segment(p, q, s->a, s->b, out, true);
    } else if (const auto* sc = std::get_if<SineCurvePrimitive>(&other)) {
      const Polyline o = sine_polyline(*sc);
      for (std::size_t j = 0; j + 1 < o.pts.size(); ++j) segment_segment(p, q, o.pts[j], o.pts[j + 1], out, true);
    }
  }
}

inline void sphere_sphere(const SpherePrimitive& a, const SpherePrimitive& b, std::vector<Eigen::VectorXd>& out) {
  const Eigen::Vector3d delta = b.center - a.center;
  const double d = delta.norm();
  if (d < 1e-14 || d > a.radius + b.radius || d < std::abs(a.radius - b.radius)) return;
  const double along = (a.radius * a.radius - b.radius * b.radius + d * d) / (2.0 * d);
  const double h = std::sqrt(std::max(0.0, a.radius * a.radius - along * along));
  const Eigen::Vector3d mid = a.center + along * delta / d;
  const auto [u, v] = plane_basis(delta);
  constexpr int samples = 32;
  for (int i = 0; i < samples; ++i) {
    const double ang = 2.0 * std::numbers::pi * i / samples;
    out.push_back(mid + h * (std::cos(ang) * u + std::sin(ang) * v));
  }
}

inline void sphere_circle(const SpherePrimitive& s, const SpatialCirclePrimitive& c, std::vector<Eigen::VectorXd>& out) {
  // |c + r(cos a u + sin a v) - s|^2 = R^2  =>  A cos a + B sin a = C
  const auto [u, v] = plane_basis(c.normal);
  const Eigen::Vector3d w = c.center - s.center;
  const double A = 2.0 * c.radius * w.dot(u);
  const double B = 2.0 * c.radius * w.dot(v);
  const double C = s.radius * s.radius - w.squaredNorm() - c.radius * c.radius;
  const double amp = std::hypot(A, B);
  if (amp < 1e-14 || std::abs(C) > amp) return;
  const double base = std::atan2(B, A);
  const double spread = std::acos(std::clamp(C / amp, -1.0, 1.0));
  for (double ang : {base + spread, base - spread}) {
    out.push_back(c.center + c.radius * (std::cos(ang) * u + std::sin(ang) * v));
    if (spread < 1e-14) break;
  }
}

inline double dist_to_spatial_circle(const Eigen::Vector3d& p, const SpatialCirclePrimitive& c) {
  const Eigen::Vector3d n = c.normal.normalized();
  const Eigen::Vector3d w = p - c.center;
  const double h = w.dot(n);
  const Eigen::Vector3d in_plane = w - h * n;
  const double rho = in_plane.norm();
  return std::hypot(h, rho - c.radius);
}

inline void circle3_circle3(const SpatialCirclePrimitive& a, const SpatialCirclePrimitive& b,
                            std::vector<Eigen::VectorXd>& out) {
  // Numeric: scan circle a for local minima of the distance to circle b, then refine.
  const auto [u, v] = plane_basis(a.normal);
  auto at = [&](double ang) -> Eigen::Vector3d {
    return a.center + a.radius * (std::cos(ang) * u + std::sin(ang) * v);
  };
  auto f = [&](double ang) { return dist_to_spatial_circle(at(ang), b); };
  constexpr int samples = 20000;
  const double step = 2.0 * std::numbers::pi / samples;
  for (int i = 0; i < samples; ++i) {
    const double a0 = (i - 1) * step, a1 = i * step, a2 = (i + 1) * step;
    if (!(f(a1) <= f(a0) && f(a1) < f(a2))) continue;
    double lo = a0, hi = a2;
    for (int it = 0; it < 100; ++it) {
      const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
      if (f(m1) < f(m2)) hi = m2; else lo = m1;
    }
    const double best = 0.5 * (lo + hi);
    if (f(best) < 1e-7 * std::max(1.0, a.radius)) out.push_back(at(best));
  }
}

inline void pair_intersections(const PrimitiveShape& a, const PrimitiveShape& b, std::vector<Eigen::VectorXd>& out) {
  if (const auto* ca = std::get_if<CirclePrimitive>(&a)) {
    if (const auto* cb = std::get_if<CirclePrimitive>(&b)) return circle_circle(*ca, *cb, out);
    if (const auto* sb = std::get_if<SegmentPrimitive>(&b)) return segment_circle(sb->a, sb->b, *ca, out);
  }
  if (const auto* sa = std::get_if<SegmentPrimitive>(&a)) {
    if (const auto* cb = std::get_if<CirclePrimitive>(&b)) return segment_circle(sa->a, sa->b, *cb, out);
    if (const auto* sb = std::get_if<SegmentPrimitive>(&b)) return segment_segment(sa->a, sa->b, sb->a, sb->b, out);
  }
  if (const auto* sa = std::get_if<SineCurvePrimitive>(&a)) return polyline_vs(sine_polyline(*sa), b, out);
  if (const auto* sb = std::get_if<SineCurvePrimitive>(&b)) return polyline_vs(sine_polyline(*sb), a, out);
  if (const auto* pa = std::get_if<SpherePrimitive>(&a)) {
    if (const auto* pb = std::get_if<SpherePrimitive>(&b)) return sphere_sphere(*pa, *pb, out);
    if (const auto* cb = std::get_if<SpatialCirclePrimitive>(&b)) return sphere_circle(*pa, *cb, out);
  }
  if (const auto* ca = std::get_if<SpatialCirclePrimitive>(&a)) {
    if (const auto* pb = std::get_if<SpherePrimitive>(&b)) return sphere_circle(*pb, *ca, out);
    if (const auto* cb = std::get_if<SpatialCirclePrimitive>(&b)) return circle3_circle3(*ca, *cb, out);
  }
}

inline Eigen::VectorXd sample_primitive(const PrimitiveShape& shape, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double two_pi = 2.0 * std::numbers::pi;
  if (const auto* c = std::get_if<CirclePrimitive>(&shape)) {
    const double a = two_pi * unit(rng);
    return Eigen::Vector2d(c->center + c->radius * Eigen::Vector2d(std::cos(a), std::sin(a)));
  }
  if (const auto* s = std::get_if<SegmentPrimitive>(&shape)) {
    return Eigen::Vector2d(s->a + unit(rng) * (s->b - s->a));
  }
  if (const auto* s = std::get_if<SineCurvePrimitive>(&shape)) {
    // Rejection sampling against the arc-length density sqrt(1 + y'^2).
    const double slope_max = std::abs(s->amplitude * s->frequency);
    const double bound = std::sqrt(1.0 + slope_max * slope_max);
    for (;;) {
      const double x = s->x_min + (s->x_max - s->x_min) * unit(rng);
      const double slope = s->amplitude * s->frequency * std::cos(s->frequency * x);
      if (unit(rng) * bound <= std::sqrt(1.0 + slope * slope))
        return Eigen::Vector2d(x, s->amplitude * std::sin(s->frequency * x) + s->offset);
    }
  }
  if (const auto* s = std::get_if<SpherePrimitive>(&shape)) {
    return Eigen::Vector3d(s->center + s->radius * random_unit3(rng));
  }
  const auto& c = std::get<SpatialCirclePrimitive>(shape);
  const auto [u, v] = plane_basis(c.normal);
  const double a = two_pi * unit(rng);
  return Eigen::Vector3d(c.center + c.radius * (std::cos(a) * u + std::sin(a) * v));
}

}  // namespace detail

/// Union sample of the given primitives with per-primitive counts, plus the ground-truth
/// intersection points of every primitive pair (computed on the noiseless geometry).
inline IntersectingSample gen_intersecting(const std::vector<Primitive>& spec, double noise_sigma,
                                           std::uint64_t seed) {
  detail::require(!spec.empty(), "gen_intersecting: empty primitive list");
  detail::require(noise_sigma >= 0.0, "gen_intersecting: noise_sigma must be non-negative");
  const Index dim = detail::primitive_dim(spec.front().shape);
  Index total = 0;
  for (const auto& p : spec) {
    detail::require(detail::primitive_dim(p.shape) == dim, "gen_intersecting: primitives mix 2D and 3D");
    detail::require(p.count >= 1, "gen_intersecting: every primitive needs a positive count");
    total += p.count;
  }
  std::mt19937_64 rng(seed);
  IntersectingSample out;
  out.cloud.points.resize(total, dim);
  Index row = 0;
  for (std::size_t k = 0; k < spec.size(); ++k) {
    for (Index i = 0; i < spec[k].count; ++i) {
      out.cloud.points.row(row++) = detail::sample_primitive(spec[k].shape, rng).transpose();
      out.primitive_of_point.push_back(Index(k));
    }
  }
  detail::add_noise(out.cloud.points, noise_sigma, rng);
  out.cloud.seed = seed;
  out.cloud.label = "intersecting";

  std::vector<Eigen::VectorXd> hits;
  for (std::size_t a = 0; a < spec.size(); ++a)
    for (std::size_t b = a + 1; b < spec.size(); ++b) detail::pair_intersections(spec[a].shape, spec[b].shape, hits);
  // Merge duplicates produced at polyline joints or tangencies.
  std::vector<Eigen::VectorXd> unique;
  for (const auto& h : hits) {
    const bool seen = std::any_of(unique.begin(), unique.end(), [&](const Eigen::VectorXd& u) { return (u - h).norm() < 1e-6; });
    if (!seen) unique.push_back(h);
  }
  out.intersections.resize(Index(unique.size()), dim);
  for (std::size_t i = 0; i < unique.size(); ++i) out.intersections.row(Index(i)) = unique[i].transpose();
  return out;
}

/// Two unit circles and a sine curve crossing both, in the plane.
inline std::vector<Primitive> planar_crossing_config(Index per_primitive = 500) {
  return {
      {CirclePrimitive{{-0.6, 0.0}, 1.0}, per_primitive},
      {CirclePrimitive{{0.6, 0.0}, 1.0}, per_primitive},
      {SineCurvePrimitive{0.4, 1.5, -0.3, -2.4, 2.4}, per_primitive},
  };
}

/// Two unit circles crossing at right angles.
inline std::vector<Primitive> two_circles_config(Index per_primitive = 600) {
  return {
      {CirclePrimitive{{-std::numbers::sqrt2 / 2, 0.0}, 1.0}, per_primitive},
      {CirclePrimitive{{std::numbers::sqrt2 / 2, 0.0}, 1.0}, per_primitive},
  };
}

/// Two overlapping unit spheres and a circle threading both, in R^3.
inline std::vector<Primitive> spatial_crossing_config(Index per_primitive = 800) {
  return {
      {SpherePrimitive{{-0.6, 0.0, 0.0}, 1.0}, per_primitive},
      {SpherePrimitive{{0.6, 0.0, 0.0}, 1.0}, per_primitive},
      {SpatialCirclePrimitive{{0.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, 1.3}, per_primitive / 2},
  };
}

// ---------------------------------------------------------------------------
// CSV interchange: comma separated, '.' decimal, optional single header row.

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline std::optional<double> parse_number(const std::string& raw) {
  std::size_t b = raw.find_first_not_of(" \t\r");
  std::size_t e = raw.find_last_not_of(" \t\r");
  if (b == std::string::npos) return std::nullopt;
  const std::string s = raw.substr(b, e - b + 1);
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace detail

inline PointCloud parse_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto cells = detail::split_csv_line(line);
    std::vector<double> values;
    values.reserve(cells.size());
    bool numeric = true;
    for (const auto& c : cells) {
      const auto v = detail::parse_number(c);
      if (!v) {
        numeric = false;
        break;
      }
      values.push_back(*v);
    }
    if (!numeric) {
      if (rows.empty() && line_no == 1) continue;  // header
      throw ParseError("non-numeric cell", line_no);
    }
    if (width == 0) width = values.size();
    if (values.size() != width) throw ParseError("ragged row (expected " + std::to_string(width) + " columns)", line_no);
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw ParseError("no data rows");
  PointCloud pc;
  pc.points.resize(Index(rows.size()), Index(width));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < width; ++j) pc.points(Index(i), Index(j)) = rows[i][j];
  if (!pc.points.allFinite()) throw ParseError("non-finite coordinate");
  return pc;
}

inline PointCloud load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  PointCloud pc = parse_csv(in);
  pc.label = path;
  return pc;
}

inline void write_csv(std::ostream& out, const PointCloud& pc, bool header = false) {
  if (header) {
    for (Index j = 0; j < pc.dim(); ++j) out << (j ? "," : "") << "x" << j;
    out << "\n";
  }
  char buf[32];
  for (Index i = 0; i < pc.size(); ++i) {
    for (Index j = 0; j < pc.dim(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", pc.points(i, j));
      out << (j ? "," : "") << buf;
    }
    out << "\n";
  }
}

inline void save_csv(const PointCloud& pc, const std::string& path, bool header = false) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path);
  write_csv(out, pc, header);
}

}  // namespace diffgeo
