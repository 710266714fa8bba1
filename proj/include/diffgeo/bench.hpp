#pragma once
// Stage timings of the full pipeline on torus samples of increasing size.

#include "diffgeo/algebra.hpp"
#include "diffgeo/core.hpp"
#include "diffgeo/exterior.hpp"
#include "diffgeo/hodge.hpp"
#include "diffgeo/kernel.hpp"
#include "diffgeo/point_cloud.hpp"

#include <chrono>
#include <cmath>
#include <memory>
#include <vector>

namespace diffgeo {

struct StageTimes {
  double kernel = 0.0;      ///< distances, kernel, renormalisation
  double eigensolve = 0.0;  ///< truncated symmetric eigensolve
  double tensors = 0.0;     ///< structure constants and carre du champ
  double hodge = 0.0;       ///< 1-form complex, assembly and Galerkin solve
};

struct BenchRow {
  Index n = 0;
  std::vector<StageTimes> reps;
  StageTimes mean;
  StageTimes stddev;
};

struct BenchConfig {
  std::vector<Index> sizes{2000, 4000, 8000};
  Index reps = 1;
  KernelConfig kernel;
  TruncationConfig truncation;
  double major_radius = 2.0;
  double minor_radius = 1.0;
  std::uint64_t seed = 7;
  Index num_eigs = 10;
};

inline StageTimes time_pipeline(const PointCloud& pc, const BenchConfig& cfg) {
  using clock = std::chrono::steady_clock;
  auto seconds = [](clock::time_point a, clock::time_point b) { return std::chrono::duration<double>(b - a).count(); };
  StageTimes t;
  KernelConfig kc = cfg.kernel;
  kc.n0 = cfg.truncation.n0;
  auto t0 = clock::now();
  ConjugatedKernel k = conjugated_kernel(pc, kc);
  auto t1 = clock::now();
  SpectralBasis basis = spectral_basis(std::move(k), kc.n0);
  auto t2 = clock::now();
  auto geometry = std::make_shared<const SpectralGeometry>(make_geometry(std::move(basis)));
  auto t3 = clock::now();
  const FormComplex cx = build_complex(geometry, cfg.truncation, 1);
  const HodgeSpectrum spec = solve(assemble(cx, 1), cx.space(1), cfg.num_eigs);
  auto t4 = clock::now();
  if (spec.size() == 0) throw NumericError("benchmark: empty Hodge spectrum");
  t.kernel = seconds(t0, t1);
  t.eigensolve = seconds(t1, t2);
  t.tensors = seconds(t2, t3);
  t.hodge = seconds(t3, t4);
  return t;
}

inline std::vector<BenchRow> run_benchmark(const BenchConfig& cfg) {
  detail::require(!cfg.sizes.empty(), "benchmark: no sizes given");
  detail::require(cfg.reps >= 1, "benchmark: reps must be positive");
  for (std::size_t i = 0; i < cfg.sizes.size(); ++i) {
    detail::require(cfg.sizes[i] > cfg.truncation.n0, "benchmark: every size must exceed n0");
    if (i > 0) detail::require(cfg.sizes[i] > cfg.sizes[i - 1], "benchmark: sizes must be ascending");
  }
  std::vector<BenchRow> rows;
  for (Index n : cfg.sizes) {
    BenchRow row;
    row.n = n;
    for (Index r = 0; r < cfg.reps; ++r) {
      const PointCloud pc = gen_torus(n, cfg.major_radius, cfg.minor_radius, 0.0, cfg.seed + std::uint64_t(r));
      row.reps.push_back(time_pipeline(pc, cfg));
    }
    auto stat = [&](double StageTimes::*f, double& mean, double& sd) {
      double s = 0.0, s2 = 0.0;
      for (const auto& t : row.reps) s += t.*f;
      mean = s / double(row.reps.size());
      for (const auto& t : row.reps) s2 += (t.*f - mean) * (t.*f - mean);
      sd = row.reps.size() > 1 ? std::sqrt(s2 / double(row.reps.size() - 1)) : 0.0;
    };
    stat(&StageTimes::kernel, row.mean.kernel, row.stddev.kernel);
    stat(&StageTimes::eigensolve, row.mean.eigensolve, row.stddev.eigensolve);
    stat(&StageTimes::tensors, row.mean.tensors, row.stddev.tensors);
    stat(&StageTimes::hodge, row.mean.hodge, row.stddev.hodge);
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Least-squares slope of log(time) against log(n).
inline double loglog_slope(const std::vector<BenchRow>& rows, double StageTimes::*stage) {
  detail::require(rows.size() >= 2, "loglog_slope: needs at least two sizes");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = double(rows.size());
  for (const auto& r : rows) {
    const double x = std::log(double(r.n));
    const double y = std::log(std::max(r.mean.*stage, 1e-12));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace diffgeo
