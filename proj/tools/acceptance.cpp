// Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned below.

#include "diffgeo/bench.hpp"
#include "diffgeo/features.hpp"
#include "diffgeo/geometry.hpp"
#include "diffgeo/hodge.hpp"
#include "diffgeo/second_order.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace diffgeo;

namespace {

namespace tol {
constexpr double orthonormality = 1e-8;
constexpr double c_symmetry = 1e-12;
constexpr double gamma_zero = 1e-8;
constexpr double gram0 = 1e-8;
constexpr double dirichlet = 1e-6;
constexpr double complex_identity = 1e-6;
constexpr double pinv = 1e-8;
constexpr double runtime1 = 60.0;
constexpr double oracle = 1e-6;
constexpr double circle_l2_lo = 0.85, circle_l2_hi = 1.18;
constexpr double circle_l3_lo = 3.4, circle_l3_hi = 4.6;
constexpr double runtime3 = 30.0;
constexpr double torus_gap = 5.0;
constexpr double runtime4 = 120.0;
constexpr double cup_ratio = 10.0;
constexpr double annulus_ratio = 0.35;
constexpr double singular_fraction = 0.05;
constexpr double singular_distance = 2.0;  // multiples of sqrt(bandwidth)
constexpr double circle_min_score = 0.3;
constexpr double tangent_cos = 0.95;
constexpr double tangent_clean = 0.9;
constexpr double tangent_noisy = 0.8;
constexpr double hessian_value = 2.0, hessian_rel = 0.2;
constexpr double flat_field = 0.1;
constexpr double torsion = 1e-3;
constexpr double nabla2_vs_hessian = 0.05;
constexpr double hodge_time_ratio = 2.0;
constexpr double slope_lo = 1.8, slope_hi = 3.5;
constexpr double rigid = 1e-8;
constexpr double background_noise = 0.25;
constexpr double decomposition = 1e-6;
}  // namespace tol

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    detail << (ok ? "" : "!") << what << "; ";
  }
};

std::string num(double v) {
  std::ostringstream s;
  s << std::setprecision(3) << v;
  return s.str();
}

using clock_type = std::chrono::steady_clock;
double since(clock_type::time_point t0) { return std::chrono::duration<double>(clock_type::now() - t0).count(); }

std::shared_ptr<const SpectralGeometry> geometry_of(const PointCloud& pc, const KernelConfig& kc) {
  return std::make_shared<const SpectralGeometry>(make_geometry(spectral_basis(pc, kc)));
}

Vec random_vec(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> N;
  Vec v(n);
  for (Index i = 0; i < n; ++i) v(i) = N(rng);
  return v;
}

double rel_max(const Mat& err, const Mat& ref) { return detail::max_abs(err) / std::max(detail::max_abs(ref), 1e-300); }

// Criterion 1 -------------------------------------------------------------------------------

void algebraic_identities(Outcome& o) {
  const auto t0 = clock_type::now();
  const PointCloud pc = gen_torus(500, 2.0, 1.0, 0.0, 101);
  KernelConfig kc;
  kc.n0 = 20;
  const auto g = geometry_of(pc, kc);
  const SpectralBasis& b = g->basis;
  const Index m = g->size();
  const Index n = b.points();

  const Mat gram_fn = b.eigenfunctions.transpose() * b.density.asDiagonal() * b.eigenfunctions / double(n);
  const double ortho = detail::max_abs(gram_fn - Mat::Identity(m, m));
  o.check(ortho <= tol::orthonormality, "orthonormality " + num(ortho));

  double sym = 0.0, g0 = 0.0;
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j) {
      for (Index k = 0; k < m; ++k) {
        const double c = g->c()(i, j, k);
        sym = std::max({sym, std::abs(c - g->c()(j, i, k)), std::abs(c - g->c()(i, k, j)), std::abs(c - g->c()(k, j, i))});
      }
      const double expect = i == j ? g->phi0() * g->eigenvalues()(i) : 0.0;
      g0 = std::max(g0, std::abs(g->gamma()(i, j, 0) - expect));
    }
  o.check(sym <= tol::c_symmetry, "c symmetry " + num(sym));
  o.check(g0 <= tol::gamma_zero, "Gamma_ij0 " + num(g0));

  const TruncationConfig tc{20, 6, 4};
  const FormComplex cx = build_complex(g, tc, 2);
  const double gram0_err = detail::max_abs(cx.space(0).gram - Mat::Identity(m, m));
  o.check(gram0_err <= tol::gram0, "degree-0 Gram " + num(gram0_err));

  const Frame& f1 = cx.space(1).frame;
  Mat dd(tc.n2, tc.n2), expect(tc.n2, tc.n2);
  for (Index i = 1; i <= tc.n2; ++i)
    for (Index j = 1; j <= tc.n2; ++j) {
      dd(i - 1, j - 1) = cx.space(1).gram(f1.position(0, i - 1), f1.position(0, j - 1));
      expect(i - 1, j - 1) = i == j ? g->eigenvalues()(i) : 0.0;
    }
  const double dir = rel_max(dd - expect, expect);
  o.check(dir <= tol::dirichlet, "<dphi_i,dphi_j> " + num(dir));

  std::mt19937_64 rng(5);
  const Vec f = random_vec(m, rng);
  const Vec df = ext_derivative(cx, 0, f);
  const double d2 = norm(cx.space(2), ext_derivative(cx, 1, df)) / norm(cx.space(1), df);
  Vec f_resolved = Vec::Zero(m);
  f_resolved.head(tc.n2 + 1) = f.head(tc.n2 + 1);
  const Vec dfr = ext_derivative(cx, 0, f_resolved);
  const double d2_resolved = norm(cx.space(2), ext_derivative(cx, 1, dfr)) / norm(cx.space(1), dfr);
  o.check(d2 <= tol::complex_identity, "d^2 " + num(d2) + " (resolved span " + num(d2_resolved) + ")");

  const Vec beta = project_positive(cx.space(2), random_vec(cx.space(2).size(), rng));
  const Vec cb = codifferential(cx, 2, beta);
  const double c2 = norm(cx.space(0), codifferential(cx, 1, cb)) / norm(cx.space(1), cb);
  o.check(c2 <= tol::complex_identity, "codiff^2 " + num(c2));

  const Vec alpha = project_positive(cx.space(1), random_vec(cx.space(1).size(), rng));
  const Vec h = project_positive(cx.space(0), random_vec(m, rng));
  const double lhs = inner(cx.space(0), codifferential(cx, 1, alpha), h);
  const double rhs = inner(cx.space(1), alpha, ext_derivative(cx, 0, h));
  const double adj = std::abs(lhs - rhs) / std::max(norm(cx.space(1), alpha) * norm(cx.space(0), h), 1e-300);
  o.check(adj <= tol::complex_identity, "adjointness " + num(adj));

  const FormSpace& s1 = cx.space(1);
  const Mat& G = s1.gram;
  const Mat Gp = pinv_apply(s1, Mat(Mat::Identity(G.rows(), G.cols())));
  const double p1 = rel_max(G * Gp * G - G, G);
  const double p2 = rel_max(Gp * G * Gp - Gp, Gp);
  const double p3 = rel_max((G * Gp).transpose() - G * Gp, G * Gp);
  o.check(std::max({p1, p2, p3}) <= tol::pinv, "pinv identities " + num(std::max({p1, p2, p3})));

  const VectorFieldMatrix X = sharp(*g, s1, alpha);
  const VectorFieldMatrix Y = gradient_field(*g, f);
  const double anti = detail::max_abs(commutator(X, Y) + commutator(Y, X));
  o.check(anti == 0.0, "bracket antisymmetry " + num(anti));

  const double secs = since(t0);
  o.check(secs < tol::runtime1, "runtime " + num(secs) + "s");
}

// Criterion 2 -------------------------------------------------------------------------------

// Gamma(phi_a, phi_b) at the samples from the generator: P[(lambda_a + lambda_b)/2 phi_a phi_b] - L P[phi_a phi_b] / 2.
Vec carre_oracle(const SpectralBasis& b, Index m, Index a, Index c) {
  const Index n = b.points();
  const Mat phi = b.eigenfunctions.leftCols(m);
  const Vec prod = phi.col(a).cwiseProduct(phi.col(c));
  Vec proj(m);
  for (Index s = 0; s < m; ++s) {
    double acc = 0.0;
    for (Index p = 0; p < n; ++p) acc += b.density(p) * phi(p, s) * prod(p);
    proj(s) = acc / double(n);
  }
  const Vec first = 0.5 * (b.eigenvalues(a) + b.eigenvalues(c)) * proj;
  const Vec second = 0.5 * proj.cwiseProduct(b.eigenvalues.head(m));
  return phi * (first - second);
}

double integrate_samples(const SpectralBasis& b, const Vec& values) { return b.density.dot(values) / double(b.points()); }

void oracle_equivalence(Outcome& o) {
  double worst_c = 0.0, worst_g = 0.0, worst_up = 0.0;
  for (std::uint64_t seed : {201u, 202u, 203u}) {
    const PointCloud pc = gen_blob(200, 3, 1.0, seed);
    KernelConfig kc;
    kc.n0 = 12;
    const auto g = geometry_of(pc, kc);
    const SpectralBasis& b = g->basis;
    const Index m = g->size();
    const Index n = b.points();
    Mat c_err(m * m, m), c_ref(m * m, m);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < m; ++j)
        for (Index k = 0; k < m; ++k) {
          double acc = 0.0;
          for (Index p = 0; p < n; ++p) acc += b.eigenfunctions(p, i) * b.eigenfunctions(p, j) * b.eigenfunctions(p, k) * b.density(p);
          c_ref(i * m + j, k) = acc / double(n);
          c_err(i * m + j, k) = g->c()(i, j, k) - c_ref(i * m + j, k);
        }
    worst_c = std::max(worst_c, rel_max(c_err, c_ref));

    const TruncationConfig tc{m, 4, 3};
    const Frame frame = build_frame(1, tc);
    const Mat G = gram(frame, *g);
    const Mat up = up_energy(*g, frame);
    std::vector<Vec> gam(std::size_t(m * m));
    for (Index a = 0; a < m; ++a)
      for (Index c = 0; c < m; ++c) gam[std::size_t(a * m + c)] = carre_oracle(b, m, a, c);
    auto Gm = [&](Index a, Index c) -> const Vec& { return gam[std::size_t(a * m + c)]; };
    Mat G_ref(G.rows(), G.cols()), up_ref(up.rows(), up.cols());
    for (Index I = 0; I < frame.size(); ++I)
      for (Index J = 0; J < frame.size(); ++J) {
        const Index i0 = frame.coeff(I), i1 = frame.wedge(I)[0];
        const Index j0 = frame.coeff(J), j1 = frame.wedge(J)[0];
        const Vec pw = b.eigenfunctions.col(i0).cwiseProduct(b.eigenfunctions.col(j0)).cwiseProduct(Gm(i1, j1));
        G_ref(I, J) = integrate_samples(b, pw);
        const Vec det = Gm(i0, j0).cwiseProduct(Gm(i1, j1)) - Gm(i0, j1).cwiseProduct(Gm(i1, j0));
        up_ref(I, J) = integrate_samples(b, det);
      }
    worst_g = std::max(worst_g, rel_max(G - G_ref, G_ref));
    worst_up = std::max(worst_up, rel_max(up - up_ref, up_ref));
  }
  o.check(worst_c <= tol::oracle, "structure constants " + num(worst_c));
  o.check(worst_g <= tol::oracle, "1-form Gram " + num(worst_g));
  o.check(worst_up <= tol::oracle, "up energy " + num(worst_up));
}

// Criterion 3 -------------------------------------------------------------------------------

void circle_spectrum(Outcome& o) {
  const auto t0 = clock_type::now();
  const PointCloud pc = gen_circle(2000, 1.0, 0.0, 0);
  const SpectralBasis b = spectral_basis(pc, KernelConfig{});
  const double r2 = b.eigenvalues(2) / b.eigenvalues(1);
  const double r3 = b.eigenvalues(3) / b.eigenvalues(1);
  const double secs = since(t0);
  o.check(r2 >= tol::circle_l2_lo && r2 <= tol::circle_l2_hi, "lambda2/lambda1 " + num(r2));
  o.check(r3 >= tol::circle_l3_lo && r3 <= tol::circle_l3_hi, "lambda3/lambda1 " + num(r3));
  o.check(secs < tol::runtime3, "runtime " + num(secs) + "s");
}

// Criteria 4 and 5 --------------------------------------------------------------------------

struct OneFormResult {
  HodgeSpectrum spectrum;
  double cup = 0.0;
};

OneFormResult one_form_pipeline(const PointCloud& pc) {
  const TruncationConfig tc{35, 10, 4};
  const auto g = geometry_of(pc, KernelConfig{});
  const FormComplex cx = build_complex(g, tc, 1);
  OneFormResult r;
  r.spectrum = solve(assemble(cx, 1), cx.space(1), 10);
  const FormSpace two = cup_space(*g, tc);
  r.cup = cup_norm(*g, cx.space(1), r.spectrum.eigenforms.col(0), r.spectrum.eigenforms.col(1), two);
  return r;
}

OneFormResult torus_result;

void torus_h1(Outcome& o) {
  const auto t0 = clock_type::now();
  torus_result = one_form_pipeline(gen_torus(3000, 2.0, 1.0, 0.0, 7));
  const double secs = since(t0);
  const Vec& ev = torus_result.spectrum.eigenvalues;
  const double gap = ev(2) / std::max(ev(1), 1e-300);
  const Index b1 = betti(torus_result.spectrum);
  o.detail << "eigenvalues " << num(ev(0)) << " " << num(ev(1)) << " " << num(ev(2)) << " " << num(ev(3)) << "; ";
  o.check(gap >= tol::torus_gap, "third/second " + num(gap));
  o.check(b1 == 2, "betti " + std::to_string(b1));
  o.check(secs < tol::runtime4, "runtime " + num(secs) + "s");
}

void cup_separation(Outcome& o) {
  const OneFormResult sphere = one_form_pipeline(gen_sphere_with_circles(3000, 0.0, 7));
  const double ratio = torus_result.cup / std::max(sphere.cup, 1e-300);
  o.detail << "torus " << num(torus_result.cup) << " sphere-with-circles " << num(sphere.cup) << "; ";
  o.check(ratio >= tol::cup_ratio, "ratio " + num(ratio));
}

// Criterion 6 -------------------------------------------------------------------------------

void annulus_gap(Outcome& o) {
  const PointCloud pc = gen_annulus(2000, 1.0, 2.0, 0.0, 7);
  const auto g = geometry_of(pc, KernelConfig{});
  const TruncationConfig tc{35, 10, 4};
  const FormComplex cx = build_complex(g, tc, 1);
  const HodgeSpectrum spec = solve(assemble(cx, 1), cx.space(1), 5);
  const double ratio = spec.eigenvalues(0) / spec.eigenvalues(1);
  o.detail << "first " << num(spec.eigenvalues(0)) << " second " << num(spec.eigenvalues(1)) << "; ";
  o.check(ratio <= tol::annulus_ratio, "ratio " + num(ratio));
}

// Criterion 7 -------------------------------------------------------------------------------

KernelConfig singularity_kernel() {
  KernelConfig kc;
  kc.bandwidth_neighbours = 64;
  return kc;
}

double localisation(double sigma, double& bound) {
  const IntersectingSample s = gen_intersecting(two_circles_config(600), sigma, 11);
  const SpectralGeometry g = make_geometry(spectral_basis(s.cloud, singularity_kernel()));
  const Vec score = singularity_score(coordinate_metric(s.cloud, g));
  const Index n = score.size();
  const Index k = std::max<Index>(1, Index(std::floor(tol::singular_fraction * double(n))));
  std::vector<Index> idx(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) idx[std::size_t(i)] = i;
  std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), [&](Index a, Index b) { return score(a) < score(b); });
  double mean = 0.0;
  for (Index r = 0; r < k; ++r) {
    double best = std::numeric_limits<double>::infinity();
    for (Index q = 0; q < s.intersections.rows(); ++q)
      best = std::min(best, (s.cloud.points.row(idx[std::size_t(r)]) - s.intersections.row(q)).norm());
    mean += best;
  }
  bound = tol::singular_distance * std::sqrt(g.basis.bandwidth);
  return mean / double(k);
}

void singularity(Outcome& o) {
  double bound = 0.0;
  const double clean = localisation(0.0, bound);
  o.check(clean <= bound, "sigma 0 mean distance " + num(clean) + " bound " + num(bound));
  const double noisy = localisation(0.2, bound);
  o.check(noisy <= bound, "sigma 0.2 mean distance " + num(noisy) + " bound " + num(bound));
  const PointCloud circle = gen_circle(1000, 1.0, 0.0, 1);
  const SpectralGeometry g = make_geometry(spectral_basis(circle, singularity_kernel()));
  const double min_score = singularity_score(coordinate_metric(circle, g)).minCoeff();
  o.check(min_score >= tol::circle_min_score, "circle min score " + num(min_score));
}

// Criterion 8 -------------------------------------------------------------------------------

double tangent_coverage(double sigma) {
  const PointCloud pc = gen_circle(1000, 1.0, sigma, 1);
  const SpectralGeometry g = make_geometry(spectral_basis(pc, KernelConfig{}));
  const TangentField t = tangent_field(coordinate_metric(pc, g));
  Index good = 0;
  for (Index i = 0; i < pc.size(); ++i) {
    // Evenly spaced angles: sample i sits at 2 pi i / n before noise.
    const double th = 2.0 * std::numbers::pi * double(i) / double(pc.size());
    const Eigen::RowVector2d truth(-std::sin(th), std::cos(th));
    if (std::abs(t.directions.row(i).dot(truth)) >= tol::tangent_cos) ++good;
  }
  return double(good) / double(pc.size());
}

void tangents(Outcome& o) {
  const double clean = tangent_coverage(0.0);
  o.check(clean >= tol::tangent_clean, "noiseless coverage " + num(clean));
  const double noisy = tangent_coverage(0.05);
  o.check(noisy >= tol::tangent_noisy, "sigma 0.05 coverage " + num(noisy));
}

// Criterion 9 -------------------------------------------------------------------------------

void flat_second_order(Outcome& o) {
  const PointCloud pc = gen_square(1500, 1.0, 0.0, 3);
  const auto g = geometry_of(pc, KernelConfig{});
  const FormComplex cx = build_complex(g, TruncationConfig{35, 10, 4}, 1);
  const FormSpace& ones = cx.space(1);
  const Vec x = pc.points.col(0).array() - pc.points.col(0).mean();
  const Vec y = pc.points.col(1).array() - pc.points.col(1).mean();
  const Vec xc = expand(x, g->basis), yc = expand(y, g->basis), x2 = expand(x.cwiseProduct(x), g->basis);
  const Connection con(*g, ones);
  const FieldPair X = con.gradient(xc), Y = con.gradient(yc);

  // Interior points stay a bandwidth-scale margin away from the Neumann boundary.
  auto interior_mean = [&](const Vec& coeffs) {
    const Vec v = eval(coeffs, g->basis);
    double s = 0.0;
    Index count = 0;
    for (Index i = 0; i < v.size(); ++i)
      if (std::abs(pc.points(i, 0)) < 0.6 && std::abs(pc.points(i, 1)) < 0.6) {
        s += v(i);
        ++count;
      }
    return s / double(count);
  };
  const double hess = interior_mean(hessian_eval(*g, ones, x2, X, X));
  const double nabla2 = interior_mean(con.second_cov(X, X, x2));
  o.check(std::abs(hess - tol::hessian_value) <= tol::hessian_rel * tol::hessian_value, "H(x^2)(grad x, grad x) " + num(hess));

  const double scale = std::max(norm(ones, X.flat), norm(ones, Y.flat));
  const double br = norm(ones, con.bracket(X, Y).flat) / scale;
  const double cov = norm(ones, con.covariant_derivative(X, X).flat) / scale;
  const double curv = norm(ones, con.riemann(X, Y, X).flat) / scale;
  o.check(br <= tol::flat_field, "|[grad x, grad y]| " + num(br));
  o.check(cov <= tol::flat_field, "|nabla_{grad x} grad x| " + num(cov));
  o.check(curv <= tol::flat_field, "|R(grad x, grad y) grad x| " + num(curv));

  const double tors = con.torsion_residual(X, Y);
  o.check(tors <= tol::torsion, "torsion " + num(tors));
  const double agree = std::abs(nabla2 - hess) / std::abs(hess);
  o.check(agree <= tol::nabla2_vs_hessian, "nabla^2 " + num(nabla2) + " vs Hessian, rel " + num(agree));
}

// Criterion 10 ------------------------------------------------------------------------------

void benchmark_shape(Outcome& o) {
  BenchConfig bc;
  const auto rows = run_benchmark(bc);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& r : rows) {
    lo = std::min(lo, r.mean.hodge);
    hi = std::max(hi, r.mean.hodge);
    o.detail << "n=" << r.n << " eig " << num(r.mean.eigensolve) << "s hodge " << num(r.mean.hodge) << "s; ";
  }
  const double ratio = hi / lo;
  const double slope = loglog_slope(rows, &StageTimes::eigensolve);
  o.check(ratio < tol::hodge_time_ratio, "hodge max/min " + num(ratio));
  o.check(slope >= tol::slope_lo && slope <= tol::slope_hi, "eigensolve slope " + num(slope));
}

// Criterion 11 ------------------------------------------------------------------------------

FeatureVector eigenvalue_features(const PointCloud& pc, const KernelConfig& kc) {
  const SpectralGeometry g = make_geometry(spectral_basis(pc, kc));
  FeatureInputs in;
  in.geometry = &g;
  in.rms_radius = rms_radius(pc);
  return build_features(in, feature_preset("eigenvalues"));
}

void invariance(Outcome& o) {
  KernelConfig kc;
  kc.n0 = 20;
  kc.bandwidth_neighbours = 100;
  const PointCloud pc = gen_annulus(800, 0.5, 1.0, 0.0, 5);
  const FeatureVector base = eigenvalue_features(pc, kc);

  PointCloud moved = pc;
  const double a = 0.7;
  Eigen::Matrix2d R;
  R << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  moved.points = (pc.points * R.transpose()).rowwise() + Eigen::RowVector2d(3.0, -1.5);
  const FeatureVector rigid = eigenvalue_features(moved, kc);
  const double rigid_err = ((rigid.values - base.values).cwiseAbs().array() / base.values.cwiseAbs().array().max(1e-300)).maxCoeff();
  o.check(rigid_err <= tol::rigid, "rigid motion " + num(rigid_err));

  const Index n = pc.size();
  PointCloud noisy;
  noisy.points.resize(n + n / 2, 2);
  noisy.points.topRows(n) = pc.points;
  std::mt19937_64 rng(9);
  const Eigen::RowVector2d lo = pc.points.colwise().minCoeff(), hi = pc.points.colwise().maxCoeff();
  for (Index i = n; i < noisy.points.rows(); ++i)
    for (Index c = 0; c < 2; ++c) noisy.points(i, c) = std::uniform_real_distribution<double>(lo(c), hi(c))(rng);
  const FeatureVector with_noise = eigenvalue_features(noisy, kc);
  double worst = 0.0;
  for (Index i = 0; i < base.size(); ++i)
    if (base.names[std::size_t(i)].rfind("lambda0_", 0) == 0)
      worst = std::max(worst, std::abs(with_noise.values(i) - base.values(i)) / std::abs(base.values(i)));
  o.check(worst <= tol::background_noise, "50% background noise " + num(worst));
}

// Criterion 12 ------------------------------------------------------------------------------

void decomposition(Outcome& o) {
  const PointCloud pc = gen_torus(1000, 2.0, 1.0, 0.0, 12);
  KernelConfig kc;
  kc.n0 = 25;
  const auto g = geometry_of(pc, kc);
  const FormComplex cx = build_complex(g, TruncationConfig{25, 8, 4}, 1);
  const FormSpace& ones = cx.space(1);
  std::mt19937_64 rng(12);
  const Vec f = random_vec(g->size(), rng);
  const Vec exact_in = ext_derivative(cx, 0, f);
  const HodgeDecomposition de = hodge_decompose(cx, exact_in);
  const double rem = norm(ones, de.remainder) / norm(ones, exact_in);
  o.check(rem <= tol::decomposition, "exact-input remainder " + num(rem));

  const Vec alpha = project_positive(ones, random_vec(ones.size(), rng));
  const HodgeDecomposition dg = hodge_decompose(cx, alpha);
  const double orth = std::abs(inner(ones, dg.exact, dg.remainder)) / inner(ones, alpha, alpha);
  o.check(orth <= tol::decomposition, "orthogonality " + num(orth));
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<void(Outcome&)> run;
  };
  const std::vector<Criterion> criteria{
      {"1 algebraic identities", algebraic_identities},
      {"2 oracle equivalence", oracle_equivalence},
      {"3 circle spectrum", circle_spectrum},
      {"4 torus first cohomology", torus_h1},
      {"5 cup product separation", cup_separation},
      {"6 annulus gap", annulus_gap},
      {"7 singularity localisation", singularity},
      {"8 tangent accuracy", tangents},
      {"9 flat second-order oracles", flat_second_order},
      {"10 benchmark shape", benchmark_shape},
      {"11 invariance", invariance},
      {"12 Hodge decomposition", decomposition},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto t0 = clock_type::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << " [" << num(since(t0)) << "s] " << o.detail.str() << std::endl;
  }
  std::cout << (criteria.size() - std::size_t(failed)) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
