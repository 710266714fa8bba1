#include "diffgeo/hodge.hpp"

#include <gtest/gtest.h>

#include <memory>
#include <random>

using namespace diffgeo;

namespace {

struct Built {
  std::shared_ptr<const SpectralGeometry> geometry;
  FormComplex complex;
};

Built build(const PointCloud& pc, const TruncationConfig& tc, Index max_degree = 1, KernelConfig kc = {}) {
  kc.n0 = tc.n0;
  auto geometry = std::make_shared<const SpectralGeometry>(make_geometry(spectral_basis(pc, kc)));
  FormComplex cx = build_complex(geometry, tc, max_degree);
  return {geometry, std::move(cx)};
}

Vec random(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N;
  Vec v(n);
  for (auto& x : v) x = N(rng);
  return v;
}

}  // namespace

TEST(Hodge, DegreeZeroIsTheFunctionLaplacian) {
  const Built b = build(gen_torus(400, 2.0, 1.0, 0.0, 5), {15, 6, 4});
  const HodgeOperator op = assemble(b.complex, 0);
  const Vec& lam = b.geometry->eigenvalues();
  EXPECT_LE((op.laplacian - Mat(lam.asDiagonal())).cwiseAbs().maxCoeff(), 1e-8 * lam.maxCoeff());
  const HodgeSpectrum s = solve(op, b.complex.space(0), 5);
  for (Index i = 0; i < 5; ++i) EXPECT_NEAR(s.eigenvalues(i), lam(i), 1e-4 * lam(4) + 2e-5 * lam(4)) << i;
}

TEST(Hodge, AssemblyStructure) {
  const Built b = build(gen_torus(400, 2.0, 1.0, 0.0, 5), {15, 6, 4}, 2);
  for (Index k : {1, 2}) {
    const HodgeOperator op = assemble(b.complex, k);
    EXPECT_LE((op.laplacian - op.laplacian.transpose()).cwiseAbs().maxCoeff(), 1e-10 * op.laplacian.cwiseAbs().maxCoeff());
    EXPECT_LE((op.sobolev - b.complex.space(k).gram - op.laplacian).cwiseAbs().maxCoeff(), 1e-14 * op.sobolev.cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Mat> es(op.laplacian);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-8 * es.eigenvalues().maxCoeff()) << k;
    EXPECT_GT(op.epsilon, 0.0);
  }
  EXPECT_THROW(assemble(b.complex, 1, -1.0), InvalidArgument);
}

TEST(Hodge, UpEnergyMatchesDerivativePairing) {
  // On differentials of resolved functions the up energy vanishes; on phi_a dphi_b it equals
  // |dphi_a ^ dphi_b|^2 from the wedge.
  const Built b = build(gen_torus(400, 2.0, 1.0, 0.0, 5), {15, 6, 4}, 2);
  const FormSpace& s1 = b.complex.space(1);
  const Mat up = up_energy(*b.geometry, s1.frame);
  for (Index j = 0; j < 4; ++j) EXPECT_LE(std::abs(up(s1.frame.position(0, j), s1.frame.position(0, j))), 1e-10 * up.cwiseAbs().maxCoeff());
  const Index I = s1.frame.position(2, 2);
  const Vec da = ext_derivative(b.complex, 0, b.geometry->unit(2));
  const Vec db = ext_derivative(b.complex, 0, b.geometry->unit(3));
  const Vec w = wedge(*b.geometry, s1, da, s1, db, b.complex.space(2));
  EXPECT_NEAR(up(I, I), inner(b.complex.space(2), w, w), 1e-6 * up(I, I));
}

TEST(Hodge, CircleHasOneHarmonicForm) {
  const Built b = build(gen_circle(1000, 1.0, 0.0, 2), {20, 8, 4});
  const HodgeSpectrum s = solve(assemble(b.complex, 1), b.complex.space(1), 5);
  ASSERT_GE(s.size(), 2);
  EXPECT_LT(s.eigenvalues(0), 0.2 * s.eigenvalues(1));
  EXPECT_EQ(betti(s), 1);
}

TEST(Hodge, AnnulusFirstFormIsRotational) {
  const PointCloud pc = gen_annulus(1500, 1.0, 2.0, 0.0, 4);
  const Built b = build(pc, {20, 8, 4});
  const HodgeSpectrum s = solve(assemble(b.complex, 1), b.complex.space(1), 4);
  ASSERT_GE(s.size(), 2);
  EXPECT_LE(s.eigenvalues(0), 0.35 * s.eigenvalues(1));
  // Correlate the dual field with the harmonic rotation (-y, x) / r^2.
  const SpectralGeometry& g = *b.geometry;
  const VectorFieldMatrix X = sharp(g, b.complex.space(1), s.eigenforms.col(0));
  const Vec x = expand(pc.points.col(0), g.basis), y = expand(pc.points.col(1), g.basis);
  const Vec u = eval(vf_apply(X, x), g.basis), v = eval(vf_apply(X, y), g.basis);
  double dot = 0.0, nf = 0.0, nr = 0.0;
  for (Index i = 0; i < pc.size(); ++i) {
    const double px = pc.points(i, 0), py = pc.points(i, 1), r2 = px * px + py * py;
    const double rx = -py / r2, ry = px / r2;
    dot += u(i) * rx + v(i) * ry;
    nf += u(i) * u(i) + v(i) * v(i);
    nr += rx * rx + ry * ry;
  }
  EXPECT_GE(std::abs(dot) / std::sqrt(nf * nr), 0.9);
}

TEST(Hodge, HarmonicCountRules) {
  EXPECT_EQ(harmonic_count(Vec::LinSpaced(6, 1.0, 6.0)), 0);
  Vec two(5);
  two << 1e-4, 2e-4, 0.5, 0.6, 0.7;
  EXPECT_EQ(harmonic_count(two), 2);
  GapRule absolute;
  absolute.absolute = 1e-3;
  EXPECT_EQ(harmonic_count(two, absolute), 2);
  EXPECT_EQ(harmonic_count(Vec()), 0);
  Vec lam(4);
  lam << 0.0, 1e-6, 1.0, 2.0;
  EXPECT_EQ(betti0(lam), 2);
  lam << 0.0, 1.0, 1.1, 2.0;
  EXPECT_EQ(betti0(lam), 1);
}

TEST(Hodge, TwoClustersHaveTwoComponents) {
  PointCloud a = gen_blob(150, 2, 0.3, 1), c = gen_blob(150, 2, 0.3, 2);
  c.points.col(0).array() += 20.0;
  PointCloud pc;
  pc.points.resize(300, 2);
  pc.points << a.points, c.points;
  KernelConfig kc;
  kc.n0 = 10;
  EXPECT_EQ(betti0(spectral_basis(pc, kc).eigenvalues), 2);
}

TEST(Hodge, BlobHasNoHarmonicOneForms) {
  const Built b = build(gen_blob(1000, 2, 1.0, 1), {35, 10, 4});
  const HodgeSpectrum s = solve(assemble(b.complex, 1), b.complex.space(1), 6);
  EXPECT_EQ(betti(s), 0);
}

TEST(Hodge, EigenformsAreOrthonormal) {
  const Built b = build(gen_torus(500, 2.0, 1.0, 0.0, 5), {20, 8, 4});
  const FormSpace& s1 = b.complex.space(1);
  const HodgeSpectrum s = solve(assemble(b.complex, 1), s1, 6);
  const Mat M = s.eigenforms.transpose() * s1.gram * s.eigenforms;
  EXPECT_LE((M - Mat::Identity(s.size(), s.size())).cwiseAbs().maxCoeff(), 1e-8);
  for (Index i = 1; i < s.size(); ++i) EXPECT_GE(s.eigenvalues(i), s.eigenvalues(i - 1));
  EXPECT_THROW(solve(assemble(b.complex, 1), s1, 0), InvalidArgument);
}

TEST(Hodge, DecompositionOfExactAndMixedForms) {
  const Built b = build(gen_torus(500, 2.0, 1.0, 0.0, 5), {20, 8, 4});
  const FormSpace& s1 = b.complex.space(1);
  Vec f = Vec::Zero(20);
  f.head(6) = random(6, 1);
  const Vec df = ext_derivative(b.complex, 0, f);
  const HodgeDecomposition exact = hodge_decompose(b.complex, df);
  EXPECT_LE(norm(s1, exact.remainder), 1e-8 * norm(s1, df));

  const Vec alpha = project_positive(s1, random(s1.size(), 2));
  const HodgeDecomposition h = hodge_decompose(b.complex, alpha);
  EXPECT_LE(std::abs(inner(s1, h.exact, h.remainder)), 1e-8 * norm(s1, alpha) * norm(s1, alpha));
  EXPECT_LE(norm(s1, h.exact + h.remainder - alpha), 1e-12 * norm(s1, alpha));
  EXPECT_THROW(hodge_decompose(b.complex, Vec::Zero(3)), InvalidArgument);
}

TEST(Hodge, CupNormRequiresTwoForms) {
  const Built b = build(gen_torus(400, 2.0, 1.0, 0.0, 5), {15, 6, 4});
  const FormSpace& s1 = b.complex.space(1);
  const Vec h = random(s1.size(), 3);
  EXPECT_THROW(cup_norm(*b.geometry, s1, h, h, s1), InvalidArgument);
  const FormSpace two = cup_space(*b.geometry, {15, 6, 4});
  EXPECT_EQ(two.frame.coeff_limit, 15);
  EXPECT_NEAR(cup_norm(*b.geometry, s1, h, h, two), 0.0, 1e-12);
}
