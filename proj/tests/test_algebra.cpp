#include "diffgeo/algebra.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace diffgeo;

namespace {

SpectralGeometry torus_geometry(Index n, Index n0, std::uint64_t seed = 3) {
  KernelConfig kc;
  kc.n0 = n0;
  return make_geometry(spectral_basis(gen_torus(n, 2.0, 1.0, 0.0, seed), kc));
}

}  // namespace

TEST(Algebra, StructureConstantsMatchTripleLoop) {
  KernelConfig kc;
  kc.n0 = 6;
  const SpectralBasis b = spectral_basis(gen_blob(50, 3, 1.0, 8), kc);
  const StructureTensor c = structure_constants(b, 6);
  for (Index i = 0; i < 6; ++i)
    for (Index j = 0; j < 6; ++j)
      for (Index k = 0; k < 6; ++k) {
        double acc = 0.0;
        for (Index s = 0; s < 50; ++s)
          acc += b.eigenfunctions(s, i) * b.eigenfunctions(s, j) * b.eigenfunctions(s, k) * b.density(s);
        EXPECT_NEAR(c.c(i, j, k), acc / 50.0, 1e-13);
      }
}

TEST(Algebra, StructureConstantsSymmetricAndUnit) {
  const SpectralGeometry g = torus_geometry(300, 12);
  const Index m = g.size();
  EXPECT_NEAR(g.c()(0, 0, 0), g.phi0(), 1e-12);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j) {
      EXPECT_NEAR(g.c()(i, j, 0), i == j ? g.phi0() : 0.0, 1e-8);
      for (Index k = 0; k < m; ++k) {
        EXPECT_EQ(g.c()(i, j, k), g.c()(j, i, k));
        EXPECT_EQ(g.c()(i, j, k), g.c()(k, j, i));
        EXPECT_EQ(g.c()(i, j, k), g.c()(i, k, j));
      }
    }
}

TEST(Algebra, CarreTensorIdentities) {
  const SpectralGeometry g = torus_geometry(300, 12);
  const Index m = g.size();
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j) {
      EXPECT_NEAR(g.gamma()(i, j, 0), i == j ? g.phi0() * g.eigenvalues()(i) : 0.0, 1e-8);
      for (Index s = 0; s < m; ++s) {
        EXPECT_EQ(g.gamma()(i, j, s), g.gamma()(j, i, s));
        EXPECT_NEAR(g.gamma()(0, j, s), 0.0, 1e-12 * g.eigenvalues().maxCoeff());
      }
    }
}

TEST(Algebra, CarreMatchesDiscreteGeneratorOnFullBasis) {
  // With n0 = n the truncated generator is the dense one, so the identity is exact.
  const PointCloud pc = gen_blob(60, 2, 1.0, 5);
  KernelConfig kc;
  kc.n0 = 60;
  const MarkovOperator op = build_markov(pc, kc);
  const SpectralGeometry g = make_geometry(spectral_basis(op, 60));
  const Mat L = generator_matrix(op);
  const Mat& phi = g.basis.eigenfunctions;
  for (auto [a, b] : {std::pair<Index, Index>{1, 2}, {3, 3}, {4, 7}}) {
    const Vec f = phi.col(a), h = phi.col(b);
    const Vec oracle = 0.5 * (f.cwiseProduct(L * h) + h.cwiseProduct(L * f) - L * f.cwiseProduct(h));
    const Vec tensor = eval(carre(g.unit(a), g.unit(b), g), g.basis);
    EXPECT_LE((tensor - oracle).cwiseAbs().maxCoeff(), 1e-6 * oracle.cwiseAbs().maxCoeff()) << a << "," << b;
  }
}

TEST(Algebra, MultiplyByConstantAndZero) {
  const SpectralGeometry g = torus_geometry(300, 12);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> N;
  Vec h(12);
  for (auto& v : h) v = N(rng);
  EXPECT_LE((multiply(g.unit(0), h, g) - g.phi0() * h).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_EQ(multiply(h, Vec::Zero(12), g), Vec::Zero(12));
}

TEST(Algebra, MultiplyApproximatesPointwiseProduct) {
  KernelConfig kc;
  kc.n0 = 30;
  const PointCloud pc = gen_circle(100, 1.0, 0.0, 2);
  const SpectralGeometry g = make_geometry(spectral_basis(pc, kc));
  const Vec x = expand(pc.points.col(0), g.basis);
  const Vec x2 = eval(multiply(x, x, g), g.basis);
  const Vec truth = pc.points.col(0).cwiseProduct(pc.points.col(0));
  EXPECT_LE((x2 - truth).norm() / truth.norm(), 0.05);
}

TEST(Algebra, ExpandInvertsEval) {
  const SpectralGeometry g = torus_geometry(300, 15);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> N;
  Vec f(15);
  for (auto& v : f) v = N(rng);
  EXPECT_LE((expand(eval(f, g.basis), g.basis) - f).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE((eval(g.unit(0), g.basis).array() - g.phi0()).abs().maxCoeff(), 1e-12);
}

TEST(Algebra, CoordinateReconstructionImprovesWithN0) {
  const PointCloud pc = gen_torus(400, 2.0, 1.0, 0.0, 6);
  KernelConfig kc;
  kc.n0 = 60;
  const SpectralBasis b = spectral_basis(pc, kc);
  const Vec x = pc.points.col(0);
  const Vec coeffs = expand(x, b);
  double previous = std::numeric_limits<double>::infinity();
  for (Index m : {5, 15, 30, 60}) {
    const double err = (eval(coeffs.head(m), b) - x).norm();
    EXPECT_LT(err, previous);
    previous = err;
  }
}

TEST(Algebra, GeneratorActsDiagonally) {
  const SpectralGeometry g = torus_geometry(200, 8);
  EXPECT_EQ(apply_generator(g.unit(3), g), g.eigenvalues()(3) * g.unit(3));
}

TEST(Algebra, FlatBinaryLayout) {
  const SpectralGeometry g = torus_geometry(100, 4);
  std::ostringstream out;
  write_flat(out, g.c());
  EXPECT_EQ(out.str().size(), 4 * sizeof(std::uint64_t) + 64 * sizeof(double));
}

TEST(Algebra, LimitValidated) {
  KernelConfig kc;
  kc.n0 = 5;
  const SpectralBasis b = spectral_basis(gen_circle(50, 1.0, 0.0, 1), kc);
  EXPECT_THROW(structure_constants(b, 6), InvalidArgument);
  EXPECT_THROW(structure_constants(b, 0), InvalidArgument);
}
