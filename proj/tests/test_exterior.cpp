#include "diffgeo/exterior.hpp"

#include <gtest/gtest.h>

#include <memory>
#include <random>

using namespace diffgeo;

namespace {

class Exterior : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    KernelConfig kc;
    kc.n0 = 20;
    cloud_ = new PointCloud(gen_torus(500, 2.0, 1.0, 0.0, 101));
    geometry_ = std::make_shared<const SpectralGeometry>(make_geometry(spectral_basis(*cloud_, kc)));
    complex_ = new FormComplex(build_complex(geometry_, TruncationConfig{20, 6, 4}, 2));
  }
  static void TearDownTestSuite() {
    delete complex_;
    delete cloud_;
    geometry_.reset();
  }

  const SpectralGeometry& g() const { return *geometry_; }
  const FormComplex& cx() const { return *complex_; }
  const FormSpace& space(Index k) const { return complex_->space(k); }

  Vec random(Index n, std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> N;
    Vec v(n);
    for (auto& x : v) x = N(rng);
    return v;
  }
  Vec unit_form(Index k, Index coeff, Index wedge) const {
    Vec e = Vec::Zero(space(k).size());
    e(space(k).frame.position(coeff, wedge)) = 1.0;
    return e;
  }

  static inline PointCloud* cloud_ = nullptr;
  static inline std::shared_ptr<const SpectralGeometry> geometry_;
  static inline FormComplex* complex_ = nullptr;
};

}  // namespace

TEST_F(Exterior, MetricIntegratesToGramPairing) {
  const Vec a = random(space(1).size(), 1), b = random(space(1).size(), 2);
  const double integral = g().integrate(metric_pointwise(g(), space(1), a, space(1), b));
  EXPECT_NEAR(integral, inner(space(1), a, b), 1e-8 * norm(space(1), a) * norm(space(1), b));
}

TEST_F(Exterior, MetricOfDifferentialsIsCarre) {
  const Vec a = unit_form(1, 0, 0), b = unit_form(1, 0, 2);
  const Vec gab = metric_pointwise(g(), space(1), a, space(1), b);
  const Vec expect = g().phi0() * g().phi0() * carre(g().unit(1), g().unit(3), g());
  EXPECT_LE((gab - expect).cwiseAbs().maxCoeff(), 1e-10 * expect.cwiseAbs().maxCoeff());
}

TEST_F(Exterior, WedgeAntisymmetry) {
  const Vec a = unit_form(1, 2, 1);
  EXPECT_EQ(wedge(g(), space(1), a, space(1), a, space(2)).cwiseAbs().maxCoeff(), 0.0);
  const Vec u = random(space(1).size(), 3), v = random(space(1).size(), 4);
  const Vec uv = wedge(g(), space(1), u, space(1), v, space(2));
  const Vec vu = wedge(g(), space(1), v, space(1), u, space(2));
  EXPECT_LE((uv + vu).cwiseAbs().maxCoeff(), 1e-13 * uv.cwiseAbs().maxCoeff());
}

TEST_F(Exterior, WedgeDegreeChecked) {
  const Vec u = random(space(1).size(), 3);
  EXPECT_THROW(wedge(g(), space(1), u, space(1), u, space(1)), InvalidArgument);
}

TEST_F(Exterior, WeakDerivativeOfConstantIsZero) {
  EXPECT_LE(cx().weak(0).col(0).cwiseAbs().maxCoeff(), 1e-13 * cx().weak(0).cwiseAbs().maxCoeff());
}

TEST_F(Exterior, WeakDerivativeDegreeZeroEntries) {
  const Frame& f = space(1).frame;
  for (Index I = 0; I < f.size(); ++I)
    for (Index j = 0; j < g().size(); ++j)
      EXPECT_NEAR(cx().weak(0)(I, j), g().gamma()(f.wedge(I)[0], j, f.coeff(I)), 1e-14);
}

TEST_F(Exterior, DerivativeOfEigenfunctionIsFrameElement) {
  for (Index j = 1; j <= 4; ++j) {
    const Vec d = ext_derivative(cx(), 0, g().unit(j));
    const Vec diff = d - unit_form(1, 0, j - 1) / g().phi0();
    EXPECT_LE(norm(space(1), diff), 1e-8 * norm(space(1), d)) << j;
  }
}

TEST_F(Exterior, DerivativeSquaredVanishesOnResolvedFunctions) {
  Vec f = Vec::Zero(g().size());
  f.head(5) = random(5, 6);
  const Vec df = ext_derivative(cx(), 0, f);
  EXPECT_LE(norm(space(2), ext_derivative(cx(), 1, df)), 1e-6 * norm(space(1), df));
}

TEST_F(Exterior, Adjointness) {
  const Vec alpha = project_positive(space(1), random(space(1).size(), 7));
  const Vec beta = project_positive(space(2), random(space(2).size(), 8));
  const Vec h = random(g().size(), 9);
  const double lhs0 = inner(space(0), codifferential(cx(), 1, alpha), h);
  const double rhs0 = inner(space(1), alpha, ext_derivative(cx(), 0, h));
  EXPECT_NEAR(lhs0, rhs0, 1e-8 * norm(space(1), alpha) * h.norm());
  const double lhs1 = inner(space(1), codifferential(cx(), 2, beta), alpha);
  const double rhs1 = inner(space(2), beta, ext_derivative(cx(), 1, alpha));
  EXPECT_NEAR(lhs1, rhs1, 1e-8 * norm(space(2), beta) * norm(space(1), alpha));
}

TEST_F(Exterior, CodifferentialOfGradientIsLaplacian) {
  for (Index i = 1; i <= 4; ++i) {
    const Vec lap = codifferential(cx(), 1, ext_derivative(cx(), 0, g().unit(i)));
    Vec expect = Vec::Zero(g().size());
    expect(i) = g().eigenvalues()(i);
    EXPECT_LE((lap - expect).norm(), 1e-6 * g().eigenvalues()(i)) << i;
  }
  EXPECT_THROW(codifferential(cx(), 0, g().unit(1)), InvalidArgument);
}

TEST_F(Exterior, LeibnizOnFrameElements) {
  // d(phi_a dphi_b) = dphi_a ^ dphi_b for a, b within the differential range.
  const Vec alpha = unit_form(1, 2, 2);
  const Vec lhs = ext_derivative(cx(), 1, alpha);
  const Vec da = ext_derivative(cx(), 0, g().unit(2));
  const Vec db = ext_derivative(cx(), 0, g().unit(3));
  const Vec expect = wedge(g(), space(1), da, space(1), db, space(2));
  EXPECT_LE(norm(space(2), lhs - expect), 0.05 * norm(space(2), expect));
}

TEST_F(Exterior, SharpFlatRoundTrip) {
  const Vec v = project_positive(space(1), random(space(1).size(), 10));
  const Vec back = flat(space(1), sharp(g(), space(1), v));
  EXPECT_LE(norm(space(1), back - v), 1e-8 * norm(space(1), v));
  EXPECT_LE((restrict_to_frame(space(1), sharp(g(), space(1), v)) - space(1).gram * v).norm(), 1e-10 * v.norm());
}

TEST_F(Exterior, GradientActsByCarre) {
  const Vec f = g().unit(1) + 0.5 * g().unit(3);
  const VectorFieldMatrix X = sharp(g(), space(1), ext_derivative(cx(), 0, f));
  const Vec oracle = carre(f, f, g());
  EXPECT_LE((vf_apply(gradient_field(g(), f), f) - oracle).cwiseAbs().maxCoeff(), 1e-12 * oracle.cwiseAbs().maxCoeff());
  EXPECT_LE((vf_apply(X, f) - oracle).norm(), 1e-8 * oracle.norm());
}

TEST_F(Exterior, FieldsKillConstants) {
  const VectorFieldMatrix X = sharp(g(), space(1), random(space(1).size(), 11));
  EXPECT_LE(vf_apply(X, g().one()).cwiseAbs().maxCoeff(), 1e-10 * X.cwiseAbs().maxCoeff());
}

TEST_F(Exterior, VectorFieldActionIsLinear) {
  const VectorFieldMatrix X = gradient_field(g(), g().unit(2));
  const VectorFieldMatrix Y = gradient_field(g(), g().unit(5));
  const Vec f = random(g().size(), 12), h = random(g().size(), 13);
  EXPECT_LE((vf_apply(X, Vec(2.0 * f + h)) - 2.0 * vf_apply(X, f) - vf_apply(X, h)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((vf_apply(Mat(X + Y), f) - vf_apply(X, f) - vf_apply(Y, f)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST_F(Exterior, InteriorProductOfGradientOnDifferential) {
  const Vec f = g().unit(1) + 0.5 * g().unit(2);
  const VectorFieldMatrix X = gradient_field(g(), f);
  const Vec i = interior_product(g(), X, space(1), ext_derivative(cx(), 0, f), space(0));
  const Vec oracle = carre(f, f, g());
  EXPECT_LE((i - oracle).norm(), 0.05 * oracle.norm());
  EXPECT_THROW(interior_product(g(), X, space(0), g().unit(1), space(0)), InvalidArgument);
}

// Pointwise identities hold exactly once the algebra is complete (n0 = n): products are then
// exact and the discrete carre is positive semi-definite at every sample.
class CompleteAlgebra : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    KernelConfig kc;
    kc.n0 = 70;
    geometry_ = std::make_shared<const SpectralGeometry>(make_geometry(spectral_basis(gen_blob(70, 2, 1.0, 5), kc)));
    complex_ = new FormComplex(build_complex(geometry_, TruncationConfig{70, 70, 3}, 2));
  }
  static void TearDownTestSuite() {
    delete complex_;
    geometry_.reset();
  }
  const SpectralGeometry& g() const { return *geometry_; }
  const FormSpace& space(Index k) const { return complex_->space(k); }
  Vec random(Index n, std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> N;
    Vec v(n);
    for (auto& x : v) x = N(rng);
    return v;
  }

  static inline std::shared_ptr<const SpectralGeometry> geometry_;
  static inline FormComplex* complex_ = nullptr;
};

TEST_F(CompleteAlgebra, GradientOfFunctionIsNonNegative) {
  const Vec f = random(g().size(), 1);
  const VectorFieldMatrix X = sharp(g(), space(1), ext_derivative(*complex_, 0, f));
  const Vec gff = eval(vf_apply(X, f), g().basis);
  EXPECT_GE(gff.minCoeff(), -1e-6 * gff.cwiseAbs().maxCoeff());
}

TEST_F(CompleteAlgebra, MetricIsPositive) {
  const Vec a = random(space(1).size(), 2);
  const Vec gaa = eval(metric_pointwise(g(), space(1), a, space(1), a), g().basis);
  EXPECT_GE(gaa.minCoeff(), -1e-6 * gaa.cwiseAbs().maxCoeff());
}

TEST_F(CompleteAlgebra, CauchySchwarzPointwise) {
  const Vec a = random(space(1).size(), 15), b = random(space(1).size(), 16);
  const Vec gab = eval(metric_pointwise(g(), space(1), a, space(1), b), g().basis);
  const Vec gaa = eval(metric_pointwise(g(), space(1), a, space(1), a), g().basis);
  const Vec gbb = eval(metric_pointwise(g(), space(1), b, space(1), b), g().basis);
  const double scale = gaa.cwiseProduct(gbb).cwiseAbs().maxCoeff();
  EXPECT_LE((gab.cwiseProduct(gab) - gaa.cwiseProduct(gbb)).maxCoeff(), 1e-6 * scale);
}

TEST_F(CompleteAlgebra, InteriorProductTwiceVanishes) {
  const VectorFieldMatrix X = gradient_field(g(), random(g().size(), 3));
  const Vec beta = random(space(2).size(), 14);
  const Vec once = interior_product(g(), X, space(2), beta, space(1));
  const Vec twice = interior_product(g(), X, space(1), once, space(0));
  EXPECT_LE(twice.norm(), 1e-6 * norm(space(1), once));
}

TEST(ExteriorFlat, CoordinateGradientsAreOrthogonal) {
  const PointCloud pc = gen_square(1200, 1.0, 0.0, 3);
  const SpectralGeometry g = make_geometry(spectral_basis(pc, KernelConfig{}));
  const Vec x = expand(pc.points.col(0), g.basis), y = expand(pc.points.col(1), g.basis);
  const Vec xy = eval(vf_apply(gradient_field(g, x), y), g.basis);
  const Vec xx = eval(vf_apply(gradient_field(g, x), x), g.basis);
  double cross = 0.0, diag = 0.0;
  for (Index i = 0; i < pc.size(); ++i)
    if (pc.points.row(i).cwiseAbs().maxCoeff() < 0.6) {
      cross += xy(i) * xy(i);
      diag += xx(i) * xx(i);
    }
  EXPECT_LE(std::sqrt(cross / diag), 0.1);
}
