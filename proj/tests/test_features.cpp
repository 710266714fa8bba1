#include "diffgeo/features.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <memory>

using namespace diffgeo;

namespace {

struct Pipeline {
  std::shared_ptr<const SpectralGeometry> geometry;
  std::unique_ptr<FormComplex> complex;
  HodgeSpectrum spectrum;
  double radius = 1.0;

  FeatureInputs inputs() const { return {geometry.get(), complex.get(), &spectrum, radius}; }
};

Pipeline run(const PointCloud& pc, Index n0 = 20, bool forms = true) {
  KernelConfig kc;
  kc.n0 = n0;
  Pipeline p;
  p.geometry = std::make_shared<const SpectralGeometry>(make_geometry(spectral_basis(pc, kc)));
  p.radius = rms_radius(pc);
  if (forms) {
    p.complex = std::make_unique<FormComplex>(build_complex(p.geometry, {n0, 8, 4}, 1));
    p.spectrum = solve(assemble(*p.complex, 1), p.complex->space(1), 6);
  }
  return p;
}

PointCloud rigid(const PointCloud& pc, double angle, const Eigen::RowVectorXd& shift) {
  Mat R = Mat::Identity(pc.dim(), pc.dim());
  R(0, 0) = R(1, 1) = std::cos(angle);
  R(0, 1) = -std::sin(angle);
  R(1, 0) = std::sin(angle);
  PointCloud out = pc;
  out.points = (pc.points * R.transpose()).rowwise() + shift;
  return out;
}

}  // namespace

TEST(Features, EmptyConfigGivesEmptyVector) {
  const FeatureVector f = build_features(FeatureInputs{}, feature_preset("empty"));
  EXPECT_EQ(f.size(), 0);
  EXPECT_TRUE(f.names.empty());
}

TEST(Features, FullPresetHasFixedLengthAndNames) {
  const Pipeline a = run(gen_torus(400, 2.0, 1.0, 0.0, 1));
  const Pipeline b = run(gen_torus(400, 2.0, 1.0, 0.05, 2));
  const FeatureConfig cfg = feature_preset("full");
  const FeatureVector fa = build_features(a.inputs(), cfg), fb = build_features(b.inputs(), cfg);
  EXPECT_EQ(fa.names, fb.names);
  EXPECT_EQ(fa.size(), Index(fa.names.size()));
  // 10 + 3*10 + 5 + 2*5 + 5 + 9 + 1 + 4 + 1
  EXPECT_EQ(fa.size(), 75);
  EXPECT_NO_THROW(fa.at("biomarker"));
  EXPECT_THROW(fa.at("nonexistent"), InvalidArgument);
  for (const auto& name : fa.excluded) EXPECT_EQ(fa.at(name), 0.0);
  EXPECT_TRUE(fa.values.allFinite());
}

TEST(Features, RigidMotionInvariance) {
  const PointCloud pc = gen_annulus(600, 0.5, 1.0, 0.0, 4);
  const Pipeline a = run(pc, 20, false);
  const Pipeline b = run(rigid(pc, 0.9, Eigen::RowVector2d(3.0, -1.0)), 20, false);
  const FeatureConfig cfg = feature_preset("eigenvalues");
  const FeatureVector fa = build_features(a.inputs(), cfg), fb = build_features(b.inputs(), cfg);
  EXPECT_LE((fa.values - fb.values).cwiseAbs().maxCoeff(), 1e-8 * fa.values.cwiseAbs().maxCoeff());
}

TEST(Features, RadiusNormalisationRemovesScale) {
  const PointCloud pc = gen_circle(500, 1.0, 0.0, 1);
  PointCloud big = pc;
  big.points *= 3.0;
  const FeatureConfig cfg = feature_preset("eigenvalues");
  const FeatureVector fa = build_features(run(pc, 15, false).inputs(), cfg);
  const FeatureVector fb = build_features(run(big, 15, false).inputs(), cfg);
  EXPECT_LE((fa.values - fb.values).cwiseAbs().maxCoeff(), 1e-6 * fa.values.cwiseAbs().maxCoeff());
}

TEST(Features, MissingArtifactsAreNamed) {
  const Pipeline p = run(gen_circle(300, 1.0, 0.0, 1), 12, false);
  FeatureInputs in = p.inputs();
  in.complex = nullptr;
  in.one_forms = nullptr;
  try {
    build_features(in, feature_preset("full"));
    FAIL() << "expected a missing-artifact error";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("forms stage"), std::string::npos);
  }
  EXPECT_THROW(build_features(FeatureInputs{}, feature_preset("eigenvalues")), InvalidArgument);
  FeatureConfig too_many;
  too_many.function_eigenvalues = 12;
  EXPECT_THROW(build_features(in, too_many), InvalidArgument);
  EXPECT_THROW(feature_preset("everything"), InvalidArgument);
}

TEST(Features, DegenerateEntriesAreZeroed) {
  // The circle spectrum is doubly degenerate, so every Hessian entry is excluded.
  const Pipeline p = run(gen_circle(400, 1.0, 0.0, 1), 15);
  FeatureConfig cfg;
  cfg.hessian = 2;
  const FeatureVector f = build_features(p.inputs(), cfg);
  EXPECT_EQ(f.size(), 4);
  EXPECT_EQ(f.excluded.size(), 4u);
  EXPECT_EQ(f.values.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Features, PcaOfTwoSymmetricVectors) {
  FeatureVector a, b;
  a.names = b.names = {"u", "v", "w"};
  a.values = Eigen::Vector3d(1.0, 2.0, 5.0);
  b.values = Eigen::Vector3d(-1.0, -2.0, 5.0);
  const PcaResult r = pca_project({a, b}, 1);
  EXPECT_NEAR(r.scores(0, 0), -r.scores(1, 0), 1e-12);
  ASSERT_EQ(r.dropped.size(), 1u);
  EXPECT_EQ(r.dropped[0], 2);
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_NE(r.warnings[0].find("'w'"), std::string::npos);
  EXPECT_EQ(r.components(2, 0), 0.0);
  EXPECT_THROW(pca_project({a}, 1), InvalidArgument);
}

TEST(Features, PcaTracksShrinkingHole) {
  std::vector<FeatureVector> rows;
  std::vector<double> inner;
  for (int k = 0; k < 8; ++k) {
    const double r_in = 0.15 + 0.1 * k;
    inner.push_back(r_in);
    rows.push_back(build_features(run(gen_annulus(700, r_in, 1.0, 0.0, 20 + k), 15, false).inputs(), feature_preset("eigenvalues")));
  }
  const PcaResult r = pca_project(rows, 1);
  Index up = 0, down = 0;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    if (r.scores(Index(k), 0) > r.scores(Index(k) - 1, 0)) ++up;
    else ++down;
  }
  EXPECT_GE(double(std::max(up, down)) / double(rows.size() - 1), 0.9);
}
