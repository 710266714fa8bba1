#include "diffgeo/io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace diffgeo;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("diffgeo-io-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Io, GenerateShapes) {
  const GeneratedCloud t = generate(Json::parse(R"({"shape":"torus","n":300,"R":2,"r":1,"seed":7})"));
  EXPECT_EQ(t.cloud.size(), 300);
  EXPECT_EQ(t.cloud.dim(), 3);
  EXPECT_EQ(t.intersections.rows(), 0);
  const GeneratedCloud c = generate(Json::parse(R"({"shape":"two_circles","n":100})"));
  EXPECT_EQ(c.cloud.size(), 200);
  EXPECT_EQ(c.intersections.rows(), 2);
  for (const auto& name : shape_names()) {
    Json spec{{"shape", name}, {"n", 60}};
    EXPECT_NO_THROW(generate(spec)) << name;
  }
}

TEST(Io, GenerateRejectsBadSpecs) {
  EXPECT_THROW(generate(Json::parse(R"({"shape":"hexagon","n":10})")), ParseError);
  EXPECT_THROW(generate(Json::parse(R"({"shape":"circle","n":10,"radiuss":2})")), ParseError);
  EXPECT_THROW(generate(Json::parse(R"({"shape":"circle"})")), ParseError);
  EXPECT_THROW(generate(Json::parse(R"([1,2])")), ParseError);
  EXPECT_THROW(generate(Json::parse(R"({"shape":"circle","n":0})")), InvalidArgument);
}

TEST(Io, JsonArgumentFromTextOrFile) {
  EXPECT_EQ(read_json_argument(R"({"a":1})").at("a"), 1);
  const auto dir = scratch("arg");
  std::ofstream(dir / "c.json") << R"({"b":2})";
  EXPECT_EQ(read_json_argument((dir / "c.json").string()).at("b"), 2);
  EXPECT_THROW(read_json_argument("{not json"), ParseError);
  EXPECT_THROW(read_json_argument((dir / "missing.json").string()), ParseError);
}

TEST(Io, ArrayRoundTrips) {
  const Vec v = Vec::LinSpaced(5, -1.0, 1.0 / 3.0);
  EXPECT_EQ(vec_from_json(Json::parse(to_json(v).dump())), v);
  Mat m(2, 3);
  m << 1.0, 2.0, 3.0, 4.0, 5.0, 6.0 + 1e-15;
  EXPECT_EQ(mat_from_json(Json::parse(to_json(m).dump())), m);
  EXPECT_THROW(mat_from_json(Json::parse("[[1,2],[3]]")), ParseError);
}

TEST(Io, BasisRoundTrip) {
  KernelConfig kc;
  kc.n0 = 8;
  const SpectralBasis b = spectral_basis(gen_circle(120, 1.0, 0.0, 1), kc);
  const SpectralBasis back = basis_from_json(Json::parse(to_json(b).dump()));
  EXPECT_EQ(back.eigenvalues, b.eigenvalues);
  EXPECT_EQ(back.eigenfunctions, b.eigenfunctions);
  EXPECT_EQ(back.density, b.density);
}

TEST(Io, FeatureConfigParsing) {
  const FeatureConfig c = feature_config_from_json(Json::parse(R"({"preset":"biomarker","dirichlet":4,"scale":"none"})"));
  EXPECT_TRUE(c.biomarker);
  EXPECT_EQ(c.dirichlet, 4);
  EXPECT_EQ(c.scale, ScaleNormalisation::none);
  const FeatureConfig back = feature_config_from_json(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
  EXPECT_THROW(feature_config_from_json(Json::parse(R"({"cup":2})")), ParseError);
  EXPECT_THROW(feature_config_from_json(Json::parse(R"({"scale":"huge"})")), ParseError);
  EXPECT_THROW(feature_config_from_json(Json::parse(R"({"hessian":-1})")), ParseError);
  EXPECT_THROW(feature_config_from_json(Json::parse(R"({"preset":"nope"})")), InvalidArgument);
}

TEST(Io, FeatureCsv) {
  FeatureVector a;
  a.names = {"x", "y"};
  a.values = Eigen::Vector2d(1.5, -2.0);
  std::ostringstream out;
  write_features_csv(out, {a, a});
  EXPECT_EQ(out.str(), "x,y\n1.5,-2\n1.5,-2\n");
  FeatureVector b = a;
  b.names = {"x", "z"};
  EXPECT_THROW(write_features_csv(out, {a, b}), InvalidArgument);
}

TEST(Io, CacheHitsAndStaleEntries) {
  const auto dir = scratch("cache");
  const StageCache cache(dir);
  const Json key{{"n", 3}}, other{{"n", 4}};
  EXPECT_FALSE(cache.load("basis", key));
  cache.store("basis", key, Json{{"value", 42}});
  const auto hit = cache.load("basis", key);
  ASSERT_TRUE(hit);
  EXPECT_EQ(hit->at("value"), 42);
  EXPECT_FALSE(cache.load("basis", other));

  // An entry whose recorded key no longer matches is reported and ignored.
  std::filesystem::copy_file(cache.path_for("basis", key), cache.path_for("basis", other));
  std::string notice;
  EXPECT_FALSE(cache.load("basis", other, [&](const std::string& m) { notice = m; }));
  EXPECT_NE(notice.find("does not match"), std::string::npos);

  std::ofstream(cache.path_for("forms", key)) << "{broken";
  notice.clear();
  EXPECT_FALSE(cache.load("forms", key, [&](const std::string& m) { notice = m; }));
  EXPECT_NE(notice.find("unreadable"), std::string::npos);

  const StageCache off(dir, false);
  EXPECT_FALSE(off.load("basis", key));
}

TEST(Io, AtomicWriteLeavesNoTemporaries) {
  const auto dir = scratch("atomic");
  write_atomic(dir / "sub" / "out.txt", "first");
  write_atomic(dir / "sub" / "out.txt", "second");
  std::ifstream in(dir / "sub" / "out.txt");
  std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(body, "second");
  Index files = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir / "sub")) files += e.is_regular_file();
  EXPECT_EQ(files, 1);
}

TEST(Io, FingerprintTracksContents) {
  PointCloud a = gen_circle(50, 1.0, 0.0, 1), b = a;
  EXPECT_EQ(cloud_fingerprint(a), cloud_fingerprint(b));
  b.points(3, 1) += 1e-12;
  EXPECT_NE(cloud_fingerprint(a), cloud_fingerprint(b));
}
