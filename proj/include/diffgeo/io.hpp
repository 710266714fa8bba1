#pragma once
// JSON interchange: generator specs, spectral basis bundles, feature configs and vectors, plus a
// content-keyed on-disk cache with atomic writes.

#include "diffgeo/core.hpp"
#include "diffgeo/features.hpp"
#include "diffgeo/kernel.hpp"
#include "diffgeo/point_cloud.hpp"

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace diffgeo {

using Json = nlohmann::json;

inline constexpr int schema_version = 1;

namespace detail {

inline void reject_unknown_keys(const Json& j, const std::set<std::string>& allowed, const std::string& what) {
  if (!j.is_object()) throw ParseError(what + " must be a JSON object");
  for (const auto& item : j.items())
    if (!allowed.count(item.key())) throw ParseError(what + ": unknown key '" + item.key() + "'");
}

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ParseError(std::string("key '") + key + "': " + e.what());
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Generator specs

/// A point cloud plus, for intersecting configurations, the ground-truth singular points.
struct GeneratedCloud {
  PointCloud cloud;
  Mat intersections;
};

inline const std::set<std::string>& shape_names() {
  static const std::set<std::string> names{"circle", "torus", "sphere_with_circles", "annulus", "square", "sphere",
                                           "blob", "two_circles", "planar_crossing", "spatial_crossing"};
  return names;
}

/// Samples a cloud from a spec such as {"shape":"torus","n":3000,"R":2,"r":1,"noise":0.0,"seed":7}.
inline GeneratedCloud generate(const Json& spec) {
  if (!spec.is_object() || !spec.contains("shape")) throw ParseError("shape spec needs a \"shape\" field");
  const std::string shape = spec.at("shape").get<std::string>();
  std::set<std::string> keys{"shape", "n", "noise", "seed"};
  auto allow = [&](std::initializer_list<const char*> extra) {
    for (const char* k : extra) keys.insert(k);
    detail::reject_unknown_keys(spec, keys, "shape spec '" + shape + "'");
  };
  if (!spec.contains("n")) throw ParseError("shape spec needs \"n\"");
  const Index n = spec.at("n").get<Index>();
  const double noise = detail::get_or(spec, "noise", 0.0);
  const auto seed = detail::get_or<std::uint64_t>(spec, "seed", 0);
  GeneratedCloud out;
  if (shape == "circle") {
    allow({"radius", "random_angles"});
    out.cloud = gen_circle(n, detail::get_or(spec, "radius", 1.0), noise, seed, detail::get_or(spec, "random_angles", false));
  } else if (shape == "torus") {
    allow({"R", "r"});
    out.cloud = gen_torus(n, detail::get_or(spec, "R", 2.0), detail::get_or(spec, "r", 1.0), noise, seed);
  } else if (shape == "sphere_with_circles") {
    allow({});
    out.cloud = gen_sphere_with_circles(n, noise, seed);
  } else if (shape == "annulus") {
    allow({"r_in", "r_out"});
    out.cloud = gen_annulus(n, detail::get_or(spec, "r_in", 0.5), detail::get_or(spec, "r_out", 1.0), noise, seed);
  } else if (shape == "square") {
    allow({"half_width"});
    out.cloud = gen_square(n, detail::get_or(spec, "half_width", 1.0), noise, seed);
  } else if (shape == "sphere") {
    allow({"radius"});
    out.cloud = gen_sphere(n, detail::get_or(spec, "radius", 1.0), noise, seed);
  } else if (shape == "blob") {
    allow({"dim"});
    out.cloud = gen_blob(n, detail::get_or<Index>(spec, "dim", 2), noise > 0.0 ? noise : 1.0, seed);
  } else if (shape == "two_circles" || shape == "planar_crossing" || shape == "spatial_crossing") {
    allow({});
    const auto config = shape == "two_circles"       ? two_circles_config(n)
                        : shape == "planar_crossing" ? planar_crossing_config(n)
                                                     : spatial_crossing_config(n);
    IntersectingSample s = gen_intersecting(config, noise, seed);
    out.cloud = std::move(s.cloud);
    out.intersections = std::move(s.intersections);
  } else {
    throw ParseError("unknown shape '" + shape + "'");
  }
  return out;
}

/// Accepts inline JSON or a path to a JSON file.
inline Json read_json_argument(const std::string& text) {
  std::string body = text;
  if (!text.empty() && text.front() != '{' && text.front() != '[') {
    std::ifstream in(text);
    if (!in) throw ParseError("cannot open JSON file '" + text + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    body = ss.str();
  }
  try {
    return Json::parse(body);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Arrays

inline Json to_json(const Vec& v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); }

inline Vec vec_from_json(const Json& j) {
  try {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Vec>(v.data(), Index(v.size()));
  } catch (const Json::exception& e) {
    throw ParseError(std::string("vector: ") + e.what());
  }
}

/// Row-major flattening.
inline Json to_json(const Mat& m) {
  std::vector<double> flat;
  flat.reserve(std::size_t(m.size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) flat.push_back(m(i, j));
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", flat}};
}

inline Mat mat_from_json(const Json& j) {
  Index r = 0, c = 0;
  std::vector<double> flat;
  try {
    r = j.at("rows").get<Index>();
    c = j.at("cols").get<Index>();
    flat = j.at("data").get<std::vector<double>>();
  } catch (const Json::exception& e) {
    throw ParseError(std::string("matrix: ") + e.what());
  }
  if (Index(flat.size()) != r * c) throw ParseError("matrix data length does not match rows * cols");
  Mat m(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index k = 0; k < c; ++k) m(i, k) = flat[std::size_t(i * c + k)];
  return m;
}

// ---------------------------------------------------------------------------
// Spectral basis bundle

inline Json to_json(const SpectralBasis& b) {
  return Json{{"schema_version", schema_version},
              {"n", b.points()},
              {"n0", b.size()},
              {"bandwidth", b.bandwidth},
              {"eigenvalues", to_json(b.eigenvalues)},
              {"density", to_json(b.density)},
              {"eigenfunctions", to_json(b.eigenfunctions)}};
}

inline SpectralBasis basis_from_json(const Json& j) {
  detail::reject_unknown_keys(j, {"schema_version", "n", "n0", "bandwidth", "eigenvalues", "density", "eigenfunctions"},
                              "basis bundle");
  if (j.value("schema_version", 0) != schema_version) throw ParseError("basis bundle has an unsupported schema_version");
  SpectralBasis b;
  b.bandwidth = j.at("bandwidth").get<double>();
  b.eigenvalues = vec_from_json(j.at("eigenvalues"));
  b.density = vec_from_json(j.at("density"));
  b.eigenfunctions = mat_from_json(j.at("eigenfunctions"));
  if (b.eigenfunctions.rows() != j.at("n").get<Index>() || b.eigenfunctions.cols() != j.at("n0").get<Index>() ||
      b.eigenvalues.size() != b.eigenfunctions.cols() || b.density.size() != b.eigenfunctions.rows())
    throw ParseError("basis bundle dimensions are inconsistent");
  return b;
}

// ---------------------------------------------------------------------------
// Features

inline FeatureConfig feature_config_from_json(const Json& j) {
  detail::reject_unknown_keys(j, {"preset", "function_eigenvalues", "function_heat_times", "form_eigenvalues",
                                  "form_heat_times", "dirichlet", "inner_products", "cup_forms", "hessian",
                                  "biomarker", "scale", "degenerate_gap"},
                              "feature config");
  FeatureConfig c = j.contains("preset") ? feature_preset(j.at("preset").get<std::string>()) : FeatureConfig{};
  c.function_eigenvalues = detail::get_or(j, "function_eigenvalues", c.function_eigenvalues);
  c.function_heat_times = detail::get_or(j, "function_heat_times", c.function_heat_times);
  c.form_eigenvalues = detail::get_or(j, "form_eigenvalues", c.form_eigenvalues);
  c.form_heat_times = detail::get_or(j, "form_heat_times", c.form_heat_times);
  c.dirichlet = detail::get_or(j, "dirichlet", c.dirichlet);
  c.inner_products = detail::get_or(j, "inner_products", c.inner_products);
  c.cup_forms = detail::get_or(j, "cup_forms", c.cup_forms);
  c.hessian = detail::get_or(j, "hessian", c.hessian);
  c.biomarker = detail::get_or(j, "biomarker", c.biomarker);
  c.degenerate_gap = detail::get_or(j, "degenerate_gap", c.degenerate_gap);
  if (j.contains("scale")) {
    const std::string s = j.at("scale").get<std::string>();
    if (s == "none")
      c.scale = ScaleNormalisation::none;
    else if (s == "radius")
      c.scale = ScaleNormalisation::radius;
    else
      throw ParseError("feature config: scale must be \"none\" or \"radius\"");
  }
  for (Index v : {c.function_eigenvalues, c.form_eigenvalues, c.dirichlet, c.inner_products, c.cup_forms, c.hessian})
    if (v < 0) throw ParseError("feature config: counts must be non-negative");
  return c;
}

inline Json to_json(const FeatureConfig& c) {
  return Json{{"function_eigenvalues", c.function_eigenvalues},
              {"function_heat_times", c.function_heat_times},
              {"form_eigenvalues", c.form_eigenvalues},
              {"form_heat_times", c.form_heat_times},
              {"dirichlet", c.dirichlet},
              {"inner_products", c.inner_products},
              {"cup_forms", c.cup_forms},
              {"hessian", c.hessian},
              {"biomarker", c.biomarker},
              {"scale", c.scale == ScaleNormalisation::none ? "none" : "radius"},
              {"degenerate_gap", c.degenerate_gap}};
}

inline Json to_json(const FeatureVector& f) {
  return Json{{"schema_version", schema_version},
              {"names", f.names},
              {"values", to_json(f.values)},
              {"excluded", f.excluded}};
}

/// Header row of names followed by one row per vector.
inline void write_features_csv(std::ostream& out, const std::vector<FeatureVector>& rows) {
  detail::require(!rows.empty(), "write_features_csv: no rows");
  const auto& names = rows.front().names;
  for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
  out << "\n";
  out.precision(17);
  for (const auto& r : rows) {
    detail::require(r.names == names, "write_features_csv: rows were built with different configs");
    for (Index i = 0; i < r.size(); ++i) out << (i ? "," : "") << r.values(i);
    out << "\n";
  }
}

// ---------------------------------------------------------------------------
// Files and cache

/// Writes through a temporary file in the same directory and renames it into place.
inline void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp" + std::to_string(std::hash<std::string>{}(path.string() + contents) % 1000000007u);
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << contents;
    if (!out) throw std::runtime_error("write to '" + tmp.string() + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

inline std::filesystem::path cache_directory() {
  if (const char* env = std::getenv("DIFFGEO_CACHE_DIR"); env && *env) return env;
  return std::filesystem::temp_directory_path() / "diffgeo-cache";
}

/// Stage cache keyed by the hash of a canonical JSON key. Entries store their key, so a hash
/// collision or a hand-edited entry is detected and recomputed.
class StageCache {
 public:
  explicit StageCache(std::filesystem::path dir = cache_directory(), bool enabled = true)
      : dir_(std::move(dir)), enabled_(enabled) {}

  std::filesystem::path path_for(const std::string& stage, const Json& key) const {
    const std::size_t h = std::hash<std::string>{}(stage + "\n" + key.dump());
    std::ostringstream name;
    name << stage << "-" << std::hex << h << ".json";
    return dir_ / name.str();
  }

  /// The cached payload, or nullopt. `notice` receives a message when an entry is stale.
  std::optional<Json> load(const std::string& stage, const Json& key,
                           const std::function<void(const std::string&)>& notice = {}) const {
    if (!enabled_) return std::nullopt;
    const auto p = path_for(stage, key);
    std::ifstream in(p);
    if (!in) return std::nullopt;
    try {
      Json entry = Json::parse(in);
      if (entry.at("key") != key) {
        if (notice) notice("cache entry " + p.string() + " does not match the config; recomputing");
        return std::nullopt;
      }
      return entry.at("payload");
    } catch (const std::exception&) {
      if (notice) notice("cache entry " + p.string() + " is unreadable; recomputing");
      return std::nullopt;
    }
  }

  void store(const std::string& stage, const Json& key, const Json& payload) const {
    if (!enabled_) return;
    write_atomic(path_for(stage, key), Json{{"schema_version", schema_version}, {"key", key}, {"payload", payload}}.dump());
  }

 private:
  std::filesystem::path dir_;
  bool enabled_;
};

/// Canonical description of a cloud's contents for cache keys.
inline Json cloud_fingerprint(const PointCloud& pc) {
  const std::string bytes(reinterpret_cast<const char*>(pc.points.data()), std::size_t(pc.points.size()) * sizeof(double));
  return Json{{"n", pc.size()}, {"d", pc.dim()}, {"hash", std::hash<std::string>{}(bytes)}};
}

inline Json to_json(const KernelConfig& k) {
  Json j{{"alpha", k.alpha}, {"n0", k.n0}, {"bandwidth_neighbours", k.bandwidth_neighbours}};
  j["bandwidth"] = k.bandwidth ? Json(*k.bandwidth) : Json(nullptr);
  j["knn"] = k.knn ? Json(*k.knn) : Json(nullptr);
  return j;
}

}  // namespace diffgeo
