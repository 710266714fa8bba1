// diffgeo command-line front end: synth, basis, forms, hodge, singularity, features, bench, curvature.

#include "diffgeo/bench.hpp"
#include "diffgeo/exterior.hpp"
#include "diffgeo/features.hpp"
#include "diffgeo/geometry.hpp"
#include "diffgeo/hodge.hpp"
#include "diffgeo/io.hpp"
#include "diffgeo/second_order.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace diffgeo;

namespace {

struct Options {
  std::vector<std::string> inputs;
  std::vector<std::string> shape_specs;
  std::optional<double> bandwidth;
  double alpha = 1.0;
  std::optional<Index> knn;
  Index n0 = 35;
  Index n1 = 10;
  Index n2 = 4;
  double tau = 1e-8;
  std::optional<double> epsilon;
  Index degree = 1;
  Index num_eigs = 10;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::vector<Index> sizes{2000, 4000, 8000};
  Index reps = 1;
  std::string config;
};

void add_input_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--input", o.inputs, "CSV point cloud (repeatable for features)");
  cmd->add_option("--shape-spec", o.shape_specs, "generator spec as inline JSON or a JSON file (repeatable for features)");
  cmd->add_option("--seed", o.seed, "override the generator seed");
}

void add_kernel_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--bandwidth", o.bandwidth, "kernel bandwidth t (default: selected from the data)")->check(CLI::PositiveNumber);
  cmd->add_option("--alpha", o.alpha, "density renormalisation exponent")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--knn", o.knn, "k-nearest-neighbour kernel sparsification")->check(CLI::PositiveNumber);
  cmd->add_option("--n0", o.n0, "retained eigenfunctions")->check(CLI::PositiveNumber);
}

void add_frame_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--n1", o.n1, "coefficient functions in the form frames")->check(CLI::PositiveNumber);
  cmd->add_option("--n2", o.n2, "differentials in the form frames")->check(CLI::NonNegativeNumber);
  cmd->add_option("--tau", o.tau, "relative rank threshold for Gram pseudo-inverses")->check(CLI::PositiveNumber);
}

void add_out_flag(CLI::App* cmd, Options& o) { cmd->add_option("--out", o.out, "output directory"); }

KernelConfig kernel_config(const Options& o) {
  KernelConfig k;
  k.bandwidth = o.bandwidth;
  k.alpha = o.alpha;
  k.knn = o.knn;
  k.n0 = o.n0;
  return k;
}

TruncationConfig truncation(const Options& o) {
  TruncationConfig t{o.n0, o.n1, o.n2};
  validate(t);
  return t;
}

std::vector<GeneratedCloud> load_clouds(const Options& o, bool allow_many) {
  std::vector<GeneratedCloud> out;
  for (const auto& path : o.inputs) out.push_back({load_csv(path), Mat()});
  for (const auto& text : o.shape_specs) {
    Json spec = read_json_argument(text);
    if (o.seed) spec["seed"] = *o.seed;
    out.push_back(generate(spec));
  }
  if (out.empty()) throw InvalidArgument("no input: pass --input <csv> or --shape-spec <json>");
  if (!allow_many && out.size() > 1) throw InvalidArgument("this command takes exactly one --input or --shape-spec");
  return out;
}

void write_json(const fs::path& path, const Json& j) { write_atomic(path, j.dump(2) + "\n"); }

void notice(const std::string& msg) { std::cerr << "notice: " << msg << "\n"; }

/// Basis for a cloud, through the stage cache.
std::shared_ptr<const SpectralGeometry> load_geometry(const PointCloud& pc, const KernelConfig& kc) {
  const Json key{{"cloud", cloud_fingerprint(pc)}, {"kernel", to_json(kc)}};
  const StageCache cache;
  SpectralBasis basis;
  if (auto hit = cache.load("basis", key, notice)) {
    basis = basis_from_json(*hit);
  } else {
    basis = spectral_basis(pc, kc);
    try {
      cache.store("basis", key, to_json(basis));
    } catch (const std::exception& e) {
      notice(std::string("cache write skipped: ") + e.what());
    }
  }
  return std::make_shared<const SpectralGeometry>(make_geometry(std::move(basis)));
}

Json vec_json(const Vec& v) { return to_json(v); }

// Ambient components of a vector field at every point: X applied to each coordinate function.
Mat ambient_field(const SpectralGeometry& g, const PointCloud& pc, const VectorFieldMatrix& X) {
  Mat out(pc.size(), pc.dim());
  for (Index a = 0; a < pc.dim(); ++a) {
    const Vec centred = pc.points.col(a).array() - pc.points.col(a).mean();
    out.col(a) = eval(vf_apply(X, expand(centred, g.basis)), g.basis);
  }
  return out;
}

// ---------------------------------------------------------------------------

int cmd_synth(const Options& o) {
  const GeneratedCloud gc = load_clouds(o, false).front();
  const fs::path dir(o.out);
  fs::create_directories(dir);
  std::ostringstream csv;
  write_csv(csv, gc.cloud);
  write_atomic(dir / "cloud.csv", csv.str());
  Json meta{{"schema_version", schema_version}, {"n", gc.cloud.size()}, {"d", gc.cloud.dim()}};
  meta["label"] = gc.cloud.label;
  meta["seed"] = gc.cloud.seed ? Json(*gc.cloud.seed) : Json(nullptr);
  meta["intersections"] = Json::array();
  for (Index i = 0; i < gc.intersections.rows(); ++i) meta["intersections"].push_back(vec_json(gc.intersections.row(i).transpose()));
  write_json(dir / "cloud.json", meta);
  return 0;
}

int cmd_basis(const Options& o) {
  const PointCloud pc = load_clouds(o, false).front().cloud;
  const auto g = load_geometry(pc, kernel_config(o));
  const fs::path dir(o.out);
  write_json(dir / "basis.json", Json{{"schema_version", schema_version},
                                      {"n", g->basis.points()},
                                      {"n0", g->size()},
                                      {"bandwidth", g->basis.bandwidth},
                                      {"eigenvalues", vec_json(g->eigenvalues())}});
  write_json(dir / "basis_bundle.json", to_json(g->basis));
  return 0;
}

int cmd_forms(const Options& o) {
  const PointCloud pc = load_clouds(o, false).front().cloud;
  const TruncationConfig tc = truncation(o);
  const auto g = load_geometry(pc, kernel_config(o));
  const Index top = std::min<Index>(2, tc.n2);
  const FormComplex cx = build_complex(g, tc, std::max<Index>(top, 1), o.tau);
  const FormSpace& ones = cx.space(1);
  Vec energy(g->size() - 1);
  for (Index i = 1; i < g->size(); ++i) {
    const Vec dphi = ext_derivative(cx, 0, g->unit(i));
    energy(i - 1) = inner(ones, dphi, dphi);
  }
  Json out{{"schema_version", schema_version}, {"n0", tc.n0}, {"n1", tc.n1}, {"n2", tc.n2}, {"tau", o.tau}};
  out["dirichlet_energies"] = vec_json(energy);
  out["eigenvalues"] = vec_json(g->eigenvalues().tail(g->size() - 1));
  Json ranks = Json::array();
  for (const auto& s : cx.spaces) ranks.push_back(Json{{"degree", s.degree()}, {"size", s.size()}, {"rank", s.rank()}});
  out["spaces"] = ranks;
  const Index block = std::min<Index>(6, ones.size());
  out["gram1_block"] = to_json(Mat(ones.gram.topLeftCorner(block, block)));
  Json wedges = Json::array();
  if (top >= 2) {
    const FormSpace two = cup_space(*g, tc, o.tau);
    for (Index i = 1; i <= tc.n2; ++i)
      for (Index j = i + 1; j <= tc.n2; ++j) {
        const Vec di = ext_derivative(cx, 0, g->unit(i));
        const Vec dj = ext_derivative(cx, 0, g->unit(j));
        wedges.push_back(Json{{"i", i}, {"j", j}, {"norm", cup_norm(*g, ones, di, dj, two)}});
      }
  }
  out["wedge_norms"] = wedges;
  write_json(fs::path(o.out) / "forms.json", out);
  return 0;
}

int cmd_hodge(const Options& o) {
  const PointCloud pc = load_clouds(o, false).front().cloud;
  const TruncationConfig tc = truncation(o);
  if (o.degree < 0 || o.degree > tc.n2) throw InvalidArgument("--degree must lie in [0, n2]");
  const auto g = load_geometry(pc, kernel_config(o));
  const FormComplex cx = build_complex(g, tc, o.degree, o.tau);
  const HodgeOperator op = assemble(cx, o.degree, o.epsilon);
  const HodgeSpectrum spec = solve(op, cx.space(o.degree), o.num_eigs);
  if (spec.truncated) notice("only " + std::to_string(spec.size()) + " eigenpairs available");
  const Index betti_k = o.degree == 0 ? betti0(spec.eigenvalues) : betti(spec);
  Json out{{"schema_version", schema_version}, {"degree", o.degree}, {"epsilon", spec.epsilon},
           {"eigenvalues", vec_json(spec.eigenvalues)}, {"betti", betti_k}};
  Json cups = Json::array();
  if (o.degree == 1 && tc.n2 >= 2) {
    const FormSpace two = cup_space(*g, tc, o.tau);
    for (Index a = 0; a < betti_k; ++a) {
      Json row = Json::array();
      for (Index b = 0; b < betti_k; ++b)
        row.push_back(a == b ? 0.0 : cup_norm(*g, cx.space(1), spec.eigenforms.col(a), spec.eigenforms.col(b), two));
      cups.push_back(row);
    }
  }
  out["cup_norms"] = cups;
  const fs::path dir(o.out);
  write_json(dir / "hodge.json", out);
  if (o.degree == 1) {
    std::ostringstream csv;
    csv.precision(17);
    for (Index a = 0; a < pc.dim(); ++a) csv << (a ? "," : "") << "x" << a;
    std::vector<Mat> fields;
    for (Index r = 0; r < spec.size(); ++r) {
      fields.push_back(ambient_field(*g, pc, sharp(*g, cx.space(1), spec.eigenforms.col(r))));
      for (Index a = 0; a < pc.dim(); ++a) csv << ",form" << r << "_v" << a;
    }
    csv << "\n";
    for (Index s = 0; s < pc.size(); ++s) {
      for (Index a = 0; a < pc.dim(); ++a) csv << (a ? "," : "") << pc.points(s, a);
      for (const auto& f : fields)
        for (Index a = 0; a < pc.dim(); ++a) csv << "," << f(s, a);
      csv << "\n";
    }
    write_atomic(dir / "hodge_fields.csv", csv.str());
  }
  return 0;
}

int cmd_singularity(const Options& o) {
  const PointCloud pc = load_clouds(o, false).front().cloud;
  const auto g = load_geometry(pc, kernel_config(o));
  const PointMetricField field = coordinate_metric(pc, *g);
  const Vec score = singularity_score(field);
  const TangentField tangent = tangent_field(field);
  std::ostringstream csv;
  csv.precision(17);
  const Index d = pc.dim();
  for (Index a = 0; a < d; ++a) csv << "x" << a << ",";
  for (Index a = 0; a < d; ++a) csv << "eig" << a << ",";
  csv << "score";
  for (Index a = 0; a < d; ++a) csv << ",tangent" << a;
  csv << ",degenerate\n";
  for (Index s = 0; s < pc.size(); ++s) {
    for (Index a = 0; a < d; ++a) csv << pc.points(s, a) << ",";
    for (Index a = 0; a < d; ++a) csv << field.eigenvalues(s, a) << ",";
    csv << score(s);
    for (Index a = 0; a < d; ++a) csv << "," << tangent.directions(s, a);
    csv << "," << (tangent.degenerate[std::size_t(s)] ? 1 : 0) << "\n";
  }
  const fs::path dir(o.out);
  write_atomic(dir / "singularity.csv", csv.str());
  write_json(dir / "singularity.json", Json{{"schema_version", schema_version},
                                            {"n", pc.size()},
                                            {"bandwidth", g->basis.bandwidth},
                                            {"min_score", score.minCoeff()},
                                            {"max_clip", field.max_clip}});
  return 0;
}

int cmd_features(const Options& o) {
  const FeatureConfig fc = o.config.empty() ? feature_preset("eigenvalues") : feature_config_from_json(read_json_argument(o.config));
  const TruncationConfig tc = truncation(o);
  std::vector<FeatureVector> rows;
  for (const auto& gc : load_clouds(o, true)) {
    const auto g = load_geometry(gc.cloud, kernel_config(o));
    FeatureInputs in;
    in.geometry = g.get();
    in.rms_radius = rms_radius(gc.cloud);
    std::optional<FormComplex> cx;
    std::optional<HodgeSpectrum> spec;
    if (fc.needs_complex()) {
      cx = build_complex(g, tc, fc.cup_forms > 0 ? std::min<Index>(2, tc.n2) : 1, o.tau);
      in.complex = &*cx;
    }
    if (fc.needs_forms()) {
      const Index count = std::max({o.num_eigs, fc.form_eigenvalues, fc.inner_products, fc.cup_forms});
      spec = solve(assemble(*cx, 1, o.epsilon), cx->space(1), count);
      in.one_forms = &*spec;
    }
    rows.push_back(build_features(in, fc));
  }
  const fs::path dir(o.out);
  Json j{{"schema_version", schema_version}, {"config", to_json(fc)}, {"rows", Json::array()}};
  for (const auto& r : rows) j["rows"].push_back(to_json(r));
  write_json(dir / "features.json", j);
  if (!rows.empty() && rows.front().size() > 0) {
    std::ostringstream csv;
    write_features_csv(csv, rows);
    write_atomic(dir / "features.csv", csv.str());
  }
  return 0;
}

int cmd_bench(const Options& o) {
  BenchConfig bc;
  bc.sizes = o.sizes;
  bc.reps = o.reps;
  bc.kernel = kernel_config(o);
  bc.truncation = truncation(o);
  bc.num_eigs = o.num_eigs;
  if (o.seed) bc.seed = *o.seed;
  const auto rows = run_benchmark(bc);
  std::ostringstream csv;
  csv << "n,reps,kernel_mean,kernel_sd,eigensolve_mean,eigensolve_sd,tensors_mean,tensors_sd,hodge_mean,hodge_sd\n";
  Json j{{"schema_version", schema_version}, {"n0", bc.truncation.n0}, {"n1", bc.truncation.n1}, {"n2", bc.truncation.n2},
         {"reps", bc.reps}, {"rows", Json::array()}};
  for (const auto& r : rows) {
    csv << r.n << "," << r.reps.size() << "," << r.mean.kernel << "," << r.stddev.kernel << "," << r.mean.eigensolve << ","
        << r.stddev.eigensolve << "," << r.mean.tensors << "," << r.stddev.tensors << "," << r.mean.hodge << ","
        << r.stddev.hodge << "\n";
    j["rows"].push_back(Json{{"n", r.n},
                             {"mean", {{"kernel", r.mean.kernel}, {"eigensolve", r.mean.eigensolve}, {"tensors", r.mean.tensors}, {"hodge", r.mean.hodge}}},
                             {"stddev", {{"kernel", r.stddev.kernel}, {"eigensolve", r.stddev.eigensolve}, {"tensors", r.stddev.tensors}, {"hodge", r.stddev.hodge}}}});
  }
  if (rows.size() >= 2) j["eigensolve_loglog_slope"] = loglog_slope(rows, &StageTimes::eigensolve);
  const fs::path dir(o.out);
  write_atomic(dir / "bench.csv", csv.str());
  write_json(dir / "bench.json", j);
  return 0;
}

int cmd_curvature(const Options& o) {
  const PointCloud pc = load_clouds(o, false).front().cloud;
  const TruncationConfig tc = truncation(o);
  const auto g = load_geometry(pc, kernel_config(o));
  const FormComplex cx = build_complex(g, tc, 1, o.tau);
  const Connection con(*g, cx.space(1));
  const Index count = std::min<Index>(3, tc.n2);
  std::vector<FieldPair> fields;
  for (Index i = 1; i <= count; ++i) fields.push_back(con.gradient(g->unit(i)));
  Json torsion = Json::array(), compat = Json::array(), sectional = Json::array();
  Index positive = 0, total = 0;
  for (Index a = 0; a < count; ++a)
    for (Index b = a + 1; b < count; ++b) {
      const auto& x = fields[std::size_t(a)];
      const auto& y = fields[std::size_t(b)];
      torsion.push_back(Json{{"i", a + 1}, {"j", b + 1}, {"residual", con.torsion_residual(x, y)}});
      compat.push_back(Json{{"i", a + 1}, {"j", b + 1}, {"residual", con.compatibility_residual(x, y, y)}});
      const double k = con.sectional_proxy(x, y);
      sectional.push_back(Json{{"i", a + 1}, {"j", b + 1}, {"value", k}});
      positive += k > 0.0;
      ++total;
    }
  write_json(fs::path(o.out) / "curvature.json", Json{{"schema_version", schema_version},
                                                      {"torsion", torsion},
                                                      {"compatibility", compat},
                                                      {"sectional", sectional},
                                                      {"positive_pairs", positive},
                                                      {"pairs", total}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"diffgeo: diffusion geometry of point clouds"};
  app.require_subcommand(1);
  Options o;

  auto* synth = app.add_subcommand("synth", "sample a synthetic cloud to CSV");
  add_input_flags(synth, o);
  add_out_flag(synth, o);

  auto* basis = app.add_subcommand("basis", "diffusion-maps eigenbasis");
  add_input_flags(basis, o);
  add_kernel_flags(basis, o);
  add_out_flag(basis, o);

  auto* forms = app.add_subcommand("forms", "form frames, Dirichlet energies, Gram blocks, wedge norms");
  auto* hodge = app.add_subcommand("hodge", "Hodge Laplacian spectrum, Betti estimate, cup norms");
  auto* sing = app.add_subcommand("singularity", "pointwise metric spectra, singularity scores and tangents");
  auto* feats = app.add_subcommand("features", "geometric feature vectors");
  auto* bench = app.add_subcommand("bench", "stage timings on torus samples");
  auto* curv = app.add_subcommand("curvature", "connection residuals and curvature signs");
  for (auto* cmd : {forms, hodge, sing, feats, curv}) {
    add_input_flags(cmd, o);
    add_kernel_flags(cmd, o);
    add_out_flag(cmd, o);
  }
  for (auto* cmd : {forms, hodge, feats, curv}) add_frame_flags(cmd, o);
  add_kernel_flags(bench, o);
  add_frame_flags(bench, o);
  add_out_flag(bench, o);
  bench->add_option("--seed", o.seed, "torus sampling seed");
  bench->add_option("--sizes", o.sizes, "ascending point counts")->delimiter(',');
  bench->add_option("--reps", o.reps, "repetitions per size")->check(CLI::PositiveNumber);
  bench->add_option("--num-eigs", o.num_eigs, "Hodge eigenpairs")->check(CLI::PositiveNumber);
  hodge->add_option("--degree", o.degree, "form degree")->check(CLI::NonNegativeNumber);
  hodge->add_option("--epsilon", o.epsilon, "Galerkin regulariser (default: scaled to the Sobolev Gram)")->check(CLI::NonNegativeNumber);
  hodge->add_option("--num-eigs", o.num_eigs, "eigenpairs to report")->check(CLI::PositiveNumber);
  feats->add_option("--epsilon", o.epsilon, "Galerkin regulariser")->check(CLI::NonNegativeNumber);
  feats->add_option("--num-eigs", o.num_eigs, "1-form eigenpairs to compute")->check(CLI::PositiveNumber);
  feats->add_option("--config", o.config, "feature config as inline JSON or a JSON file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    fs::create_directories(o.out);
    if (*synth) return cmd_synth(o);
    if (*basis) return cmd_basis(o);
    if (*forms) return cmd_forms(o);
    if (*hodge) return cmd_hodge(o);
    if (*sing) return cmd_singularity(o);
    if (*feats) return cmd_features(o);
    if (*bench) return cmd_bench(o);
    if (*curv) return cmd_curvature(o);
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 2;
  } catch (const DegenerateSpaceError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 2;
  } catch (const ResourceError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
