#include "sdass/cli.hpp"

#include <array>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "sdass/eval.hpp"
#include "sdass/feature_io.hpp"
#include "sdass/manifest.hpp"
#include "sdass/nuisance.hpp"
#include "sdass/ply_io.hpp"
#include "sdass/registration.hpp"
#include "sdass/rng.hpp"

#ifndef SDASS_VERSION_STRING
#define SDASS_VERSION_STRING "0.0.0"
#endif

namespace sdass::cli {

namespace {

// ---------------------------------------------------------------- helpers

PlyContents load_ply_reporting(const std::filesystem::path& path) {
  PlyContents contents = load_ply(path);
  for (const std::string& w : contents.warnings) {
    std::cerr << "warning: " << path.string() << ": " << w << "\n";
  }
  return contents;
}

std::string load_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open: " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

RigidTransform load_transform(const std::filesystem::path& path) {
  std::istringstream in(load_text(path));
  std::array<double, 16> h{};
  for (double& v : h) {
    if (!(in >> v)) {
      throw ParseError("transform file must hold 16 numbers: " +
                       path.string());
    }
  }
  if (h[12] != 0.0 || h[13] != 0.0 || h[14] != 0.0 || h[15] != 1.0) {
    throw ParseError("transform file last row must be 0 0 0 1: " +
                     path.string());
  }
  Matrix3 r;
  r << h[0], h[1], h[2], h[4], h[5], h[6], h[8], h[9], h[10];
  const Vector3 t(h[3], h[7], h[11]);
  try {
    return RigidTransform(r, t);
  } catch (const DegenerateInputError& e) {
    throw ParseError(std::string("transform file is not rigid: ") + e.what());
  }
}

void save_transform(const RigidTransform& t,
                    const std::filesystem::path& path) {
  std::string out;
  const Matrix3& r = t.rotation();
  const Vector3& tr = t.translation();
  for (int row = 0; row < 3; ++row) {
    out += format_double(r(row, 0)) + " " + format_double(r(row, 1)) + " " +
           format_double(r(row, 2)) + " " + format_double(tr[row]) + "\n";
  }
  out += "0 0 0 1\n";
  write_file_atomic(path, out);
}

std::vector<Vector3> load_keypoints_text(const std::filesystem::path& path) {
  std::istringstream in(load_text(path));
  std::vector<Vector3> points;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    double x, y, z;
    if (!(ls >> x)) continue; // blank line
    if (!(ls >> y >> z)) {
      throw ParseError("keypoint file line " + std::to_string(line_no) +
                       " does not hold three coordinates");
    }
    points.emplace_back(x, y, z);
  }
  if (points.empty()) {
    throw ParseError("keypoint file holds no points: " + path.string());
  }
  return points;
}

std::vector<Vector3> sample_cloud_points(const PointCloud& cloud,
                                         std::size_t n, std::uint64_t seed) {
  const auto total = static_cast<std::size_t>(cloud.size());
  n = std::min(n, total);
  std::vector<std::uint32_t> perm(total);
  for (std::size_t i = 0; i < total; ++i) {
    perm[i] = static_cast<std::uint32_t>(i);
  }
  Rng rng(seed);
  std::vector<Vector3> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(total - i));
    std::swap(perm[i], perm[j]);
    out.push_back(cloud.point(perm[i]));
  }
  return out;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

class SummaryWriter {
public:
  void add(const std::string& key, const std::string& value) {
    rows_ += csv_escape(key) + "," + csv_escape(value) + "\n";
  }
  void add(const std::string& key, double value) {
    add(key, format_double(value));
  }
  void add(const std::string& key, std::size_t value) {
    add(key, std::to_string(value));
  }
  void write(const std::filesystem::path& path) const {
    write_file_atomic(path, "metric,value\n" + rows_);
  }

private:
  std::string rows_;
};

struct ManifestBuilder {
  RunManifest manifest;

  explicit ManifestBuilder(std::string command,
                           const std::vector<std::string>& argv) {
    manifest.tool_version = std::string("sdass ") + SDASS_VERSION_STRING;
    manifest.command = std::move(command);
    manifest.argv = argv;
  }
  void param(const std::string& key, const std::string& value) {
    manifest.params[key] = value;
  }
  void param(const std::string& key, double value) {
    manifest.params[key] = format_double(value);
  }
  void param(const std::string& key, std::uint64_t value) {
    manifest.params[key] = std::to_string(value);
  }
  void input(const std::filesystem::path& path) {
    manifest.input_hashes[path.string()] = fnv1a64_file(path);
  }
};

// Descriptor options shared by `describe` and `register`.
struct DescriptorFlags {
  std::string descriptor = "sdass";
  double radius_mr = 20.0;
  int n_lh = 5;
  int n_pr = 5;
  int n_ld = 15;
  double lma_radius_mr = 7.0;
  std::string lra = "sdass";
  int bins = 15;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--descriptor", descriptor, "Descriptor kind")
        ->check(CLI::IsMember({"sdass", "spin"}))
        ->capture_default_str();
    cmd->add_option("--radius-mr", radius_mr, "Support radius in mr")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--n-lh", n_lh, "Height subdivisions")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--n-pr", n_pr, "Projected-radial subdivisions")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--n-ld", n_ld, "Deviation-angle bins")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--lma-radius-mr", lma_radius_mr, "LMA radius in mr")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--lra", lra, "LRA strategy")
        ->check(CLI::IsMember({"sdass", "yang"}))
        ->capture_default_str();
    cmd->add_option("--bins", bins, "Spin-image bins per side")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  }

  LraVariant variant() const {
    return lra == "yang" ? LraVariant::YangSubsetRadius
                         : LraVariant::SdassFullRadius;
  }
  SdassParams sdass_params() const {
    SdassParams p;
    p.support_radius_mr = radius_mr;
    p.n_lh = n_lh;
    p.n_pr = n_pr;
    p.n_ld = n_ld;
    p.lma_radius_mr = lma_radius_mr;
    p.lra_variant = variant();
    return p;
  }
  SpinImageParams spin_params() const {
    SpinImageParams p;
    p.support_radius_mr = radius_mr;
    p.bins = bins;
    p.lra_variant = variant();
    return p;
  }
  void record(ManifestBuilder& mb) const {
    mb.param("descriptor", descriptor);
    mb.param("radius_mr", radius_mr);
    if (descriptor == "sdass") {
      mb.param("n_lh", static_cast<std::uint64_t>(n_lh));
      mb.param("n_pr", static_cast<std::uint64_t>(n_pr));
      mb.param("n_ld", static_cast<std::uint64_t>(n_ld));
      mb.param("lma_radius_mr", lma_radius_mr);
      mb.param("lra", lra);
    } else {
      mb.param("bins", static_cast<std::uint64_t>(bins));
    }
  }
};

FeatureFile describe_to_file(const PointCloud& cloud,
                             const std::vector<Vector3>& keypoints,
                             const DescriptorFlags& flags, double mr,
                             std::size_t* lma_skipped_total = nullptr) {
  const SpatialIndex index(cloud);
  std::vector<KeypointDescription> described;
  FeatureFile file;
  file.mr = mr;
  if (flags.descriptor == "sdass") {
    file.type = DescriptorType::Sdass;
    file.sdass_params = flags.sdass_params();
    described = describe_keypoints(index, keypoints, file.sdass_params, mr);
  } else {
    file.type = DescriptorType::SpinImage;
    file.spin_params = flags.spin_params();
    described = describe_spin_keypoints(index, keypoints, file.spin_params, mr);
  }
  for (const KeypointDescription& d : described) {
    if (d.feature) {
      file.keypoints.push_back(d.keypoint);
      file.features.push_back(*d.feature);
    } else {
      ++file.failed_keypoints;
    }
    if (lma_skipped_total != nullptr) *lma_skipped_total += d.lma_skipped;
  }
  return file;
}

// ---------------------------------------------------------------- commands

int cmd_mr(const std::vector<std::string>& argv, const std::string& input,
           const std::string& manifest_out) {
  ManifestBuilder mb("mr", argv);
  mb.input(input);
  const PlyContents ply = load_ply_reporting(input);
  const double mr = estimate_mesh_resolution(ply.cloud);
  std::cout << format_double(mr) << "\n";
  mb.param("mr", mr);
  save_manifest(mb.manifest, manifest_out);
  return 0;
}

struct PerturbArgs {
  std::string input;
  std::string output;
  std::string transform_out;
  std::string manifest_out;
  double noise_mr = 0.0;
  double decimate_rate = 1.0;
  std::uint64_t transform_seed = 0;
  std::uint64_t noise_seed = 0;
  double translation_mr = 10.0;
  std::string format = "binary";
};

int cmd_perturb(const std::vector<std::string>& argv, PerturbArgs& a) {
  if (a.transform_out.empty()) a.transform_out = a.output + ".transform";
  if (a.manifest_out.empty()) a.manifest_out = a.output + ".manifest";

  ManifestBuilder mb("perturb", argv);
  mb.input(a.input);

  const PlyContents ply = load_ply_reporting(a.input);
  const double mr = estimate_mesh_resolution(ply.cloud);

  // Pipeline order: rigid transform, then decimation, then noise. Noise and
  // translation scale against the input cloud's resolution.
  const RigidTransform forward =
      random_rigid_transform(a.transform_seed, a.translation_mr * mr);
  PointCloud out = apply_transform(ply.cloud, forward);
  if (a.decimate_rate != 1.0) out = decimate(out, a.decimate_rate, a.noise_seed);
  if (a.noise_mr != 0.0) {
    out = add_gaussian_noise(out, a.noise_mr, mr, a.noise_seed);
  }

  save_ply(out, a.output,
           a.format == "ascii" ? PlyFormat::Ascii
                               : PlyFormat::BinaryLittleEndian);
  // The saved transform maps the output cloud back onto the input cloud,
  // which is the ground-truth direction `match` and `axes` expect.
  save_transform(forward.inverse(), a.transform_out);

  const NuisanceSpec spec{a.noise_mr, a.decimate_rate, a.transform_seed,
                          a.noise_seed};
  for (const auto& [k, v] : spec.to_manifest_params()) mb.param(k, v);
  mb.param("translation_mr", a.translation_mr);
  mb.param("mr_reference", mr);
  mb.param("pipeline", std::string("transform,decimate,noise"));
  mb.param("transform_direction", std::string("output_to_input"));
  mb.param("format", a.format);
  save_manifest(mb.manifest, a.manifest_out);
  return 0;
}

struct DescribeArgs {
  std::string input;
  std::string output;
  std::string csv_out;
  std::string manifest_out;
  std::string keypoints_file;
  std::size_t sample_n = 1000;
  std::uint64_t seed = 0;
  double mr_override = 0.0;
  std::string mr_from;
  DescriptorFlags flags;
};

int cmd_describe(const std::vector<std::string>& argv, DescribeArgs& a) {
  if (a.manifest_out.empty()) a.manifest_out = a.output + ".manifest";

  ManifestBuilder mb("describe", argv);
  mb.input(a.input);

  const PlyContents ply = load_ply_reporting(a.input);

  double mr = 0.0;
  std::string mr_source;
  if (a.mr_override > 0.0) {
    mr = a.mr_override;
    mr_source = "explicit";
  } else if (!a.mr_from.empty()) {
    mb.input(a.mr_from);
    const PlyContents ref = load_ply_reporting(a.mr_from);
    mr = estimate_mesh_resolution(ref.cloud);
    mr_source = a.mr_from;
  } else {
    mr = estimate_mesh_resolution(ply.cloud);
    mr_source = "input";
  }

  std::vector<Vector3> keypoints;
  if (!a.keypoints_file.empty()) {
    mb.input(a.keypoints_file);
    keypoints = load_keypoints_text(a.keypoints_file);
    mb.param("keypoints", a.keypoints_file);
  } else {
    keypoints = sample_cloud_points(ply.cloud, a.sample_n, a.seed);
    mb.param("sample", static_cast<std::uint64_t>(a.sample_n));
    mb.param("seed", a.seed);
  }

  std::size_t lma_skipped = 0;
  const FeatureFile file =
      describe_to_file(ply.cloud, keypoints, a.flags, mr, &lma_skipped);
  save_features(file, a.output);
  if (!a.csv_out.empty()) export_features_csv(file, a.csv_out);

  a.flags.record(mb);
  mb.param("mr", mr);
  mb.param("mr_source", mr_source);
  mb.param("described", file.keypoints.size());
  mb.param("failed", static_cast<std::uint64_t>(file.failed_keypoints));
  mb.param("lma_skipped_total", static_cast<std::uint64_t>(lma_skipped));
  save_manifest(mb.manifest, a.manifest_out);
  return 0;
}

struct MatchArgs {
  std::string scene_features;
  std::string model_features;
  std::string transform_file;
  std::string out_dir;
  double geo_tol_mr = 2.0;
  std::size_t top_k = 200;
  int thresholds = 100;
  bool absolute = false;
};

int cmd_match(const std::vector<std::string>& argv, MatchArgs& a) {
  ManifestBuilder mb("match", argv);
  mb.input(a.scene_features);
  mb.input(a.model_features);
  mb.input(a.transform_file);

  const FeatureFile scene = load_features(a.scene_features);
  const FeatureFile model = load_features(a.model_features);
  const RigidTransform gt = load_transform(a.transform_file);
  if (model.mr <= 0.0) {
    throw FeatureFileError("model feature file lacks a positive mr");
  }
  const double geo_tol = a.geo_tol_mr * model.mr;

  CorrespondenceSet corrs = match_features(scene.features, model.features);
  corrs = label_matches(std::move(corrs), scene.keypoints, model.keypoints, gt,
                        geo_tol);
  const RpcCurve curve = rpc_curve(corrs, a.thresholds, !a.absolute);
  const PccResult p = pcc(corrs, a.top_k);

  std::filesystem::create_directories(a.out_dir);
  const std::filesystem::path dir(a.out_dir);

  std::string rpc_csv = "threshold,precision,recall\n";
  for (const auto& s : curve.samples) {
    rpc_csv += format_double(s.threshold) + "," + format_double(s.precision) +
               "," + format_double(s.recall) + "\n";
  }
  write_file_atomic(dir / "rpc.csv", rpc_csv);

  std::size_t correct = 0;
  for (const Match& m : corrs.matches) {
    if (m.correct) ++correct;
  }
  SummaryWriter summary;
  summary.add("auc_pr", curve.auc_pr);
  summary.add("pcc", p.percentage);
  summary.add("pcc_top_k", a.top_k);
  summary.add("pcc_used", p.used);
  summary.add("pcc_shortfall", std::string(p.shortfall ? "1" : "0"));
  summary.add("n_matches", corrs.matches.size());
  summary.add("n_correct", correct);
  summary.add("geo_tolerance", geo_tol);
  summary.add("geo_tolerance_mr", a.geo_tol_mr);
  summary.add("mr", model.mr);
  summary.add("threshold_mode", std::string(a.absolute ? "absolute" : "ratio"));
  summary.add("scene_failed_keypoints",
              static_cast<std::size_t>(scene.failed_keypoints));
  summary.add("model_failed_keypoints",
              static_cast<std::size_t>(model.failed_keypoints));
  summary.write(dir / "summary.csv");

  mb.param("geo_tol_mr", a.geo_tol_mr);
  mb.param("top_k", static_cast<std::uint64_t>(a.top_k));
  mb.param("thresholds", static_cast<std::uint64_t>(a.thresholds));
  mb.param("threshold_mode", std::string(a.absolute ? "absolute" : "ratio"));
  mb.param("auc_pr", curve.auc_pr);
  mb.param("pcc", p.percentage);
  save_manifest(mb.manifest, dir / "manifest.txt");
  return 0;
}

struct AxesArgs {
  std::string scene;
  std::string model;
  std::string transform_file;
  std::string out_dir;
  std::string axis = "lra-sdass";
  double radius_mr = 20.0;
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  double pair_tol_mr = 2.0;
};

int cmd_axes(const std::vector<std::string>& argv, AxesArgs& a) {
  ManifestBuilder mb("axes", argv);
  mb.input(a.scene);
  mb.input(a.model);
  mb.input(a.transform_file);

  const PlyContents scene = load_ply_reporting(a.scene);
  const PlyContents model = load_ply_reporting(a.model);
  const RigidTransform gt = load_transform(a.transform_file);
  const double mr = estimate_mesh_resolution(model.cloud);

  AxisKind kind;
  if (a.axis == "lra-sdass") kind = AxisKind::LraSdass;
  else if (a.axis == "lra-yang") kind = AxisKind::LraYang;
  else if (a.axis == "lma") kind = AxisKind::Lma;
  else if (a.axis == "rn") kind = AxisKind::RnNormal;
  else throw DegenerateInputError("unknown axis kind: " + a.axis);

  const RepeatabilityResult rep = axis_repeatability_study(
      scene.cloud, model.cloud, gt, kind, a.radius_mr, mr, a.n, a.seed,
      a.pair_tol_mr * mr);

  std::filesystem::create_directories(a.out_dir);
  const std::filesystem::path dir(a.out_dir);
  SummaryWriter summary;
  summary.add("repeatability_5deg", rep.repeatability);
  summary.add("evaluated", rep.evaluated);
  summary.add("excluded", rep.excluded);
  summary.add("requested_pairs", a.n);
  summary.add("axis", a.axis);
  summary.add("radius_mr", a.radius_mr);
  summary.add("mr", mr);
  summary.add("mr_source", std::string("model"));
  summary.add("pair_tolerance_mr", a.pair_tol_mr);
  summary.add("seed", static_cast<std::size_t>(a.seed));
  summary.write(dir / "summary.csv");

  mb.param("axis", a.axis);
  mb.param("radius_mr", a.radius_mr);
  mb.param("n", static_cast<std::uint64_t>(a.n));
  mb.param("seed", a.seed);
  mb.param("pair_tol_mr", a.pair_tol_mr);
  mb.param("mr", mr);
  mb.param("repeatability_5deg", rep.repeatability);
  save_manifest(mb.manifest, dir / "manifest.txt");
  return 0;
}

struct RegisterArgs {
  std::string scene;
  std::string model;
  std::string out_dir;
  std::size_t sample_n = 1000;
  std::uint64_t seed = 0;
  int ransac_iters = 1000;
  double inlier_eps_mr = 2.0;
  DescriptorFlags flags;
};

int cmd_register(const std::vector<std::string>& argv, RegisterArgs& a) {
  ManifestBuilder mb("register", argv);
  mb.input(a.scene);
  mb.input(a.model);

  const PlyContents scene = load_ply_reporting(a.scene);
  const PlyContents model = load_ply_reporting(a.model);
  const double mr = estimate_mesh_resolution(model.cloud);

  const std::vector<Vector3> scene_kps =
      sample_cloud_points(scene.cloud, a.sample_n, a.seed);
  const std::vector<Vector3> model_kps =
      sample_cloud_points(model.cloud, a.sample_n, a.seed + 1);

  const FeatureFile scene_feat =
      describe_to_file(scene.cloud, scene_kps, a.flags, mr);
  const FeatureFile model_feat =
      describe_to_file(model.cloud, model_kps, a.flags, mr);

  const CorrespondenceSet corrs =
      match_features(scene_feat.features, model_feat.features);
  std::vector<Vector3> corr_scene;
  std::vector<Vector3> corr_model;
  corr_scene.reserve(corrs.matches.size());
  corr_model.reserve(corrs.matches.size());
  for (const Match& m : corrs.matches) {
    corr_scene.push_back(scene_feat.keypoints[m.scene_index]);
    corr_model.push_back(model_feat.keypoints[m.model_index]);
  }

  const RegistrationResult reg =
      ransac_register(corr_scene, corr_model, a.inlier_eps_mr * mr,
                      a.ransac_iters, a.seed);

  std::filesystem::create_directories(a.out_dir);
  const std::filesystem::path dir(a.out_dir);
  save_transform(reg.transform, dir / "out.transform");

  SummaryWriter summary;
  summary.add("n_correspondences", corrs.matches.size());
  summary.add("inliers", reg.inliers.size());
  summary.add("rms_residual", reg.rms_residual);
  summary.add("raw_rms_residual", reg.raw_rms_residual);
  summary.add("iterations", static_cast<std::size_t>(reg.iterations_used));
  summary.add("inlier_eps_mr", a.inlier_eps_mr);
  summary.add("mr", mr);
  summary.add("mr_source", std::string("model"));
  summary.add("scene_failed_keypoints",
              static_cast<std::size_t>(scene_feat.failed_keypoints));
  summary.add("model_failed_keypoints",
              static_cast<std::size_t>(model_feat.failed_keypoints));
  summary.write(dir / "summary.csv");

  a.flags.record(mb);
  mb.param("sample", static_cast<std::uint64_t>(a.sample_n));
  mb.param("seed", a.seed);
  mb.param("ransac_iters", static_cast<std::uint64_t>(a.ransac_iters));
  mb.param("inlier_eps_mr", a.inlier_eps_mr);
  mb.param("mr", mr);
  save_manifest(mb.manifest, dir / "manifest.txt");
  return 0;
}

int dispatch(const std::vector<std::string>& args);

int cmd_replay(const std::string& manifest_path) {
  const RunManifest m = load_manifest(manifest_path);
  verify_manifest_inputs(m);
  return dispatch(m.argv);
}

// ---------------------------------------------------------------- driver

int dispatch(const std::vector<std::string>& args) {
  CLI::App app{"SDASS local-surface descriptor toolkit"};
  app.set_version_flag("--version", std::string("sdass ") +
                                        SDASS_VERSION_STRING);
  app.require_subcommand(0, 1);

  std::string replay_manifest;
  app.add_option("--manifest", replay_manifest,
                 "Replay a previously recorded run manifest");

  // mr
  auto* mr_cmd = app.add_subcommand("mr", "Print the mesh resolution");
  std::string mr_input;
  std::string mr_manifest = "mr.manifest";
  mr_cmd->add_option("input", mr_input, "Input PLY")->required();
  mr_cmd->add_option("--manifest-out", mr_manifest, "Manifest path")
      ->capture_default_str();

  // perturb
  auto* perturb_cmd = app.add_subcommand(
      "perturb", "Apply a seeded rigid transform, decimation and noise");
  PerturbArgs perturb;
  perturb_cmd->add_option("input", perturb.input, "Input PLY")->required();
  perturb_cmd->add_option("-o,--output", perturb.output, "Output PLY")
      ->required();
  perturb_cmd->add_option("--noise-mr", perturb.noise_mr,
                          "Gaussian sigma in mr")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  perturb_cmd->add_option("--decimate", perturb.decimate_rate,
                          "Keep fraction in (0,1]")
      ->check(CLI::Range(1e-12, 1.0))
      ->capture_default_str();
  perturb_cmd->add_option("--transform-seed", perturb.transform_seed,
                          "Rigid transform seed")
      ->capture_default_str();
  perturb_cmd->add_option("--noise-seed", perturb.noise_seed,
                          "Noise and decimation seed")
      ->capture_default_str();
  perturb_cmd->add_option("--translation-mr", perturb.translation_mr,
                          "Translation cube half-extent in mr")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  perturb_cmd->add_option("--transform-out", perturb.transform_out,
                          "Ground-truth transform path");
  perturb_cmd->add_option("--manifest-out", perturb.manifest_out,
                          "Manifest path");
  perturb_cmd
      ->add_option("--format", perturb.format, "PLY payload encoding")
      ->check(CLI::IsMember({"ascii", "binary"}))
      ->capture_default_str();

  // describe
  auto* describe_cmd =
      app.add_subcommand("describe", "Compute descriptors at keypoints");
  DescribeArgs describe;
  describe_cmd->add_option("input", describe.input, "Input PLY")->required();
  describe_cmd->add_option("-o,--output", describe.output, "Output .feat")
      ->required();
  auto* kp_opt = describe_cmd->add_option(
      "--keypoints", describe.keypoints_file, "Keypoint xyz text file");
  auto* sample_opt = describe_cmd->add_option(
      "--sample", describe.sample_n, "Sample this many cloud points");
  sample_opt->check(CLI::PositiveNumber)->capture_default_str();
  kp_opt->excludes(sample_opt);
  describe_cmd->add_option("--seed", describe.seed, "Sampling seed")
      ->capture_default_str();
  auto* mr_opt = describe_cmd->add_option("--mr", describe.mr_override,
                                          "Mesh resolution override");
  mr_opt->check(CLI::PositiveNumber);
  auto* mr_from_opt = describe_cmd->add_option(
      "--mr-from", describe.mr_from, "Take mr from this PLY (the model)");
  mr_opt->excludes(mr_from_opt);
  describe_cmd->add_option("--csv", describe.csv_out, "Also export CSV");
  describe_cmd->add_option("--manifest-out", describe.manifest_out,
                           "Manifest path");
  describe.flags.add_to(describe_cmd);

  // match
  auto* match_cmd = app.add_subcommand(
      "match", "Match scene features to model features and score them");
  MatchArgs match;
  match_cmd->add_option("scene", match.scene_features, "Scene .feat")
      ->required();
  match_cmd->add_option("model", match.model_features, "Model .feat")
      ->required();
  match_cmd
      ->add_option("transform", match.transform_file,
                   "Ground-truth transform (scene to model)")
      ->required();
  match_cmd->add_option("--out-dir", match.out_dir, "Output directory")
      ->required();
  match_cmd->add_option("--geo-tol-mr", match.geo_tol_mr,
                        "Correctness tolerance in mr")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  match_cmd->add_option("--top-k", match.top_k, "PCC correspondence count")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  match_cmd->add_option("--thresholds", match.thresholds,
                        "RPC sweep resolution")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  match_cmd->add_flag("--absolute", match.absolute,
                      "Sweep absolute distances instead of the NNDR ratio");

  // axes
  auto* axes_cmd = app.add_subcommand(
      "axes", "Axis repeatability between a scene and a model");
  AxesArgs axes;
  axes_cmd->add_option("scene", axes.scene, "Scene PLY")->required();
  axes_cmd->add_option("model", axes.model, "Model PLY")->required();
  axes_cmd
      ->add_option("transform", axes.transform_file,
                   "Ground-truth transform (scene to model)")
      ->required();
  axes_cmd->add_option("--out-dir", axes.out_dir, "Output directory")
      ->required();
  axes_cmd->add_option("--axis", axes.axis, "Axis construction")
      ->check(CLI::IsMember({"lra-sdass", "lra-yang", "lma", "rn"}))
      ->capture_default_str();
  axes_cmd->add_option("--radius-mr", axes.radius_mr, "Axis radius in mr")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  axes_cmd->add_option("-n,--pairs", axes.n, "Keypoint pairs to sample")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  axes_cmd->add_option("--seed", axes.seed, "Sampling seed")
      ->capture_default_str();
  axes_cmd->add_option("--pair-tol-mr", axes.pair_tol_mr,
                       "Pair residual tolerance in mr")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();

  // register
  auto* register_cmd = app.add_subcommand(
      "register", "Feature-based rigid registration of two clouds");
  RegisterArgs reg;
  register_cmd->add_option("scene", reg.scene, "Scene PLY")->required();
  register_cmd->add_option("model", reg.model, "Model PLY")->required();
  register_cmd->add_option("--out-dir", reg.out_dir, "Output directory")
      ->required();
  register_cmd->add_option("--sample", reg.sample_n,
                           "Keypoints per cloud")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  register_cmd->add_option("--seed", reg.seed, "Sampling and RANSAC seed")
      ->capture_default_str();
  register_cmd->add_option("--ransac-iters", reg.ransac_iters,
                           "RANSAC hypothesis count")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  register_cmd->add_option("--inlier-eps-mr", reg.inlier_eps_mr,
                           "Inlier threshold in mr")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  reg.flags.add_to(register_cmd);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) { // --help / --version
      return app.exit(e);
    }
    std::cerr << "error: usage: " << e.what() << "\n";
    return 2;
  }

  if (!replay_manifest.empty()) {
    if (app.get_subcommands().size() > 0) {
      std::cerr << "error: usage: --manifest cannot combine with a"
                   " subcommand\n";
      return 2;
    }
    return cmd_replay(replay_manifest);
  }

  if (mr_cmd->parsed()) return cmd_mr(args, mr_input, mr_manifest);
  if (perturb_cmd->parsed()) return cmd_perturb(args, perturb);
  if (describe_cmd->parsed()) return cmd_describe(args, describe);
  if (match_cmd->parsed()) return cmd_match(args, match);
  if (axes_cmd->parsed()) return cmd_axes(args, axes);
  if (register_cmd->parsed()) return cmd_register(args, reg);

  std::cerr << app.help();
  return 2;
}

} // namespace

int run(const std::vector<std::string>& args) {
  try {
    return dispatch(args);
  } catch (const ParseError& e) {
    std::cerr << "error: parse: " << e.what() << "\n";
    return 3;
  } catch (const RegistrationFailureError& e) {
    std::cerr << "error: failure: " << e.what() << "\n";
    return 4;
  } catch (const Error& e) {
    std::cerr << "error: degenerate: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
}

} // namespace sdass::cli
