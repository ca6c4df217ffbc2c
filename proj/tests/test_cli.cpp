#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sdass/ply_io.hpp"
#include "support/synthetic.hpp"

using namespace sdass;
using namespace sdass::testing;

namespace {

namespace fs = std::filesystem;

fs::path work_dir() {
  const fs::path dir = fs::temp_directory_path() / "sdass_cli_tests";
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SDASS_CLI_PATH) + " " + args +
                          " >/dev/null 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::string csv_value(const fs::path& summary, const std::string& key) {
  std::istringstream in(slurp(summary));
  std::string line;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    if (comma != std::string::npos && line.substr(0, comma) == key) {
      return line.substr(comma + 1);
    }
  }
  return {};
}

} // namespace

TEST_CASE("cli end to end") {
  const fs::path dir = work_dir();
  const fs::path model_ply = dir / "model.ply";
  save_ply(make_torus(40, 25), model_ply);

  SUBCASE("mr prints and writes a manifest") {
    CHECK(run_cli("mr " + model_ply.string() + " --manifest-out " +
                  (dir / "mr.manifest").string()) == 0);
    CHECK(fs::exists(dir / "mr.manifest"));
  }

  SUBCASE("perturb with identity settings reproduces the cloud") {
    const fs::path out = dir / "identity.ply";
    CHECK(run_cli("perturb " + model_ply.string() + " -o " + out.string() +
                  " --noise-mr 0 --decimate 1 --translation-mr 0" +
                  " --transform-seed 424242") == 0);
    // The transform is still a random rotation; undo it via the recorded
    // ground truth and compare against the input.
    const PlyContents moved = load_ply(out);
    const PlyContents original = load_ply(model_ply);
    CHECK(moved.cloud.size() == original.cloud.size());
    // Round trip through the written transform: perturb stores output->input.
    std::istringstream tf(slurp(out.string() + ".transform"));
    Matrix3 r;
    Vector3 t;
    double h[16];
    for (double& v : h) tf >> v;
    r << h[0], h[1], h[2], h[4], h[5], h[6], h[8], h[9], h[10];
    t << h[3], h[7], h[11];
    const RigidTransform back(r, t);
    const PointCloud restored = apply_transform(moved.cloud, back);
    CHECK((restored.points() - original.cloud.points()).cwiseAbs().maxCoeff() <
          1e-9);
  }

  SUBCASE("describe then match a cloud against itself gives AUC 1") {
    const fs::path feat = dir / "self.feat";
    CHECK(run_cli("describe " + model_ply.string() + " -o " + feat.string() +
                  " --sample 120 --seed 3") == 0);

    // Identity ground truth.
    const fs::path gt = dir / "identity.transform";
    std::ofstream(gt) << "1 0 0 0\n0 1 0 0\n0 0 1 0\n0 0 0 1\n";

    const fs::path out_dir = dir / "self_match";
    CHECK(run_cli("match " + feat.string() + " " + feat.string() + " " +
                  gt.string() + " --out-dir " + out_dir.string()) == 0);
    CHECK(csv_value(out_dir / "summary.csv", "auc_pr") == "1");
    CHECK(csv_value(out_dir / "summary.csv", "pcc") == "100");
  }

  SUBCASE("describe flag defaults equal the library parameter defaults") {
    const fs::path feat = dir / "defaults.feat";
    const fs::path manifest = dir / "defaults.manifest";
    CHECK(run_cli("describe " + model_ply.string() + " -o " + feat.string() +
                  " --sample 10 --seed 0 --manifest-out " +
                  manifest.string()) == 0);
    const std::string m = slurp(manifest);
    CHECK(m.find("param.radius_mr=20\n") != std::string::npos);
    CHECK(m.find("param.n_lh=5\n") != std::string::npos);
    CHECK(m.find("param.n_pr=5\n") != std::string::npos);
    CHECK(m.find("param.n_ld=15\n") != std::string::npos);
    CHECK(m.find("param.lma_radius_mr=7\n") != std::string::npos);
    CHECK(m.find("param.lra=sdass\n") != std::string::npos);
  }

  SUBCASE("identical describe invocations write identical feature files") {
    const fs::path a = dir / "det_a.feat";
    const fs::path b = dir / "det_b.feat";
    CHECK(run_cli("describe " + model_ply.string() + " -o " + a.string() +
                  " --sample 50 --seed 9") == 0);
    CHECK(run_cli("describe " + model_ply.string() + " -o " + b.string() +
                  " --sample 50 --seed 9") == 0);
    CHECK(slurp(a) == slurp(b));
  }

  SUBCASE("replaying a manifest reproduces the CSVs byte for byte") {
    const fs::path scene_ply = dir / "scene.ply";
    CHECK(run_cli("perturb " + model_ply.string() + " -o " +
                  scene_ply.string() +
                  " --noise-mr 0.1 --transform-seed 7 --noise-seed 8") == 0);

    const fs::path scene_feat = dir / "scene.feat";
    const fs::path model_feat = dir / "model.feat";
    CHECK(run_cli("describe " + scene_ply.string() + " -o " +
                  scene_feat.string() + " --sample 80 --seed 1 --mr-from " +
                  model_ply.string()) == 0);
    CHECK(run_cli("describe " + model_ply.string() + " -o " +
                  model_feat.string() + " --sample 80 --seed 2") == 0);

    const fs::path out_dir = dir / "match_run";
    CHECK(run_cli("match " + scene_feat.string() + " " + model_feat.string() +
                  " " + scene_ply.string() + ".transform --out-dir " +
                  out_dir.string()) == 0);

    const std::string rpc_before = slurp(out_dir / "rpc.csv");
    const std::string summary_before = slurp(out_dir / "summary.csv");

    CHECK(run_cli("--manifest " + (out_dir / "manifest.txt").string()) == 0);
    CHECK(slurp(out_dir / "rpc.csv") == rpc_before);
    CHECK(slurp(out_dir / "summary.csv") == summary_before);
  }

  SUBCASE("exit codes distinguish failure kinds") {
    // Unknown flag or invalid parameter value: usage error.
    CHECK(run_cli("mr --no-such-flag") == 2);
    CHECK(run_cli("describe " + model_ply.string() + " -o /tmp/x.feat" +
                  " --radius-mr -5") == 2);
    CHECK(run_cli("perturb " + model_ply.string() + " -o /tmp/x.ply" +
                  " --decimate 1.5") == 2);
    // Unreadable / malformed PLY: parse error.
    const fs::path bad = dir / "bad.ply";
    std::ofstream(bad) << "not a ply at all";
    CHECK(run_cli("mr " + bad.string() + " --manifest-out " +
                  (dir / "bad.manifest").string()) == 3);
    // Degenerate geometry: a single-point cloud has no resolution.
    const fs::path single = dir / "single.ply";
    std::ofstream(single) << "ply\nformat ascii 1.0\nelement vertex 1\n"
                             "property float x\nproperty float y\n"
                             "property float z\nend_header\n0 0 0\n";
    CHECK(run_cli("mr " + single.string() + " --manifest-out " +
                  (dir / "single.manifest").string()) == 4);
  }

  SUBCASE("register recovers the perturbation transform") {
    const fs::path scene_ply = dir / "reg_scene.ply";
    CHECK(run_cli("perturb " + model_ply.string() + " -o " +
                  scene_ply.string() +
                  " --noise-mr 0.05 --transform-seed 11 --noise-seed 12") ==
          0);
    const fs::path out_dir = dir / "register_run";
    CHECK(run_cli("register " + scene_ply.string() + " " +
                  model_ply.string() + " --out-dir " + out_dir.string() +
                  " --sample 150 --seed 4") == 0);
    CHECK(fs::exists(out_dir / "out.transform"));
    // The recovered transform should invert the perturbation: compare with
    // the recorded scene->model ground truth.
    std::istringstream got_in(slurp(out_dir / "out.transform"));
    std::istringstream gt_in(slurp(scene_ply.string() + ".transform"));
    double got[16], gt[16];
    for (double& v : got) got_in >> v;
    for (double& v : gt) gt_in >> v;
    for (int i : {0, 1, 2, 4, 5, 6, 8, 9, 10}) {
      CHECK(std::abs(got[i] - gt[i]) < 0.05);
    }
  }
}

TEST_CASE("cli cleanup") {
  std::error_code ec;
  fs::remove_all(work_dir(), ec);
  CHECK_FALSE(static_cast<bool>(ec));
}
