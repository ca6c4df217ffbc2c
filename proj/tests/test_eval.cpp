#include <doctest.h>

#include <cmath>

#include "sdass/eval.hpp"
#include "sdass/nuisance.hpp"
#include "sdass/rng.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace sdass;
using namespace sdass::testing;

namespace {

std::vector<FeatureVector> random_features(int n, int dim, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<FeatureVector> out(n);
  for (auto& f : out) {
    f.values.resize(dim);
    for (int k = 0; k < dim; ++k) f.values[k] = rng.uniform();
  }
  return out;
}

CorrespondenceSet labeled_set(const std::vector<double>& distances,
                              const std::vector<double>& seconds,
                              const std::vector<bool>& correct) {
  CorrespondenceSet corrs;
  for (std::size_t i = 0; i < distances.size(); ++i) {
    Match m;
    m.scene_index = static_cast<std::int32_t>(i);
    m.model_index = static_cast<std::int32_t>(i);
    m.distance = distances[i];
    m.second_distance = seconds[i];
    m.correct = correct[i];
    corrs.matches.push_back(m);
  }
  corrs.labeled = true;
  return corrs;
}

} // namespace

TEST_CASE("sample_keypoint_pairs") {
  const PointCloud model = make_torus(40, 20);
  const double mr = estimate_mesh_resolution(model);
  const SpatialIndex model_index(model);

  SUBCASE("exact transformed copy pairs with zero residual") {
    const RigidTransform t = random_rigid_transform(3, 5.0 * mr);
    const PointCloud scene = apply_transform(model, t.inverse());
    const auto pairs =
        sample_keypoint_pairs(scene, model_index, t, 100, 7, 1e-9);
    REQUIRE(pairs.scene_keypoints.size() == 100);
    CHECK_FALSE(pairs.partial);
    for (std::size_t i = 0; i < 100; ++i) {
      CHECK((t(pairs.scene_keypoints[i]) - pairs.model_keypoints[i]).norm() <=
            1e-9);
    }
  }

  SUBCASE("zero tolerance on a noisy pair leaves almost nothing") {
    const RigidTransform t = random_rigid_transform(5, 5.0 * mr);
    PointCloud scene = apply_transform(model, t.inverse());
    scene = add_gaussian_noise(scene, 0.3, mr, 21);
    const auto pairs =
        sample_keypoint_pairs(scene, model_index, t, 50, 7, 0.0);
    CHECK(pairs.partial);
    CHECK(pairs.scene_keypoints.empty());
  }

  SUBCASE("pair residuals equal the linear-scan nearest distances") {
    const RigidTransform t = random_rigid_transform(6, 5.0 * mr);
    PointCloud scene = apply_transform(model, t.inverse());
    scene = add_gaussian_noise(scene, 0.4, mr, 8);
    const auto pairs =
        sample_keypoint_pairs(scene, model_index, t, 60, 11, 2.0 * mr);
    for (std::size_t i = 0; i < pairs.scene_keypoints.size(); ++i) {
      const Vector3 mapped = t(pairs.scene_keypoints[i]);
      double best = std::numeric_limits<double>::infinity();
      Vector3 best_point = Vector3::Zero();
      for (Eigen::Index j = 0; j < model.size(); ++j) {
        const double d = (model.point(j) - mapped).norm();
        if (d < best) {
          best = d;
          best_point = model.point(j);
        }
      }
      CHECK((pairs.model_keypoints[i] - best_point).norm() == 0.0);
      CHECK(best <= 2.0 * mr);
    }
  }
}

TEST_CASE("match_features") {
  SUBCASE("self match is the identity at distance zero") {
    const auto features = random_features(40, 16, 1);
    const auto corrs = match_features(features, features);
    for (const Match& m : corrs.matches) {
      CHECK(m.model_index == m.scene_index);
      CHECK(m.distance == 0.0);
      CHECK(m.second_distance > 0.0);
    }
  }

  SUBCASE("a single model feature absorbs every match") {
    const auto scene = random_features(10, 8, 2);
    const auto model = random_features(1, 8, 3);
    const auto corrs = match_features(scene, model);
    for (const Match& m : corrs.matches) {
      CHECK(m.model_index == 0);
      CHECK(std::isinf(m.second_distance));
    }
  }

  SUBCASE("random instances equal the quadratic scan") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto scene = random_features(50, 33, 100 + seed * 2);
      const auto model = random_features(50, 33, 101 + seed * 2);
      const auto corrs = match_features(scene, model);
      std::vector<Eigen::VectorXd> sv, mv;
      for (const auto& f : scene) sv.push_back(f.values);
      for (const auto& f : model) mv.push_back(f.values);
      const auto expected = brute_match(sv, mv);
      for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(corrs.matches[i].model_index == expected[i].model_index);
        CHECK(corrs.matches[i].distance == expected[i].distance);
        CHECK(corrs.matches[i].second_distance == expected[i].second_distance);
      }
    }
  }

  SUBCASE("empty inputs are degenerate") {
    const auto features = random_features(5, 4, 9);
    CHECK_THROWS_AS(match_features({}, features), DegenerateInputError);
    CHECK_THROWS_AS(match_features(features, {}), DegenerateInputError);
  }
}

TEST_CASE("label_matches") {
  const auto features = random_features(20, 8, 5);
  auto corrs = match_features(features, features);

  SUBCASE("identical clouds and any positive tolerance label all correct") {
    std::vector<Vector3> kps;
    Rng rng(31);
    for (int i = 0; i < 20; ++i) {
      kps.emplace_back(rng.uniform(), rng.uniform(), rng.uniform());
    }
    const auto labeled =
        label_matches(corrs, kps, kps, RigidTransform(), 1e-6);
    for (const Match& m : labeled.matches) CHECK(m.correct);
  }

  SUBCASE("far-apart keypoints with zero tolerance are all incorrect") {
    std::vector<Vector3> scene_kps, model_kps;
    for (int i = 0; i < 20; ++i) {
      scene_kps.emplace_back(i, 0, 0);
      model_kps.emplace_back(0, 100 + i, 0);
    }
    const auto labeled =
        label_matches(corrs, scene_kps, model_kps, RigidTransform(), 0.0);
    for (const Match& m : labeled.matches) CHECK_FALSE(m.correct);
  }

  SUBCASE("mixed labels equal the direct distance rule") {
    Rng rng(77);
    std::vector<Vector3> scene_kps, model_kps;
    for (int i = 0; i < 20; ++i) {
      scene_kps.emplace_back(rng.uniform(0, 10), rng.uniform(0, 10), 0);
      model_kps.emplace_back(rng.uniform(0, 10), rng.uniform(0, 10), 0);
    }
    const double tol = 3.0;
    const auto labeled =
        label_matches(corrs, scene_kps, model_kps, RigidTransform(), tol);
    for (const Match& m : labeled.matches) {
      const bool expect =
          (scene_kps[m.scene_index] - model_kps[m.model_index]).norm() <= tol;
      CHECK(m.correct == expect);
    }
  }
}

TEST_CASE("rpc curve") {
  SUBCASE("all correct: recall 1 everywhere, AUC exactly 1") {
    const auto corrs = labeled_set({0.0, 0.0, 0.0}, {0.5, 0.4, 0.9},
                                   {true, true, true});
    const RpcCurve curve = rpc_curve(corrs);
    CHECK(curve.auc_pr == 1.0);
    for (const auto& s : curve.samples) {
      CHECK(s.precision == 1.0);
      CHECK(s.recall == 1.0);
    }
  }

  SUBCASE("all incorrect: AUC 0") {
    const auto corrs = labeled_set({0.1, 0.2, 0.3}, {0.5, 0.4, 0.9},
                                   {false, false, false});
    CHECK(rpc_curve(corrs).auc_pr == 0.0);
  }

  SUBCASE("a hand-enumerated ten-match sweep") {
    // Ratios 0.05, 0.15, ..., 0.95 sit strictly between the sweep
    // thresholds k/10; matches 1-5 are correct.
    std::vector<double> distances, seconds;
    std::vector<bool> correct;
    for (int i = 1; i <= 10; ++i) {
      distances.push_back((i - 0.5) / 10.0);
      seconds.push_back(1.0);
      correct.push_back(i <= 5);
    }
    const auto corrs = labeled_set(distances, seconds, correct);
    const RpcCurve curve = rpc_curve(corrs, 10);
    // At tau = k/10 the accepted set is exactly the first k matches.
    for (int k = 1; k <= 10; ++k) {
      const auto& s = curve.samples[k - 1];
      const int accepted = k;
      const int corr = std::min(k, 5);
      CHECK(s.precision ==
            doctest::Approx(double(corr) / accepted).epsilon(1e-12));
      CHECK(s.recall == doctest::Approx(corr / 10.0).epsilon(1e-12));
    }
    // AUC by hand: points (precision, recall) sorted over precision with
    // the padding rule; trapezoids over [0, 1].
    std::vector<std::pair<double, double>> pts;
    for (int k = 1; k <= 10; ++k) {
      pts.emplace_back(std::min(k, 5) / double(k), std::min(k, 5) / 10.0);
    }
    pts.emplace_back(0.0, 0.5); // loosest threshold recall
    pts.emplace_back(1.0, 0.1); // strictest non-empty threshold recall
    std::sort(pts.begin(), pts.end());
    double auc = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      auc += 0.5 * (pts[i].second + pts[i - 1].second) *
             (pts[i].first - pts[i - 1].first);
    }
    CHECK(curve.auc_pr == doctest::Approx(auc).epsilon(1e-12));
  }

  SUBCASE("absolute-distance sweep scales against the maximum distance") {
    // Distances 1..4 with max 4: at tau = k/4 the accepted set is the
    // matches with distance <= k.
    const auto corrs = labeled_set({1.0, 2.0, 3.0, 4.0}, {9, 9, 9, 9},
                                   {true, false, true, false});
    const RpcCurve curve = rpc_curve(corrs, 4, /*use_ratio=*/false);
    CHECK(curve.samples[0].recall == doctest::Approx(0.25));
    CHECK(curve.samples[0].precision == doctest::Approx(1.0));
    CHECK(curve.samples[1].recall == doctest::Approx(0.25));
    CHECK(curve.samples[1].precision == doctest::Approx(0.5));
    CHECK(curve.samples[3].recall == doctest::Approx(0.5));
    CHECK(curve.samples[3].precision == doctest::Approx(0.5));
    CHECK(curve.samples[0].one_minus_precision() == doctest::Approx(0.0));
  }

  SUBCASE("recall is non-decreasing along the sweep") {
    Rng rng(15);
    std::vector<double> distances, seconds;
    std::vector<bool> correct;
    for (int i = 0; i < 60; ++i) {
      const double d = rng.uniform(0.0, 1.0);
      distances.push_back(d);
      seconds.push_back(d + rng.uniform(0.0, 1.0));
      correct.push_back(rng.uniform() < 0.6);
    }
    const RpcCurve curve = rpc_curve(labeled_set(distances, seconds, correct));
    for (std::size_t i = 1; i < curve.samples.size(); ++i) {
      CHECK(curve.samples[i].recall >= curve.samples[i - 1].recall);
    }
    CHECK(curve.auc_pr >= 0.0);
    CHECK(curve.auc_pr <= 1.0);
  }
}

TEST_CASE("pcc") {
  SUBCASE("identical clouds give 100 percent") {
    const auto features = random_features(30, 12, 8);
    auto corrs = match_features(features, features);
    std::vector<Vector3> kps(30, Vector3::Zero());
    corrs = label_matches(corrs, kps, kps, RigidTransform(), 1.0);
    const PccResult result = pcc(corrs, 200);
    CHECK(result.percentage == 100.0);
    CHECK(result.shortfall); // only 30 matches for top 200
    CHECK(result.used == 30);
  }

  SUBCASE("adversarial all-false labels give 0 percent") {
    const auto corrs = labeled_set({0.1, 0.2}, {1.0, 1.0}, {false, false});
    CHECK(pcc(corrs, 2).percentage == 0.0);
  }

  SUBCASE("equals an independent re-sort on a noisy synthetic pair") {
    const PointCloud model = make_torus(40, 20);
    const double mr = estimate_mesh_resolution(model);
    const RigidTransform t = random_rigid_transform(31, 5.0 * mr);
    PointCloud scene = apply_transform(model, t.inverse());
    scene = add_gaussian_noise(scene, 0.1, mr, 13);

    // Synthetic "features": 3D positions in the model frame, which makes
    // match quality easy to reason about yet exercises the full path.
    const SpatialIndex model_index(model);
    const auto pairs =
        sample_keypoint_pairs(scene, model_index, t, 120, 3, 2.0 * mr);
    std::vector<FeatureVector> scene_feats, model_feats;
    for (const auto& p : pairs.scene_keypoints) {
      FeatureVector f;
      f.values = t(p);
      scene_feats.push_back(f);
    }
    for (const auto& p : pairs.model_keypoints) {
      FeatureVector f;
      f.values = p;
      model_feats.push_back(f);
    }
    auto corrs = match_features(scene_feats, model_feats);
    corrs = label_matches(corrs, pairs.scene_keypoints, pairs.model_keypoints,
                          t, 2.0 * mr);
    const PccResult got = pcc(corrs, 50);

    // Independent re-sort with the same tie rule.
    std::vector<std::pair<double, std::size_t>> order;
    for (std::size_t i = 0; i < corrs.matches.size(); ++i) {
      order.emplace_back(corrs.matches[i].distance, i);
    }
    std::sort(order.begin(), order.end());
    int correct = 0;
    for (std::size_t r = 0; r < 50; ++r) {
      if (corrs.matches[order[r].second].correct) ++correct;
    }
    CHECK(got.percentage == doctest::Approx(correct * 2.0).epsilon(1e-12));
  }
}

TEST_CASE("axis repeatability study") {
  const PointCloud model = make_wavy_plane(40, 40, 2);
  const double mr = estimate_mesh_resolution(model);

  SUBCASE("identical clouds repeat perfectly") {
    const auto result = axis_repeatability_study(
        model, model, RigidTransform(), AxisKind::Lma, 7.0, mr, 80, 5,
        2.0 * mr);
    CHECK(result.repeatability == 1.0);
  }

  SUBCASE("noiseless rigid pairs repeat within exclusions") {
    const RigidTransform t = random_rigid_transform(21, 5.0 * mr);
    const PointCloud scene = apply_transform(model, t.inverse());
    const auto result = axis_repeatability_study(
        scene, model, t, AxisKind::LraSdass, 20.0, mr, 80, 5, 2.0 * mr);
    CHECK(result.repeatability == 1.0);
  }

  SUBCASE("under noise the LMA repeats better than the RN normal") {
    const RigidTransform t = random_rigid_transform(22, 5.0 * mr);
    PointCloud scene = apply_transform(model, t.inverse());
    scene = add_gaussian_noise(scene, 0.5, mr, 91);
    const auto lma = axis_repeatability_study(
        scene, model, t, AxisKind::Lma, 7.0, mr, 150, 6, 2.0 * mr);
    const auto rn = axis_repeatability_study(
        scene, model, t, AxisKind::RnNormal, 3.0, mr, 150, 6, 2.0 * mr);
    REQUIRE(lma.evaluated >= 100);
    REQUIRE(rn.evaluated >= 100);
    CHECK(lma.repeatability > rn.repeatability);
  }
}
