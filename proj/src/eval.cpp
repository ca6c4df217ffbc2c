#include "sdass/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sdass/rng.hpp"

namespace sdass {

KeypointPairSet sample_keypoint_pairs(const PointCloud& scene,
                                      const SpatialIndex& model_index,
                                      const RigidTransform& transform,
                                      std::size_t n, std::uint64_t seed,
                                      double tolerance) {
  if (n == 0) throw DegenerateInputError("requested zero keypoint pairs");
  if (tolerance < 0.0) throw DegenerateInputError("tolerance must be >= 0");

  const auto total = static_cast<std::size_t>(scene.size());
  std::vector<std::uint32_t> perm(total);
  std::iota(perm.begin(), perm.end(), 0u);
  Rng rng(seed);
  // Full shuffle, then walk the permutation until n pairs pass the
  // tolerance or the scene is exhausted.
  for (std::size_t i = 0; i + 1 < total; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(total - i));
    std::swap(perm[i], perm[j]);
  }

  KeypointPairSet pairs;
  pairs.transform = transform;
  pairs.tolerance = tolerance;
  for (const std::uint32_t scene_idx : perm) {
    if (pairs.scene_keypoints.size() == n) break;
    const Vector3 p = scene.point(scene_idx);
    const Vector3 mapped = transform(p);
    const auto nn = model_index.nearest(mapped, 1);
    if (nn.empty() || nn[0].second > tolerance) continue;
    pairs.scene_keypoints.push_back(p);
    pairs.model_keypoints.push_back(model_index.cloud().point(nn[0].first));
  }
  pairs.partial = pairs.scene_keypoints.size() < n;
  return pairs;
}

CorrespondenceSet match_features(std::span<const FeatureVector> scene_features,
                                 std::span<const FeatureVector> model_features) {
  if (scene_features.empty() || model_features.empty()) {
    throw DegenerateInputError("feature sets must be non-empty");
  }
  const Eigen::Index dim = scene_features.front().size();
  for (const auto& f : scene_features) {
    if (f.size() != dim) {
      throw DegenerateInputError("inconsistent feature lengths");
    }
  }
  for (const auto& f : model_features) {
    if (f.size() != dim) {
      throw DegenerateInputError("inconsistent feature lengths");
    }
  }

  CorrespondenceSet corrs;
  corrs.matches.reserve(scene_features.size());
  for (std::size_t i = 0; i < scene_features.size(); ++i) {
    const Eigen::VectorXd& s = scene_features[i].values;
    double best = std::numeric_limits<double>::infinity();
    double second = std::numeric_limits<double>::infinity();
    std::int32_t best_idx = -1;
    for (std::size_t j = 0; j < model_features.size(); ++j) {
      const double d2 = (model_features[j].values - s).squaredNorm();
      if (d2 < best) {
        second = best;
        best = d2;
        best_idx = static_cast<std::int32_t>(j);
      } else if (d2 < second) {
        second = d2;
      }
    }
    Match m;
    m.scene_index = static_cast<std::int32_t>(i);
    m.model_index = best_idx;
    m.distance = std::sqrt(best);
    m.second_distance = std::isinf(second)
                            ? std::numeric_limits<double>::infinity()
                            : std::sqrt(second);
    corrs.matches.push_back(m);
  }
  return corrs;
}

CorrespondenceSet label_matches(CorrespondenceSet corrs,
                                std::span<const Vector3> scene_keypoints,
                                std::span<const Vector3> model_keypoints,
                                const RigidTransform& transform,
                                double geo_tolerance) {
  for (Match& m : corrs.matches) {
    if (m.scene_index < 0 ||
        static_cast<std::size_t>(m.scene_index) >= scene_keypoints.size() ||
        m.model_index < 0 ||
        static_cast<std::size_t>(m.model_index) >= model_keypoints.size()) {
      throw DegenerateInputError("match indices are out of range");
    }
    const Vector3 mapped = transform(scene_keypoints[m.scene_index]);
    m.correct =
        (mapped - model_keypoints[m.model_index]).norm() <= geo_tolerance;
  }
  corrs.labeled = true;
  return corrs;
}

RpcCurve rpc_curve(const CorrespondenceSet& corrs, int n_thresholds,
                   bool use_ratio) {
  if (!corrs.labeled || corrs.matches.empty()) {
    throw DegenerateInputError("rpc curve requires labeled matches");
  }
  if (n_thresholds < 1) {
    throw DegenerateInputError("rpc curve requires >= 1 threshold");
  }

  // Acceptance statistic: nearest/second-nearest ratio (default), or the
  // nearest distance scaled so the statistic lies in [0, 1].
  std::vector<double> stat(corrs.matches.size());
  if (use_ratio) {
    for (std::size_t i = 0; i < corrs.matches.size(); ++i) {
      const Match& m = corrs.matches[i];
      stat[i] = m.distance == 0.0 ? 0.0
                : std::isinf(m.second_distance)
                    ? 0.0
                    : m.distance / m.second_distance;
    }
  } else {
    double max_dist = 0.0;
    for (const Match& m : corrs.matches) {
      max_dist = std::max(max_dist, m.distance);
    }
    for (std::size_t i = 0; i < corrs.matches.size(); ++i) {
      stat[i] = max_dist == 0.0 ? 0.0 : corrs.matches[i].distance / max_dist;
    }
  }

  const auto total = static_cast<double>(corrs.matches.size());
  RpcCurve curve;
  curve.samples.reserve(static_cast<std::size_t>(n_thresholds));
  for (int t = 1; t <= n_thresholds; ++t) {
    const double tau = static_cast<double>(t) / n_thresholds;
    std::size_t accepted = 0;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < corrs.matches.size(); ++i) {
      if (stat[i] <= tau) {
        ++accepted;
        if (corrs.matches[i].correct) ++correct;
      }
    }
    RpcCurve::Sample s;
    s.threshold = tau;
    if (accepted == 0) {
      s.precision = 1.0; // empty acceptance set convention
      s.recall = 0.0;
    } else {
      s.precision = static_cast<double>(correct) / accepted;
      s.recall = static_cast<double>(correct) / total;
    }
    curve.samples.push_back(s);
  }

  // AUC: trapezoidal integral of recall over the precision axis, padded so
  // the integration domain is the full [0, 1]: below the loosest threshold's
  // precision the recall is held at that threshold's recall, and at
  // precision 1 the recall of the strictest non-empty threshold applies.
  std::vector<std::pair<double, double>> pts; // (precision, recall)
  pts.reserve(curve.samples.size() + 2);
  for (const auto& s : curve.samples) pts.emplace_back(s.precision, s.recall);
  pts.emplace_back(0.0, curve.samples.back().recall);
  double strict_recall = 0.0;
  for (const auto& s : curve.samples) {
    if (s.recall > 0.0 || s.precision < 1.0) { // first non-empty threshold
      strict_recall = s.recall;
      break;
    }
  }
  pts.emplace_back(1.0, strict_recall);
  std::sort(pts.begin(), pts.end());
  double auc = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    auc += 0.5 * (pts[i].second + pts[i - 1].second) *
           (pts[i].first - pts[i - 1].first);
  }
  curve.auc_pr = std::clamp(auc, 0.0, 1.0);
  return curve;
}

PccResult pcc(const CorrespondenceSet& corrs, std::size_t top_k) {
  if (!corrs.labeled || corrs.matches.empty()) {
    throw DegenerateInputError("pcc requires labeled matches");
  }
  if (top_k == 0) throw DegenerateInputError("top_k must be >= 1");

  std::vector<std::size_t> order(corrs.matches.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Match& ma = corrs.matches[a];
    const Match& mb = corrs.matches[b];
    if (ma.distance != mb.distance) return ma.distance < mb.distance;
    return ma.scene_index < mb.scene_index;
  });

  PccResult result;
  result.used = std::min(top_k, order.size());
  result.shortfall = order.size() < top_k;
  std::size_t correct = 0;
  for (std::size_t r = 0; r < result.used; ++r) {
    if (corrs.matches[order[r]].correct) ++correct;
  }
  result.percentage =
      100.0 * static_cast<double>(correct) / static_cast<double>(result.used);
  return result;
}

const char* axis_kind_name(AxisKind kind) {
  switch (kind) {
    case AxisKind::LraSdass: return "lra-sdass";
    case AxisKind::LraYang: return "lra-yang";
    case AxisKind::Lma: return "lma";
    case AxisKind::RnNormal: return "rn";
  }
  return "unknown";
}

RepeatabilityResult axis_repeatability_study(
    const PointCloud& scene, const PointCloud& model,
    const RigidTransform& transform, AxisKind kind, double radius_mr,
    double mr, std::size_t n, std::uint64_t seed, double pair_tolerance) {
  const SpatialIndex scene_index(scene);
  const SpatialIndex model_index(model);
  const KeypointPairSet pairs = sample_keypoint_pairs(
      scene, model_index, transform, n, seed, pair_tolerance);
  if (pairs.scene_keypoints.empty()) {
    throw DegenerateInputError("no keypoint pairs within tolerance");
  }

  auto axis_at = [&](const SpatialIndex& index, const Vector3& p) {
    switch (kind) {
      case AxisKind::LraSdass:
        return compute_lra(index, p, radius_mr * mr,
                           LraVariant::SdassFullRadius);
      case AxisKind::LraYang:
        return compute_lra(index, p, radius_mr * mr,
                           LraVariant::YangSubsetRadius);
      case AxisKind::Lma:
        return compute_lma(index, p, mr, radius_mr);
      case AxisKind::RnNormal:
        return compute_rn_normal(index, p, mr, radius_mr);
    }
    throw DegenerateInputError("unknown axis kind");
  };

  RepeatabilityResult result;
  for (std::size_t i = 0; i < pairs.scene_keypoints.size(); ++i) {
    try {
      const Axis scene_axis = axis_at(scene_index, pairs.scene_keypoints[i]);
      const Axis model_axis = axis_at(model_index, pairs.model_keypoints[i]);
      const Axis rotated(transform.rotation() * scene_axis.vec());
      result.errors.push_back(angle_error(rotated, model_axis));
    } catch (const DegenerateKeypointError&) {
      ++result.excluded;
    }
  }
  result.evaluated = result.errors.size();
  if (result.evaluated == 0) {
    throw DegenerateInputError("every keypoint pair was degenerate");
  }
  result.repeatability = repeatability(result.errors);
  return result;
}

} // namespace sdass
