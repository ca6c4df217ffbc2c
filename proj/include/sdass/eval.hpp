#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sdass/axes.hpp"
#include "sdass/descriptor.hpp"
#include "sdass/point_cloud.hpp"
#include "sdass/spatial_index.hpp"

namespace sdass {

/// Index-aligned keypoint pairs with their ground-truth map (scene -> model).
struct KeypointPairSet {
  std::vector<Vector3> scene_keypoints;
  std::vector<Vector3> model_keypoints;
  RigidTransform transform; // scene -> model
  double tolerance = 0.0;   // every pair residual is <= tolerance
  bool partial = false;     // true when fewer than the requested n survived
};

/// One nearest-neighbor match per scene feature.
struct Match {
  std::int32_t scene_index = -1;
  std::int32_t model_index = -1;
  double distance = 0.0;        // L2 feature distance to the nearest
  double second_distance = 0.0; // distance to the second nearest (inf if none)
  bool correct = false;         // filled by label_matches
};

struct CorrespondenceSet {
  std::vector<Match> matches;
  bool labeled = false;
};

/// Recall vs 1-precision sweep and its area under the precision-recall curve.
struct RpcCurve {
  struct Sample {
    double threshold = 0.0;
    double precision = 0.0;
    double recall = 0.0;

    double one_minus_precision() const { return 1.0 - precision; }
  };
  std::vector<Sample> samples; // recall is non-decreasing along the sweep
  double auc_pr = 0.0;
};

/// Samples n scene points uniformly without replacement, maps each by the
/// ground-truth transform to its nearest model point, and keeps pairs within
/// tolerance. When fewer than n valid pairs exist the result is partial.
KeypointPairSet sample_keypoint_pairs(const PointCloud& scene,
                                      const SpatialIndex& model_index,
                                      const RigidTransform& transform,
                                      std::size_t n, std::uint64_t seed,
                                      double tolerance);

/// Exact nearest and second-nearest model feature per scene feature, with
/// ties broken toward the lower model index. All features must share one
/// length. Throws DegenerateInputError for empty sets.
CorrespondenceSet match_features(std::span<const FeatureVector> scene_features,
                                 std::span<const FeatureVector> model_features);

/// Labels match (i -> j) correct iff
/// ||transform(scene_keypoints[i]) - model_keypoints[j]|| <= geo_tolerance.
CorrespondenceSet label_matches(CorrespondenceSet corrs,
                                std::span<const Vector3> scene_keypoints,
                                std::span<const Vector3> model_keypoints,
                                const RigidTransform& transform,
                                double geo_tolerance);

/// Sweeps the nearest/second-nearest distance-ratio acceptance threshold
/// over (0, 1]. Absolute-distance sweeping is available behind use_ratio =
/// false (thresholds then scale the maximum nearest distance). A threshold
/// that accepts nothing contributes precision 1, recall 0.
RpcCurve rpc_curve(const CorrespondenceSet& corrs, int n_thresholds = 100,
                   bool use_ratio = true);

/// Percentage of correct matches among the top_k smallest feature distances
/// (ties broken by scene index). Uses all matches when fewer than top_k.
struct PccResult {
  double percentage = 0.0;
  std::size_t used = 0;    // matches actually ranked
  bool shortfall = false;  // fewer than top_k matches were available
};
PccResult pcc(const CorrespondenceSet& corrs, std::size_t top_k = 200);

/// Axis constructions the repeatability study can compare.
enum class AxisKind { LraSdass, LraYang, Lma, RnNormal };

const char* axis_kind_name(AxisKind kind);

struct RepeatabilityResult {
  double repeatability = 0.0; // fraction of errors below 5 degrees
  std::size_t evaluated = 0;
  std::size_t excluded = 0; // degenerate keypoints, reported not dropped
  std::vector<double> errors;
};

/// Samples keypoint pairs, computes the chosen axis on both sides, rotates
/// the scene axis by the ground-truth rotation and reports the fraction of
/// angle errors below 5 degrees.
RepeatabilityResult axis_repeatability_study(
    const PointCloud& scene, const PointCloud& model,
    const RigidTransform& transform, AxisKind kind, double radius_mr,
    double mr, std::size_t n, std::uint64_t seed, double pair_tolerance);

} // namespace sdass
