#include "sdass/descriptor.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Geometry>

#include "sdass/parallel.hpp"

namespace sdass {

void SdassParams::validate() const {
  if (n_lh < 1 || n_pr < 1 || n_ld < 1) {
    throw DegenerateInputError("subdivision counts must be >= 1");
  }
  if (static_cast<std::int64_t>(n_lh) * n_pr * n_ld > 10'000'000) {
    throw DegenerateInputError("subdivision counts are implausibly large");
  }
  if (!(support_radius_mr > 0.0) || !(lma_radius_mr > 0.0)) {
    throw DegenerateInputError("radii must be positive");
  }
}

LocalFrameTransform::LocalFrameTransform(const Vector3& keypoint,
                                         const Axis& lra)
    : keypoint_(keypoint) {
  const Vector3& z = lra.vec();
  int k = 0;
  z.cwiseAbs().minCoeff(&k);
  const Vector3 x = z.cross(Vector3::Unit(k)).normalized();
  const Vector3 y = z.cross(x);
  rotation_.row(0) = x;
  rotation_.row(1) = y;
  rotation_.row(2) = z;
}

std::vector<Vector3> transform_to_local(std::span<const Vector3> points,
                                        const Vector3& keypoint,
                                        const Axis& lra) {
  const LocalFrameTransform frame(keypoint, lra);
  std::vector<Vector3> out;
  out.reserve(points.size());
  for (const Vector3& q : points) out.push_back(frame(q));
  return out;
}

BinIndex bin_indices(const Vector3& local_point, double support_radius,
                     int n_lh, int n_pr) {
  const double z = local_point.z();
  const double rho = std::hypot(local_point.x(), local_point.y());
  const int lh = static_cast<int>(
      std::ceil((support_radius + z) * n_lh / (2.0 * support_radius)));
  const int pr =
      static_cast<int>(std::ceil(rho * n_pr / support_radius));
  return {std::clamp(lh, 1, n_lh), std::clamp(pr, 1, n_pr)};
}

RedundantBinMask redundant_bin_mask(int n_lh, int n_pr, int n_ld,
                                    double support_radius) {
  if (n_lh < 1 || n_pr < 1 || n_ld < 1 || !(support_radius > 0.0)) {
    throw DegenerateInputError("invalid subdivision parameters");
  }
  if (static_cast<std::int64_t>(n_lh) * n_pr * n_ld > 10'000'000) {
    throw DegenerateInputError("subdivision counts are implausibly large");
  }
  RedundantBinMask mask;
  mask.redundant.assign(
      static_cast<std::size_t>(n_lh) * n_pr * n_ld, false);

  // Decide the boundary case (cell corner exactly on the sphere) exactly by
  // working in integer units: heights in R / n_lh, radii in R / n_pr. The
  // height range of cell I_lh is then [2(I_lh - 1) - n_lh, 2 I_lh - n_lh]
  // and the cell is redundant iff
  //   U^2 * n_pr^2 + W^2 * n_lh^2 >= n_lh^2 * n_pr^2
  // with U = min |height| over the cell and W = I_pr - 1.
  const std::int64_t lh2 = static_cast<std::int64_t>(n_lh) * n_lh;
  const std::int64_t pr2 = static_cast<std::int64_t>(n_pr) * n_pr;
  for (int ilh = 1; ilh <= n_lh; ++ilh) {
    const std::int64_t lo = 2 * static_cast<std::int64_t>(ilh - 1) - n_lh;
    const std::int64_t hi = 2 * static_cast<std::int64_t>(ilh) - n_lh;
    const std::int64_t u =
        (lo <= 0 && hi >= 0) ? 0 : std::min(std::abs(lo), std::abs(hi));
    for (int ipr = 1; ipr <= n_pr; ++ipr) {
      const std::int64_t w = ipr - 1;
      const bool redundant = u * u * pr2 + w * w * lh2 >= lh2 * pr2;
      if (!redundant) continue;
      const std::size_t cell =
          (static_cast<std::size_t>(ilh - 1) * n_pr + (ipr - 1));
      for (int ild = 0; ild < n_ld; ++ild) {
        mask.redundant[cell * n_ld + ild] = true;
      }
      mask.redundant_count += n_ld;
    }
  }
  mask.feature_length =
      n_lh * n_pr * n_ld - mask.redundant_count;
  return mask;
}

SdassFeature compute_sdass(const SpatialIndex& index, const Vector3& keypoint,
                           const SdassParams& params, double mr,
                           const LmaField* lma) {
  params.validate();
  if (!(mr > 0.0)) throw DegenerateInputError("mr must be positive");

  const double support_radius = params.support_radius_mr * mr;
  const Axis lra =
      compute_lra(index, keypoint, support_radius, params.lra_variant);

  std::optional<LmaField> local_field;
  if (lma == nullptr) {
    local_field.emplace(index, mr, params.lma_radius_mr);
    lma = &*local_field;
  } else if (lma->radius() != params.lma_radius_mr * mr) {
    throw DegenerateInputError(
        "shared LMA cache radius does not match the descriptor parameters");
  }

  const auto neighbor_idx = index.radius_neighbors(keypoint, support_radius);
  const LocalFrameTransform frame(keypoint, lra);

  const int n_bins = params.n_lh * params.n_pr * params.n_ld;
  Eigen::VectorXd histogram = Eigen::VectorXd::Zero(n_bins);
  SdassFeature result;
  for (const std::int32_t idx : neighbor_idx) {
    const auto neighbor_lma = lma->at(idx);
    if (!neighbor_lma) {
      ++result.lma_skipped;
      continue;
    }
    const Vector3 local = frame(index.cloud().point(idx));
    const auto [ilh, ipr] =
        bin_indices(local, support_radius, params.n_lh, params.n_pr);
    const double ld = deviation_angle(lra, Axis(*neighbor_lma));
    const int ild = std::clamp(
        static_cast<int>(std::ceil(ld * params.n_ld / M_PI)), 1, params.n_ld);
    const int flat =
        ((ilh - 1) * params.n_pr + (ipr - 1)) * params.n_ld + (ild - 1);
    histogram[flat] += 1.0;
    ++result.accumulated;
  }
  if (result.accumulated == 0) {
    throw EmptyFeatureError("no support point contributed to the histogram");
  }

  const RedundantBinMask mask = redundant_bin_mask(
      params.n_lh, params.n_pr, params.n_ld, support_radius);
  Eigen::VectorXd compact(mask.feature_length);
  Eigen::Index out = 0;
  for (int flat = 0; flat < n_bins; ++flat) {
    if (!mask.redundant[flat]) compact[out++] = histogram[flat];
  }
  const double total = compact.sum();
  if (!(total > 0.0)) {
    throw EmptyFeatureError("all accumulated points fell into masked bins");
  }
  result.feature.values = compact / total;
  return result;
}

std::vector<KeypointDescription> describe_keypoints(
    const SpatialIndex& index, std::span<const Vector3> keypoints,
    const SdassParams& params, double mr) {
  params.validate();
  const LmaField lma(index, mr, params.lma_radius_mr);
  std::vector<KeypointDescription> results(keypoints.size());
  parallel_for(keypoints.size(), [&](std::size_t i) {
    KeypointDescription& out = results[i];
    out.keypoint = keypoints[i];
    try {
      SdassFeature f = compute_sdass(index, keypoints[i], params, mr, &lma);
      out.feature = std::move(f.feature);
      out.lma_skipped = f.lma_skipped;
    } catch (const DegenerateKeypointError&) {
      out.failure = DescribeFailure::DegenerateKeypoint;
    } catch (const EmptyFeatureError&) {
      out.failure = DescribeFailure::EmptyFeature;
    }
  });
  return results;
}

} // namespace sdass
