#include "sdass/nuisance.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Geometry>

#include "sdass/manifest.hpp"
#include "sdass/rng.hpp"

namespace sdass {

std::map<std::string, std::string> NuisanceSpec::to_manifest_params() const {
  return {{"noise_sigma_mr", format_double(noise_sigma_mr)},
          {"decimation_rate", format_double(decimation_rate)},
          {"transform_seed", std::to_string(transform_seed)},
          {"noise_seed", std::to_string(noise_seed)}};
}

PointCloud add_gaussian_noise(const PointCloud& cloud, double sigma_mr,
                              double mr, std::uint64_t seed) {
  if (sigma_mr < 0.0) throw DegenerateInputError("sigma must be >= 0");
  if (!(mr > 0.0)) throw DegenerateInputError("mr must be positive");
  if (sigma_mr == 0.0) return cloud;

  const double sigma = sigma_mr * mr;
  Rng rng(seed);
  PointMatrix out = cloud.points();
  for (Eigen::Index i = 0; i < out.cols(); ++i) {
    for (int k = 0; k < 3; ++k) out(k, i) += sigma * rng.normal();
  }
  return PointCloud(std::move(out));
}

PointCloud decimate(const PointCloud& cloud, double rate, std::uint64_t seed) {
  if (!(rate > 0.0) || rate > 1.0) {
    throw DegenerateInputError("decimation rate must be in (0, 1]");
  }
  const auto n = static_cast<std::size_t>(cloud.size());
  const auto keep = static_cast<std::size_t>(
      std::floor(rate * static_cast<double>(n)));
  if (keep == 0) {
    throw DegenerateInputError("decimation would leave an empty cloud");
  }
  if (keep == n) return cloud;

  // Partial Fisher-Yates: the first `keep` slots become a uniform sample.
  std::vector<std::uint32_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<std::uint32_t>(i);
  Rng rng(seed);
  for (std::size_t i = 0; i < keep; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(perm[i], perm[j]);
  }
  std::sort(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(keep));

  PointMatrix out(3, static_cast<Eigen::Index>(keep));
  for (std::size_t i = 0; i < keep; ++i) {
    out.col(static_cast<Eigen::Index>(i)) = cloud.point(perm[i]);
  }
  return PointCloud(std::move(out));
}

RigidTransform random_rigid_transform(std::uint64_t seed,
                                      double translation_extent) {
  Rng rng(seed);
  // Four standard normals normalized give a uniform unit quaternion.
  Eigen::Vector4d q;
  do {
    for (int k = 0; k < 4; ++k) q[k] = rng.normal();
  } while (q.norm() < 1e-12);
  q.normalize();
  const Eigen::Quaterniond quat(q[0], q[1], q[2], q[3]);
  Vector3 t;
  for (int k = 0; k < 3; ++k) {
    t[k] = rng.uniform(-translation_extent, translation_extent);
  }
  return RigidTransform(quat.toRotationMatrix(), t);
}

} // namespace sdass
