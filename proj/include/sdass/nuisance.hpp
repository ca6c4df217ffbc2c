#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "sdass/point_cloud.hpp"

namespace sdass {

/// Seeded perturbation recipe; serialized into run manifests so every
/// perturbed dataset is replayable.
struct NuisanceSpec {
  double noise_sigma_mr = 0.0;   // >= 0
  double decimation_rate = 1.0;  // in (0, 1]
  std::uint64_t transform_seed = 0;
  std::uint64_t noise_seed = 0;  // also seeds the decimation subset

  /// Plain key=value lines in a fixed order, the manifest serialization.
  std::map<std::string, std::string> to_manifest_params() const;
};

/// Perturbs every coordinate by an independent Gaussian sample with
/// standard deviation sigma_mr * mr. Deterministic per seed.
PointCloud add_gaussian_noise(const PointCloud& cloud, double sigma_mr,
                              double mr, std::uint64_t seed);

/// Keeps a uniformly random subset of floor(rate * n) points, preserving
/// the original relative order. Deterministic per seed.
PointCloud decimate(const PointCloud& cloud, double rate, std::uint64_t seed);

/// Rotation uniform over SO(3) (random unit quaternion); translation uniform
/// in the cube [-translation_extent, translation_extent]^3.
RigidTransform random_rigid_transform(std::uint64_t seed,
                                      double translation_extent = 1.0);

} // namespace sdass
