#pragma once

#include <filesystem>
#include <vector>

#include "sdass/descriptor.hpp"
#include "sdass/spin_image.hpp"

namespace sdass {

enum class DescriptorType : std::uint32_t { Sdass = 0, SpinImage = 1 };

/// Self-describing binary feature container: a parameter header followed by
/// per-record keypoint coordinates (64-bit floats) and feature values
/// (32-bit floats). Only keypoints that produced a feature are stored;
/// failed_keypoints preserves the batch exclusion count.
struct FeatureFile {
  DescriptorType type = DescriptorType::Sdass;
  SdassParams sdass_params;
  SpinImageParams spin_params;
  double mr = 0.0;
  std::uint32_t failed_keypoints = 0;
  std::vector<Vector3> keypoints;
  std::vector<FeatureVector> features;
};

void save_features(const FeatureFile& file, const std::filesystem::path& path);

/// Throws FeatureFileError on malformed or truncated input.
FeatureFile load_features(const std::filesystem::path& path);

/// Interoperability export: header row, then one "x,y,z,v1..vL" row per
/// keypoint.
void export_features_csv(const FeatureFile& file,
                         const std::filesystem::path& path);

} // namespace sdass
