#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sdass/point_cloud.hpp"

namespace sdass {

enum class PlyFormat { Ascii, BinaryLittleEndian };

/// Result of loading a PLY file: always a cloud, plus triangles when the
/// file carries a face element. Properties we do not understand are skipped
/// and reported in warnings.
struct PlyContents {
  PointCloud cloud;
  std::vector<Triangle> triangles;
  std::vector<std::string> warnings;

  bool has_mesh() const { return !triangles.empty(); }
  TriangleMesh mesh() const { return TriangleMesh(cloud, triangles); }
};

/// Reads ASCII or binary-little-endian PLY 1.0 with a vertex element
/// (x, y, z as 32- or 64-bit floats) and an optional triangular face
/// element. Throws PlyHeaderError, PlyUnsupportedError or PlyTruncatedError.
PlyContents load_ply(const std::filesystem::path& path);

/// Binary output stores coordinates as 64-bit floats, so a save/load round
/// trip is bit-exact.
void save_ply(const PointCloud& cloud, const std::filesystem::path& path,
              PlyFormat format = PlyFormat::BinaryLittleEndian);
void save_ply(const TriangleMesh& mesh, const std::filesystem::path& path,
              PlyFormat format = PlyFormat::BinaryLittleEndian);

} // namespace sdass
