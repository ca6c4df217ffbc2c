#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "sdass/error.hpp"

namespace sdass {

using Vector3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;

/// Column-major 3xN sample matrix; one point per column.
using PointMatrix = Eigen::Matrix<double, 3, Eigen::Dynamic>;

using Triangle = std::array<std::int32_t, 3>;

/// Immutable 3D point set in the source data's native length units.
///
/// The mesh resolution (mr) -- the mean distance from each point to its
/// nearest other point -- is computed on first request and cached; all
/// algorithm parameters elsewhere in the library are expressed in mr units
/// and converted against this value at call time.
class PointCloud {
public:
  explicit PointCloud(PointMatrix points);
  PointCloud(const PointCloud& other);
  PointCloud& operator=(const PointCloud& other);

  static PointCloud from_points(const std::vector<Vector3>& pts);

  Eigen::Index size() const { return points_.cols(); }
  Vector3 point(Eigen::Index i) const { return points_.col(i); }
  const PointMatrix& points() const { return points_; }

private:
  friend double estimate_mesh_resolution(const PointCloud& cloud);

  PointMatrix points_;
  // NaN until computed; benign to race since every writer stores the same value.
  mutable std::atomic<double> resolution_cache_;
};

/// Point cloud plus triangle connectivity (only needed for boundary detection).
class TriangleMesh {
public:
  TriangleMesh(PointCloud cloud, std::vector<Triangle> triangles);

  const PointCloud& cloud() const { return cloud_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }

private:
  PointCloud cloud_;
  std::vector<Triangle> triangles_;
};

/// Proper rigid motion p -> rotation * p + translation.
class RigidTransform {
public:
  /// Identity transform.
  RigidTransform();

  /// Validates orthonormality and det = +1 within 1e-9.
  RigidTransform(const Matrix3& rotation, const Vector3& translation);

  const Matrix3& rotation() const { return rotation_; }
  const Vector3& translation() const { return translation_; }

  Vector3 operator()(const Vector3& p) const {
    return rotation_ * p + translation_;
  }

  RigidTransform inverse() const;
  RigidTransform compose(const RigidTransform& inner) const;

private:
  Matrix3 rotation_;
  Vector3 translation_;
};

/// Mean nearest-other-point distance (the mr unit). Caches into the cloud.
/// Throws DegenerateInputError for clouds with fewer than 2 points.
double estimate_mesh_resolution(const PointCloud& cloud);

/// Transforms every point; pairwise distances are preserved.
PointCloud apply_transform(const PointCloud& cloud, const RigidTransform& t);

/// Indices of vertices incident to an edge that belongs to exactly one
/// triangle. Empty on closed 2-manifolds. Throws UnsupportedInputError when
/// the mesh has no triangles.
std::vector<std::int32_t> detect_boundary_points(const TriangleMesh& mesh);

/// Indices whose minimum distance to any boundary point exceeds radius.
/// An empty boundary keeps every index.
std::vector<std::int32_t> inner_region(const PointCloud& cloud,
                                       const std::vector<std::int32_t>& boundary,
                                       double radius);

} // namespace sdass
