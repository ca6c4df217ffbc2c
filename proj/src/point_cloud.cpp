#include "sdass/point_cloud.hpp"

#include <cmath>
#include <limits>
#include <unordered_map>

#include <Eigen/LU>

#include "sdass/spatial_index.hpp"

namespace sdass {

PointCloud::PointCloud(PointMatrix points)
    : points_(std::move(points)),
      resolution_cache_(std::numeric_limits<double>::quiet_NaN()) {
  if (points_.cols() < 1) {
    throw DegenerateInputError("point cloud must contain at least one point");
  }
  if (!points_.allFinite()) {
    throw DegenerateInputError("point cloud contains non-finite coordinates");
  }
}

PointCloud::PointCloud(const PointCloud& other)
    : points_(other.points_),
      resolution_cache_(other.resolution_cache_.load()) {}

PointCloud& PointCloud::operator=(const PointCloud& other) {
  points_ = other.points_;
  resolution_cache_.store(other.resolution_cache_.load());
  return *this;
}

PointCloud PointCloud::from_points(const std::vector<Vector3>& pts) {
  PointMatrix m(3, static_cast<Eigen::Index>(pts.size()));
  for (Eigen::Index i = 0; i < m.cols(); ++i) m.col(i) = pts[i];
  return PointCloud(std::move(m));
}

double estimate_mesh_resolution(const PointCloud& cloud) {
  const double cached = cloud.resolution_cache_.load();
  if (!std::isnan(cached)) return cached;

  const Eigen::Index n = cloud.size();
  if (n < 2) {
    throw DegenerateInputError(
        "mesh resolution requires at least two points");
  }
  SpatialIndex index(cloud);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto knn = index.nearest(cloud.point(i), 2);
    for (const auto& [idx, dist] : knn) {
      if (idx != i) {
        sum += dist;
        break;
      }
    }
  }
  const double mr = sum / static_cast<double>(n);
  cloud.resolution_cache_.store(mr);
  return mr;
}

PointCloud apply_transform(const PointCloud& cloud, const RigidTransform& t) {
  PointMatrix out =
      (t.rotation() * cloud.points()).colwise() + t.translation();
  return PointCloud(std::move(out));
}

TriangleMesh::TriangleMesh(PointCloud cloud, std::vector<Triangle> triangles)
    : cloud_(std::move(cloud)), triangles_(std::move(triangles)) {
  const auto n = static_cast<std::int32_t>(cloud_.size());
  for (const auto& tri : triangles_) {
    for (int k = 0; k < 3; ++k) {
      if (tri[k] < 0 || tri[k] >= n) {
        throw DegenerateInputError("triangle index out of range");
      }
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
      throw DegenerateInputError("degenerate triangle with repeated vertex");
    }
  }
}

RigidTransform::RigidTransform()
    : rotation_(Matrix3::Identity()), translation_(Vector3::Zero()) {}

RigidTransform::RigidTransform(const Matrix3& rotation,
                               const Vector3& translation)
    : rotation_(rotation), translation_(translation) {
  constexpr double tol = 1e-9;
  if (!((rotation_.transpose() * rotation_ - Matrix3::Identity())
            .cwiseAbs()
            .maxCoeff() <= tol)) {
    throw DegenerateInputError("rotation matrix is not orthonormal");
  }
  if (!(std::abs(rotation_.determinant() - 1.0) <= tol)) {
    throw DegenerateInputError("rotation matrix determinant is not +1");
  }
  if (!translation_.allFinite()) {
    throw DegenerateInputError("translation is not finite");
  }
}

RigidTransform RigidTransform::inverse() const {
  const Matrix3 rt = rotation_.transpose();
  return RigidTransform(rt, -(rt * translation_));
}

RigidTransform RigidTransform::compose(const RigidTransform& inner) const {
  return RigidTransform(rotation_ * inner.rotation_,
                        rotation_ * inner.translation_ + translation_);
}

std::vector<std::int32_t> detect_boundary_points(const TriangleMesh& mesh) {
  if (mesh.triangles().empty()) {
    throw UnsupportedInputError(
        "boundary detection requires a triangulated mesh");
  }
  // Edge key: (min, max) packed into 64 bits.
  std::unordered_map<std::uint64_t, int> edge_count;
  edge_count.reserve(mesh.triangles().size() * 3);
  auto key = [](std::int32_t a, std::int32_t b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
  };
  for (const auto& tri : mesh.triangles()) {
    ++edge_count[key(tri[0], tri[1])];
    ++edge_count[key(tri[1], tri[2])];
    ++edge_count[key(tri[2], tri[0])];
  }
  std::vector<bool> on_boundary(mesh.cloud().size(), false);
  for (const auto& [k, count] : edge_count) {
    if (count == 1) {
      on_boundary[static_cast<std::int32_t>(k >> 32)] = true;
      on_boundary[static_cast<std::int32_t>(k & 0xffffffffu)] = true;
    }
  }
  std::vector<std::int32_t> result;
  for (std::int32_t i = 0; i < static_cast<std::int32_t>(on_boundary.size());
       ++i) {
    if (on_boundary[i]) result.push_back(i);
  }
  return result;
}

std::vector<std::int32_t> inner_region(const PointCloud& cloud,
                                       const std::vector<std::int32_t>& boundary,
                                       double radius) {
  const auto n = static_cast<std::int32_t>(cloud.size());
  for (const std::int32_t b : boundary) {
    if (b < 0 || b >= n) {
      throw DegenerateInputError("boundary index out of range");
    }
  }
  std::vector<std::int32_t> result;
  if (boundary.empty()) {
    result.resize(n);
    for (std::int32_t i = 0; i < n; ++i) result[i] = i;
    return result;
  }
  const double r2 = radius * radius;
  for (std::int32_t i = 0; i < n; ++i) {
    const Vector3 p = cloud.point(i);
    double min2 = std::numeric_limits<double>::infinity();
    for (const std::int32_t b : boundary) {
      min2 = std::min(min2, (cloud.point(b) - p).squaredNorm());
    }
    if (min2 > r2) result.push_back(i);
  }
  return result;
}

} // namespace sdass
