#pragma once

// Deterministic synthetic geometry shared by the unit and acceptance suites.

#include <cmath>
#include <vector>

#include "sdass/nuisance.hpp"
#include "sdass/point_cloud.hpp"
#include "sdass/rng.hpp"

namespace sdass::testing {

/// Axis-aligned planar grid in the z = 0 plane, row-major point order.
inline PointCloud make_grid(int nx, int ny, double spacing = 1.0) {
  PointMatrix pts(3, static_cast<Eigen::Index>(nx) * ny);
  Eigen::Index c = 0;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      pts.col(c++) = Vector3(i * spacing, j * spacing, 0.0);
    }
  }
  return PointCloud(std::move(pts));
}

/// Grid triangulated with two triangles per quad.
inline TriangleMesh make_triangulated_grid(int nx, int ny,
                                           double spacing = 1.0) {
  PointCloud cloud = make_grid(nx, ny, spacing);
  std::vector<Triangle> tris;
  tris.reserve(static_cast<std::size_t>(nx - 1) * (ny - 1) * 2);
  auto at = [nx](int i, int j) { return static_cast<std::int32_t>(j * nx + i); };
  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      tris.push_back({at(i, j), at(i + 1, j), at(i + 1, j + 1)});
      tris.push_back({at(i, j), at(i + 1, j + 1), at(i, j + 1)});
    }
  }
  return TriangleMesh(std::move(cloud), std::move(tris));
}

inline TriangleMesh make_tetrahedron() {
  PointMatrix pts(3, 4);
  pts.col(0) = Vector3(0, 0, 0);
  pts.col(1) = Vector3(1, 0, 0);
  pts.col(2) = Vector3(0, 1, 0);
  pts.col(3) = Vector3(0, 0, 1);
  std::vector<Triangle> tris{{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
  return TriangleMesh(PointCloud(std::move(pts)), std::move(tris));
}

/// Closed torus sampled on a skewed lattice (golden-ratio row offsets avoid
/// exact symmetries and boundary coincidences). nu * nv points.
inline PointCloud make_torus(int nu, int nv, double major = 1.0,
                             double minor = 0.4) {
  constexpr double kGolden = 0.6180339887498949;
  PointMatrix pts(3, static_cast<Eigen::Index>(nu) * nv);
  Eigen::Index c = 0;
  for (int i = 0; i < nu; ++i) {
    const double u = 2.0 * M_PI * (i + 0.5) / nu;
    const double row_shift = std::fmod(i * kGolden, 1.0);
    for (int j = 0; j < nv; ++j) {
      const double v = 2.0 * M_PI * (j + row_shift) / nv;
      const double ring = major + minor * std::cos(v);
      pts.col(c++) = Vector3(ring * std::cos(u), ring * std::sin(u),
                             minor * std::sin(v));
    }
  }
  return PointCloud(std::move(pts));
}

/// Gently waving open surface patch, jittered off the integer lattice.
/// Feature wavelengths are long against the ~unit point spacing, so every
/// radius up to 20 mr still sees a locally plane-like neighborhood.
inline PointCloud make_wavy_plane(int nx, int ny, std::uint64_t seed = 7) {
  Rng rng(seed);
  PointMatrix pts(3, static_cast<Eigen::Index>(nx) * ny);
  Eigen::Index c = 0;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double x = i + 0.3 * (rng.uniform() - 0.5);
      const double y = j + 0.3 * (rng.uniform() - 0.5);
      const double z = 1.5 * std::sin(0.12 * x) * std::cos(0.10 * y) +
                       0.8 * std::sin(0.07 * (x + y));
      pts.col(c++) = Vector3(x, y, z);
    }
  }
  return PointCloud(std::move(pts));
}

/// Plane patch raised by a field of random Gaussian bumps. Unlike the wavy
/// plane, local neighborhoods here are distinctive, which matters for
/// feature-matching experiments (periodic or rotationally symmetric surfaces
/// make nearest-feature matching ill-posed).
inline PointCloud make_bumpy_plane(int nx, int ny, std::uint64_t seed) {
  Rng rng(seed);
  struct Bump {
    double cx, cy, width, height;
  };
  std::vector<Bump> bumps;
  for (int k = 0; k < 25; ++k) {
    bumps.push_back({rng.uniform(5, nx - 5), rng.uniform(5, ny - 5),
                     rng.uniform(2.5, 7.0), rng.uniform(-4.0, 4.0)});
  }
  PointMatrix pts(3, static_cast<Eigen::Index>(nx) * ny);
  Eigen::Index c = 0;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double x = i + 0.3 * (rng.uniform() - 0.5);
      const double y = j + 0.3 * (rng.uniform() - 0.5);
      double z = 0.0;
      for (const auto& b : bumps) {
        const double d2 = (x - b.cx) * (x - b.cx) + (y - b.cy) * (y - b.cy);
        z += b.height * std::exp(-d2 / (2 * b.width * b.width));
      }
      pts.col(c++) = Vector3(x, y, z);
    }
  }
  return PointCloud(std::move(pts));
}

/// Points on the unit sphere around the +z pole (polar cap of given angular
/// extent), for tests that know the analytic normal.
inline PointCloud make_sphere_cap(int n_rings, int n_per_ring,
                                  double max_polar = 0.5) {
  constexpr double kGolden = 0.6180339887498949;
  std::vector<Vector3> pts;
  pts.push_back(Vector3(0, 0, 1));
  for (int r = 1; r <= n_rings; ++r) {
    const double polar = max_polar * r / n_rings;
    const double shift = std::fmod(r * kGolden, 1.0);
    for (int k = 0; k < n_per_ring; ++k) {
      const double az = 2.0 * M_PI * (k + shift) / n_per_ring;
      pts.push_back(Vector3(std::sin(polar) * std::cos(az),
                            std::sin(polar) * std::sin(az),
                            std::cos(polar)));
    }
  }
  return PointCloud::from_points(pts);
}

inline PointCloud make_random_cloud(int n, std::uint64_t seed,
                                    double extent = 1.0) {
  Rng rng(seed);
  PointMatrix pts(3, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    pts.col(i) = Vector3(rng.uniform(0.0, extent), rng.uniform(0.0, extent),
                         rng.uniform(0.0, extent));
  }
  return PointCloud(std::move(pts));
}

/// Uniform random points on a square patch in the z = 0 plane; Poisson-like
/// sampling whose mean nearest-neighbor spacing scales as 1/sqrt(density).
inline PointCloud make_uniform_plane(int n, double extent,
                                     std::uint64_t seed) {
  Rng rng(seed);
  PointMatrix pts(3, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    pts.col(i) =
        Vector3(rng.uniform(0.0, extent), rng.uniform(0.0, extent), 0.0);
  }
  return PointCloud(std::move(pts));
}

} // namespace sdass::testing
