#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "sdass/ply_io.hpp"
#include "support/synthetic.hpp"

using namespace sdass;
using namespace sdass::testing;

namespace {

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("sdass_test_" + name);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

} // namespace

TEST_CASE("binary round trip is bit-exact") {
  const PointCloud cloud = make_random_cloud(137, 4);
  const auto path = temp_path("roundtrip.ply");
  save_ply(cloud, path, PlyFormat::BinaryLittleEndian);
  const PlyContents loaded = load_ply(path);
  REQUIRE(loaded.cloud.size() == cloud.size());
  CHECK((loaded.cloud.points() - cloud.points()).cwiseAbs().maxCoeff() == 0.0);
  CHECK_FALSE(loaded.has_mesh());
  std::filesystem::remove(path);
}

TEST_CASE("mesh round trip preserves triangles in both formats") {
  const TriangleMesh mesh = make_triangulated_grid(4, 3);
  for (const PlyFormat format :
       {PlyFormat::Ascii, PlyFormat::BinaryLittleEndian}) {
    const auto path = temp_path("mesh.ply");
    save_ply(mesh, path, format);
    const PlyContents loaded = load_ply(path);
    CHECK(loaded.cloud.size() == mesh.cloud().size());
    CHECK(loaded.triangles == mesh.triangles());
    if (format == PlyFormat::BinaryLittleEndian) {
      CHECK((loaded.cloud.points() - mesh.cloud().points())
                .cwiseAbs()
                .maxCoeff() == 0.0);
    } else {
      CHECK((loaded.cloud.points() - mesh.cloud().points())
                .cwiseAbs()
                .maxCoeff() < 1e-15);
    }
    std::filesystem::remove(path);
  }
}

TEST_CASE("a small ascii file with one face parses") {
  const auto path = temp_path("ascii.ply");
  write_text(path,
             "ply\n"
             "format ascii 1.0\n"
             "comment made by hand\n"
             "element vertex 3\n"
             "property float x\n"
             "property float y\n"
             "property float z\n"
             "element face 1\n"
             "property list uchar int vertex_indices\n"
             "end_header\n"
             "0 0 0\n"
             "1 0 0\n"
             "0 1 0\n"
             "3 0 1 2\n");
  const PlyContents loaded = load_ply(path);
  CHECK(loaded.cloud.size() == 3);
  REQUIRE(loaded.triangles.size() == 1);
  CHECK(loaded.triangles[0] == Triangle{0, 1, 2});
  std::filesystem::remove(path);
}

TEST_CASE("unknown vertex properties are skipped with a warning") {
  const auto path = temp_path("extra_props.ply");
  write_text(path,
             "ply\n"
             "format ascii 1.0\n"
             "element vertex 2\n"
             "property float nx\n"
             "property float x\n"
             "property float y\n"
             "property float z\n"
             "property uchar red\n"
             "end_header\n"
             "9 1 2 3 255\n"
             "9 4 5 6 255\n");
  const PlyContents loaded = load_ply(path);
  REQUIRE(loaded.cloud.size() == 2);
  CHECK(loaded.cloud.point(0) == Vector3(1, 2, 3));
  CHECK(loaded.cloud.point(1) == Vector3(4, 5, 6));
  CHECK(loaded.warnings.size() == 2);
  std::filesystem::remove(path);
}

TEST_CASE("double-precision coordinates load") {
  const auto path = temp_path("doubles.ply");
  write_text(path,
             "ply\nformat ascii 1.0\n"
             "element vertex 1\n"
             "property double x\nproperty double y\nproperty double z\n"
             "end_header\n"
             "0.25 -1.5 3.125\n");
  const PlyContents loaded = load_ply(path);
  CHECK(loaded.cloud.point(0) == Vector3(0.25, -1.5, 3.125));
  std::filesystem::remove(path);
}

TEST_CASE("parse failures are distinct") {
  SUBCASE("non-PLY magic bytes") {
    const auto path = temp_path("not_a_ply.ply");
    write_text(path, "OFF\n3 1 0\n");
    CHECK_THROWS_AS(load_ply(path), PlyHeaderError);
    std::filesystem::remove(path);
  }

  SUBCASE("unsupported element type") {
    const auto path = temp_path("edge_element.ply");
    write_text(path,
               "ply\nformat ascii 1.0\n"
               "element vertex 1\n"
               "property float x\nproperty float y\nproperty float z\n"
               "element edge 1\n"
               "property int vertex1\nproperty int vertex2\n"
               "end_header\n"
               "0 0 0\n0 1\n");
    CHECK_THROWS_AS(load_ply(path), PlyUnsupportedError);
    std::filesystem::remove(path);
  }

  SUBCASE("unsupported format") {
    const auto path = temp_path("big_endian.ply");
    write_text(path,
               "ply\nformat binary_big_endian 1.0\n"
               "element vertex 1\n"
               "property float x\nproperty float y\nproperty float z\n"
               "end_header\n");
    CHECK_THROWS_AS(load_ply(path), PlyUnsupportedError);
    std::filesystem::remove(path);
  }

  SUBCASE("truncated ascii payload") {
    const auto path = temp_path("truncated.ply");
    write_text(path,
               "ply\nformat ascii 1.0\n"
               "element vertex 3\n"
               "property float x\nproperty float y\nproperty float z\n"
               "end_header\n"
               "0 0 0\n1 0\n");
    CHECK_THROWS_AS(load_ply(path), PlyTruncatedError);
    std::filesystem::remove(path);
  }

  SUBCASE("truncated binary payload") {
    const PointCloud cloud = make_random_cloud(10, 8);
    const auto path = temp_path("truncated_binary.ply");
    save_ply(cloud, path, PlyFormat::BinaryLittleEndian);
    const auto size = std::filesystem::file_size(path);
    std::filesystem::resize_file(path, size - 9);
    CHECK_THROWS_AS(load_ply(path), PlyTruncatedError);
    std::filesystem::remove(path);
  }

  SUBCASE("missing coordinates in the header") {
    const auto path = temp_path("no_xyz.ply");
    write_text(path,
               "ply\nformat ascii 1.0\n"
               "element vertex 1\n"
               "property float x\nproperty float y\n"
               "end_header\n"
               "0 0\n");
    CHECK_THROWS_AS(load_ply(path), PlyHeaderError);
    std::filesystem::remove(path);
  }
}
