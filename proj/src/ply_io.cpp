#include "sdass/ply_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace sdass {

namespace {

enum class ScalarType {
  Int8,
  UInt8,
  Int16,
  UInt16,
  Int32,
  UInt32,
  Float32,
  Float64
};

bool parse_scalar_type(const std::string& token, ScalarType& out) {
  if (token == "char" || token == "int8") out = ScalarType::Int8;
  else if (token == "uchar" || token == "uint8") out = ScalarType::UInt8;
  else if (token == "short" || token == "int16") out = ScalarType::Int16;
  else if (token == "ushort" || token == "uint16") out = ScalarType::UInt16;
  else if (token == "int" || token == "int32") out = ScalarType::Int32;
  else if (token == "uint" || token == "uint32") out = ScalarType::UInt32;
  else if (token == "float" || token == "float32") out = ScalarType::Float32;
  else if (token == "double" || token == "float64") out = ScalarType::Float64;
  else return false;
  return true;
}

struct Property {
  std::string name;
  bool is_list = false;
  ScalarType count_type = ScalarType::UInt8; // lists only
  ScalarType value_type = ScalarType::Float32;
};

struct Element {
  std::string name;
  std::size_t count = 0;
  std::vector<Property> properties;
};

class BinaryReader {
public:
  BinaryReader(const std::string& data, std::size_t offset)
      : data_(data), pos_(offset) {}

  template <typename T>
  T read() {
    static_assert(std::is_trivially_copyable_v<T>);
    if (pos_ + sizeof(T) > data_.size()) {
      throw PlyTruncatedError("binary payload ends before declared counts");
    }
    T value;
    std::memcpy(&value, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    if constexpr (sizeof(T) > 1) {
      if constexpr (std::endian::native == std::endian::big) {
        value = byteswap(value);
      }
    }
    return value;
  }

  double read_scalar(ScalarType t) {
    switch (t) {
      case ScalarType::Int8: return static_cast<double>(read<std::int8_t>());
      case ScalarType::UInt8: return static_cast<double>(read<std::uint8_t>());
      case ScalarType::Int16: return static_cast<double>(read<std::int16_t>());
      case ScalarType::UInt16:
        return static_cast<double>(read<std::uint16_t>());
      case ScalarType::Int32: return static_cast<double>(read<std::int32_t>());
      case ScalarType::UInt32:
        return static_cast<double>(read<std::uint32_t>());
      case ScalarType::Float32: return static_cast<double>(read<float>());
      case ScalarType::Float64: return read<double>();
    }
    throw PlyHeaderError("unknown scalar type");
  }

private:
  template <typename T>
  static T byteswap(T value) {
    std::array<std::byte, sizeof(T)> bytes;
    std::memcpy(bytes.data(), &value, sizeof(T));
    std::reverse(bytes.begin(), bytes.end());
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
  }

  const std::string& data_;
  std::size_t pos_;
};

class AsciiReader {
public:
  AsciiReader(const std::string& data, std::size_t offset)
      : stream_(data.substr(offset)) {}

  double next() {
    double value;
    if (!(stream_ >> value)) {
      throw PlyTruncatedError("ascii payload ends before declared counts");
    }
    return value;
  }

private:
  std::istringstream stream_;
};

std::string chomp(std::string line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) {
    line.pop_back();
  }
  return line;
}

void append_little_endian(std::string& out, const void* src, std::size_t len) {
  const auto* bytes = static_cast<const char*>(src);
  if constexpr (std::endian::native == std::endian::little) {
    out.append(bytes, len);
  } else {
    for (std::size_t i = len; i > 0; --i) out.push_back(bytes[i - 1]);
  }
}

std::string format_coord(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& data) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open for writing: " + tmp.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error("failed writing: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

} // namespace

PlyContents load_ply(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open: " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());

  // --- header ---
  std::size_t pos = 0;
  auto next_line = [&]() {
    if (pos >= data.size()) {
      throw PlyHeaderError("header ends before end_header");
    }
    const std::size_t nl = data.find('\n', pos);
    const std::size_t end = nl == std::string::npos ? data.size() : nl;
    std::string line = chomp(data.substr(pos, end - pos));
    pos = nl == std::string::npos ? data.size() : nl + 1;
    return line;
  };

  if (next_line() != "ply") {
    throw PlyHeaderError("missing 'ply' magic line");
  }

  bool binary = false;
  bool format_seen = false;
  std::vector<Element> elements;
  std::vector<std::string> warnings;

  for (;;) {
    const std::string line = next_line();
    if (line == "end_header") break;
    std::istringstream ls(line);
    std::string keyword;
    ls >> keyword;
    if (keyword == "comment" || keyword == "obj_info" || keyword.empty()) {
      continue;
    }
    if (keyword == "format") {
      std::string fmt, version;
      if (!(ls >> fmt >> version)) {
        throw PlyHeaderError("malformed format line");
      }
      if (version != "1.0") {
        throw PlyUnsupportedError("unsupported PLY version: " + version);
      }
      if (fmt == "ascii") binary = false;
      else if (fmt == "binary_little_endian") binary = true;
      else throw PlyUnsupportedError("unsupported PLY format: " + fmt);
      format_seen = true;
    } else if (keyword == "element") {
      Element e;
      if (!(ls >> e.name >> e.count)) {
        throw PlyHeaderError("malformed element line");
      }
      if (e.name != "vertex" && e.name != "face") {
        throw PlyUnsupportedError("unsupported element type: " + e.name);
      }
      elements.push_back(std::move(e));
    } else if (keyword == "property") {
      if (elements.empty()) {
        throw PlyHeaderError("property before any element");
      }
      Property p;
      std::string type_token;
      if (!(ls >> type_token)) throw PlyHeaderError("malformed property line");
      if (type_token == "list") {
        std::string count_token, value_token;
        if (!(ls >> count_token >> value_token >> p.name)) {
          throw PlyHeaderError("malformed list property line");
        }
        p.is_list = true;
        if (!parse_scalar_type(count_token, p.count_type) ||
            !parse_scalar_type(value_token, p.value_type)) {
          throw PlyHeaderError("unknown property type in list");
        }
      } else {
        if (!(ls >> p.name)) throw PlyHeaderError("malformed property line");
        if (!parse_scalar_type(type_token, p.value_type)) {
          throw PlyHeaderError("unknown property type: " + type_token);
        }
      }
      elements.back().properties.push_back(std::move(p));
    } else {
      throw PlyHeaderError("unexpected header keyword: " + keyword);
    }
  }
  if (!format_seen) throw PlyHeaderError("missing format line");

  // Validate the vertex element and locate x/y/z.
  const Element* vertex = nullptr;
  const Element* face = nullptr;
  for (const Element& e : elements) {
    if (e.name == "vertex") vertex = &e;
    if (e.name == "face") face = &e;
  }
  if (vertex == nullptr) throw PlyHeaderError("missing vertex element");
  int coord_slot[3] = {-1, -1, -1};
  for (std::size_t i = 0; i < vertex->properties.size(); ++i) {
    const Property& p = vertex->properties[i];
    int slot = p.name == "x" ? 0 : p.name == "y" ? 1 : p.name == "z" ? 2 : -1;
    if (slot < 0) {
      warnings.push_back("skipping vertex property '" + p.name + "'");
      continue;
    }
    if (p.is_list ||
        (p.value_type != ScalarType::Float32 &&
         p.value_type != ScalarType::Float64)) {
      throw PlyUnsupportedError("vertex coordinate '" + p.name +
                                "' is not a 32- or 64-bit float");
    }
    coord_slot[slot] = static_cast<int>(i);
  }
  if (coord_slot[0] < 0 || coord_slot[1] < 0 || coord_slot[2] < 0) {
    throw PlyHeaderError("vertex element lacks x/y/z properties");
  }
  if (face != nullptr) {
    for (const Property& p : face->properties) {
      if (p.name == "vertex_indices" || p.name == "vertex_index") {
        if (!p.is_list) {
          throw PlyUnsupportedError("face vertex_indices is not a list");
        }
      } else {
        warnings.push_back("skipping face property '" + p.name + "'");
      }
    }
  }

  // --- payload ---
  PointMatrix points;
  std::vector<Triangle> triangles;

  auto read_elements = [&](auto& reader, auto read_value) {
    for (const Element& e : elements) {
      if (e.name == "vertex") {
        points.resize(3, static_cast<Eigen::Index>(e.count));
        for (std::size_t row = 0; row < e.count; ++row) {
          for (std::size_t i = 0; i < e.properties.size(); ++i) {
            const Property& p = e.properties[i];
            if (p.is_list) {
              const auto len =
                  static_cast<std::size_t>(read_value(reader, p.count_type));
              for (std::size_t k = 0; k < len; ++k) {
                read_value(reader, p.value_type);
              }
              continue;
            }
            const double v = read_value(reader, p.value_type);
            for (int s = 0; s < 3; ++s) {
              if (coord_slot[s] == static_cast<int>(i)) {
                points(s, static_cast<Eigen::Index>(row)) = v;
              }
            }
          }
        }
      } else { // face
        triangles.reserve(e.count);
        for (std::size_t row = 0; row < e.count; ++row) {
          for (const Property& p : e.properties) {
            if (!p.is_list) {
              read_value(reader, p.value_type);
              continue;
            }
            const auto len =
                static_cast<std::size_t>(read_value(reader, p.count_type));
            if (p.name == "vertex_indices" || p.name == "vertex_index") {
              if (len != 3) {
                throw PlyUnsupportedError("non-triangular face in file");
              }
              Triangle tri;
              for (int k = 0; k < 3; ++k) {
                tri[k] =
                    static_cast<std::int32_t>(read_value(reader, p.value_type));
              }
              triangles.push_back(tri);
            } else {
              for (std::size_t k = 0; k < len; ++k) {
                read_value(reader, p.value_type);
              }
            }
          }
        }
      }
    }
  };

  if (binary) {
    BinaryReader reader(data, pos);
    read_elements(reader, [](BinaryReader& r, ScalarType t) {
      return r.read_scalar(t);
    });
  } else {
    AsciiReader reader(data, pos);
    read_elements(reader,
                  [](AsciiReader& r, ScalarType) { return r.next(); });
  }

  PlyContents contents{PointCloud(std::move(points)), std::move(triangles),
                       std::move(warnings)};
  if (contents.has_mesh()) {
    contents.mesh(); // validates indices and non-degeneracy
  }
  return contents;
}

namespace {

void save_ply_impl(const PointMatrix& points,
                   const std::vector<Triangle>* triangles,
                   const std::filesystem::path& path, PlyFormat format) {
  const bool binary = format == PlyFormat::BinaryLittleEndian;
  std::string out;
  out += "ply\n";
  out += binary ? "format binary_little_endian 1.0\n" : "format ascii 1.0\n";
  out += "element vertex " + std::to_string(points.cols()) + "\n";
  out += "property double x\nproperty double y\nproperty double z\n";
  if (triangles != nullptr) {
    out += "element face " + std::to_string(triangles->size()) + "\n";
    out += "property list uchar int vertex_indices\n";
  }
  out += "end_header\n";

  if (binary) {
    for (Eigen::Index i = 0; i < points.cols(); ++i) {
      for (int k = 0; k < 3; ++k) {
        const double v = points(k, i);
        append_little_endian(out, &v, sizeof(double));
      }
    }
    if (triangles != nullptr) {
      for (const Triangle& tri : *triangles) {
        const std::uint8_t n = 3;
        out.push_back(static_cast<char>(n));
        for (int k = 0; k < 3; ++k) {
          const std::int32_t idx = tri[k];
          append_little_endian(out, &idx, sizeof(idx));
        }
      }
    }
  } else {
    for (Eigen::Index i = 0; i < points.cols(); ++i) {
      out += format_coord(points(0, i)) + " " + format_coord(points(1, i)) +
             " " + format_coord(points(2, i)) + "\n";
    }
    if (triangles != nullptr) {
      for (const Triangle& tri : *triangles) {
        out += "3 " + std::to_string(tri[0]) + " " + std::to_string(tri[1]) +
               " " + std::to_string(tri[2]) + "\n";
      }
    }
  }
  write_file(path, out);
}

} // namespace

void save_ply(const PointCloud& cloud, const std::filesystem::path& path,
              PlyFormat format) {
  save_ply_impl(cloud.points(), nullptr, path, format);
}

void save_ply(const TriangleMesh& mesh, const std::filesystem::path& path,
              PlyFormat format) {
  save_ply_impl(mesh.cloud().points(), &mesh.triangles(), path, format);
}

} // namespace sdass
