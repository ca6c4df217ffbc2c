#include "sdass/feature_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "sdass/manifest.hpp"

namespace sdass {

namespace {

constexpr char kMagic[8] = {'S', 'D', 'A', 'S', 'S', 'F', 'T', '1'};

template <typename T>
void put(std::string& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(std::begin(bytes), std::end(bytes));
  }
  out.append(bytes, sizeof(T));
}

class Cursor {
public:
  Cursor(const std::string& data) : data_(data) {}

  template <typename T>
  T get() {
    static_assert(std::is_trivially_copyable_v<T>);
    if (pos_ + sizeof(T) > data_.size()) {
      throw FeatureFileError("feature file is truncated");
    }
    T value;
    std::memcpy(&value, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    if constexpr (std::endian::native == std::endian::big) {
      char bytes[sizeof(T)];
      std::memcpy(bytes, &value, sizeof(T));
      std::reverse(std::begin(bytes), std::end(bytes));
      std::memcpy(&value, bytes, sizeof(T));
    }
    return value;
  }

  bool at_end() const { return pos_ == data_.size(); }

private:
  const std::string& data_;
  std::size_t pos_ = 0;
};

} // namespace

void save_features(const FeatureFile& file, const std::filesystem::path& path) {
  if (file.keypoints.size() != file.features.size()) {
    throw DegenerateInputError("keypoint and feature counts differ");
  }
  std::uint32_t length = 0;
  if (!file.features.empty()) {
    length = static_cast<std::uint32_t>(file.features.front().size());
    for (const auto& f : file.features) {
      if (static_cast<std::uint32_t>(f.size()) != length) {
        throw DegenerateInputError("inconsistent feature lengths");
      }
    }
  }

  std::string out;
  out.append(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(file.type));
  if (file.type == DescriptorType::Sdass) {
    put<double>(out, file.sdass_params.support_radius_mr);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(file.sdass_params.n_lh));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(file.sdass_params.n_pr));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(file.sdass_params.n_ld));
    put<double>(out, file.sdass_params.lma_radius_mr);
    put<std::uint32_t>(out, file.sdass_params.lra_variant ==
                                    LraVariant::SdassFullRadius
                                ? 0u
                                : 1u);
  } else {
    put<double>(out, file.spin_params.support_radius_mr);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(file.spin_params.bins));
    put<std::uint32_t>(out, 0u);
    put<std::uint32_t>(out, 0u);
    put<double>(out, 0.0);
    put<std::uint32_t>(out, file.spin_params.lra_variant ==
                                    LraVariant::SdassFullRadius
                                ? 0u
                                : 1u);
  }
  put<double>(out, file.mr);
  put<std::uint32_t>(out, file.failed_keypoints);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(file.keypoints.size()));
  put<std::uint32_t>(out, length);
  for (std::size_t i = 0; i < file.keypoints.size(); ++i) {
    for (int k = 0; k < 3; ++k) put<double>(out, file.keypoints[i][k]);
    const Eigen::VectorXd& v = file.features[i].values;
    for (Eigen::Index k = 0; k < v.size(); ++k) {
      put<float>(out, static_cast<float>(v[k]));
    }
  }
  write_file_atomic(path, out);
}

FeatureFile load_features(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open: " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  if (data.size() < sizeof(kMagic) ||
      std::memcmp(data.data(), kMagic, sizeof(kMagic)) != 0) {
    throw FeatureFileError("not a feature file (bad magic)");
  }

  Cursor cur(data);
  for (std::size_t i = 0; i < sizeof(kMagic); ++i) cur.get<char>();

  FeatureFile file;
  const std::uint32_t type = cur.get<std::uint32_t>();
  if (type > 1) throw FeatureFileError("unknown descriptor type tag");
  file.type = static_cast<DescriptorType>(type);
  if (file.type == DescriptorType::Sdass) {
    file.sdass_params.support_radius_mr = cur.get<double>();
    file.sdass_params.n_lh = static_cast<int>(cur.get<std::uint32_t>());
    file.sdass_params.n_pr = static_cast<int>(cur.get<std::uint32_t>());
    file.sdass_params.n_ld = static_cast<int>(cur.get<std::uint32_t>());
    file.sdass_params.lma_radius_mr = cur.get<double>();
    file.sdass_params.lra_variant = cur.get<std::uint32_t>() == 0
                                        ? LraVariant::SdassFullRadius
                                        : LraVariant::YangSubsetRadius;
  } else {
    file.spin_params.support_radius_mr = cur.get<double>();
    file.spin_params.bins = static_cast<int>(cur.get<std::uint32_t>());
    cur.get<std::uint32_t>();
    cur.get<std::uint32_t>();
    cur.get<double>();
    file.spin_params.lra_variant = cur.get<std::uint32_t>() == 0
                                       ? LraVariant::SdassFullRadius
                                       : LraVariant::YangSubsetRadius;
  }
  file.mr = cur.get<double>();
  file.failed_keypoints = cur.get<std::uint32_t>();
  const std::uint64_t count = cur.get<std::uint64_t>();
  const std::uint32_t length = cur.get<std::uint32_t>();

  file.keypoints.reserve(count);
  file.features.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    Vector3 p;
    for (int k = 0; k < 3; ++k) p[k] = cur.get<double>();
    FeatureVector f;
    f.values.resize(static_cast<Eigen::Index>(length));
    for (std::uint32_t k = 0; k < length; ++k) {
      f.values[static_cast<Eigen::Index>(k)] =
          static_cast<double>(cur.get<float>());
    }
    file.keypoints.push_back(p);
    file.features.push_back(std::move(f));
  }
  if (!cur.at_end()) {
    throw FeatureFileError("trailing bytes after declared records");
  }
  return file;
}

void export_features_csv(const FeatureFile& file,
                         const std::filesystem::path& path) {
  std::string out = "x,y,z";
  const std::size_t length =
      file.features.empty() ? 0 : static_cast<std::size_t>(
                                      file.features.front().size());
  for (std::size_t k = 1; k <= length; ++k) {
    out += ",v" + std::to_string(k);
  }
  out += "\n";
  for (std::size_t i = 0; i < file.keypoints.size(); ++i) {
    out += format_double(file.keypoints[i][0]) + "," +
           format_double(file.keypoints[i][1]) + "," +
           format_double(file.keypoints[i][2]);
    const Eigen::VectorXd& v = file.features[i].values;
    for (Eigen::Index k = 0; k < v.size(); ++k) {
      out += "," + format_double(v[k]);
    }
    out += "\n";
  }
  write_file_atomic(path, out);
}

} // namespace sdass
