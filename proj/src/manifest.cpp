#include "sdass/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "sdass/error.hpp"

namespace sdass {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& data) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open for writing: " + tmp.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error("failed writing: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string fnv1a64_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open: " + path.string());
  std::uint64_t hash = 0xcbf29ce484222325ull;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 0x100000001b3ull;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(hash));
  return hex;
}

std::string manifest_to_string(const RunManifest& m) {
  std::string out;
  out += "tool_version=" + m.tool_version + "\n";
  out += "command=" + m.command + "\n";
  for (const std::string& a : m.argv) out += "argv=" + a + "\n";
  for (const auto& [k, v] : m.params) out += "param." + k + "=" + v + "\n";
  for (const auto& [path, hash] : m.input_hashes) {
    out += "input=" + hash + ":" + path + "\n";
  }
  return out;
}

RunManifest parse_manifest(const std::string& text) {
  RunManifest m;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ManifestError("manifest line without '=': " + line);
    }
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "tool_version") {
      m.tool_version = value;
    } else if (key == "command") {
      m.command = value;
    } else if (key == "argv") {
      m.argv.push_back(value);
    } else if (key.rfind("param.", 0) == 0) {
      m.params[key.substr(6)] = value;
    } else if (key == "input") {
      const std::size_t colon = value.find(':');
      if (colon == std::string::npos) {
        throw ManifestError("malformed input line: " + line);
      }
      m.input_hashes[value.substr(colon + 1)] = value.substr(0, colon);
    } else {
      throw ManifestError("unknown manifest key: " + key);
    }
  }
  if (m.command.empty() || m.argv.empty()) {
    throw ManifestError("manifest lacks a command or argv lines");
  }
  return m;
}

RunManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open: " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_manifest(data);
}

void save_manifest(const RunManifest& m, const std::filesystem::path& path) {
  write_file_atomic(path, manifest_to_string(m));
}

void verify_manifest_inputs(const RunManifest& m) {
  for (const auto& [path, hash] : m.input_hashes) {
    std::string current;
    try {
      current = fnv1a64_file(path);
    } catch (const Error&) {
      throw ManifestError("manifest input missing: " + path);
    }
    if (current != hash) {
      throw ManifestError("manifest input changed since recording: " + path);
    }
  }
}

} // namespace sdass
