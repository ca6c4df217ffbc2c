#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace sdass {

/// Replayable record of one CLI run: the exact argument vector, resolved
/// parameter values, input content hashes and the tool version. Replaying
/// the argv against unchanged inputs reproduces every output byte for byte.
struct RunManifest {
  std::string tool_version;
  std::string command;
  std::vector<std::string> argv; // includes the command name
  std::map<std::string, std::string> params;
  std::map<std::string, std::string> input_hashes; // path -> fnv1a64 hex
};

std::string manifest_to_string(const RunManifest& m);

/// Throws ManifestError on malformed content.
RunManifest parse_manifest(const std::string& text);
RunManifest load_manifest(const std::filesystem::path& path);

void save_manifest(const RunManifest& m, const std::filesystem::path& path);

/// Verifies that every recorded input file still hashes to its recorded
/// value; throws ManifestError on any mismatch or missing file.
void verify_manifest_inputs(const RunManifest& m);

/// FNV-1a 64-bit over the file content, as a fixed-width hex string.
std::string fnv1a64_file(const std::filesystem::path& path);

/// Shortest-round-trip style formatting used by every CSV and text output;
/// fixed so replayed runs are byte-identical.
std::string format_double(double v);

/// Writes via a temp file in the same directory, then renames into place.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& data);

} // namespace sdass
