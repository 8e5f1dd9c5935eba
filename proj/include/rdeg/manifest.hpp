#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rdeg/metrics.hpp"

namespace rdeg {

struct ManifestEntry {
  std::filesystem::path path;  ///< resolved against the manifest's directory
  Label label = Label::real;
  std::string item_id;         ///< defaults to the path as written
};

/// Reads a CSV manifest with header `path,label` or `path,label,id`.
/// Labels are `real` or `fake`. Fields may be double-quoted.
/// Throws ManifestError (naming the line) on a bad header, unknown label,
/// wrong field count, or duplicate id; IoError if the file cannot be read.
std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path);

/// Writes a manifest with the three-column header; paths are written as-is.
void save_manifest(const std::vector<ManifestEntry>& entries,
                   const std::filesystem::path& path);

std::string_view to_string(Label label) noexcept;

}  // namespace rdeg
