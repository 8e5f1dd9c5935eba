#include "rdeg/manifest.hpp"

#include <fstream>
#include <set>

#include "csv.hpp"
#include "rdeg/error.hpp"

namespace rdeg {

std::string_view to_string(Label label) noexcept {
  return label == Label::fake ? "fake" : "real";
}

std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  const auto base = path.parent_path();

  std::string line;
  std::size_t line_no = 0;
  bool has_id = false;
  bool have_header = false;
  std::vector<ManifestEntry> entries;
  std::set<std::string> ids;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!have_header) {
      if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
      const auto header = csv::split<ManifestError>(line, line_no);
      if (header == std::vector<std::string>{"path", "label"}) {
        has_id = false;
      } else if (header == std::vector<std::string>{"path", "label", "id"}) {
        has_id = true;
      } else {
        throw ManifestError(path.string() + ": missing header 'path,label[,id]'");
      }
      have_header = true;
      continue;
    }
    if (line.empty()) continue;
    const auto fields = csv::split<ManifestError>(line, line_no);
    const std::size_t expected = has_id ? 3 : 2;
    if (fields.size() != expected) {
      throw ManifestError(path.string() + " line " + std::to_string(line_no) + ": expected " +
                          std::to_string(expected) + " fields, got " +
                          std::to_string(fields.size()));
    }
    ManifestEntry e;
    if (fields[0].empty()) {
      throw ManifestError(path.string() + " line " + std::to_string(line_no) + ": empty path");
    }
    if (fields[1] == "real") {
      e.label = Label::real;
    } else if (fields[1] == "fake") {
      e.label = Label::fake;
    } else {
      throw ManifestError(path.string() + " line " + std::to_string(line_no) +
                          ": unknown label '" + fields[1] + "' (expected real or fake)");
    }
    const std::filesystem::path raw(fields[0]);
    e.path = raw.is_absolute() ? raw : base / raw;
    e.item_id = has_id && !fields[2].empty() ? fields[2] : fields[0];
    if (!ids.insert(e.item_id).second) {
      throw ManifestError(path.string() + " line " + std::to_string(line_no) +
                          ": duplicate id '" + e.item_id + "'");
    }
    entries.push_back(std::move(e));
  }
  if (!have_header) throw ManifestError(path.string() + ": missing header 'path,label[,id]'");
  return entries;
}

void save_manifest(const std::vector<ManifestEntry>& entries,
                   const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write manifest " + path.string());
  out << "path,label,id\n";
  for (const auto& e : entries) {
    out << csv::quote(e.path.string()) << ',' << to_string(e.label) << ','
        << csv::quote(e.item_id) << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace rdeg
