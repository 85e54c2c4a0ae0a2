#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace tmfa {

// ---------------------------------------------------------------------------
// Output plumbing: whole files are assembled in memory, written to a
// temporary sibling, and renamed into place, so a failure at any stage
// leaves no partial file behind. Every file starts with '#' comment lines
// carrying the resolved configuration that produced it.
// ---------------------------------------------------------------------------

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Shortest decimal form that round-trips a double; fixed formatting makes
/// repeated runs byte-identical.
inline std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("io: cannot create '" + path.parent_path().string() + "': " + ec.message());
  }
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("io: cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) {
      fs::remove(tmp, ec);
      throw IoError("io: short write to '" + tmp.string() + "'");
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("io: cannot rename into '" + path.string() + "': " + ec.message());
  }
}

/// '#' header block: tool banner, the emitting command, and the full
/// resolved config on one line.
inline std::string file_header(const std::string& command, const std::string& resolved_config) {
  std::string h;
  h += "# tmfa " + command + "\n";
  h += "# config: " + resolved_config + "\n";
  return h;
}

/// Plain CSV under the comment header; every cell is preformatted text.
inline std::string csv_document(const std::string& header, const std::vector<std::string>& columns,
                                const std::vector<std::vector<std::string>>& rows) {
  std::string out = header;
  for (size_t c = 0; c < columns.size(); ++c) {
    out += columns[c];
    out += (c + 1 < columns.size()) ? ',' : '\n';
  }
  for (const auto& row : rows) {
    if (row.size() != columns.size()) throw IoError("io: csv row width mismatch");
    for (size_t c = 0; c < row.size(); ++c) {
      out += row[c];
      out += (c + 1 < row.size()) ? ',' : '\n';
    }
  }
  return out;
}

}  // namespace tmfa
