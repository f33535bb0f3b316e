#ifndef FR_IO_HPP
#define FR_IO_HPP

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "fr/common.hpp"

namespace fr {

// Numeric formatting used for every CSV cell and CLI number: 9 significant
// digits, '.' decimal, bit-stable across runs.
inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return std::string(buf);
}

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::initializer_list<double> cells) { rows.emplace_back(cells); }

  // comma-separated, header row, LF line endings
  std::string to_csv() const {
    std::string out;
    for (std::size_t c = 0; c < columns.size(); ++c) {
      out += columns[c];
      out += (c + 1 < columns.size()) ? "," : "\n";
    }
    for (const auto& row : rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        out += format_number(row[c]);
        out += (c + 1 < row.size()) ? "," : "\n";
      }
    }
    return out;
  }
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot open for writing: " + path);
  out << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot open for reading: " + path);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline std::string hash_hex(std::uint64_t h) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

// Manifest: one line per output file with its content hash, plus the config
// hash and seed that produced the run.
struct Manifest {
  std::string config_hash;
  std::string seed;
  std::vector<std::pair<std::string, std::string>> files;  // (name, hash)

  void record(const std::string& name, const std::string& content) {
    files.push_back({name, hash_hex(fnv1a64(content))});
  }

  std::string to_text() const {
    std::string out = "config_hash," + config_hash + "\nseed," + seed + "\n";
    for (const auto& [name, hash] : files) out += name + "," + hash + "\n";
    return out;
  }
};

}  // namespace fr

#endif  // FR_IO_HPP
