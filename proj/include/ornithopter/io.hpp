#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace ornithopter {

inline constexpr const char* kVersion = "0.1.0";

std::string sha256_hex(const std::string& data);

// Writes to a temporary file in the same directory, then renames it over path.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

// 17 significant digits, so values survive a text round trip.
std::string format_number(double value);

// Header row names each column with its unit, e.g. "t [s]".
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add_row(const std::vector<double>& row);
  std::size_t rows() const { return rows_; }
  const std::string& str() const { return text_; }

 private:
  std::size_t columns_;
  std::size_t rows_ = 0;
  std::string text_;
};

struct RunManifest {
  std::string command;
  std::string config_path;
  std::string config_sha256;
  unsigned long long seed = 0;
  std::vector<std::string> outputs;
  std::map<std::string, std::string> extra;
};

// JSON manifest with versions and an ISO-8601 UTC timestamp.
std::string manifest_json(const RunManifest& manifest);

}  // namespace ornithopter
