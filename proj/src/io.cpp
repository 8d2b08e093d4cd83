#include "ornithopter/io.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <Eigen/Core>
#include <json.hpp>
#include <openssl/evp.h>
#include <unistd.h>

namespace ornithopter {

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 computation failed");
  }
  std::ostringstream out;
  for (unsigned int k = 0; k < len; ++k) {
    out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[k]);
  }
  return out.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot move " + tmp.string() + " to " + path.string() + ": " +
                             ec.message());
  }
}

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : columns_(header.size()) {
  for (std::size_t k = 0; k < header.size(); ++k) {
    text_ += (k ? "," : "") + header[k];
  }
  text_ += '\n';
}

void CsvTable::add_row(const std::vector<double>& row) {
  if (row.size() != columns_) {
    throw std::invalid_argument("CSV row has " + std::to_string(row.size()) + " values, expected " +
                                std::to_string(columns_));
  }
  for (std::size_t k = 0; k < row.size(); ++k) {
    if (k) text_ += ',';
    text_ += format_number(row[k]);
  }
  text_ += '\n';
  ++rows_;
}

std::string manifest_json(const RunManifest& m) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  std::ostringstream stamp;
  stamp << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ");

  nlohmann::ordered_json j;
  j["command"] = m.command;
  j["config"] = m.config_path;
  j["config_sha256"] = m.config_sha256;
  j["seed"] = m.seed;
  j["timestamp"] = stamp.str();
  j["versions"] = {{"ornithopter", kVersion},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                 std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)},
                   {"compiler", __VERSION__}};
  j["outputs"] = m.outputs;
  for (const auto& [k, v] : m.extra) j["run"][k] = v;
  return j.dump(2) + "\n";
}

}  // namespace ornithopter
