// Fixture paths and expected-value tables recorded by the scripts in fixtures/.
#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "ppiref/io.hpp"

namespace support {

inline std::string fixture(const std::string& relative) { return std::string(PPIREF_FIXTURE_DIR) + "/" + relative; }

/// Rows of an expected-values CSV as header -> value maps.
inline std::vector<std::map<std::string, std::string>> expected_rows(const std::string& relative) {
  const auto rows = ppiref::parse_csv(ppiref::read_file(fixture(relative)));
  std::vector<std::map<std::string, std::string>> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].empty()) continue;
    std::map<std::string, std::string> m;
    for (std::size_t c = 0; c < rows[0].size(); ++c) m[rows[0][c]] = rows[r][c];
    out.push_back(std::move(m));
  }
  return out;
}

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    const auto stamp = std::random_device{}();
    path_ = std::filesystem::temp_directory_path() /
            ("ppiref-test-" + std::to_string(stamp) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace support
