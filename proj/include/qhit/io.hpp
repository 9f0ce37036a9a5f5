#pragma once

#include <concepts>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace qhit::io {

/// Shortest-round-trip-safe decimal: 17 significant digits, "%.17g".
std::string format17(double v);

/// Hex SHA-256 of a byte string / of a file's contents.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Comma-separated writer with a fixed header and "\n" line endings.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  CsvWriter& cell(double v);
  template <std::integral T>
  CsvWriter& cell(T v) {
    separator();
    out_ << v;
    return *this;
  }
  CsvWriter& cell(std::string_view v);
  void end_row();
  /// A trailing "# ..." line marking results cut short.
  void comment(std::string_view text);

 private:
  void separator();
  std::ofstream out_;
  bool row_started_ = false;
};

}  // namespace qhit::io
