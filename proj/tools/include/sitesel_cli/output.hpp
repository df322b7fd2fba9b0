#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace sitesel::cli {

/// Fixed-format number for CSV cells; identical inputs give identical text.
std::string format_number(double v);

/// CSV built in memory so nothing touches disk until a run has succeeded.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns);

  /// `# key=value` line written before the header.
  void add_meta(const std::string& key, double value);
  void add_meta(const std::string& key, const std::string& value);

  CsvTable& row();
  CsvTable& operator<<(double v);
  CsvTable& operator<<(const std::string& s);
  CsvTable& operator<<(const char* s) { return *this << std::string(s); }

  std::size_t rows() const { return rows_.size(); }
  std::string str() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::string> meta_;
  std::vector<std::vector<std::string>> rows_;
};

/// Parsed CSV: metadata lines, header and string cells.
struct CsvData {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;  ///< throws if missing
  bool has_column(const std::string& name) const;
  double meta_number(const std::string& key) const;   ///< throws if missing
  double number(std::size_t row, std::size_t col) const;
};

CsvData parse_csv(const std::string& text, const std::string& source = "<memory>");
CsvData read_csv(const std::filesystem::path& path);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace sitesel::cli
