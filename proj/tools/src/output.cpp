#include "sitesel_cli/output.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "sitesel_cli/config.hpp"

namespace sitesel::cli {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // folds -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvTable::add_meta(const std::string& key, double value) {
  meta_.push_back("# " + key + "=" + format_number(value));
}

void CsvTable::add_meta(const std::string& key, const std::string& value) {
  meta_.push_back("# " + key + "=" + value);
}

CsvTable& CsvTable::row() {
  rows_.emplace_back();
  rows_.back().reserve(columns_.size());
  return *this;
}

CsvTable& CsvTable::operator<<(double v) {
  rows_.back().push_back(format_number(v));
  return *this;
}

CsvTable& CsvTable::operator<<(const std::string& s) {
  rows_.back().push_back(s);
  return *this;
}

std::string CsvTable::str() const {
  std::string out;
  for (const auto& m : meta_) out += m + "\n";
  for (std::size_t i = 0; i < columns_.size(); ++i) out += (i ? "," : "") + columns_[i];
  out += "\n";
  for (const auto& r : rows_) {
    if (r.size() != columns_.size()) throw std::logic_error("CSV row has the wrong width");
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + r[i];
    out += "\n";
  }
  return out;
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

std::size_t CsvData::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw ConfigError("input CSV has no column '" + name + "'");
}

bool CsvData::has_column(const std::string& name) const {
  for (const auto& c : columns)
    if (c == name) return true;
  return false;
}

double CsvData::meta_number(const std::string& key) const {
  for (const auto& [k, v] : meta)
    if (k == key) {
      try {
        return std::stod(v);
      } catch (const std::exception&) {
        throw ConfigError("input CSV metadata '" + key + "' is not a number");
      }
    }
  throw ConfigError("input CSV is missing metadata '" + key + "'");
}

double CsvData::number(std::size_t row, std::size_t col) const {
  const std::string& s = rows.at(row).at(col);
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("input CSV row " + std::to_string(row + 1) + ": '" + s +
                      "' is not a number");
  }
}

CsvData parse_csv(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  CsvData d;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq != std::string::npos) {
        std::size_t start = 1;
        while (start < eq && line[start] == ' ') ++start;
        d.meta.emplace_back(line.substr(start, eq - start), line.substr(eq + 1));
      }
      continue;
    }
    if (d.columns.empty()) {
      d.columns = split(line);
      continue;
    }
    auto cells = split(line);
    if (cells.size() != d.columns.size())
      throw ConfigError("input CSV '" + source + "' has a ragged row");
    d.rows.push_back(std::move(cells));
  }
  if (d.columns.empty()) throw ConfigError("input CSV '" + source + "' is empty");
  return d;
}

CsvData read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read input CSV '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), path.string());
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  const std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                                    &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
    throw std::runtime_error("SHA-256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

}  // namespace sitesel::cli
