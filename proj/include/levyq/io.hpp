// CSV and JSON emitters: histograms, density grids, report tables, and raw
// increment streams with a JSON sidecar. Floats are written with %.17g so
// every value round-trips and reruns are byte-identical.
#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "levyq/density.hpp"
#include "levyq/quantization.hpp"

namespace levyq {

inline std::string fmt_double(double v) { return fmt::format("{:.17g}", v); }

/// Provenance carried by every histogram and report row.
struct Provenance {
  std::string model_hash;
  std::uint64_t seed = 0;
  std::uint64_t sample_count = 0;
  std::int64_t n = 1;
  double m = 1.0;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

inline std::string histogram_csv(const EmpiricalPmf& pmf, const Provenance& p) {
  std::string out = "model_hash,seed,sample_count,n,m,index,count\r\n";
  for (const auto& [k, c] : pmf.counts()) {
    out += fmt::format("{},{},{},{},{},{},{}\r\n", p.model_hash, p.seed, p.sample_count, p.n, fmt_double(p.m), k, c);
  }
  return out;
}

inline nlohmann::json histogram_json(const EmpiricalPmf& pmf, const Provenance& p) {
  nlohmann::json bins = nlohmann::json::array();
  for (const auto& [k, c] : pmf.counts()) bins.push_back({k, c});
  return {{"model_hash", p.model_hash}, {"seed", p.seed}, {"sample_count", p.sample_count}, {"n", p.n},
          {"m", p.m},                   {"total", pmf.total()}, {"bins", bins}};
}

inline std::string density_csv(const DensityGrid& g) {
  std::string out = "x,p\r\n";
  for (std::size_t i = 0; i < g.size(); ++i) out += fmt::format("{},{}\r\n", fmt_double(g.x(i)), fmt_double(g[i]));
  return out;
}

/// Little-endian 64-bit floats.
inline void write_stream(const std::filesystem::path& path, std::span<const double> xs, const nlohmann::json& sidecar) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  for (double x : xs) {
    std::uint64_t u;
    std::memcpy(&u, &x, sizeof u);
    char b[8];
    for (int k = 0; k < 8; ++k) b[k] = static_cast<char>(u >> (8 * k));
    f.write(b, 8);
  }
  if (!f) throw std::runtime_error("write failed: " + path.string());
  write_text(path.string() + ".json", sidecar.dump(2) + "\n");
}

inline std::vector<double> read_stream(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  std::vector<double> out;
  char b[8];
  while (f.read(b, 8)) {
    std::uint64_t u = 0;
    for (int k = 0; k < 8; ++k) u |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[k])) << (8 * k);
    double x;
    std::memcpy(&x, &u, sizeof x);
    out.push_back(x);
  }
  return out;
}

/// RFC 4180 table writer: CRLF line ends, fields quoted only when needed.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : width_(header.size()) { row(header); }

  void row(const std::vector<std::string>& fields) {
    if (fields.size() != width_) throw std::invalid_argument("CsvTable: row width mismatch");
    for (std::size_t k = 0; k < fields.size(); ++k) {
      if (k) text_ += ',';
      text_ += quote(fields[k]);
    }
    text_ += "\r\n";
  }

  const std::string& text() const noexcept { return text_; }

 private:
  static std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + '"';
  }

  std::size_t width_;
  std::string text_;
};

}  // namespace levyq
