#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ilw/errors.hpp"
#include "ilw/spectral_core.hpp"

namespace ilw::io {

/// Shortest round-trip representation; identical bits give identical text.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add(std::vector<double> row) {
    if (row.size() != columns.size()) throw DimensionError("CsvTable: row width mismatch");
    rows.push_back(std::move(row));
  }
};

inline void write_csv(std::ostream& os, const CsvTable& t) {
  for (std::size_t j = 0; j < t.columns.size(); ++j) os << (j ? "," : "") << t.columns[j];
  os << '\n';
  for (const auto& r : t.rows) {
    for (std::size_t j = 0; j < r.size(); ++j) os << (j ? "," : "") << format_double(r[j]);
    os << '\n';
  }
}

inline void write_csv(const std::filesystem::path& path, const CsvTable& t) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  write_csv(os, t);
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  os << j.dump(2) << '\n';
}

// Snapshot layout, little-endian:
//   bytes 0-3   magic "ILWS"
//   bytes 4-7   uint32 N
//   bytes 8-15  float64 L
//   then N pairs (re, im) of float64 in FFT order.
inline constexpr std::array<char, 4> kSnapshotMagic{'I', 'L', 'W', 'S'};

namespace detail {

template <class T>
void put_le(std::ostream& os, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<unsigned char, sizeof(T)> b;
  std::memcpy(b.data(), &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b.begin(), b.end());
  os.write(reinterpret_cast<const char*>(b.data()), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
  std::array<unsigned char, sizeof(T)> b;
  if (!is.read(reinterpret_cast<char*>(b.data()), sizeof(T))) throw std::runtime_error("snapshot: truncated file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(b.begin(), b.end());
  T v;
  std::memcpy(&v, b.data(), sizeof(T));
  return v;
}

}  // namespace detail

inline void write_snapshot(std::ostream& os, const RealField& u) {
  os.write(kSnapshotMagic.data(), 4);
  detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(u.grid().size()));
  detail::put_le<double>(os, u.grid().period());
  for (const auto& c : u.coeffs()) {
    detail::put_le<double>(os, c.real());
    detail::put_le<double>(os, c.imag());
  }
}

inline RealField read_snapshot(std::istream& is) {
  std::array<char, 4> magic{};
  if (!is.read(magic.data(), 4) || magic != kSnapshotMagic) throw std::runtime_error("snapshot: bad magic");
  const auto n = detail::get_le<std::uint32_t>(is);
  const auto l = detail::get_le<double>(is);
  SpectralGrid g(l, n);
  std::vector<cplx> c(n);
  for (auto& v : c) {
    const double re = detail::get_le<double>(is);
    v = cplx(re, detail::get_le<double>(is));
  }
  return RealField(g, std::move(c));
}

inline void write_snapshot(const std::filesystem::path& path, const RealField& u) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  write_snapshot(os, u);
}

inline RealField read_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  return read_snapshot(is);
}

}  // namespace ilw::io
