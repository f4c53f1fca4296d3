#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "vlab/gl_dynamics.hpp"

namespace vlab {

/// Binary field snapshot, native little-endian:
///   char[8]  "VLABSNAP"
///   u32      version (1)
///   i32 nx, i32 ny, f64 lx, f64 ly, i32 degree, f64 t, u32 has_velocity
///   f64[n] a1, f64[n] a2, f64[2n] phi (re, im interleaved)
///   if has_velocity: f64[n] va1, f64[n] va2, f64[2n] vphi
struct Snapshot {
  TorusGrid grid{16, 16, 1.0, 1.0};
  DynState state;
  bool has_velocity = false;
};

namespace detail {

inline constexpr char snap_magic[8] = {'V', 'L', 'A', 'B', 'S', 'N', 'A', 'P'};
inline constexpr std::uint32_t snap_version = 1;

template <class T>
void put(std::ostream& o, const T& v) {
  o.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
void put_vec(std::ostream& o, const std::vector<T>& v) {
  o.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(T)));
}
template <class T>
T get(std::istream& i) {
  T v{};
  if (!i.read(reinterpret_cast<char*>(&v), sizeof(T))) throw ShapeError("snapshot: truncated file");
  return v;
}
template <class T>
void get_vec(std::istream& i, std::vector<T>& v, std::size_t n) {
  v.resize(n);
  if (!i.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T))))
    throw ShapeError("snapshot: truncated file");
}

}  // namespace detail

inline void write_snapshot(const std::string& path, const DynState& s, const TorusGrid& g,
                           bool with_velocity) {
  s.pair.check(g);
  if (with_velocity) s.check(g);
  std::ofstream o(path, std::ios::binary);
  if (!o) throw DomainError("write_snapshot: cannot open " + path);
  o.write(detail::snap_magic, 8);
  detail::put(o, detail::snap_version);
  detail::put<std::int32_t>(o, g.nx());
  detail::put<std::int32_t>(o, g.ny());
  detail::put(o, g.lx());
  detail::put(o, g.ly());
  detail::put<std::int32_t>(o, s.pair.degree);
  detail::put(o, s.t);
  detail::put<std::uint32_t>(o, with_velocity ? 1u : 0u);
  detail::put_vec(o, s.pair.a1);
  detail::put_vec(o, s.pair.a2);
  detail::put_vec(o, s.pair.phi);
  if (with_velocity) {
    detail::put_vec(o, s.va1);
    detail::put_vec(o, s.va2);
    detail::put_vec(o, s.vphi);
  }
  if (!o) throw DomainError("write_snapshot: write failed for " + path);
}

inline void write_snapshot(const std::string& path, const GaugePair& p, const TorusGrid& g,
                           double t = 0) {
  write_snapshot(path, DynState::at_rest(p, t), g, false);
}

inline Snapshot read_snapshot(const std::string& path) {
  std::ifstream i(path, std::ios::binary);
  if (!i) throw DomainError("read_snapshot: cannot open " + path);
  char magic[8];
  if (!i.read(magic, 8) || std::memcmp(magic, detail::snap_magic, 8) != 0)
    throw ShapeError("read_snapshot: " + path + " is not a snapshot");
  if (detail::get<std::uint32_t>(i) != detail::snap_version)
    throw ShapeError("read_snapshot: unsupported version");
  const int nx = detail::get<std::int32_t>(i), ny = detail::get<std::int32_t>(i);
  const double lx = detail::get<double>(i), ly = detail::get<double>(i);
  Snapshot s{TorusGrid(nx, ny, lx, ly), {}, false};
  const std::size_t n = s.grid.size();
  s.state.pair.degree = detail::get<std::int32_t>(i);
  s.state.t = detail::get<double>(i);
  s.has_velocity = detail::get<std::uint32_t>(i) != 0;
  detail::get_vec(i, s.state.pair.a1, n);
  detail::get_vec(i, s.state.pair.a2, n);
  detail::get_vec(i, s.state.pair.phi, n);
  if (s.has_velocity) {
    detail::get_vec(i, s.state.va1, n);
    detail::get_vec(i, s.state.va2, n);
    detail::get_vec(i, s.state.vphi, n);
  } else {
    s.state.va1.assign(n, 0.0);
    s.state.va2.assign(n, 0.0);
    s.state.vphi.assign(n, 0.0);
  }
  return s;
}

/// Fixed-format CSV output. Reals are printed with %.12e so that repeated
/// runs of the same computation give identical bytes.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header) : o_(path) {
    if (!o_) throw DomainError("CsvWriter: cannot open " + path);
    for (std::size_t k = 0; k < header.size(); ++k) o_ << (k ? "," : "") << header[k];
    o_ << '\n';
  }

  CsvWriter& operator<<(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12e", v == 0.0 ? 0.0 : v);
    return cell(buf);
  }
  CsvWriter& operator<<(int v) { return cell(std::to_string(v)); }
  CsvWriter& operator<<(long v) { return cell(std::to_string(v)); }
  CsvWriter& operator<<(std::size_t v) { return cell(std::to_string(v)); }
  CsvWriter& operator<<(bool v) { return cell(v ? "1" : "0"); }
  CsvWriter& operator<<(const std::string& v) { return cell(v); }
  CsvWriter& operator<<(const char* v) { return cell(v); }

  void end_row() {
    o_ << '\n';
    first_ = true;
  }

 private:
  CsvWriter& cell(const std::string& s) {
    if (!first_) o_ << ',';
    o_ << s;
    first_ = false;
    return *this;
  }
  std::ofstream o_;
  bool first_ = true;
};

/// |phi| and i F12 = -b on every sample: columns i, j, x, y, abs_phi, iF12.
inline void export_field_csv(const std::string& path, const GaugePair& p, const TorusGrid& g) {
  const Field2Form F = curvature(p, g);
  CsvWriter w(path, {"i", "j", "x", "y", "abs_phi", "iF12"});
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      const std::size_t k = g.index(i, j);
      w << i << j << g.x(i) << g.y(j) << std::abs(p.phi[k]) << -F.b[k];
      w.end_row();
    }
}

}  // namespace vlab
