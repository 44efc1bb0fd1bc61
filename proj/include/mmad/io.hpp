#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "mmad/analysis.hpp"

namespace mmad::io {

/// 17 significant digits: enough to round-trip a double exactly, so
/// re-emission of the same field is byte-identical.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string fnv1a64_hex(std::string_view data) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(data)));
  return buf;
}

/// Write via a temp file in the same directory, then rename into place, so
/// readers never observe a half-written file.
inline void atomic_write(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw ConfigError("cannot create directory " + path.parent_path().string() + ": " +
                              ec.message());
  }
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      fs::remove(tmp, ec);
      throw ConfigError("write failed for " + tmp.string());
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw ConfigError("cannot rename into " + path.string() + ": " + ec.message());
  }
}

struct OutputRecord {
  std::string path;      // as written, relative to the run directory
  std::size_t bytes = 0;
  std::string checksum;  // fnv1a64 of the file content
};

inline OutputRecord write_output(const std::filesystem::path& dir, const std::string& name,
                                 std::string_view content) {
  atomic_write(dir / name, content);
  return {name, content.size(), fnv1a64_hex(content)};
}

/// Nodal field as CSV: 1D "x,phi[,g1]", 2D "x,y,phi[,g1,g2]" row-major with
/// y as the outer loop (node id order).
template <int Dim>
std::string field_csv(const StructuredMesh<Dim>& mesh, const SolutionField& field) {
  if (field.phi.size() != mesh.n_nodes())
    throw ConfigError("field_csv: field does not match mesh");
  const bool has_g = field.g.size() > 0;
  std::string out = Dim == 1 ? "x,phi" : "x,y,phi";
  if (has_g) out += Dim == 1 ? ",g1" : ",g1,g2";
  out += '\n';
  for (int i = 0; i < mesh.n_nodes(); ++i) {
    for (int d = 0; d < Dim; ++d) {
      out += format_double(mesh.nodes[i][d]);
      out += ',';
    }
    out += format_double(field.phi[i]);
    if (has_g)
      for (int c = 0; c < Dim; ++c) {
        out += ',';
        out += format_double(field.g(i, c));
      }
    out += '\n';
  }
  return out;
}

/// Legacy structured-points file for external visualizers (2D only).
inline std::string structured_points(const StructuredMesh<2>& mesh, const SolutionField& field,
                                     const std::string& title = "field") {
  if (field.phi.size() != mesh.n_nodes())
    throw ConfigError("structured_points: field does not match mesh");
  const bool has_g = field.g.size() > 0;
  std::string out = "# vtk DataFile Version 3.0\n" + title + "\nASCII\n";
  out += "DATASET STRUCTURED_POINTS\n";
  out += "DIMENSIONS " + std::to_string(mesh.cells[0] + 1) + " " +
         std::to_string(mesh.cells[1] + 1) + " 1\n";
  out += "ORIGIN 0 0 0\n";
  out += "SPACING " + format_double(mesh.h[0]) + " " + format_double(mesh.h[1]) + " 1\n";
  out += "POINT_DATA " + std::to_string(mesh.n_nodes()) + "\n";
  auto scalars = [&](const std::string& name, auto&& value) {
    out += "SCALARS " + name + " double 1\nLOOKUP_TABLE default\n";
    for (int i = 0; i < mesh.n_nodes(); ++i) {
      out += format_double(value(i));
      out += '\n';
    }
  };
  scalars("phi", [&](int i) { return field.phi[i]; });
  if (has_g) {
    scalars("g1", [&](int i) { return field.g(i, 0); });
    scalars("g2", [&](int i) { return field.g(i, 1); });
  }
  return out;
}

/// A sampling line through a 2D field: grid-aligned horizontal/vertical, or
/// the main diagonal (0,0)-(1,1).
struct CutSpec {
  enum class Kind { horizontal, vertical, diagonal };
  Kind kind = Kind::horizontal;
  double at = 0.5;          // the fixed coordinate; unused for diagonal
  bool interpolate = false; // permit lines that miss the grid

  std::string label() const {
    switch (kind) {
      case Kind::horizontal: return "y=" + format_double(at);
      case Kind::vertical: return "x=" + format_double(at);
      default: return "diag";
    }
  }
};

/// Parse "y=0.5" / "x=0.25" / "diag", optionally suffixed ":interp".
inline CutSpec parse_cut(std::string text) {
  CutSpec cut;
  if (const auto pos = text.rfind(":interp"); pos != std::string::npos &&
      pos + 7 == text.size()) {
    cut.interpolate = true;
    text.resize(pos);
  }
  if (text == "diag" || text == "diagonal") {
    cut.kind = CutSpec::Kind::diagonal;
    return cut;
  }
  if (text.size() > 2 && text[1] == '=' && (text[0] == 'x' || text[0] == 'y')) {
    cut.kind = text[0] == 'x' ? CutSpec::Kind::vertical : CutSpec::Kind::horizontal;
    std::size_t used = 0;
    try {
      cut.at = std::stod(text.substr(2), &used);
    } catch (const std::exception&) {
      throw ConfigError("bad cut coordinate in '" + text + "'");
    }
    if (used != text.size() - 2) throw ConfigError("bad cut coordinate in '" + text + "'");
    if (cut.at < 0 || cut.at > 1) throw ConfigError("cut coordinate outside [0,1]");
    return cut;
  }
  throw ConfigError("bad cut spec '" + text + "' (want x=<v>, y=<v>, or diag)");
}

/// Sample a cut. On-grid cuts return exact node values; anything else needs
/// interpolate = true.
inline std::vector<std::pair<double, double>> sample_cut(const StructuredMesh<2>& mesh,
                                                         const SolutionField& field,
                                                         const CutSpec& cut) {
  const int nx = mesh.cells[0], ny = mesh.cells[1];
  auto vid = [&](int i, int j) { return j * (nx + 1) + i; };
  std::vector<std::pair<double, double>> samples;

  if (cut.kind == CutSpec::Kind::diagonal) {
    if (nx == ny && !cut.interpolate) {
      for (int i = 0; i <= nx; ++i)
        samples.emplace_back(std::sqrt(2.0) * i / nx, field.phi[vid(i, i)]);
      return samples;
    }
    if (!cut.interpolate)
      throw ConfigError("diagonal cut misses the grid; enable interpolation");
    FieldEvaluator<2> ev(mesh, field);
    const int n = std::max(nx, ny);
    for (int i = 0; i <= n; ++i) {
      const double t = static_cast<double>(i) / n;
      samples.emplace_back(std::sqrt(2.0) * t, ev.phi(Point<2>(t, t)));
    }
    return samples;
  }

  const bool horizontal = cut.kind == CutSpec::Kind::horizontal;
  const int n_along = horizontal ? nx : ny;
  const int n_across = horizontal ? ny : nx;
  const double idx = cut.at * n_across;
  const int j = static_cast<int>(std::lround(idx));
  const bool on_grid = std::abs(idx - j) < 1e-12 * std::max(1.0, std::abs(idx));
  if (on_grid) {
    for (int i = 0; i <= n_along; ++i) {
      const int id = horizontal ? vid(i, j) : vid(j, i);
      samples.emplace_back(static_cast<double>(i) / n_along, field.phi[id]);
    }
    return samples;
  }
  if (!cut.interpolate)
    throw ConfigError("cut at " + format_double(cut.at) + " misses the grid; enable interpolation");
  FieldEvaluator<2> ev(mesh, field);
  for (int i = 0; i <= n_along; ++i) {
    const double s = static_cast<double>(i) / n_along;
    const Point<2> x = horizontal ? Point<2>(s, cut.at) : Point<2>(cut.at, s);
    samples.emplace_back(s, ev.phi(x));
  }
  return samples;
}

inline std::string cut_csv(const StructuredMesh<2>& mesh, const SolutionField& field,
                           const CutSpec& cut) {
  std::string out = "s,phi\n";
  for (const auto& [s, v] : sample_cut(mesh, field, cut)) {
    out += format_double(s);
    out += ',';
    out += format_double(v);
    out += '\n';
  }
  return out;
}

}  // namespace mmad::io
