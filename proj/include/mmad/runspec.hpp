#pragma once

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mmad/io.hpp"

#include "../../vendor/json.hpp"

namespace mmad {

/// A complete run described by plain strings, so every case is expressible
/// as a config file and every manifest can rebuild its run.
///
/// Grammars:
///   velocity: "<ux>[,<uy>]" | "rotation"
///   source:   <number> | "manufactured"   (trigonometric manufactured case)
///   profile:  <number> | "step:<axis>:<t>:<a>:<b>" | "sin2pi:<axis>"
///   dirichlet/neumann entry: "<edge>:<profile>"
///   line entry: "<x0>,<y0>:<x1>,<y1>:<profile>"   (interior Dirichlet line)
///   cut entry: "x=<v>" | "y=<v>" | "diag", optional ":interp" suffix
struct RunSpec {
  int dim = 1;
  int nx = 100;
  int ny = 0;  // 0 means "same as nx"
  double pe = 1.0;
  double da = 0.0;
  std::string velocity = "1";
  std::string source = "0";
  std::vector<std::string> dirichlet;
  std::vector<std::string> neumann;
  std::vector<std::string> lines;
  std::string method = "galerkin";
  std::optional<double> mzad_p;
  double tol = 1e-10;
  std::vector<std::string> cuts;

  bool operator==(const RunSpec&) const = default;
};

namespace detail {

inline double parse_number(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("bad " + what + " '" + text + "'");
  }
  if (used != text.size()) throw ConfigError("bad " + what + " '" + text + "'");
  return v;
}

inline std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

inline int axis_index(const std::string& name, int dim) {
  int axis;
  if (name == "x") axis = 0;
  else if (name == "y") axis = 1;
  else throw ConfigError("bad axis '" + name + "'");
  if (axis >= dim) throw ConfigError("axis '" + name + "' not available in " +
                                     std::to_string(dim) + "D");
  return axis;
}

}  // namespace detail

template <int Dim>
ScalarFn<Dim> parse_profile(const std::string& text) {
  const auto parts = detail::split(text, ':');
  if (parts[0] == "step") {
    if (parts.size() != 5) throw ConfigError("step profile wants step:<axis>:<t>:<a>:<b>");
    const int axis = detail::axis_index(parts[1], Dim);
    const double t = detail::parse_number(parts[2], "step threshold");
    const double a = detail::parse_number(parts[3], "step value");
    const double b = detail::parse_number(parts[4], "step value");
    return [axis, t, a, b](const Point<Dim>& x) {
      if (std::abs(x[axis] - t) < 1e-12) return 0.5 * (a + b);
      return x[axis] < t ? a : b;
    };
  }
  if (parts[0] == "sin2pi") {
    if (parts.size() != 2) throw ConfigError("sin2pi profile wants sin2pi:<axis>");
    const int axis = detail::axis_index(parts[1], Dim);
    return [axis](const Point<Dim>& x) { return std::sin(2.0 * M_PI * x[axis]); };
  }
  if (parts.size() != 1) throw ConfigError("bad profile '" + text + "'");
  const double c = detail::parse_number(parts[0], "profile value");
  return [c](const Point<Dim>&) { return c; };
}

template <int Dim>
Velocity<Dim> parse_velocity(const std::string& text) {
  if (text == "rotation") {
    if constexpr (Dim == 2) return Velocity<2>::rotation();
    else throw ConfigError("rotation velocity needs a 2D problem");
  }
  const auto parts = detail::split(text, ',');
  if (static_cast<int>(parts.size()) != Dim)
    throw ConfigError("velocity '" + text + "' has " + std::to_string(parts.size()) +
                      " components, want " + std::to_string(Dim));
  Vec<Dim> u;
  for (int d = 0; d < Dim; ++d) u[d] = detail::parse_number(parts[d], "velocity component");
  return Velocity<Dim>::constant(u);
}

/// The trigonometric manufactured solution sin(pi x) [sin(pi y)]: vanishes
/// on the boundary, smooth, with a closed-form source for any (Pe, Da, u).
template <int Dim>
Reference<Dim> manufactured_reference() {
  Reference<Dim> r;
  if constexpr (Dim == 1) {
    r.value = [](const Point<1>& x) { return std::sin(M_PI * x[0]); };
    r.gradient = [](const Point<1>& x) { return Vec<1>(M_PI * std::cos(M_PI * x[0])); };
  } else {
    r.value = [](const Point<2>& x) { return std::sin(M_PI * x[0]) * std::sin(M_PI * x[1]); };
    r.gradient = [](const Point<2>& x) {
      return Vec<2>(M_PI * std::cos(M_PI * x[0]) * std::sin(M_PI * x[1]),
                    M_PI * std::sin(M_PI * x[0]) * std::cos(M_PI * x[1]));
    };
  }
  return r;
}

template <int Dim>
ScalarFn<Dim> manufactured_source(double pe, double da, const Velocity<Dim>& velocity) {
  const Reference<Dim> ref = manufactured_reference<Dim>();
  return [=](const Point<Dim>& x) {
    // -laplacian of the product of sines is Dim pi^2 times itself
    return da * ref.value(x) + velocity(x).dot(ref.gradient(x)) +
           Dim * M_PI * M_PI / pe * ref.value(x);
  };
}

template <int Dim>
std::pair<StructuredMesh<Dim>, ProblemConfig<Dim>> build_problem(const RunSpec& spec) {
  if (spec.dim != Dim) throw ConfigError("dimension mismatch in build_problem");
  validate_dimension(spec.dim);
  if (spec.nx < 1 || (Dim == 2 && spec.ny < 0))
    throw ConfigError("mesh needs at least one cell per direction");

  StructuredMesh<Dim> mesh;
  if constexpr (Dim == 1) mesh = build_interval_mesh(spec.nx);
  else mesh = build_grid_mesh(spec.nx, spec.ny > 0 ? spec.ny : spec.nx);

  ProblemConfig<Dim> config;
  config.pe = spec.pe;
  config.da = spec.da;
  config.method = parse_method(spec.method);
  config.mzad_p = spec.mzad_p;
  config.velocity = parse_velocity<Dim>(spec.velocity);
  if (spec.source == "manufactured")
    config.source = manufactured_source<Dim>(spec.pe, spec.da, config.velocity);
  else {
    const double f = detail::parse_number(spec.source, "source");
    if (f != 0) config.source = [f](const Point<Dim>&) { return f; };
  }

  auto edge_entry = [](const std::string& text) {
    const auto pos = text.find(':');
    if (pos == std::string::npos)
      throw ConfigError("boundary entry '" + text + "' wants <edge>:<profile>");
    return std::pair{parse_edge(text.substr(0, pos)), text.substr(pos + 1)};
  };
  for (const auto& entry : spec.dirichlet) {
    const auto [edge, profile] = edge_entry(entry);
    config.regions.push_back(
        dirichlet_region(mesh, edge, parse_profile<Dim>(profile), entry));
  }
  for (const auto& entry : spec.neumann) {
    const auto [edge, profile] = edge_entry(entry);
    config.regions.push_back(neumann_region(mesh, edge, parse_profile<Dim>(profile), entry));
  }
  for (const auto& entry : spec.lines) {
    if constexpr (Dim == 1) throw ConfigError("interior lines need a 2D problem");
    else {
      const auto parts = detail::split(entry, ':');
      if (parts.size() < 3) throw ConfigError("line entry '" + entry +
                                              "' wants <x0>,<y0>:<x1>,<y1>:<profile>");
      auto endpoint = [](const std::string& text) {
        const auto xy = detail::split(text, ',');
        if (xy.size() != 2) throw ConfigError("bad line endpoint '" + text + "'");
        return Point<2>(detail::parse_number(xy[0], "line coordinate"),
                        detail::parse_number(xy[1], "line coordinate"));
      };
      std::string profile = parts[2];
      for (std::size_t i = 3; i < parts.size(); ++i) profile += ":" + parts[i];
      config.regions.push_back(interior_line_region(
          mesh, endpoint(parts[0]), endpoint(parts[1]), parse_profile<2>(profile), entry));
    }
  }
  config.validate(mesh);
  return {std::move(mesh), std::move(config)};
}

/// Run f with the mesh and config built for spec's dimension.
template <class F>
auto dispatch_dim(const RunSpec& spec, F&& f) {
  validate_dimension(spec.dim);
  if (spec.dim == 1) {
    auto [mesh, config] = build_problem<1>(spec);
    return f(mesh, config);
  }
  auto [mesh, config] = build_problem<2>(spec);
  return f(mesh, config);
}

// --- config file (key = value lines, repeated keys for lists) ---

inline std::string format_run_config(const RunSpec& spec) {
  std::string out;
  auto kv = [&](const std::string& k, const std::string& v) { out += k + " = " + v + "\n"; };
  kv("dim", std::to_string(spec.dim));
  kv("nx", std::to_string(spec.nx));
  if (spec.dim == 2) kv("ny", std::to_string(spec.ny > 0 ? spec.ny : spec.nx));
  kv("pe", io::format_double(spec.pe));
  kv("da", io::format_double(spec.da));
  kv("velocity", spec.velocity);
  kv("source", spec.source);
  kv("method", spec.method);
  if (spec.mzad_p) kv("mzad_p", io::format_double(*spec.mzad_p));
  kv("tol", io::format_double(spec.tol));
  for (const auto& e : spec.dirichlet) kv("dirichlet", e);
  for (const auto& e : spec.neumann) kv("neumann", e);
  for (const auto& e : spec.lines) kv("line", e);
  for (const auto& e : spec.cuts) kv("cut", e);
  return out;
}

inline RunSpec parse_run_config(const std::string& text) {
  RunSpec spec;
  spec.dirichlet.clear();
  bool saw_dim = false;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string stripped = trim(raw);
    if (stripped.empty() || stripped[0] == '#' || stripped[0] == ';') continue;
    const auto pos = stripped.find('=');
    if (pos == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(stripped.substr(0, pos));
    const std::string value = trim(stripped.substr(pos + 1));
    if (key == "dim") { spec.dim = static_cast<int>(detail::parse_number(value, "dim")); saw_dim = true; }
    else if (key == "nx") spec.nx = static_cast<int>(detail::parse_number(value, "nx"));
    else if (key == "ny") spec.ny = static_cast<int>(detail::parse_number(value, "ny"));
    else if (key == "pe") spec.pe = detail::parse_number(value, "pe");
    else if (key == "da") spec.da = detail::parse_number(value, "da");
    else if (key == "velocity") spec.velocity = value;
    else if (key == "source") spec.source = value;
    else if (key == "method") spec.method = value;
    else if (key == "mzad_p") spec.mzad_p = detail::parse_number(value, "mzad_p");
    else if (key == "tol") spec.tol = detail::parse_number(value, "tol");
    else if (key == "dirichlet") spec.dirichlet.push_back(value);
    else if (key == "neumann") spec.neumann.push_back(value);
    else if (key == "line") spec.lines.push_back(value);
    else if (key == "cut") spec.cuts.push_back(value);
    else throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  if (!saw_dim) throw ConfigError("config missing required key 'dim'");
  validate_dimension(spec.dim);
  return spec;
}

inline nlohmann::json spec_to_json(const RunSpec& spec) {
  nlohmann::json j;
  j["dim"] = spec.dim;
  j["nx"] = spec.nx;
  j["ny"] = spec.ny;
  j["pe"] = spec.pe;
  j["da"] = spec.da;
  j["velocity"] = spec.velocity;
  j["source"] = spec.source;
  j["method"] = spec.method;
  if (spec.mzad_p) j["mzad_p"] = *spec.mzad_p;
  j["tol"] = spec.tol;
  j["dirichlet"] = spec.dirichlet;
  j["neumann"] = spec.neumann;
  j["line"] = spec.lines;
  j["cut"] = spec.cuts;
  return j;
}

inline RunSpec spec_from_json(const nlohmann::json& j) {
  RunSpec spec;
  spec.dim = j.at("dim").get<int>();
  spec.nx = j.at("nx").get<int>();
  spec.ny = j.value("ny", 0);
  spec.pe = j.at("pe").get<double>();
  spec.da = j.at("da").get<double>();
  spec.velocity = j.value("velocity", std::string("1"));
  spec.source = j.value("source", std::string("0"));
  spec.method = j.value("method", std::string("galerkin"));
  if (j.contains("mzad_p")) spec.mzad_p = j.at("mzad_p").get<double>();
  spec.tol = j.value("tol", 1e-10);
  spec.dirichlet = j.value("dirichlet", std::vector<std::string>{});
  spec.neumann = j.value("neumann", std::vector<std::string>{});
  spec.lines = j.value("line", std::vector<std::string>{});
  spec.cuts = j.value("cut", std::vector<std::string>{});
  validate_dimension(spec.dim);
  return spec;
}

}  // namespace mmad
