#pragma once

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <string>
#include <vector>

#include "mmad/runspec.hpp"

namespace mmad {

struct SubCase {
  double pe = 1;
  double da = 0;
};

/// A ready-to-run configuration family: one base run plus the (Pe, Da)
/// pairs it is typically studied at. All defaults are data and can be
/// overridden from the command line or a config file.
struct BenchmarkCase {
  std::string id;
  std::string title;
  std::string note;
  RunSpec base;
  std::vector<SubCase> subcases;
  std::optional<double> physical_diffusion;  // m^2/s; enables physical units
};

/// Physical velocity and reaction coefficient recovered from the
/// dimensionless pair: U = Pe D / L, B = Da U / L.
struct PhysicalCoefficients {
  double U = 0;  // m/s
  double B = 0;  // 1/s
};

inline PhysicalCoefficients physical_coefficients(double pe, double da, double diffusion,
                                                  double length = 1.0) {
  if (!(pe > 0) || !(diffusion > 0) || !(length > 0))
    throw ConfigError("physical_coefficients: Pe, D and L must be positive");
  PhysicalCoefficients c;
  c.U = pe * diffusion / length;
  c.B = da * c.U / length;
  return c;
}

inline const std::vector<BenchmarkCase>& catalog() {
  static const std::vector<BenchmarkCase> cases = [] {
    std::vector<BenchmarkCase> cs;
    const std::string s2 = "0.70710678118654757";  // sqrt(2)/2 to the last bit

    {
      BenchmarkCase c;
      c.id = "ex1";
      c.title = "1D boundary layer, unit velocity and source";
      c.note = "closed-form solution available; sharp outflow layer at high Pe";
      c.base.dim = 1;
      c.base.nx = 100;
      c.base.velocity = "1";
      c.base.source = "1";
      c.base.dirichlet = {"left:0", "right:0"};
      c.subcases = {{1, 1e4}, {1e6, 1e-2}, {1e2, 1e2}, {1e3, 1e2}, {1e4, 1e2}};
      cs.push_back(std::move(c));
    }
    {
      BenchmarkCase c;
      c.id = "ex2";
      c.title = "2D diagonal advection with discontinuous inflow, free outflow";
      c.note = "internal layer from the inflow jump; homogeneous Neumann outflow";
      c.base.dim = 2;
      c.base.nx = 40;
      c.base.velocity = s2 + "," + s2;
      c.base.dirichlet = {"bottom:1", "left:step:y:0.25:1:0"};
      c.base.neumann = {"right:0", "top:0"};
      c.subcases = {{1, 1e4}, {1e2, 1e2}, {1e3, 10}, {1e4, 1}, {1e6, 1e-2}};
      cs.push_back(std::move(c));
    }
    {
      BenchmarkCase c;
      c.id = "ex3";
      c.title = "2D diagonal advection with discontinuous inflow, fixed outflow";
      c.note = "as ex2 but Dirichlet outflow, adding outflow boundary layers";
      c.base.dim = 2;
      c.base.nx = 40;
      c.base.velocity = s2 + "," + s2;
      // outflow edges first so the inflow data wins the shared corners
      c.base.dirichlet = {"right:0", "top:0", "bottom:1", "left:step:y:0.25:1:0"};
      c.subcases = {{1, 1e4}, {1e2, 1e2}, {1e3, 10}, {1e4, 1}, {1e6, 1e-2}};
      cs.push_back(std::move(c));
    }
    {
      BenchmarkCase c;
      c.id = "ex4";
      c.title = "2D rotating flow with an interior source line";
      c.note = "hill prescribed on an interior segment is convected and damped";
      c.base.dim = 2;
      c.base.nx = 40;
      c.base.velocity = "rotation";
      c.base.dirichlet = {"left:0", "right:0", "bottom:0", "top:0"};
      c.base.lines = {"0.5,0:0.5,0.5:sin2pi:y"};
      c.subcases = {{1, 1e6}, {1e2, 1}, {1e6, 1e-2}, {1e6, 1e-4}};
      cs.push_back(std::move(c));
    }
    {
      BenchmarkCase c;
      c.id = "ex5";
      c.title = "2D oblique advection with discontinuous inflow, fixed outflow";
      c.note = "shallow-angle flow; layer leaves through the right edge";
      c.base.dim = 2;
      c.base.nx = 40;
      c.base.velocity = "0.15,0.1";
      c.base.dirichlet = {"right:0", "top:0", "bottom:1", "left:step:y:0.25:1:0"};
      c.subcases = {{1, 1e4}, {1e2, 1e2}, {1e3, 10}, {1e4, 1}, {1e6, 1e-2}};
      cs.push_back(std::move(c));
    }
    {
      BenchmarkCase c;
      c.id = "ex6";
      c.title = "2D oblique advection with unit source";
      c.note = "physical coefficients recoverable from D = 1e-4 m^2/s";
      c.base.dim = 2;
      c.base.nx = 40;
      c.base.velocity = "0.5,0.86602540378443865";  // unit vector at 60 degrees
      c.base.source = "1";
      c.base.dirichlet = {"left:0", "right:0", "bottom:0", "top:0"};
      c.subcases = {{1e4, 1e-2}, {1, 1e4}, {1e6, 1}};
      c.physical_diffusion = 1e-4;
      cs.push_back(std::move(c));
    }
    return cs;
  }();
  return cases;
}

inline const BenchmarkCase& find_case(const std::string& id) {
  for (const auto& c : catalog())
    if (c.id == id) return c;
  throw ConfigError("unknown benchmark id '" + id + "'");
}

inline RunSpec spec_for(const BenchmarkCase& c, const SubCase& sub, const std::string& method) {
  RunSpec spec = c.base;
  spec.pe = sub.pe;
  spec.da = sub.da;
  spec.method = method;
  return spec;
}

// --- running a spec and collecting its artifacts ---

struct RunOptions {
  bool with_reference = false;  // closed-form (1D) or 4x-refined (2D) errors
  bool with_outputs = true;     // build the output file contents
  bool legacy_points = false;   // also a structured-points file (2D)
};

struct RunArtifacts {
  RunSpec spec;  // fully resolved
  int n_dofs = 0;
  int dofs_per_node = 1;
  SolveReport solver;
  double assemble_seconds = 0;
  double total_seconds = 0;
  ErrorReport report;
  std::string reference_kind = "none";  // closed-form | fine-grid | none
  std::optional<Bounds> bounds;
  std::vector<std::pair<std::string, std::string>> files;  // name -> content
};

namespace detail {

/// The closed form applies to constant-velocity, constant-source 1D runs
/// pinned to zero at both ends.
inline bool closed_form_applies(const RunSpec& spec) {
  if (spec.dim != 1 || !spec.neumann.empty() || !spec.lines.empty()) return false;
  if (spec.dirichlet.size() != 2) return false;
  bool left = false, right = false;
  for (const auto& e : spec.dirichlet) {
    if (e == "left:0") left = true;
    else if (e == "right:0") right = true;
  }
  if (!left || !right) return false;
  if (spec.velocity == "rotation" || spec.source == "manufactured") return false;
  const double u = detail::parse_number(spec.velocity, "velocity");
  return u != 0 || spec.da > 0;
}

inline std::string sanitize_filename(std::string s) {
  for (char& c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-')) c = '_';
  return s;
}

template <int Dim>
std::optional<Bounds> solution_bounds(const StructuredMesh<Dim>& mesh,
                                      const ProblemConfig<Dim>& config, const RunSpec& spec) {
  std::vector<double> vals;
  for (const auto& [node, v] : dirichlet_values(mesh, config)) vals.push_back(v);
  if (spec.da > 0 && spec.source != "manufactured") {
    const double f = detail::parse_number(spec.source, "source");
    if (f != 0) vals.push_back(f / spec.da);
    if (!vals.empty()) vals.push_back(0.0);  // reaction pulls toward zero
  }
  if (vals.empty()) return std::nullopt;
  const auto [lo, hi] = std::minmax_element(vals.begin(), vals.end());
  return Bounds{*lo, *hi};
}

}  // namespace detail

inline RunArtifacts run_spec(RunSpec spec, const RunOptions& opt = {}) {
  if (spec.dim == 1 && !spec.cuts.empty()) throw ConfigError("cuts need a 2D run");
  if (spec.dim == 2 && spec.ny == 0) spec.ny = spec.nx;  // materialize the default
  RunArtifacts art;
  art.spec = spec;

  dispatch_dim(spec, [&](const auto& mesh, const auto& config) {
    constexpr int Dim = std::decay_t<decltype(mesh)>::dim;
    const CaseResult result = solve_case(mesh, config, spec.tol);
    art.solver = result.report;
    art.assemble_seconds = result.assemble_seconds;
    art.total_seconds = result.total_seconds;
    art.n_dofs = result.report.n;
    art.dofs_per_node = config.method == Method::galerkin ? 1 : 1 + Dim;
    art.bounds = detail::solution_bounds(mesh, config, spec);

    Reference<Dim> ref;
    if (opt.with_reference) {
      if constexpr (Dim == 1) {
        if (detail::closed_form_applies(spec)) {
          const double u = detail::parse_number(spec.velocity, "velocity");
          const double f = detail::parse_number(spec.source, "source");
          ref = reference_from(exact_1d(spec.pe, spec.da, u, f));
          art.reference_kind = "closed-form";
        }
      }
      if (art.reference_kind == "none") {
        RunSpec fine = spec;
        fine.nx *= 4;
        if (spec.dim == 2) fine.ny *= 4;
        auto [fine_mesh, fine_config] = build_problem<Dim>(fine);
        const CaseResult fine_result = solve_case(fine_mesh, fine_config, fine.tol);
        ref = reference_from_field(fine_mesh, fine_result.field);
        art.reference_kind = "fine-grid";
      }
    }
    art.report = error_norms(mesh, result.field, ref, art.bounds);

    if (opt.with_outputs) {
      art.files.emplace_back("solution.csv", io::field_csv(mesh, result.field));
      if constexpr (Dim == 2) {
        if (opt.legacy_points)
          art.files.emplace_back("solution.vtk", io::structured_points(mesh, result.field));
        for (const auto& text : spec.cuts) {
          const io::CutSpec cut = io::parse_cut(text);
          art.files.emplace_back("cut_" + detail::sanitize_filename(cut.label()) + ".csv",
                                 io::cut_csv(mesh, result.field, cut));
        }
      }
      art.files.emplace_back("config.ini", format_run_config(spec));
    }
  });
  return art;
}

// --- side-by-side method comparison ---

struct MethodComparison {
  RunArtifacts galerkin;
  RunArtifacts mmad;
  double dof_ratio = 0;
};

inline MethodComparison compare_methods(RunSpec base, RunOptions opt = {}) {
  opt.with_outputs = false;
  MethodComparison cmp;
  base.method = "galerkin";
  cmp.galerkin = run_spec(base, opt);
  base.method = "mmad";
  cmp.mmad = run_spec(base, opt);
  cmp.dof_ratio =
      static_cast<double>(cmp.mmad.dofs_per_node) / cmp.galerkin.dofs_per_node;
  return cmp;
}

inline std::string comparison_table(const MethodComparison& cmp) {
  char line[256];
  std::string out;
  std::snprintf(line, sizeof line, "%-10s %10s %10s %12s %12s %12s %12s\n", "method", "dofs",
                "dofs/node", "assemble_s", "solve_s", "total_s", "err_combined");
  out += line;
  auto row = [&](const RunArtifacts& a) {
    const double solve_s = a.solver.factor_seconds + a.solver.solve_seconds;
    std::snprintf(line, sizeof line, "%-10s %10d %10d %12.4g %12.4g %12.4g %12.4g\n",
                  a.spec.method.c_str(), a.n_dofs, a.dofs_per_node, a.assemble_seconds, solve_s,
                  a.total_seconds, a.report.combined_norm);
    out += line;
  };
  row(cmp.galerkin);
  row(cmp.mmad);
  std::snprintf(line, sizeof line, "dof ratio  %.3g   wall ratio %.3g\n", cmp.dof_ratio,
                cmp.galerkin.total_seconds > 0
                    ? cmp.mmad.total_seconds / cmp.galerkin.total_seconds
                    : 0.0);
  out += line;
  return out;
}

}  // namespace mmad
