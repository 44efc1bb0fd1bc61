// Command-line front-end: solve one config, run benchmark cases, drive
// mesh-refinement sweeps, or run the verification battery.
//
// Exit codes: 0 ok, 1 config error, 2 solver failure, 3 verification failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>

#include "mmad/benchmarks.hpp"

#include "../vendor/CLI11.hpp"

namespace fs = std::filesystem;
using namespace mmad;

namespace {

fs::path output_root(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("MMAD_OUT_DIR"); env && *env) return env;
  return "out";
}

nlohmann::json versions_json() {
  nlohmann::json v;
  v["library"] = std::string(library_version);
  v["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
               "." + std::to_string(EIGEN_MINOR_VERSION);
  v["compiler"] = __VERSION__;
  return v;
}

std::string run_label(const RunSpec& spec, const std::string& prefix) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_pe%g_da%g_%s", prefix.c_str(), spec.pe, spec.da,
                spec.method.c_str());
  return mmad::detail::sanitize_filename(buf);
}

/// Write all artifact files plus the manifest; on any failure the whole run
/// directory is removed so no partial bundle survives.
void write_run(const fs::path& dir, const RunArtifacts& art,
               const std::optional<PhysicalCoefficients>& phys = {}) {
  try {
    nlohmann::json manifest;
    manifest["schema"] = "mmad-run/1";
    manifest["config"] = spec_to_json(art.spec);
    manifest["versions"] = versions_json();
    manifest["solver"] = {{"n", art.solver.n},
                          {"nnz", art.solver.nnz},
                          {"relative_residual", art.solver.relative_residual}};
    manifest["timings"] = {{"assemble_seconds", art.assemble_seconds},
                           {"factor_seconds", art.solver.factor_seconds},
                           {"solve_seconds", art.solver.solve_seconds},
                           {"total_seconds", art.total_seconds}};
    manifest["reference"] = art.reference_kind;
    if (art.reference_kind != "none")
      manifest["errors"] = {{"l2", art.report.l2_error},
                            {"h1_semi", art.report.h1_semi_error},
                            {"g_norm", art.report.g_norm},
                            {"combined", art.report.combined_norm},
                            {"max_nodal", art.report.max_nodal_error}};
    nlohmann::json osc = {{"total_variation", art.report.total_variation}};
    if (art.bounds) {
      osc["bounds"] = {art.bounds->lo, art.bounds->hi};
      osc["max_overshoot"] = art.report.max_overshoot;
      osc["max_undershoot"] = art.report.max_undershoot;
    }
    manifest["oscillation"] = osc;
    if (phys)
      manifest["physical"] = {{"U_m_per_s", phys->U}, {"B_per_s", phys->B}};

    auto outputs = nlohmann::json::array();
    for (const auto& [name, content] : art.files) {
      const io::OutputRecord rec = io::write_output(dir, name, content);
      outputs.push_back(
          {{"path", rec.path}, {"bytes", rec.bytes}, {"fnv1a64", rec.checksum}});
    }
    manifest["outputs"] = outputs;
    io::atomic_write(dir / "manifest.json", manifest.dump(2) + "\n");
  } catch (...) {
    std::error_code ec;
    fs::remove_all(dir, ec);
    throw;
  }
}

std::string summary_line(const std::string& label, const RunArtifacts& art) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-32s dofs=%-6d total_s=%-9.4g residual=%.2e", label.c_str(),
                art.n_dofs, art.total_seconds, art.solver.relative_residual);
  std::string out = buf;
  if (art.reference_kind != "none") {
    std::snprintf(buf, sizeof buf, " err_combined=%.4g (%s)", art.report.combined_norm,
                  art.reference_kind.c_str());
    out += buf;
  }
  return out;
}

RunSpec load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    // a run manifest: rebuild the run it records
    const auto j = nlohmann::json::parse(text, nullptr, true, true);
    return spec_from_json(j.contains("config") ? j.at("config") : j);
  }
  return parse_run_config(text);
}

int cmd_solve(const RunSpec& spec, bool dump_config, bool with_reference, bool legacy_points,
              const std::string& out_flag, const std::string& label) {
  if (dump_config) {
    RunSpec resolved = spec;
    if (resolved.dim == 2 && resolved.ny == 0) resolved.ny = resolved.nx;
    std::cout << format_run_config(resolved);
    return 0;
  }
  RunOptions opt;
  opt.with_reference = with_reference;
  opt.legacy_points = legacy_points;
  const RunArtifacts art = run_spec(spec, opt);
  const fs::path dir = output_root(out_flag) / label;
  write_run(dir, art);
  std::cout << summary_line(label, art) << "\n";
  std::cout << "wrote " << (dir / "manifest.json").string() << "\n";
  return 0;
}

int cmd_bench(const std::string& id, const std::string& method, std::optional<double> pe,
              std::optional<double> da, bool compare, bool with_reference, bool legacy_points,
              bool parallel, const std::string& out_flag) {
  std::vector<const BenchmarkCase*> cases;
  if (id == "all")
    for (const auto& c : catalog()) cases.push_back(&c);
  else
    cases.push_back(&find_case(id));

  if (pe.has_value() != da.has_value())
    throw ConfigError("--pe and --da must be given together");

  std::vector<std::string> methods;
  if (method == "both") {
    methods = {"galerkin", "mmad"};
  } else {
    parse_method(method);  // validate the name early
    methods = {method};
  }

  struct Job {
    RunSpec spec;
    std::string label;
    std::optional<PhysicalCoefficients> phys;
  };
  std::vector<Job> jobs;
  for (const BenchmarkCase* c : cases) {
    std::vector<SubCase> subs;
    if (pe) subs.push_back({*pe, *da});
    else subs = c->subcases;
    for (const SubCase& sub : subs) {
      std::optional<PhysicalCoefficients> phys;
      if (c->physical_diffusion)
        phys = physical_coefficients(sub.pe, sub.da, *c->physical_diffusion);
      if (compare) {
        RunOptions opt;
        opt.with_reference = true;
        const MethodComparison cmp = compare_methods(spec_for(*c, sub, "galerkin"), opt);
        std::cout << c->id << "  Pe=" << io::format_double(sub.pe)
                  << "  Da=" << io::format_double(sub.da) << "\n"
                  << comparison_table(cmp) << "\n";
        continue;
      }
      for (const std::string& m : methods) {
        RunSpec spec = spec_for(*c, sub, m);
        std::string lbl = run_label(spec, c->id);
        jobs.push_back({std::move(spec), std::move(lbl), phys});
      }
    }
  }

  const fs::path root = output_root(out_flag);
  RunOptions opt;
  opt.with_reference = with_reference;
  opt.legacy_points = legacy_points;
  auto run_one = [&](const Job& job) {
    const RunArtifacts art = run_spec(job.spec, opt);
    write_run(root / job.label, art, job.phys);
    std::string line = summary_line(job.label, art);
    if (job.phys) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "  [U=%.6g m/s, B=%.6g 1/s]", job.phys->U, job.phys->B);
      line += buf;
    }
    return line;
  };

  std::vector<std::string> lines(jobs.size());
  if (parallel) {
    std::vector<std::future<std::string>> futs;
    futs.reserve(jobs.size());
    for (const Job& job : jobs)
      futs.push_back(std::async(std::launch::async, run_one, std::cref(job)));
    for (std::size_t i = 0; i < futs.size(); ++i) lines[i] = futs[i].get();
  } else {
    for (std::size_t i = 0; i < jobs.size(); ++i) lines[i] = run_one(jobs[i]);
  }
  for (const auto& line : lines) std::cout << line << "\n";
  return 0;
}

int cmd_sweep(const std::string& levels_text, bool manufactured, const std::string& case_id,
              int dim, double pe, double da, const std::string& method,
              const std::string& velocity) {
  std::vector<int> levels;
  for (const auto& part : mmad::detail::split(levels_text, ','))
    levels.push_back(static_cast<int>(mmad::detail::parse_number(part, "level")));
  if (levels.size() < 3) throw ConfigError("sweep needs at least 3 levels");

  std::vector<double> hs, errors;
  std::printf("%8s %12s %14s %14s %14s\n", "n", "h", "l2", "h1_semi", "combined");
  for (const int n : levels) {
    RunSpec spec;
    if (manufactured) {
      spec.dim = dim;
      spec.nx = spec.ny = n;
      spec.pe = pe;
      spec.da = da;
      spec.method = method;
      spec.velocity = !velocity.empty() ? velocity
                      : dim == 2 ? "0.70710678118654757,0.70710678118654757"
                                 : "1";
      spec.source = "manufactured";
      spec.dirichlet = dim == 2
                           ? std::vector<std::string>{"left:0", "right:0", "bottom:0", "top:0"}
                           : std::vector<std::string>{"left:0", "right:0"};
    } else {
      const BenchmarkCase& c = find_case(case_id);
      if (c.base.dim != 1)
        throw ConfigError("sweep --case needs the 1D closed-form case (use --manufactured)");
      spec = spec_for(c, {pe, da}, method);
      spec.nx = n;
    }
    RunOptions opt;
    opt.with_reference = true;
    opt.with_outputs = false;
    RunArtifacts art;
    if (manufactured) {
      // measure against the closed-form manufactured field, not a fine grid
      art.spec = spec;
      dispatch_dim(spec, [&](const auto& mesh, const auto& config) {
        constexpr int D = std::decay_t<decltype(mesh)>::dim;
        const CaseResult result = solve_case(mesh, config, spec.tol);
        art.report = error_norms(mesh, result.field, manufactured_reference<D>());
        art.reference_kind = "manufactured";
      });
    } else {
      art = run_spec(spec, opt);
    }
    hs.push_back(1.0 / n);
    errors.push_back(art.report.combined_norm);
    std::printf("%8d %12.6g %14.6g %14.6g %14.6g\n", n, 1.0 / n, art.report.l2_error,
                art.report.h1_semi_error, art.report.combined_norm);
  }
  const double rate = convergence_rate(hs, errors);
  std::printf("rate %.4f\n", rate);
  return 0;
}

int cmd_verify() {
  struct Check {
    std::string name;
    std::string detail;
    bool pass = false;
  };
  std::vector<Check> checks;
  auto record = [&](const std::string& name, bool pass, const std::string& detail) {
    checks.push_back({name, detail, pass});
  };
  char buf[160];

  {
    const double got = gamma_upwind(1.0);
    const double want = 0.31303528549933130;
    std::snprintf(buf, sizeof buf, "gamma(1)=%.17g", got);
    record("upwind-function-value", std::abs(got - want) < 1e-12, buf);

    const double sat = gamma_upwind(50.0);
    std::snprintf(buf, sizeof buf, "gamma(50)=%.17g", sat);
    record("upwind-function-saturation", std::abs(sat - 0.98) < 1e-12, buf);

    // Probe just inside each branch so the genuine slope (~1/3) contributes
    // only ~7e-14; anything larger is a jump between the branches.
    const double below = gamma_upwind(1e-4 * (1 - 1e-9));
    const double above = gamma_upwind(1e-4 * (1 + 1e-9));
    std::snprintf(buf, sizeof buf, "step across switch %.3g", std::abs(above - below));
    record("upwind-series-continuity", std::abs(above - below) < 1e-11, buf);
  }
  {
    const double got = kr_bar(1e3, 10.0, 0.025);
    std::snprintf(buf, sizeof buf, "kr(1e3,10,0.025)=%.17g", got);
    record("reactive-coefficient-value", std::abs(got - 6.5056e-4) < 1e-8, buf);

    const double series = mmad::detail::kr_bracket_series(1e-3);
    const double formula = mmad::detail::kr_bracket_formula(1e-3);
    const double rel = std::abs(series - formula) / std::abs(formula);
    std::snprintf(buf, sizeof buf, "relative gap %.3g", rel);
    record("reactive-series-agreement", rel < 1e-10, buf);

    const double asym = 3600.0 / 6.0 - 1.0;  // Da h^2/6 - 1/Pe at beta = 30
    const double full = kr_bar(1.0, 3600.0, 1.0);
    const double rel2 = std::abs(full - asym) / std::abs(asym);
    std::snprintf(buf, sizeof buf, "relative gap %.3g", rel2);
    record("reactive-large-argument-asymptote", rel2 < 1e-6, buf);
  }
  {
    RunSpec spec;
    spec.dim = 2;
    spec.nx = 16;
    spec.pe = 50;
    spec.da = 1;
    spec.velocity = "0.70710678118654757,0.70710678118654757";
    spec.source = "1";
    spec.method = "mzad";
    spec.dirichlet = {"left:0", "right:0", "bottom:0", "top:0"};
    auto [mesh, config] = build_problem<2>(spec);
    const double gap = mzad_projection_gap(mesh, config);
    std::snprintf(buf, sizeof buf, "max nodal gap %.3g", gap);
    record("projection-mode-reduction", gap < 1e-10, buf);
  }
  {
    const auto mesh = build_grid_mesh(40, 40);
    const double c1 = check_skew_symmetry(mesh, Velocity<2>::constant(Vec<2>(1.0, 0.5)));
    std::snprintf(buf, sizeof buf, "max statistic %.3g", c1);
    record("skew-symmetry-constant-velocity", c1 < 1e-12, buf);

    const double c2 = check_skew_symmetry(mesh, Velocity<2>::rotation());
    std::snprintf(buf, sizeof buf, "max statistic %.3g", c2);
    record("skew-symmetry-rotation", c2 < 1e-12, buf);

    const double c3 = check_skew_symmetry(
        mesh, Velocity<2>::custom([](const Point<2>& x) { return Vec<2>(x[0], 0.0); },
                                  "compressible"));
    std::snprintf(buf, sizeof buf, "max statistic %.3g", c3);
    record("skew-symmetry-negative-control", c3 > 1e-3, buf);
  }
  {
    const BenchmarkCase& c = find_case("ex3");
    auto [mesh, config] = build_problem<2>(spec_for(c, {1e3, 10}, "mmad"));
    const double margin = coercivity_margin(mesh, config);
    std::snprintf(buf, sizeof buf, "min B(v,v)/(M|v|^2) = %.6g", margin);
    record("discrete-coercivity", margin >= 1.0 - 1e-9, buf);
  }

  bool all = true;
  for (const auto& c : checks) {
    std::printf("%s %-36s %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
    all = all && c.pass;
  }
  std::printf("%zu/%zu checks passed\n", static_cast<std::size_t>(std::count_if(
                  checks.begin(), checks.end(), [](const Check& c) { return c.pass; })),
              checks.size());
  return all ? 0 : 3;
}

int run(int argc, char** argv) {
  CLI::App app{"Finite element solver for steady reaction-convection-diffusion problems"};
  app.require_subcommand(1);

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "run one configuration");
  std::string config_path, out_flag, label = "run";
  bool dump_config = false, with_reference = false, legacy_points = false;
  RunSpec flag_spec;
  std::optional<double> mzad_p;
  solve_cmd->add_option("--config", config_path, "config file (key = value, or a manifest)");
  solve_cmd->add_option("--dim", flag_spec.dim, "1 or 2");
  solve_cmd->add_option("--nx", flag_spec.nx, "cells in x");
  solve_cmd->add_option("--ny", flag_spec.ny, "cells in y (2D; default nx)");
  solve_cmd->add_option("--pe", flag_spec.pe, "Peclet number");
  solve_cmd->add_option("--da", flag_spec.da, "Damkohler number");
  solve_cmd->add_option("--velocity", flag_spec.velocity, "ux[,uy] or 'rotation'");
  solve_cmd->add_option("--source", flag_spec.source, "number or 'manufactured'");
  solve_cmd->add_option("--method", flag_spec.method, "galerkin | mmad | mzad");
  solve_cmd->add_option("--mzad-p", mzad_p, "projection-mode diffusion parameter");
  solve_cmd->add_option("--tol", flag_spec.tol, "residual acceptance tolerance");
  solve_cmd->add_option("--dirichlet", flag_spec.dirichlet, "edge:profile (repeatable)");
  solve_cmd->add_option("--neumann", flag_spec.neumann, "edge:profile (repeatable)");
  solve_cmd->add_option("--line", flag_spec.lines, "x0,y0:x1,y1:profile (repeatable)");
  solve_cmd->add_option("--cut", flag_spec.cuts, "x=<v> | y=<v> | diag (repeatable)");
  solve_cmd->add_flag("--dump-config", dump_config, "print the resolved config and exit");
  solve_cmd->add_flag("--reference", with_reference, "also compute reference errors");
  solve_cmd->add_flag("--legacy-points", legacy_points, "emit a structured-points file (2D)");
  solve_cmd->add_option("--out", out_flag, "output directory (default $MMAD_OUT_DIR or ./out)");
  solve_cmd->add_option("--label", label, "run directory name");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "run catalog cases");
  std::string bench_id, bench_method = "both";
  std::optional<double> bench_pe, bench_da;
  bool compare = false, bench_reference = false, bench_legacy = false, parallel = false;
  std::string bench_out;
  bench_cmd->add_option("id", bench_id, "case id (ex1..ex6) or 'all'")->required();
  bench_cmd->add_option("--method", bench_method, "galerkin | mmad | mzad | both");
  bench_cmd->add_option("--pe", bench_pe, "override Peclet (with --da)");
  bench_cmd->add_option("--da", bench_da, "override Damkohler (with --pe)");
  bench_cmd->add_flag("--compare", compare, "print method comparison tables, write nothing");
  bench_cmd->add_flag("--reference", bench_reference, "compute reference errors");
  bench_cmd->add_flag("--legacy-points", bench_legacy, "emit structured-points files");
  bench_cmd->add_flag("--parallel", parallel, "run cases concurrently");
  bench_cmd->add_option("--out", bench_out, "output directory");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "mesh-refinement series");
  std::string levels = "8,16,32,64,128", sweep_case, sweep_method = "mmad", sweep_velocity;
  bool manufactured = false;
  int sweep_dim = 2;
  double sweep_pe = 10, sweep_da = 1;
  sweep_cmd->add_option("--levels", levels, "comma list of cell counts");
  sweep_cmd->add_flag("--manufactured", manufactured, "trigonometric manufactured solution");
  sweep_cmd->add_option("--case", sweep_case, "catalog id with a closed form (ex1)");
  sweep_cmd->add_option("--dim", sweep_dim, "dimension for --manufactured");
  sweep_cmd->add_option("--pe", sweep_pe, "Peclet number");
  sweep_cmd->add_option("--da", sweep_da, "Damkohler number");
  sweep_cmd->add_option("--method", sweep_method, "galerkin | mmad | mzad");
  sweep_cmd->add_option("--velocity", sweep_velocity, "override velocity");

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "run the property-check battery");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (solve_cmd->parsed()) {
      RunSpec spec;
      if (!config_path.empty()) spec = load_config_file(config_path);
      else spec = flag_spec;
      // explicit flags override the config file
      if (!config_path.empty()) {
        if (solve_cmd->count("--dim")) spec.dim = flag_spec.dim;
        if (solve_cmd->count("--nx")) spec.nx = flag_spec.nx;
        if (solve_cmd->count("--ny")) spec.ny = flag_spec.ny;
        if (solve_cmd->count("--pe")) spec.pe = flag_spec.pe;
        if (solve_cmd->count("--da")) spec.da = flag_spec.da;
        if (solve_cmd->count("--velocity")) spec.velocity = flag_spec.velocity;
        if (solve_cmd->count("--source")) spec.source = flag_spec.source;
        if (solve_cmd->count("--method")) spec.method = flag_spec.method;
        if (solve_cmd->count("--tol")) spec.tol = flag_spec.tol;
        if (solve_cmd->count("--dirichlet")) spec.dirichlet = flag_spec.dirichlet;
        if (solve_cmd->count("--neumann")) spec.neumann = flag_spec.neumann;
        if (solve_cmd->count("--line")) spec.lines = flag_spec.lines;
        if (solve_cmd->count("--cut")) spec.cuts = flag_spec.cuts;
      }
      if (mzad_p) spec.mzad_p = mzad_p;
      return cmd_solve(spec, dump_config, with_reference, legacy_points, out_flag, label);
    }
    if (bench_cmd->parsed())
      return cmd_bench(bench_id, bench_method, bench_pe, bench_da, compare, bench_reference,
                       bench_legacy, parallel, bench_out);
    if (sweep_cmd->parsed()) {
      if (manufactured == !sweep_case.empty())
        throw ConfigError("sweep needs exactly one of --manufactured or --case <id>");
      return cmd_sweep(levels, manufactured, sweep_case, sweep_dim, sweep_pe, sweep_da,
                       sweep_method, sweep_velocity);
    }
    if (verify_cmd->parsed()) return cmd_verify();
    throw ConfigError("no subcommand");
  } catch (const SolveFailure& e) {
    std::cerr << "error: solver: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
