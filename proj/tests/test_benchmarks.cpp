#include "mmad/benchmarks.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <string>

namespace mmad {
namespace {

const std::string* find_file(const RunArtifacts& art, const std::string& name) {
  for (const auto& [n, content] : art.files)
    if (n == name) return &content;
  return nullptr;
}

TEST(Catalog, ListsSixCasesInOrder) {
  const auto& cases = catalog();
  ASSERT_EQ(cases.size(), 6u);
  for (int i = 0; i < 6; ++i) EXPECT_EQ(cases[i].id, "ex" + std::to_string(i + 1));
  EXPECT_THROW(find_case("ex9"), ConfigError);
  EXPECT_EQ(find_case("ex4").base.velocity, "rotation");
}

TEST(Catalog, CaseShapesAndSubcases) {
  for (const auto& c : catalog()) {
    EXPECT_FALSE(c.title.empty());
    EXPECT_FALSE(c.subcases.empty());
    for (const auto& s : c.subcases) {
      EXPECT_GT(s.pe, 0.0);
      EXPECT_GE(s.da, 0.0);
    }
    if (c.id == "ex1") {
      EXPECT_EQ(c.base.dim, 1);
      EXPECT_EQ(c.base.nx, 100);
    } else {
      EXPECT_EQ(c.base.dim, 2);
      EXPECT_EQ(c.base.nx, 40);
    }
  }
  auto has_subcase = [](const BenchmarkCase& c, double pe, double da) {
    for (const auto& s : c.subcases)
      if (s.pe == pe && s.da == da) return true;
    return false;
  };
  EXPECT_TRUE(has_subcase(find_case("ex1"), 1e6, 1e-2));
  EXPECT_TRUE(has_subcase(find_case("ex3"), 1e3, 10));
  EXPECT_TRUE(has_subcase(find_case("ex4"), 1, 1e6));
  EXPECT_TRUE(has_subcase(find_case("ex4"), 1e6, 1e-2));
  EXPECT_TRUE(has_subcase(find_case("ex6"), 1e4, 1e-2));
}

TEST(Catalog, EveryEdgeHasExactlyOneCondition) {
  for (const auto& c : catalog()) {
    if (c.base.dim != 2) continue;
    std::multiset<std::string> edges;
    for (const auto& e : c.base.dirichlet) edges.insert(e.substr(0, e.find(':')));
    for (const auto& e : c.base.neumann) edges.insert(e.substr(0, e.find(':')));
    for (const std::string edge : {"left", "right", "bottom", "top"})
      EXPECT_EQ(edges.count(edge), 1u) << c.id << " edge " << edge;
  }
}

TEST(Catalog, AllBaseSpecsBuild) {
  for (const auto& c : catalog()) {
    RunSpec spec = spec_for(c, c.subcases.front(), "mmad");
    EXPECT_NO_THROW(dispatch_dim(spec, [](const auto& mesh, const auto& config) {
      EXPECT_GT(mesh.n_nodes(), 0);
      EXPECT_NO_THROW(config.validate(mesh));
    })) << c.id;
  }
}

TEST(PhysicalUnits, CoefficientsFromDiffusion) {
  const auto& ex6 = find_case("ex6");
  ASSERT_TRUE(ex6.physical_diffusion.has_value());
  const auto c = physical_coefficients(1e4, 1e-2, *ex6.physical_diffusion);
  EXPECT_DOUBLE_EQ(c.U, 1.0);
  EXPECT_DOUBLE_EQ(c.B, 0.01);
  // Round trip back to the dimensionless pair.
  EXPECT_DOUBLE_EQ(c.U * 1.0 / *ex6.physical_diffusion, 1e4);
  EXPECT_DOUBLE_EQ(c.B * 1.0 / c.U, 1e-2);
  EXPECT_THROW(physical_coefficients(0.0, 1.0, 1e-4), ConfigError);
  EXPECT_THROW(physical_coefficients(1.0, 1.0, 0.0), ConfigError);
  EXPECT_THROW(physical_coefficients(1.0, 1.0, 1e-4, 0.0), ConfigError);
}

TEST(SpecFor, OverlaysSubcaseAndMethod) {
  const auto& c = find_case("ex3");
  const RunSpec spec = spec_for(c, SubCase{1e3, 10}, "mmad");
  EXPECT_EQ(spec.pe, 1e3);
  EXPECT_EQ(spec.da, 10.0);
  EXPECT_EQ(spec.method, "mmad");
  EXPECT_EQ(spec.velocity, c.base.velocity);
  EXPECT_EQ(spec.dirichlet, c.base.dirichlet);
}

TEST(ClosedFormGate, AppliesOnlyToPinnedConstantRuns) {
  RunSpec s = find_case("ex1").base;
  s.pe = 1;
  s.da = 1e4;
  EXPECT_TRUE(detail::closed_form_applies(s));

  RunSpec two_d = s;
  two_d.dim = 2;
  EXPECT_FALSE(detail::closed_form_applies(two_d));

  RunSpec flux = s;
  flux.neumann = {"right:0"};
  EXPECT_FALSE(detail::closed_form_applies(flux));

  RunSpec lifted = s;
  lifted.dirichlet = {"left:0", "right:1"};
  EXPECT_FALSE(detail::closed_form_applies(lifted));

  RunSpec manufactured = s;
  manufactured.source = "manufactured";
  EXPECT_FALSE(detail::closed_form_applies(manufactured));

  RunSpec stagnant = s;
  stagnant.velocity = "0";
  stagnant.da = 0;
  EXPECT_FALSE(detail::closed_form_applies(stagnant));
  stagnant.da = 1.0;
  EXPECT_TRUE(detail::closed_form_applies(stagnant));
}

TEST(RunSpecExecution, ClosedFormReferenceOnReactionDominatedCase) {
  const RunSpec spec = spec_for(find_case("ex1"), SubCase{1, 1e4}, "galerkin");
  const auto art = run_spec(spec, RunOptions{true, true, false});
  EXPECT_EQ(art.reference_kind, "closed-form");
  EXPECT_EQ(art.n_dofs, 101);
  EXPECT_EQ(art.dofs_per_node, 1);
  ASSERT_TRUE(art.bounds.has_value());
  EXPECT_DOUBLE_EQ(art.bounds->hi, 1e-4);
  EXPECT_DOUBLE_EQ(art.bounds->lo, 0.0);
  EXPECT_LT(art.report.max_nodal_error, 5e-5);
  EXPECT_GT(art.report.l2_error, 0.0);
  ASSERT_NE(find_file(art, "solution.csv"), nullptr);
  ASSERT_NE(find_file(art, "config.ini"), nullptr);
  EXPECT_EQ(find_file(art, "solution.vtk"), nullptr);
}

TEST(RunSpecExecution, FineGridReferenceForSquareRuns) {
  RunSpec spec;
  spec.dim = 2;
  spec.nx = 8;
  spec.pe = 10;
  spec.da = 1;
  spec.velocity = "1,0";
  spec.source = "1";
  spec.dirichlet = {"left:0", "right:0", "bottom:0", "top:0"};
  spec.method = "mmad";
  const auto art = run_spec(spec, RunOptions{true, false, false});
  EXPECT_EQ(art.reference_kind, "fine-grid");
  EXPECT_GT(art.report.l2_error, 0.0);
  EXPECT_TRUE(std::isfinite(art.report.combined_norm));
  EXPECT_TRUE(art.files.empty());
}

TEST(RunSpecExecution, DeterministicSolutionBytes) {
  const RunSpec spec = spec_for(find_case("ex3"), SubCase{1e3, 10}, "mmad");
  const auto a = run_spec(spec);
  const auto b = run_spec(spec);
  const auto* csv_a = find_file(a, "solution.csv");
  const auto* csv_b = find_file(b, "solution.csv");
  ASSERT_NE(csv_a, nullptr);
  ASSERT_NE(csv_b, nullptr);
  EXPECT_EQ(*csv_a, *csv_b);
  EXPECT_EQ(a.n_dofs, 5043);
  EXPECT_EQ(a.dofs_per_node, 3);
}

TEST(RunSpecExecution, ProjectionModeCarriesOneExtraFieldInOneD) {
  const RunSpec spec = spec_for(find_case("ex1"), SubCase{50, 1}, "mzad");
  const auto art = run_spec(spec, RunOptions{false, false, false});
  EXPECT_EQ(art.dofs_per_node, 2);
  EXPECT_EQ(art.n_dofs, 202);
}

TEST(RunSpecExecution, CutsAndLegacyPointsLandInFiles) {
  RunSpec spec = spec_for(find_case("ex3"), SubCase{1e2, 1e2}, "galerkin");
  spec.cuts = {"y=0.5", "diag"};
  RunOptions opt;
  opt.legacy_points = true;
  const auto art = run_spec(spec, opt);
  EXPECT_NE(find_file(art, "solution.csv"), nullptr);
  EXPECT_NE(find_file(art, "solution.vtk"), nullptr);
  EXPECT_NE(find_file(art, "cut_y_0.5.csv"), nullptr);
  EXPECT_NE(find_file(art, "cut_diag.csv"), nullptr);
  const auto* cut = find_file(art, "cut_y_0.5.csv");
  EXPECT_EQ(cut->substr(0, 6), "s,phi\n");
  EXPECT_EQ(std::count(cut->begin(), cut->end(), '\n'), 42);
}

TEST(RunSpecExecution, RejectsCutsOnIntervalRuns) {
  RunSpec spec = spec_for(find_case("ex1"), SubCase{1, 1}, "galerkin");
  spec.cuts = {"y=0.5"};
  EXPECT_THROW(run_spec(spec), ConfigError);
}

TEST(RunSpecExecution, ConfigFileRoundTripsTheResolvedSpec) {
  RunSpec spec = spec_for(find_case("ex3"), SubCase{1e3, 10}, "mmad");
  spec.cuts = {"y=0.25:interp"};
  const auto art = run_spec(spec);
  const auto* ini = find_file(art, "config.ini");
  ASSERT_NE(ini, nullptr);
  EXPECT_EQ(parse_run_config(*ini), art.spec);
  EXPECT_EQ(art.spec.ny, 40);  // materialized default

  // The JSON body embedded in manifests round-trips too.
  EXPECT_EQ(spec_from_json(spec_to_json(art.spec)), art.spec);
}

TEST(MethodComparisonTable, DofRatioMatchesLayout) {
  RunSpec line = spec_for(find_case("ex1"), SubCase{1e2, 1e2}, "galerkin");
  const auto cmp1 = compare_methods(line);
  EXPECT_EQ(cmp1.dof_ratio, 2.0);
  EXPECT_EQ(cmp1.galerkin.n_dofs, 101);
  EXPECT_EQ(cmp1.mmad.n_dofs, 202);

  RunSpec square = spec_for(find_case("ex3"), SubCase{1e3, 10}, "galerkin");
  const auto cmp2 = compare_methods(square);
  EXPECT_EQ(cmp2.dof_ratio, 3.0);
  const std::string table = comparison_table(cmp2);
  EXPECT_NE(table.find("galerkin"), std::string::npos);
  EXPECT_NE(table.find("mmad"), std::string::npos);
  EXPECT_NE(table.find("dof ratio"), std::string::npos);
}

TEST(RotatingHill, ConvectedCrestDecaysDownstream) {
  // The crest enters at (0.5, 0.25) with value 1 and is carried along the
  // circle r = sqrt(0.3125) while the reaction eats it away.
  const RunSpec spec = spec_for(find_case("ex4"), SubCase{1e2, 1}, "mmad");
  auto [mesh, config] = build_problem<2>(spec);
  const auto res = solve_case(mesh, config, spec.tol);
  const FieldEvaluator<2> ev(mesh, res.field);

  const double r = std::sqrt(0.3125);
  std::vector<double> crest;
  for (double deg : {30.0, 40.0, 50.0, 60.0, 70.0, 80.0}) {
    const double th = deg * M_PI / 180.0;
    crest.push_back(ev.phi(Point<2>(r * std::cos(th), r * std::sin(th))));
  }
  EXPECT_GT(crest.front(), 0.6);
  EXPECT_LT(crest.back(), 0.6 * crest.front());
  EXPECT_LE(monotone_violation(crest, false), 5e-3);

  // The prescribed line is honoured exactly at its peak node.
  const int peak = 10 * 41 + 20;  // (0.5, 0.25)
  EXPECT_NEAR(res.field.phi[peak], 1.0, 1e-12);
}

}  // namespace
}  // namespace mmad
