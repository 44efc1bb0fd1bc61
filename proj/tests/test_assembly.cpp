#include "mmad/assembly.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <random>

namespace mmad {
namespace {

ScalarFn<1> const_fn1(double v) {
  return [v](const Point<1>&) { return v; };
}
ScalarFn<2> const_fn2(double v) {
  return [v](const Point<2>&) { return v; };
}

TEST(DofMap, LayoutAndCounts) {
  const DofMap g = make_dof_map(101, 1, Method::galerkin);
  EXPECT_EQ(g.dofs_per_node(), 1);
  EXPECT_EQ(g.total_dofs(), 101);
  EXPECT_EQ(g.phi(42), 42);

  const DofMap m = make_dof_map(1681, 2, Method::mmad);
  EXPECT_EQ(m.dofs_per_node(), 3);
  EXPECT_EQ(m.total_dofs(), 5043);
  EXPECT_EQ(m.phi(5), 5);
  EXPECT_EQ(m.g(5, 0), 1691);
  EXPECT_EQ(m.g(5, 1), 1692);

  const DofMap z = make_dof_map(11, 1, Method::mzad);
  EXPECT_EQ(z.dofs_per_node(), 2);
  EXPECT_EQ(z.total_dofs(), 22);
}

TEST(ConvectionMatrix, CenteredDifferenceStencil) {
  const auto mesh = build_interval_mesh(4);
  const auto C = Eigen::MatrixXd(convection_matrix(mesh, Velocity<1>::constant(Vec<1>(1.0))));
  EXPECT_NEAR(C(2, 1), -0.5, 1e-15);
  EXPECT_NEAR(C(2, 2), 0.0, 1e-15);
  EXPECT_NEAR(C(2, 3), 0.5, 1e-15);
  // Row sums vanish: constants are transported without production.
  EXPECT_NEAR(C.rowwise().sum().cwiseAbs().maxCoeff(), 0.0, 1e-15);
}

TEST(MassMatrix, IntervalStencilAndSquareTotal) {
  const auto mesh = build_interval_mesh(4);
  const auto M = Eigen::MatrixXd(mass_matrix(mesh));
  const double h = 0.25;
  EXPECT_NEAR(M(2, 1), h / 6.0, 1e-16);
  EXPECT_NEAR(M(2, 2), 4.0 * h / 6.0, 1e-16);
  EXPECT_NEAR(M(2, 3), h / 6.0, 1e-16);

  const auto grid = build_grid_mesh(7, 7);
  EXPECT_NEAR(Eigen::MatrixXd(mass_matrix(grid)).sum(), 1.0, 1e-14);
}

TEST(Assemble, IntervalDiffusionStencil) {
  const auto mesh = build_interval_mesh(4);
  ProblemConfig<1> config;
  config.pe = 1.0;
  config.velocity = Velocity<1>::constant(Vec<1>(0.0));
  const auto sys = assemble(mesh, config);
  const Eigen::MatrixXd A(sys.matrix());
  EXPECT_NEAR(A(2, 1), -4.0, 1e-13);
  EXPECT_NEAR(A(2, 2), 8.0, 1e-13);
  EXPECT_NEAR(A(2, 3), -4.0, 1e-13);
}

TEST(Assemble, SquareLaplaceStencil) {
  // Bilinear 9-point stencil on a uniform square grid: 8/3 at the center,
  // -1/3 on all eight neighbours, independent of h.
  const auto mesh = build_grid_mesh(2, 2);
  ProblemConfig<2> config;
  config.pe = 1.0;
  config.velocity = Velocity<2>::constant(Vec<2>(0.0, 0.0));
  const auto sys = assemble(mesh, config);
  const Eigen::MatrixXd A(sys.matrix());
  EXPECT_NEAR(A(4, 4), 8.0 / 3.0, 1e-14);
  for (int nb : {0, 1, 2, 3, 5, 6, 7, 8}) EXPECT_NEAR(A(4, nb), -1.0 / 3.0, 1e-14);
}

TEST(Assemble, ElementOrderInvariance) {
  auto mesh = build_grid_mesh(8, 8);
  ProblemConfig<2> config;
  config.pe = 100.0;
  config.da = 1.0;
  config.velocity = Velocity<2>::rotation();
  config.source = const_fn2(1.0);
  config.method = Method::mmad;

  const auto sys1 = assemble(mesh, config);
  auto shuffled = mesh;
  std::mt19937 rng(7);
  std::shuffle(shuffled.elements.begin(), shuffled.elements.end(), rng);
  const auto sys2 = assemble(shuffled, config);

  const Eigen::MatrixXd A1(sys1.matrix()), A2(sys2.matrix());
  EXPECT_LE((A1 - A2).cwiseAbs().maxCoeff(), 1e-13 * A1.cwiseAbs().maxCoeff());
  EXPECT_LE((sys1.rhs - sys2.rhs).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Assemble, AuxiliaryBlockSymmetricPositiveDefinite) {
  const auto mesh = build_grid_mesh(4, 4);
  ProblemConfig<2> config;
  config.pe = 100.0;
  config.da = 1.0;
  config.velocity = Velocity<2>::constant(Vec<2>(1.0, 0.5));
  config.method = Method::mmad;
  const auto sys = assemble(mesh, config);
  const int n = mesh.n_nodes();
  const Eigen::MatrixXd A(sys.matrix());
  const Eigen::MatrixXd G = A.block(n, n, 2 * n, 2 * n);
  EXPECT_LE((G - G.transpose()).cwiseAbs().maxCoeff(), 1e-15);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G);
  EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
}

TEST(Assemble, CoupledPatchTestInterval) {
  // phi = x with u = 1, Da = 0, F = 1 is reproduced exactly; the auxiliary
  // field settles at the constant H/(1+H) rather than at grad(phi).
  const auto mesh = build_interval_mesh(10);
  ProblemConfig<1> config;
  config.pe = 50.0;
  config.da = 0.0;
  config.velocity = Velocity<1>::constant(Vec<1>(1.0));
  config.source = const_fn1(1.0);
  config.method = Method::mmad;
  config.regions = {dirichlet_region(mesh, Edge::left, const_fn1(0.0)),
                    dirichlet_region(mesh, Edge::right, const_fn1(1.0))};

  const auto res = solve_case(mesh, config);
  const double H = kc_bar<1>(Vec<1>(1.0), mesh.h, config.pe);
  const double g_expected = H / (1.0 + H);
  for (int i = 0; i < mesh.n_nodes(); ++i) {
    EXPECT_NEAR(res.field.phi[i], mesh.nodes[i][0], 1e-12);
    EXPECT_NEAR(res.field.g(i, 0), g_expected, 1e-12);
  }

  // e = grad(phi) - g = 1/(1+H) at every quadrature point.
  const auto strain = generalized_strain(mesh, res.field);
  EXPECT_EQ(static_cast<int>(strain.size()), mesh.n_elements() * 2);
  for (const auto& s : strain) EXPECT_NEAR(s.e[0], 1.0 / (1.0 + H), 1e-12);
}

TEST(Assemble, CoupledPatchTestSquare) {
  // phi = x1 with u = (1,0): g is the constant (H+K)^{-1} H (1,0)^T.
  const auto mesh = build_grid_mesh(8, 8);
  ProblemConfig<2> config;
  config.pe = 20.0;
  config.da = 2.0;
  config.velocity = Velocity<2>::constant(Vec<2>(1.0, 0.0));
  config.source = [](const Point<2>& x) { return 2.0 * x[0] + 1.0; };  // Da phi + u.grad phi
  config.method = Method::mmad;
  ScalarFn<2> ramp = [](const Point<2>& x) { return x[0]; };
  config.regions = {dirichlet_region(mesh, Edge::left, ramp),
                    dirichlet_region(mesh, Edge::right, ramp),
                    dirichlet_region(mesh, Edge::bottom, ramp),
                    dirichlet_region(mesh, Edge::top, ramp)};

  const auto res = solve_case(mesh, config);
  const auto tens = build_tensors<2>(Vec<2>(1.0, 0.0), mesh.h, config.pe, config.da);
  const Vec<2> g_expected = (tens.H + tens.K).inverse() * (tens.H * Vec<2>(1.0, 0.0));
  for (int i = 0; i < mesh.n_nodes(); ++i) {
    EXPECT_NEAR(res.field.phi[i], mesh.nodes[i][0], 1e-12);
    EXPECT_NEAR(res.field.g(i, 0), g_expected[0], 1e-12);
    EXPECT_NEAR(res.field.g(i, 1), g_expected[1], 1e-12);
  }
}

TEST(Dirichlet, RowColumnEliminationAndIdempotence) {
  const auto mesh = build_interval_mesh(5);
  ProblemConfig<1> config;
  config.pe = 1.0;
  config.velocity = Velocity<1>::constant(Vec<1>(1.0));
  config.source = const_fn1(1.0);
  config.regions = {dirichlet_region(mesh, Edge::left, const_fn1(0.0)),
                    dirichlet_region(mesh, Edge::right, const_fn1(1.0))};

  auto sys = assemble(mesh, config);
  const Eigen::VectorXd rhs_before = sys.rhs;
  apply_dirichlet(sys, mesh, config);
  const Eigen::MatrixXd A(sys.matrix());
  const int n = mesh.n_nodes() - 1;

  for (int dof : {0, n}) {
    for (int j = 0; j < mesh.n_nodes(); ++j) {
      EXPECT_EQ(A(dof, j), dof == j ? 1.0 : 0.0);
      EXPECT_EQ(A(j, dof), dof == j ? 1.0 : 0.0);
    }
  }
  EXPECT_EQ(sys.rhs[0], 0.0);
  EXPECT_EQ(sys.rhs[n], 1.0);
  // Column elimination lifted the prescribed value into neighbouring rows.
  EXPECT_NE(sys.rhs[n - 1], rhs_before[n - 1]);

  const auto snapshot = sys.rhs;
  const Eigen::MatrixXd A_before(sys.matrix());
  apply_dirichlet(sys, mesh, config);  // no-op
  EXPECT_EQ(sys.rhs, snapshot);
  EXPECT_TRUE(Eigen::MatrixXd(sys.matrix()) == A_before);
}

TEST(Dirichlet, LaterRegionWinsSharedNodes) {
  const auto mesh = build_interval_mesh(4);
  ProblemConfig<1> config;
  config.pe = 1.0;
  config.velocity = Velocity<1>::constant(Vec<1>(0.0));
  config.regions = {dirichlet_region(mesh, Edge::left, const_fn1(5.0)),
                    dirichlet_region(mesh, Edge::left, const_fn1(7.0)),
                    dirichlet_region(mesh, Edge::right, const_fn1(2.0))};
  const auto values = dirichlet_values(mesh, config);
  ASSERT_EQ(values.size(), 2u);
  EXPECT_EQ(values[0].first, 0);
  EXPECT_EQ(values[0].second, 7.0);
  EXPECT_EQ(values[1].first, 4);
  EXPECT_EQ(values[1].second, 2.0);
}

TEST(Neumann, IntervalFluxGivesLinearSolution)
{
  // -phi'' = 0, phi(0) = 0, phi'(1) = 2  =>  phi = 2x.
  const auto mesh = build_interval_mesh(10);
  ProblemConfig<1> config;
  config.pe = 1.0;
  config.velocity = Velocity<1>::constant(Vec<1>(0.0));
  config.regions = {dirichlet_region(mesh, Edge::left, const_fn1(0.0)),
                    neumann_region(mesh, Edge::right, const_fn1(2.0))};
  const auto res = solve_case(mesh, config);
  for (int i = 0; i < mesh.n_nodes(); ++i)
    EXPECT_NEAR(res.field.phi[i], 2.0 * mesh.nodes[i][0], 1e-12);
}

TEST(Neumann, SquareFluxGivesLinearSolution) {
  // Laplace with phi = 0 on the left and unit flux on the right => phi = x1.
  const auto mesh = build_grid_mesh(8, 8);
  ProblemConfig<2> config;
  config.pe = 1.0;
  config.velocity = Velocity<2>::constant(Vec<2>(0.0, 0.0));
  config.regions = {dirichlet_region(mesh, Edge::left, const_fn2(0.0)),
                    neumann_region(mesh, Edge::right, const_fn2(1.0))};
  const auto res = solve_case(mesh, config);
  for (int i = 0; i < mesh.n_nodes(); ++i)
    EXPECT_NEAR(res.field.phi[i], mesh.nodes[i][0], 1e-12);
}

TEST(Assemble, RejectsNonFiniteSource) {
  const auto mesh = build_interval_mesh(4);
  ProblemConfig<1> config;
  config.pe = 1.0;
  config.velocity = Velocity<1>::constant(Vec<1>(1.0));
  config.source = const_fn1(std::numeric_limits<double>::quiet_NaN());
  EXPECT_THROW(assemble(mesh, config), ConfigError);
}

TEST(SolveCase, MatchesManualPipeline) {
  const auto mesh = build_interval_mesh(16);
  ProblemConfig<1> config;
  config.pe = 10.0;
  config.da = 1.0;
  config.velocity = Velocity<1>::constant(Vec<1>(1.0));
  config.source = const_fn1(1.0);
  config.method = Method::mmad;
  config.regions = {dirichlet_region(mesh, Edge::left, const_fn1(0.0)),
                    dirichlet_region(mesh, Edge::right, const_fn1(0.0))};

  const auto res = solve_case(mesh, config);

  auto sys = assemble(mesh, config);
  apply_dirichlet(sys, mesh, config);
  Eigen::VectorXd x;
  solve(sys.matrix(), sys.rhs, x);
  for (int i = 0; i < mesh.n_nodes(); ++i) {
    EXPECT_EQ(res.field.phi[i], x[sys.dofs.phi(i)]);
    EXPECT_EQ(res.field.g(i, 0), x[sys.dofs.g(i, 0)]);
  }
}

}  // namespace
}  // namespace mmad
