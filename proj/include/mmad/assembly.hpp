#pragma once

#include <Eigen/Sparse>
#include <chrono>
#include <cmath>
#include <vector>

#include "mmad/fem.hpp"
#include "mmad/linsolve.hpp"
#include "mmad/mesh.hpp"
#include "mmad/problem.hpp"
#include "mmad/stabilization.hpp"

namespace mmad {

/// Dof layout: all phi first (one per node), then g node-major
/// (dim components per node). Galerkin carries no g block.
struct DofMap {
  int n_nodes = 0;
  int dim = 1;
  bool with_g = false;

  int dofs_per_node() const { return with_g ? 1 + dim : 1; }
  int total_dofs() const { return n_nodes * dofs_per_node(); }
  int phi(int node) const { return node; }
  int g(int node, int comp) const { return n_nodes + node * dim + comp; }
};

inline DofMap make_dof_map(int n_nodes, int dim, Method method) {
  return DofMap{n_nodes, dim, method != Method::galerkin};
}

struct SparseSystem {
  DofMap dofs;
  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::VectorXd rhs;
  bool dirichlet_applied = false;

  Eigen::SparseMatrix<double> matrix() const {
    Eigen::SparseMatrix<double> A(dofs.total_dofs(), dofs.total_dofs());
    A.setFromTriplets(triplets.begin(), triplets.end());
    return A;
  }
};

namespace detail {

/// Shape data at the rule points of one representative element; valid for
/// every element of a uniform structured mesh (all are translates).
template <int Dim>
struct ElementBasis {
  QuadratureRule<Dim> rule;
  std::vector<ShapeEval<Dim>> at;        // per rule point
  std::vector<Point<Dim>> offset;        // physical qp minus corner 0
  Point<Dim> centroid_offset;

  explicit ElementBasis(const StructuredMesh<Dim>& mesh) : rule(gauss_rule<Dim>()) {
    const auto corners = mesh.element_corners(0);
    const Point<Dim> base = corners[0];
    for (int q = 0; q < rule.size(); ++q) {
      at.push_back(shape_eval(corners, rule.points[q]));
      offset.push_back(map_to_physical<Dim>(corners, rule.points[q]) - base);
    }
    centroid_offset = mesh.element_centroid(0) - base;
  }
};

}  // namespace detail

/// Assemble the full (pre-Dirichlet) system for the configured method.
/// Neumann edge data enters the load vector here; Dirichlet rows are left
/// untouched for apply_dirichlet.
template <int Dim>
SparseSystem assemble(const StructuredMesh<Dim>& mesh, const ProblemConfig<Dim>& config) {
  config.validate(mesh);
  constexpr int nen = StructuredMesh<Dim>::nodes_per_element;

  SparseSystem sys;
  sys.dofs = make_dof_map(mesh.n_nodes(), Dim, config.method);
  sys.rhs = Eigen::VectorXd::Zero(sys.dofs.total_dofs());

  const detail::ElementBasis<Dim> basis(mesh);
  const int nqp = basis.rule.size();
  const bool coupled = sys.dofs.with_g;
  const int nloc = coupled ? nen * (1 + Dim) : nen;
  const double inv_pe = 1.0 / config.pe;

  sys.triplets.reserve(static_cast<size_t>(mesh.n_elements()) * nloc * nloc);
  Eigen::MatrixXd Ke(nloc, nloc);
  Eigen::VectorXd Fe(nloc);
  // local dof order: phi_0..phi_{nen-1}, then g node-major
  auto lphi = [](int a) { return a; };
  auto lg = [nen](int a, int c) { return nen + a * Dim + c; };

  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto& conn = mesh.elements[e];
    const Point<Dim> base = mesh.nodes[conn[0]];

    Tensors<Dim> tens;
    if (coupled) {
      if (config.method == Method::mzad) {
        double p;
        if (config.mzad_p) {
          p = *config.mzad_p;
        } else {
          const auto ref = build_tensors<Dim>(
              config.velocity(Point<Dim>(base + basis.centroid_offset)), mesh.h, config.pe,
              config.da);
          p = ref.kc + ref.kr;
        }
        if (!(p > 0))
          throw ConfigError("mzad projection weight vanishes (set mzad_p or use u != 0 / Da > 0)");
        tens = build_tensors_mzad<Dim>(p);
      } else {
        tens = build_tensors<Dim>(config.velocity(Point<Dim>(base + basis.centroid_offset)),
                                  mesh.h, config.pe, config.da);
      }
    }

    Ke.setZero();
    Fe.setZero();
    for (int q = 0; q < nqp; ++q) {
      const ShapeEval<Dim>& s = basis.at[q];
      const double w = basis.rule.weights[q] * s.detJ;
      const Point<Dim> xq = base + basis.offset[q];
      const Vec<Dim> uq = config.velocity(xq);
      const double fq = config.source_at(xq);

      for (int a = 0; a < nen; ++a) {
        Fe(lphi(a)) += w * s.N[a] * fq;
        for (int b = 0; b < nen; ++b) {
          double v = config.da * s.N[a] * s.N[b] + s.N[a] * uq.dot(s.grad[b]) +
                     inv_pe * s.grad[a].dot(s.grad[b]);
          if (coupled) v += s.grad[a].dot(tens.H * s.grad[b]);
          Ke(lphi(a), lphi(b)) += w * v;
        }
      }

      if (coupled) {
        for (int a = 0; a < nen; ++a)
          for (int b = 0; b < nen; ++b) {
            const Vec<Dim> Hga = tens.H * s.grad[a];
            const Vec<Dim> Hgb = tens.H * s.grad[b];
            for (int c = 0; c < Dim; ++c) {
              Ke(lphi(a), lg(b, c)) -= w * s.N[b] * Hga[c];
              Ke(lg(a, c), lphi(b)) -= w * s.N[a] * Hgb[c];
            }
            const double nn = w * s.N[a] * s.N[b];
            const double gg = w * tens.A * s.grad[a].dot(s.grad[b]);
            for (int c = 0; c < Dim; ++c)
              for (int d = 0; d < Dim; ++d) {
                double v = nn * (tens.H(c, d) + tens.K(c, d));
                if (c == d) v += gg;
                Ke(lg(a, c), lg(b, d)) += v;
              }
          }
      }
    }

    for (int a = 0; a < nen; ++a) {
      const int ga = sys.dofs.phi(conn[a]);
      sys.rhs[ga] += Fe(lphi(a));
      for (int b = 0; b < nen; ++b)
        sys.triplets.emplace_back(ga, sys.dofs.phi(conn[b]), Ke(lphi(a), lphi(b)));
      if (coupled)
        for (int c = 0; c < Dim; ++c) {
          const int gac = sys.dofs.g(conn[a], c);
          for (int b = 0; b < nen; ++b) {
            sys.triplets.emplace_back(ga, sys.dofs.g(conn[b], c), Ke(lphi(a), lg(b, c)));
            sys.triplets.emplace_back(gac, sys.dofs.phi(conn[b]), Ke(lg(a, c), lphi(b)));
            for (int d = 0; d < Dim; ++d)
              sys.triplets.emplace_back(gac, sys.dofs.g(conn[b], d), Ke(lg(a, c), lg(b, d)));
          }
        }
    }
  }

  // Neumann flux contributions (natural data; absent regions mean t = 0)
  for (const auto& r : config.regions) {
    if (r.kind != RegionKind::neumann || !r.profile) continue;
    if constexpr (Dim == 1) {
      for (int id : r.node_ids) sys.rhs[sys.dofs.phi(id)] += r.profile(mesh.nodes[id]);
    } else {
      const double p = 1.0 / std::sqrt(3.0);
      for (const auto& face : boundary_faces(mesh, r.edge)) {
        const Point<2> xa = mesh.nodes[face[0]], xb = mesh.nodes[face[1]];
        const double half_len = 0.5 * (xb - xa).norm();
        for (double xi : {-p, p}) {
          const double Na = 0.5 * (1 - xi), Nb = 0.5 * (1 + xi);
          const Point<2> x = Na * xa + Nb * xb;
          const double t = r.profile(x);
          sys.rhs[sys.dofs.phi(face[0])] += half_len * Na * t;
          sys.rhs[sys.dofs.phi(face[1])] += half_len * Nb * t;
        }
      }
    }
  }

  for (const auto& t : sys.triplets)
    if (!std::isfinite(t.value())) throw ConfigError("non-finite matrix entry assembled");
  if (!sys.rhs.allFinite()) throw ConfigError("non-finite load entry assembled");
  return sys;
}

/// Collect the prescribed phi values, region order deciding conflicts
/// (later regions win, e.g. at shared corners).
template <int Dim>
std::vector<std::pair<int, double>> dirichlet_values(const StructuredMesh<Dim>& mesh,
                                                     const ProblemConfig<Dim>& config) {
  std::vector<char> seen(mesh.n_nodes(), 0);
  std::vector<double> val(mesh.n_nodes(), 0.0);
  for (const auto& r : config.regions) {
    if (r.kind == RegionKind::neumann) continue;
    for (int id : r.node_ids) {
      seen[id] = 1;
      val[id] = r.profile(mesh.nodes[id]);
    }
  }
  std::vector<std::pair<int, double>> out;
  for (int id = 0; id < mesh.n_nodes(); ++id)
    if (seen[id]) out.emplace_back(id, val[id]);
  return out;
}

/// Row replacement with unit diagonal plus symmetric column elimination
/// (the lift moves known values to the rhs). Only phi dofs are
/// constrained; the auxiliary field carries no essential conditions.
template <int Dim>
void apply_dirichlet(SparseSystem& sys, const StructuredMesh<Dim>& mesh,
                     const ProblemConfig<Dim>& config) {
  if (sys.dirichlet_applied) return;  // idempotent
  const auto values = dirichlet_values(mesh, config);

  const int n = sys.dofs.total_dofs();
  std::vector<char> constrained(n, 0);
  std::vector<double> val(n, 0.0);
  for (const auto& [node, v] : values) {
    const int dof = sys.dofs.phi(node);
    constrained[dof] = 1;
    val[dof] = v;
  }

  std::vector<Eigen::Triplet<double>> kept;
  kept.reserve(sys.triplets.size());
  for (const auto& t : sys.triplets) {
    if (constrained[t.row()]) continue;
    if (constrained[t.col()]) {
      sys.rhs[t.row()] -= t.value() * val[t.col()];
      continue;
    }
    kept.push_back(t);
  }
  for (int dof = 0; dof < n; ++dof)
    if (constrained[dof]) {
      kept.emplace_back(dof, dof, 1.0);
      sys.rhs[dof] = val[dof];
    }
  sys.triplets = std::move(kept);
  sys.dirichlet_applied = true;
}

/// Convection block alone (Galerkin layout): C_ab = (N_a, u . grad N_b).
template <int Dim>
Eigen::SparseMatrix<double> convection_matrix(const StructuredMesh<Dim>& mesh,
                                              const Velocity<Dim>& velocity) {
  constexpr int nen = StructuredMesh<Dim>::nodes_per_element;
  const detail::ElementBasis<Dim> basis(mesh);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(mesh.n_elements()) * nen * nen);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto& conn = mesh.elements[e];
    const Point<Dim> base = mesh.nodes[conn[0]];
    for (int q = 0; q < basis.rule.size(); ++q) {
      const auto& s = basis.at[q];
      const double w = basis.rule.weights[q] * s.detJ;
      const Vec<Dim> uq = velocity(Point<Dim>(base + basis.offset[q]));
      for (int a = 0; a < nen; ++a)
        for (int b = 0; b < nen; ++b)
          trip.emplace_back(conn[a], conn[b], w * s.N[a] * uq.dot(s.grad[b]));
    }
  }
  Eigen::SparseMatrix<double> C(mesh.n_nodes(), mesh.n_nodes());
  C.setFromTriplets(trip.begin(), trip.end());
  return C;
}

template <int Dim>
Eigen::SparseMatrix<double> mass_matrix(const StructuredMesh<Dim>& mesh) {
  constexpr int nen = StructuredMesh<Dim>::nodes_per_element;
  const detail::ElementBasis<Dim> basis(mesh);
  std::vector<Eigen::Triplet<double>> trip;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto& conn = mesh.elements[e];
    for (int q = 0; q < basis.rule.size(); ++q) {
      const auto& s = basis.at[q];
      const double w = basis.rule.weights[q] * s.detJ;
      for (int a = 0; a < nen; ++a)
        for (int b = 0; b < nen; ++b) trip.emplace_back(conn[a], conn[b], w * s.N[a] * s.N[b]);
    }
  }
  Eigen::SparseMatrix<double> M(mesh.n_nodes(), mesh.n_nodes());
  M.setFromTriplets(trip.begin(), trip.end());
  return M;
}

/// Nodal solution of one case; g is empty for Galerkin.
struct SolutionField {
  int dim = 1;
  Method method = Method::galerkin;
  Eigen::VectorXd phi;
  Eigen::MatrixXd g;  // n_nodes x dim, zero columns for galerkin
};

struct CaseResult {
  SolutionField field;
  SolveReport report;
  double assemble_seconds = 0;
  double total_seconds = 0;
};

template <int Dim>
CaseResult solve_case(const StructuredMesh<Dim>& mesh, const ProblemConfig<Dim>& config,
                      double tol = 1e-10) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  SparseSystem sys = assemble(mesh, config);
  apply_dirichlet(sys, mesh, config);
  const Eigen::SparseMatrix<double> A = sys.matrix();
  const auto t1 = clock::now();

  CaseResult res;
  Eigen::VectorXd x;
  res.report = solve(A, sys.rhs, x, tol);

  res.field.dim = Dim;
  res.field.method = config.method;
  res.field.phi.resize(mesh.n_nodes());
  for (int i = 0; i < mesh.n_nodes(); ++i) res.field.phi[i] = x[sys.dofs.phi(i)];
  if (sys.dofs.with_g) {
    res.field.g.resize(mesh.n_nodes(), Dim);
    for (int i = 0; i < mesh.n_nodes(); ++i)
      for (int c = 0; c < Dim; ++c) res.field.g(i, c) = x[sys.dofs.g(i, c)];
  } else {
    res.field.g.resize(0, 0);
  }
  res.assemble_seconds = std::chrono::duration<double>(t1 - t0).count();
  res.total_seconds = std::chrono::duration<double>(clock::now() - t0).count();
  return res;
}

/// Generalized strain e = grad(phi) - g at the quadrature points.
template <int Dim>
struct StrainSample {
  int element;
  Point<Dim> x;
  Vec<Dim> e;
};

template <int Dim>
std::vector<StrainSample<Dim>> generalized_strain(const StructuredMesh<Dim>& mesh,
                                                  const SolutionField& field) {
  constexpr int nen = StructuredMesh<Dim>::nodes_per_element;
  const detail::ElementBasis<Dim> basis(mesh);
  const bool has_g = field.g.size() > 0;
  std::vector<StrainSample<Dim>> out;
  out.reserve(static_cast<size_t>(mesh.n_elements()) * basis.rule.size());
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto& conn = mesh.elements[e];
    const Point<Dim> base = mesh.nodes[conn[0]];
    for (int q = 0; q < basis.rule.size(); ++q) {
      const auto& s = basis.at[q];
      Vec<Dim> grad_phi = Vec<Dim>::Zero(), gq = Vec<Dim>::Zero();
      for (int a = 0; a < nen; ++a) {
        grad_phi += field.phi[conn[a]] * s.grad[a];
        if (has_g)
          for (int c = 0; c < Dim; ++c) gq[c] += field.g(conn[a], c) * s.N[a];
      }
      out.push_back({e, Point<Dim>(base + basis.offset[q]), Vec<Dim>(grad_phi - gq)});
    }
  }
  return out;
}

}  // namespace mmad
