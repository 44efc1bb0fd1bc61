#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <random>

#include "mmad/assembly.hpp"

namespace mmad {

/// Closed-form solution of  Da phi + u phi' - (1/Pe) phi'' = F  on (0,1)
/// with phi(0) = phi(1) = 0. Written against the interval ends so the
/// exponentials never overflow (both exponents stay nonpositive).
class Exact1D {
 public:
  Exact1D(double pe, double da, double u, double f) : pe_(pe), da_(da), u_(u), f_(f) {
    if (!(pe > 0)) throw std::invalid_argument("exact_1d: Peclet number must be positive");
    if (da < 0) throw std::invalid_argument("exact_1d: negative Damkohler number");
    if (da == 0 && u == 0)
      throw std::invalid_argument("exact_1d: degenerate problem (u = 0 and Da = 0)");
    const double disc = std::sqrt(pe * pe * u * u + 4.0 * pe * da);
    lp_ = 0.5 * (pe * u + disc);  // >= 0
    lm_ = 0.5 * (pe * u - disc);  // <= 0
    if (da > 0) {
      p0_ = f / da;
      pslope_ = 0.0;
    } else {
      p0_ = 0.0;
      pslope_ = f / u;
    }
    const double Ep = std::exp(-lp_), Em = std::exp(lm_);
    const double det = Ep * Em - 1.0;
    const double r0 = -(p0_), r1 = -(p0_ + pslope_);
    a_ = (r0 * Em - r1) / det;
    b_ = (Ep * r1 - r0) / det;
  }

  double value(double x) const {
    return p0_ + pslope_ * x + a_ * std::exp(lp_ * (x - 1.0)) + b_ * std::exp(lm_ * x);
  }

  double deriv(double x) const {
    return pslope_ + a_ * lp_ * std::exp(lp_ * (x - 1.0)) + b_ * lm_ * std::exp(lm_ * x);
  }

  double pe() const { return pe_; }
  double da() const { return da_; }

 private:
  double pe_, da_, u_, f_;
  double lp_ = 0, lm_ = 0, a_ = 0, b_ = 0, p0_ = 0, pslope_ = 0;
};

inline Exact1D exact_1d(double pe, double da, double u, double f) {
  return Exact1D(pe, da, u, f);
}

/// Reference solution for error measurement; null members mean zero.
template <int Dim>
struct Reference {
  ScalarFn<Dim> value;
  std::function<Vec<Dim>(const Point<Dim>&)> gradient;
};

inline Reference<1> reference_from(const Exact1D& ex) {
  Reference<1> r;
  r.value = [ex](const Point<1>& x) { return ex.value(x[0]); };
  r.gradient = [ex](const Point<1>& x) { return Vec<1>(ex.deriv(x[0])); };
  return r;
}

/// Piecewise (bi)linear evaluation of a nodal field on its own mesh.
template <int Dim>
class FieldEvaluator {
 public:
  FieldEvaluator(StructuredMesh<Dim> mesh, SolutionField field)
      : mesh_(std::make_shared<StructuredMesh<Dim>>(std::move(mesh))),
        field_(std::make_shared<SolutionField>(std::move(field))) {}

  double phi(const Point<Dim>& x) const {
    auto [e, xi] = locate(x);
    const auto s = shape_eval(mesh_->element_corners(e), xi);
    double v = 0;
    for (int a = 0; a < StructuredMesh<Dim>::nodes_per_element; ++a)
      v += s.N[a] * field_->phi[mesh_->elements[e][a]];
    return v;
  }

  Vec<Dim> grad_phi(const Point<Dim>& x) const {
    auto [e, xi] = locate(x);
    const auto s = shape_eval(mesh_->element_corners(e), xi);
    Vec<Dim> g = Vec<Dim>::Zero();
    for (int a = 0; a < StructuredMesh<Dim>::nodes_per_element; ++a)
      g += s.grad[a] * field_->phi[mesh_->elements[e][a]];
    return g;
  }

 private:
  std::pair<int, Point<Dim>> locate(const Point<Dim>& x) const {
    std::array<int, Dim> cell;
    Point<Dim> xi;
    for (int d = 0; d < Dim; ++d) {
      const int n = mesh_->cells[d];
      int i = static_cast<int>(std::floor(x[d] * n));
      i = std::clamp(i, 0, n - 1);
      xi[d] = 2.0 * (x[d] * n - i) - 1.0;
      xi[d] = std::clamp(xi[d], -1.0, 1.0);
      cell[d] = i;
    }
    if constexpr (Dim == 1) return {cell[0], xi};
    else return {cell[1] * mesh_->cells[0] + cell[0], xi};
  }

  std::shared_ptr<StructuredMesh<Dim>> mesh_;
  std::shared_ptr<SolutionField> field_;
};

template <int Dim>
Reference<Dim> reference_from_field(const StructuredMesh<Dim>& mesh, const SolutionField& field) {
  FieldEvaluator<Dim> ev(mesh, field);
  Reference<Dim> r;
  r.value = [ev](const Point<Dim>& x) { return ev.phi(x); };
  r.gradient = [ev](const Point<Dim>& x) { return ev.grad_phi(x); };
  return r;
}

struct Bounds {
  double lo = 0;
  double hi = 0;
};

struct ErrorReport {
  double l2_error = 0;       // ||phi_h - phi_ref||_L2
  double h1_semi_error = 0;  // ||grad(phi_h - phi_ref)||_L2
  double g_norm = 0;         // ||g_h||_L2 + ||grad g_h||_L2 combined (G-norm)
  double combined_norm = 0;  // sqrt(h1_semi^2 + g_norm^2)
  double max_nodal_error = 0;
  double max_overshoot = 0;   // above bounds.hi
  double max_undershoot = 0;  // below bounds.lo
  double total_variation = 0; // 1D nodal TV
};

inline double total_variation(const Eigen::VectorXd& v) {
  double tv = 0;
  for (Eigen::Index i = 0; i + 1 < v.size(); ++i) tv += std::abs(v[i + 1] - v[i]);
  return tv;
}

/// Sum of moves against the expected direction; zero for a profile that is
/// monotone in that direction.
inline double monotone_violation(const std::vector<double>& v, bool increasing) {
  double s = 0;
  for (size_t i = 0; i + 1 < v.size(); ++i) {
    const double d = v[i + 1] - v[i];
    if (increasing && d < 0) s -= d;
    if (!increasing && d > 0) s += d;
  }
  return s;
}

/// Quadrature-evaluated error norms against a reference (zero by default,
/// which turns the report into plain norms of the field itself). The
/// auxiliary field is always measured against zero: with the h-scaled
/// tensors the continuous auxiliary field vanishes under refinement.
template <int Dim>
ErrorReport error_norms(const StructuredMesh<Dim>& mesh, const SolutionField& field,
                        const Reference<Dim>& ref = {},
                        const std::optional<Bounds>& bounds = {}) {
  constexpr int nen = StructuredMesh<Dim>::nodes_per_element;
  const detail::ElementBasis<Dim> basis(mesh);
  const bool has_g = field.g.size() > 0;

  double l2 = 0, h1 = 0, g_l2 = 0, g_h1 = 0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto& conn = mesh.elements[e];
    const Point<Dim> base = mesh.nodes[conn[0]];
    for (int q = 0; q < basis.rule.size(); ++q) {
      const auto& s = basis.at[q];
      const double w = basis.rule.weights[q] * s.detJ;
      const Point<Dim> xq = base + basis.offset[q];

      double phi_h = 0;
      Vec<Dim> grad_h = Vec<Dim>::Zero(), g_h = Vec<Dim>::Zero();
      Mat<Dim> grad_g = Mat<Dim>::Zero();  // grad_g(c,d) = d g_c / d x_d
      for (int a = 0; a < nen; ++a) {
        phi_h += s.N[a] * field.phi[conn[a]];
        grad_h += s.grad[a] * field.phi[conn[a]];
        if (has_g)
          for (int c = 0; c < Dim; ++c) {
            g_h[c] += s.N[a] * field.g(conn[a], c);
            grad_g.row(c) += field.g(conn[a], c) * s.grad[a].transpose();
          }
      }
      const double dv = phi_h - (ref.value ? ref.value(xq) : 0.0);
      const Vec<Dim> dg = grad_h - (ref.gradient ? ref.gradient(xq) : Vec<Dim>::Zero().eval());
      l2 += w * dv * dv;
      h1 += w * dg.squaredNorm();
      if (has_g) {
        g_l2 += w * g_h.squaredNorm();
        g_h1 += w * grad_g.squaredNorm();
      }
    }
  }

  ErrorReport rep;
  rep.l2_error = std::sqrt(l2);
  rep.h1_semi_error = std::sqrt(h1);
  rep.g_norm = std::sqrt(g_l2 + g_h1);
  rep.combined_norm = std::sqrt(h1 + g_l2 + g_h1);

  if (ref.value)
    for (int i = 0; i < mesh.n_nodes(); ++i)
      rep.max_nodal_error =
          std::max(rep.max_nodal_error, std::abs(field.phi[i] - ref.value(mesh.nodes[i])));
  if (bounds) {
    rep.max_overshoot = std::max(0.0, field.phi.maxCoeff() - bounds->hi);
    rep.max_undershoot = std::max(0.0, bounds->lo - field.phi.minCoeff());
  }
  if (Dim == 1) rep.total_variation = total_variation(field.phi);
  return rep;
}

/// Least-squares slope of log(error) against log(h).
inline double convergence_rate(const std::vector<double>& hs, const std::vector<double>& errors) {
  if (hs.size() != errors.size()) throw std::invalid_argument("convergence_rate: size mismatch");
  if (hs.size() < 3) throw std::invalid_argument("convergence_rate: need at least 3 levels");
  for (size_t i = 0; i < hs.size(); ++i) {
    if (!(hs[i] > 0) || !(errors[i] > 0) || !std::isfinite(errors[i]))
      throw std::invalid_argument("convergence_rate: levels and errors must be positive");
    if (i > 0 && !(hs[i] < hs[i - 1]))
      throw std::invalid_argument("convergence_rate: h must strictly decrease");
  }
  const size_t n = hs.size();
  double sx = 0, sy = 0;
  std::vector<double> lx(n), ly(n);
  for (size_t i = 0; i < n; ++i) {
    lx[i] = std::log(hs[i]);
    ly[i] = std::log(errors[i]);
    sx += lx[i];
    sy += ly[i];
  }
  const double mx = sx / n, my = sy / n;
  double num = 0, den = 0;
  for (size_t i = 0; i < n; ++i) {
    num += (lx[i] - mx) * (ly[i] - my);
    den += (lx[i] - mx) * (lx[i] - mx);
  }
  return num / den;
}

inline double default_coercivity_eps(double H0, double K0) {
  return H0 + K0 > 0 ? 0.5 * (1.0 + H0 / (H0 + K0)) : 0.5;
}

/// Coercivity constant M = min(1/Pe + H0(1-eps), K0 + H0(1-1/eps), A0).
inline double coercivity_constant(double pe, double H0, double K0, double A0,
                                  std::optional<double> eps = {}) {
  if (!(pe > 0)) throw std::invalid_argument("coercivity: Peclet number must be positive");
  if (H0 < 0 || K0 < 0 || A0 < 0) throw std::invalid_argument("coercivity: negative bound");
  const double e = eps ? *eps : default_coercivity_eps(H0, K0);
  if (!(e > 0) || !(e < 1)) throw std::invalid_argument("coercivity: eps must lie in (0,1)");
  const double kterm = K0 + H0 * (1.0 - 1.0 / e);
  if (!(kterm > 0))
    throw std::invalid_argument("coercivity: eps too small, K0 + H0(1 - 1/eps) <= 0");
  return std::min(1.0 / pe + H0 * (1.0 - e), std::min(kterm, A0));
}

/// Continuity constant m = Da + u_max + 1/Pe + 2 H_max + K_max + A_max.
inline double continuity_constant(double da, double u_max, double pe, double h_max,
                                  double k_max, double a_max) {
  if (!(pe > 0)) throw std::invalid_argument("continuity: Peclet number must be positive");
  return da + u_max + 1.0 / pe + 2.0 * h_max + k_max + a_max;
}

/// Factor beta0/M0 = H_max * Pe in the modelling error bound.
inline double modelling_error_factor(double h_max, double pe) { return h_max * pe; }

/// Spectral bounds of the element tensors over the mesh.
struct StabilizationBounds {
  double H0 = 0, Hmax = 0, K0 = 0, Kmax = 0, A0 = 0, Amax = 0;
};

template <int Dim>
Tensors<Dim> element_tensors(const StructuredMesh<Dim>& mesh, const ProblemConfig<Dim>& config,
                             int e) {
  const Point<Dim> c = mesh.element_centroid(e);
  if (config.method == Method::mzad) {
    double p;
    if (config.mzad_p) {
      p = *config.mzad_p;
    } else {
      const auto ref = build_tensors<Dim>(config.velocity(c), mesh.h, config.pe, config.da);
      p = ref.kc + ref.kr;
    }
    return build_tensors_mzad<Dim>(p);
  }
  return build_tensors<Dim>(config.velocity(c), mesh.h, config.pe, config.da);
}

template <int Dim>
StabilizationBounds tensor_extrema(const StructuredMesh<Dim>& mesh,
                                   const ProblemConfig<Dim>& config) {
  StabilizationBounds b;
  if (config.method == Method::galerkin) return b;
  bool first = true;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto t = element_tensors(mesh, config, e);
    const double lmin = t.lambda_min(), lmax = t.lambda_max();
    const double k = t.K(0, 0);  // K is isotropic by construction
    if (first) {
      b = {lmin, lmax, k, k, t.A, t.A};
      first = false;
    } else {
      b.H0 = std::min(b.H0, lmin);
      b.Hmax = std::max(b.Hmax, lmax);
      b.K0 = std::min(b.K0, k);
      b.Kmax = std::max(b.Kmax, k);
      b.A0 = std::min(b.A0, t.A);
      b.Amax = std::max(b.Amax, t.A);
    }
  }
  return b;
}

/// Worst ratio B(v,v) / (M ||v||^2) over random two-field trial vectors
/// whose scalar part vanishes on the boundary; >= 1 everywhere means the
/// assembled form is coercive with the predicted constant.
template <int Dim>
double coercivity_margin(const StructuredMesh<Dim>& mesh, const ProblemConfig<Dim>& config,
                         int trials = 100, unsigned seed = 20240902u) {
  if (config.method == Method::galerkin)
    throw ConfigError("coercivity_margin: needs a two-field method");
  const SparseSystem sys = assemble(mesh, config);
  const Eigen::SparseMatrix<double> A = sys.matrix();

  const auto ext = tensor_extrema(mesh, config);
  const double M = coercivity_constant(config.pe, ext.H0, ext.K0, ext.A0);

  const auto inner = interior_nodes(mesh);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  double worst = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    SolutionField field;
    field.dim = Dim;
    field.method = config.method;
    field.phi = Eigen::VectorXd::Zero(mesh.n_nodes());
    field.g.resize(mesh.n_nodes(), Dim);
    for (int id : inner) field.phi[id] = dist(rng);
    for (int i = 0; i < mesh.n_nodes(); ++i)
      for (int c = 0; c < Dim; ++c) field.g(i, c) = dist(rng);

    Eigen::VectorXd x(sys.dofs.total_dofs());
    for (int i = 0; i < mesh.n_nodes(); ++i) {
      x[sys.dofs.phi(i)] = field.phi[i];
      for (int c = 0; c < Dim; ++c) x[sys.dofs.g(i, c)] = field.g(i, c);
    }
    const double quad = x.dot(A * x);
    const double norm2 = std::pow(error_norms(mesh, field).combined_norm, 2);
    worst = std::min(worst, quad / (M * norm2));
  }
  return worst;
}

/// Max nodal gap between the recovered auxiliary field of a single-
/// parameter (projection-mode) solve and the directly assembled
/// L2-projection of grad(phi_h).
template <int Dim>
double mzad_projection_gap(const StructuredMesh<Dim>& mesh, const ProblemConfig<Dim>& config,
                           double tol = 1e-10) {
  if (config.method != Method::mzad)
    throw ConfigError("mzad_projection_gap: config must use the projection mode");
  const CaseResult result = solve_case(mesh, config, tol);

  constexpr int nen = StructuredMesh<Dim>::nodes_per_element;
  const detail::ElementBasis<Dim> basis(mesh);
  const Eigen::SparseMatrix<double> M = mass_matrix(mesh);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(mesh.n_nodes(), Dim);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto& conn = mesh.elements[e];
    for (int q = 0; q < basis.rule.size(); ++q) {
      const auto& s = basis.at[q];
      const double w = basis.rule.weights[q] * s.detJ;
      Vec<Dim> grad_h = Vec<Dim>::Zero();
      for (int a = 0; a < nen; ++a) grad_h += s.grad[a] * result.field.phi[conn[a]];
      for (int a = 0; a < nen; ++a) rhs.row(conn[a]) += w * s.N[a] * grad_h.transpose();
    }
  }
  double gap = 0;
  for (int c = 0; c < Dim; ++c) {
    Eigen::VectorXd proj;
    const Eigen::VectorXd b = rhs.col(c);
    solve(M, b, proj, tol);
    gap = std::max(gap, (proj - result.field.g.col(c)).cwiseAbs().maxCoeff());
  }
  return gap;
}

/// Max of |v^T C v| / ||v_h||_L2^2 over random fields vanishing on the
/// boundary; exactly zero in exact arithmetic for divergence-free
/// advection, order 0.5 for the compressible control u = (x1, 0).
template <int Dim>
double check_skew_symmetry(const StructuredMesh<Dim>& mesh, const Velocity<Dim>& velocity,
                           int trials = 100, unsigned seed = 20240901u) {
  const Eigen::SparseMatrix<double> C = convection_matrix(mesh, velocity);
  const Eigen::SparseMatrix<double> M = mass_matrix(mesh);
  const auto inner = interior_nodes(mesh);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  double worst = 0;
  for (int t = 0; t < trials; ++t) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(mesh.n_nodes());
    for (int id : inner) v[id] = dist(rng);
    const double num = std::abs(v.dot(C * v));
    const double den = v.dot(M * v);
    worst = std::max(worst, num / den);
  }
  return worst;
}

}  // namespace mmad
