#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "mmad/types.hpp"

namespace mmad {

namespace detail {

/// sinh(b) - b without cancellation (series below 1, direct above).
inline double sinh_minus_x(double b) {
  if (b >= 1.0) return std::sinh(b) - b;
  // sum b^(2k+1)/(2k+1)! starting at k=1
  double term = b * b * b / 6.0, sum = 0.0;
  for (int k = 1; term > 1e-18 * (sum + term) || k < 3; ++k) {
    sum += term;
    term *= b * b / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
    if (k > 40) break;
  }
  return sum;
}

/// The bracket (2/3) b^2 + b^2/sinh^2(b) - 1, rearranged so the -1 never
/// cancels: equals (2/3) b^2 - (sinh b - b)(sinh b + b)/sinh^2 b.
inline double kr_bracket_formula(double b) {
  const double sh = std::sinh(b);
  return (2.0 / 3.0) * b * b - sinh_minus_x(b) * (sh + b) / (sh * sh);
}

/// Two-term small-argument expansion of the same bracket: b^2/3 + b^4/15.
inline double kr_bracket_series(double b) {
  return b * b / 3.0 + b * b * b * b / 15.0;
}

}  // namespace detail

/// Upwind function coth(a) - 1/a on [0, inf); series below 1e-4, saturates
/// to 1 - 1/a for large a (tanh-based, overflow-safe).
inline double gamma_upwind(double alpha) {
  if (alpha < 0) throw std::invalid_argument("gamma_upwind: negative argument");
  if (alpha == 0) return 0.0;  // limit value
  if (alpha < 1e-4) {
    const double a2 = alpha * alpha;
    return alpha / 3.0 - alpha * a2 / 45.0 + 2.0 * alpha * a2 * a2 / 945.0;
  }
  return 1.0 / std::tanh(alpha) - 1.0 / alpha;
}

/// Convective artificial-diffusion coefficient:
/// sum_i |u_i| h_i gamma(Pe h_i / 2) / 2.
template <int Dim>
double kc_bar(const Vec<Dim>& u, const std::array<double, Dim>& h, double pe) {
  if (!(pe > 0)) throw std::invalid_argument("kc_bar: Peclet number must be positive");
  double kc = 0;
  for (int d = 0; d < Dim; ++d) kc += std::abs(u[d]) * h[d] * gamma_upwind(0.5 * pe * h[d]);
  return 0.5 * kc;
}

/// Reactive artificial-diffusion coefficient with b = (h/2) sqrt(Da Pe):
/// (1/Pe) [ (2/3) b^2 + b^2/sinh^2 b - 1 ], guarded at both ends.
inline double kr_bar(double pe, double da, double h) {
  if (!(pe > 0)) throw std::invalid_argument("kr_bar: Peclet number must be positive");
  if (da < 0) throw std::invalid_argument("kr_bar: negative Damkohler number");
  if (!(h > 0)) throw std::invalid_argument("kr_bar: nonpositive element size");
  if (da == 0) return 0.0;
  const double b = 0.5 * h * std::sqrt(da * pe);
  if (b < 1e-4) return detail::kr_bracket_series(b) / pe;
  if (b > 30.0) return ((2.0 / 3.0) * b * b - 1.0) / pe;  // sinh term underflows
  return detail::kr_bracket_formula(b) / pe;
}

/// Element stabilization tensors: H = kc u^ (x) u^ + kr I, K = I, and the
/// gradient stiffness as the scalar coefficient of the fourth-order
/// identity (A = 1).
template <int Dim>
struct Tensors {
  Mat<Dim> H = Mat<Dim>::Zero();
  Mat<Dim> K = Mat<Dim>::Identity();
  double A = 1.0;
  double kc = 0, kr = 0;

  // Eigenvalues of H are kr + kc (along the flow) and kr (across it);
  // in 1D there is no cross direction.
  double lambda_min() const { return Dim == 1 ? kc + kr : kr; }
  double lambda_max() const { return kc + kr; }
};

template <int Dim>
Tensors<Dim> build_tensors(const Vec<Dim>& u_centroid, const std::array<double, Dim>& h,
                           double pe, double da) {
  Tensors<Dim> t;
  t.kc = kc_bar<Dim>(u_centroid, h, pe);
  t.kr = kr_bar(pe, da, *std::min_element(h.begin(), h.end()));
  t.H = t.kr * Mat<Dim>::Identity();
  const double speed = u_centroid.norm();
  if (speed > 0 && t.kc > 0) {
    const Vec<Dim> dir = u_centroid / speed;
    t.H += t.kc * dir * dir.transpose();
  }
  return t;
}

/// Degenerate single-parameter mode: H = p I, K = 0, A = 0, which turns the
/// auxiliary field into the L2-projection of grad(phi).
template <int Dim>
Tensors<Dim> build_tensors_mzad(double p) {
  if (!(p > 0)) throw std::invalid_argument("mzad: projection weight must be positive");
  Tensors<Dim> t;
  t.H = p * Mat<Dim>::Identity();
  t.K = Mat<Dim>::Zero();
  t.A = 0.0;
  t.kc = 0;  // H = p I is isotropic: both eigenvalues equal p
  t.kr = p;
  return t;
}

}  // namespace mmad
