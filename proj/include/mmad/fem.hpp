#pragma once

#include <array>
#include <cmath>

#include "mmad/mesh.hpp"
#include "mmad/types.hpp"

namespace mmad {

/// Tensor-product 2-point Gauss rule on [-1,1]^Dim (exact through degree 3
/// per direction, which keeps the convection block exactly skew on
/// divergence-free fields).
template <int Dim>
struct QuadratureRule {
  std::vector<Point<Dim>> points;
  std::vector<double> weights;
  int size() const { return static_cast<int>(points.size()); }
};

template <int Dim>
QuadratureRule<Dim> gauss_rule() {
  static_assert(Dim == 1 || Dim == 2);
  const double p = 1.0 / std::sqrt(3.0);
  QuadratureRule<Dim> q;
  if constexpr (Dim == 1) {
    q.points = {Point<1>(-p), Point<1>(p)};
    q.weights = {1.0, 1.0};
  } else {
    for (double eta : {-p, p})
      for (double xi : {-p, p}) {
        q.points.push_back(Point<2>(xi, eta));
        q.weights.push_back(1.0);
      }
  }
  return q;
}

/// Shape functions, physical gradients and Jacobian determinant of a
/// linear line / bilinear quad element at one natural point.
template <int Dim>
struct ShapeEval {
  static constexpr int n = 1 << Dim;
  std::array<double, n> N{};
  std::array<Vec<Dim>, n> grad{};  // w.r.t. physical coordinates
  double detJ = 0;
};

inline ShapeEval<1> shape_eval(const std::array<Point<1>, 2>& corners, const Point<1>& xi) {
  ShapeEval<1> s;
  s.N = {0.5 * (1 - xi[0]), 0.5 * (1 + xi[0])};
  const double J = 0.5 * (corners[1][0] - corners[0][0]);
  if (!(J > 0)) throw std::invalid_argument("degenerate element (nonpositive Jacobian)");
  s.detJ = J;
  s.grad[0][0] = -0.5 / J;
  s.grad[1][0] = 0.5 / J;
  return s;
}

inline ShapeEval<2> shape_eval(const std::array<Point<2>, 4>& corners, const Point<2>& xi) {
  // corner signs in counterclockwise order
  static constexpr double sx[4] = {-1, 1, 1, -1};
  static constexpr double sy[4] = {-1, -1, 1, 1};
  ShapeEval<2> s;
  std::array<Vec<2>, 4> dN;  // natural gradients
  for (int a = 0; a < 4; ++a) {
    s.N[a] = 0.25 * (1 + sx[a] * xi[0]) * (1 + sy[a] * xi[1]);
    dN[a] = Vec<2>(0.25 * sx[a] * (1 + sy[a] * xi[1]), 0.25 * sy[a] * (1 + sx[a] * xi[0]));
  }
  Mat<2> J = Mat<2>::Zero();  // J(k,l) = dx_k / dxi_l
  for (int a = 0; a < 4; ++a) J += corners[a] * dN[a].transpose();
  const double det = J.determinant();
  if (!(det > 0)) throw std::invalid_argument("degenerate element (nonpositive Jacobian)");
  s.detJ = det;
  const Mat<2> Jinv = J.inverse();
  for (int a = 0; a < 4; ++a) s.grad[a] = Jinv.transpose() * dN[a];
  return s;
}

template <int Dim>
Point<Dim> map_to_physical(const std::array<Point<Dim>, (1 << Dim)>& corners,
                           const Point<Dim>& xi) {
  if constexpr (Dim == 1) {
    return Point<1>(0.5 * (1 - xi[0]) * corners[0][0] + 0.5 * (1 + xi[0]) * corners[1][0]);
  } else {
    static constexpr double sx[4] = {-1, 1, 1, -1};
    static constexpr double sy[4] = {-1, -1, 1, 1};
    Point<2> x = Point<2>::Zero();
    for (int a = 0; a < 4; ++a)
      x += 0.25 * (1 + sx[a] * xi[0]) * (1 + sy[a] * xi[1]) * corners[a];
    return x;
  }
}

}  // namespace mmad
