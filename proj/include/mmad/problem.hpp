#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "mmad/mesh.hpp"
#include "mmad/types.hpp"

namespace mmad {

/// Advective field: a constant vector, the rigid rotation (-x2, x1), or a
/// user callable. The label travels into manifests.
template <int Dim>
struct Velocity {
  enum class Kind { constant, rotation, custom } kind = Kind::constant;
  Vec<Dim> u0 = Vec<Dim>::Zero();
  std::function<Vec<Dim>(const Point<Dim>&)> fn;
  std::string label = "0";

  Vec<Dim> operator()(const Point<Dim>& x) const {
    switch (kind) {
      case Kind::constant: return u0;
      case Kind::rotation:
        if constexpr (Dim == 2) return Vec<2>(-x[1], x[0]);
        else throw ConfigError("rotation velocity needs a 2D mesh");
      case Kind::custom: return fn(x);
    }
    return u0;
  }

  static Velocity constant(const Vec<Dim>& u) {
    Velocity v;
    v.kind = Kind::constant;
    v.u0 = u;
    std::string s;
    for (int d = 0; d < Dim; ++d) s += (d ? "," : "") + std::to_string(u[d]);
    v.label = s;
    return v;
  }

  static Velocity rotation() {
    static_assert(Dim == 2, "rotation field is two-dimensional");
    Velocity v;
    v.kind = Kind::rotation;
    v.label = "rotation";
    return v;
  }

  static Velocity custom(std::function<Vec<Dim>(const Point<Dim>&)> f, std::string label) {
    Velocity v;
    v.kind = Kind::custom;
    v.fn = std::move(f);
    v.label = std::move(label);
    return v;
  }
};

/// Everything needed to pose one case on a given mesh.
template <int Dim>
struct ProblemConfig {
  double pe = 1.0;
  double da = 0.0;
  Velocity<Dim> velocity;
  ScalarFn<Dim> source;  // null means zero
  std::vector<BoundaryRegion<Dim>> regions;
  Method method = Method::galerkin;
  std::optional<double> mzad_p;  // uniform projection weight override

  double source_at(const Point<Dim>& x) const { return source ? source(x) : 0.0; }

  void validate(const StructuredMesh<Dim>& mesh) const {
    if (!(pe > 0) || !std::isfinite(pe)) throw ConfigError("Peclet number must be positive and finite");
    if (!(da >= 0) || !std::isfinite(da)) throw ConfigError("Damkohler number must be nonnegative and finite");
    if (mzad_p && !(*mzad_p > 0)) throw ConfigError("mzad projection weight must be positive");
    for (const auto& r : regions) {
      if (r.kind != RegionKind::neumann && !r.profile)
        throw ConfigError("constrained region without a value profile");
      for (int id : r.node_ids)
        if (id < 0 || id >= mesh.n_nodes()) throw ConfigError("region node id out of range");
    }
  }
};

template <int Dim>
BoundaryRegion<Dim> dirichlet_region(const StructuredMesh<Dim>& mesh, Edge edge,
                                     std::type_identity_t<ScalarFn<Dim>> profile,
                                     std::string label = "") {
  BoundaryRegion<Dim> r;
  r.kind = RegionKind::dirichlet;
  r.node_ids = select_nodes(mesh, edge);
  r.edge = edge;
  r.profile = std::move(profile);
  r.label = label.empty() ? to_string(edge) : std::move(label);
  return r;
}

template <int Dim>
BoundaryRegion<Dim> neumann_region(const StructuredMesh<Dim>& mesh, Edge edge,
                                   std::type_identity_t<ScalarFn<Dim>> profile,
                                   std::string label = "") {
  BoundaryRegion<Dim> r;
  r.kind = RegionKind::neumann;
  r.node_ids = select_nodes(mesh, edge);
  r.edge = edge;
  r.profile = std::move(profile);
  r.label = label.empty() ? to_string(edge) : std::move(label);
  return r;
}

inline BoundaryRegion<2> interior_line_region(const StructuredMesh<2>& mesh, const Point<2>& a,
                                              const Point<2>& b, ScalarFn<2> profile,
                                              std::string label = "interior-line") {
  BoundaryRegion<2> r;
  r.kind = RegionKind::interior_line;
  r.node_ids = select_interior_line(mesh, a, b);
  r.profile = std::move(profile);
  r.label = std::move(label);
  return r;
}

}  // namespace mmad
