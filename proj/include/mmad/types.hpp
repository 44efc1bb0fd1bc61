#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <string>

namespace mmad {

inline constexpr const char* library_version = "1.0.0";

template <int Dim>
using Point = Eigen::Matrix<double, Dim, 1>;

template <int Dim>
using Vec = Eigen::Matrix<double, Dim, 1>;

template <int Dim>
using Mat = Eigen::Matrix<double, Dim, Dim>;

template <int Dim>
using ScalarFn = std::function<double(const Point<Dim>&)>;

enum class Method { galerkin, mmad, mzad };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::galerkin: return "galerkin";
    case Method::mmad: return "mmad";
    case Method::mzad: return "mzad";
  }
  return "?";
}

/// User-facing configuration problems (bad parameters, malformed specs).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline Method parse_method(const std::string& s) {
  if (s == "galerkin") return Method::galerkin;
  if (s == "mmad") return Method::mmad;
  if (s == "mzad") return Method::mzad;
  throw ConfigError("unknown method '" + s + "' (expected galerkin|mmad|mzad)");
}

inline void validate_dimension(int dim) {
  if (dim != 1 && dim != 2)
    throw ConfigError("unsupported dimension " + std::to_string(dim));
}

}  // namespace mmad
