#pragma once

#include <string>

#include "scotlab/common.hpp"

namespace scotlab {

enum class Boundary { Periodic, Dirichlet, Absorbing };

inline std::string boundary_name(Boundary b) {
  switch (b) {
    case Boundary::Periodic: return "periodic";
    case Boundary::Dirichlet: return "dirichlet";
    case Boundary::Absorbing: return "absorbing";
  }
  return "?";
}

inline Boundary boundary_from(const std::string& s) {
  if (s == "periodic") return Boundary::Periodic;
  if (s == "dirichlet") return Boundary::Dirichlet;
  if (s == "absorbing") return Boundary::Absorbing;
  throw ValueError("unknown boundary kind: " + s);
}

// Uniform grid on the unit square.
struct Grid {
  int64_t n = 64;
  Boundary boundary = Boundary::Periodic;

  double spacing() const { return 1.0 / double(n); }

  // periodic node x_i = i/N; Dirichlet interior node x_i = (i+1)/(N+1)
  double coord(int64_t i) const {
    return boundary == Boundary::Dirichlet ? double(i + 1) / double(n + 1)
                                           : double(i) / double(n);
  }

  void validate() const {
    if (n < 8) throw ValueError("grid too small: N = " + std::to_string(n));
  }
};

}  // namespace scotlab
