#pragma once

#include <optional>
#include <string>
#include <vector>

#include "morphoflow/types.hpp"

namespace morphoflow {

/// Closed polyline; the edge from the last vertex back to the first is implied.
struct Curve {
  Points vertices;

  Curve() = default;
  explicit Curve(Points v) : vertices(std::move(v)) {}
  void validate() const;
  Curve reversed() const;
};

struct VarifoldSpec {
  double sigma_w = 0.3;

  void validate() const;
};

/// Unoriented varifold inner product with Gaussian spatial kernel,
///   Σ_{e,f} exp(−|m_e − m_f|²/σ_w²) (t_e·t_f)² / (|t_e||t_f|).
double varifold_inner(const Curve& c1, const Curve& c2, const VarifoldSpec& spec);

double varifold_distance_squared(const Curve& c1, const Curve& c2, const VarifoldSpec& spec);

/// sqrt of the squared distance, clamped at zero against round-off.
double varifold_distance(const Curve& c1, const Curve& c2, const VarifoldSpec& spec);

}  // namespace morphoflow
