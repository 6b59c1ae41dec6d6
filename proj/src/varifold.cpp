#include "morphoflow/varifold.hpp"

#include <algorithm>
#include <cmath>

#include "morphoflow/errors.hpp"

namespace morphoflow {

void Curve::validate() const {
  if (vertices.size() < 3) throw ParameterError("curve needs at least 3 vertices");
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const Vec2& a = vertices[i];
    const Vec2& b = vertices[(i + 1) % vertices.size()];
    if (a == b) throw ParameterError("curve has repeated consecutive vertex " + std::to_string(i));
  }
}

Curve Curve::reversed() const {
  Points v(vertices.rbegin(), vertices.rend());
  return Curve(std::move(v));
}

void VarifoldSpec::validate() const {
  if (!(sigma_w > 0.0)) throw ParameterError("varifold sigma must be positive");
}

namespace {

struct Segments {
  Points mid;
  Points tangent;
  std::vector<double> length;
};

Segments segments(const Curve& c) {
  c.validate();
  Segments s;
  const std::size_t n = c.vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = c.vertices[i];
    const Vec2& b = c.vertices[(i + 1) % n];
    s.mid.push_back(0.5 * (a + b));
    s.tangent.push_back(b - a);
    s.length.push_back((b - a).norm());
  }
  return s;
}

}  // namespace

double varifold_inner(const Curve& c1, const Curve& c2, const VarifoldSpec& spec) {
  spec.validate();
  const Segments a = segments(c1);
  const Segments b = segments(c2);
  const double inv_s2 = 1.0 / (spec.sigma_w * spec.sigma_w);
  double total = 0.0;
  for (std::size_t e = 0; e < a.mid.size(); ++e) {
    double row = 0.0;
    for (std::size_t f = 0; f < b.mid.size(); ++f) {
      const double dot = a.tangent[e].dot(b.tangent[f]);
      row += std::exp(-(a.mid[e] - b.mid[f]).squaredNorm() * inv_s2) * dot * dot /
             (a.length[e] * b.length[f]);
    }
    total += row;
  }
  return total;
}

double varifold_distance_squared(const Curve& c1, const Curve& c2, const VarifoldSpec& spec) {
  return varifold_inner(c1, c1, spec) - 2.0 * varifold_inner(c1, c2, spec) +
         varifold_inner(c2, c2, spec);
}

double varifold_distance(const Curve& c1, const Curve& c2, const VarifoldSpec& spec) {
  return std::sqrt(std::max(0.0, varifold_distance_squared(c1, c2, spec)));
}

}  // namespace morphoflow
