#include "morphoflow/rkhs.hpp"

#include <cmath>
#include <map>
#include <string>

#include "morphoflow/errors.hpp"

namespace morphoflow {

void KernelSpec::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ParameterError("kernel sigma must be positive");
}

namespace {

void require_nonnegative(double t) {
  if (!(t >= 0.0)) throw ParameterError("kernel argument must be non-negative, got " + std::to_string(t));
}

}  // namespace

double kappa(double t) {
  require_nonnegative(t);
  return (1.0 + t + 2.0 * t * t / 15.0 + t * t * t / 15.0) * std::exp(-t);
}

// κ'(t)  = (−11t/15 + t²/15 − t³/15) e^{-t}
// κ''(t) = (−11/15 + 13t/15 − 4t²/15 + t³/15) e^{-t}
std::pair<double, double> kappa_derivatives(double t) {
  require_nonnegative(t);
  const double e = std::exp(-t);
  const double d1 = t * (-11.0 + t - t * t) / 15.0 * e;
  const double d2 = (-11.0 + 13.0 * t - 4.0 * t * t + t * t * t) / 15.0 * e;
  return {d1, d2};
}

double kappa_d1_over_t(double t) {
  require_nonnegative(t);
  return (-11.0 + t - t * t) / 15.0 * std::exp(-t);
}

Vec2 kernel_gradient(const Vec2& q, const Vec2& x, const KernelSpec& spec) {
  const Vec2 d = q - x;
  const double t = d.norm() / spec.sigma;
  return kappa_d1_over_t(t) / (spec.sigma * spec.sigma) * d;
}

Eigen::MatrixXd gram_matrix(const Points& points, const KernelSpec& spec) {
  spec.validate();
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    g(i, i) = 1.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double k = kappa((points[i] - points[j]).norm() / spec.sigma);
      g(i, j) = k;
      g(j, i) = k;
    }
  }
  return g;
}

void VelocityField::validate() const {
  spec.validate();
  if (points.size() != momenta.size())
    throw ParameterError("velocity field needs one momentum per control point");
}

Eigen::VectorXd VelocityField::packed_momenta() const {
  Eigen::VectorXd a(2 * static_cast<Eigen::Index>(momenta.size()));
  for (std::size_t i = 0; i < momenta.size(); ++i) a.segment<2>(2 * static_cast<Eigen::Index>(i)) = momenta[i];
  return a;
}

VelocityField VelocityField::from_packed(const KernelSpec& spec, Points points,
                                         const Eigen::VectorXd& packed) {
  if (packed.size() != 2 * static_cast<Eigen::Index>(points.size()))
    throw ParameterError("packed momenta length must be twice the control point count");
  VelocityField v{spec, std::move(points), {}};
  v.momenta.resize(v.points.size());
  for (std::size_t i = 0; i < v.points.size(); ++i)
    v.momenta[i] = packed.segment<2>(2 * static_cast<Eigen::Index>(i));
  return v;
}

FieldSample eval_field(const VelocityField& v, const Points& queries) {
  v.validate();
  const double s = v.spec.sigma;
  FieldSample out;
  out.values.assign(queries.size(), Vec2::Zero());
  out.jacobians.assign(queries.size(), Mat2::Zero());
  for (std::size_t q = 0; q < queries.size(); ++q) {
    Vec2 val = Vec2::Zero();
    Mat2 jac = Mat2::Zero();
    for (std::size_t i = 0; i < v.points.size(); ++i) {
      const Vec2 d = queries[q] - v.points[i];
      const double t = d.norm() / s;
      val += kappa(t) * v.momenta[i];
      jac += v.momenta[i] * (kappa_d1_over_t(t) / (s * s) * d).transpose();
    }
    out.values[q] = val;
    out.jacobians[q] = jac;
  }
  return out;
}

double v_norm_squared(const VelocityField& v) {
  v.validate();
  if (v.points.empty()) return 0.0;
  const Eigen::MatrixXd g = gram_matrix(v.points, v.spec);
  const auto n = static_cast<Eigen::Index>(v.points.size());
  Eigen::MatrixXd a(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) a.row(i) = v.momenta[i].transpose();
  return (a.transpose() * g * a).trace();
}

KernelGradients kernel_gradients(const Points& queries, const Points& points,
                                 const KernelSpec& spec) {
  spec.validate();
  const auto nq = static_cast<Eigen::Index>(queries.size());
  const auto np = static_cast<Eigen::Index>(points.size());
  KernelGradients g{Eigen::MatrixXd(nq, np), Eigen::MatrixXd(nq, np)};
  const double inv_s2 = 1.0 / (spec.sigma * spec.sigma);
  for (Eigen::Index i = 0; i < np; ++i) {
    for (Eigen::Index q = 0; q < nq; ++q) {
      const Vec2 d = queries[q] - points[i];
      const double f = kappa_d1_over_t(d.norm() / spec.sigma) * inv_s2;
      g.dx(q, i) = f * d.x();
      g.dy(q, i) = f * d.y();
    }
  }
  return g;
}

CollapsedPoints collapse_points(const Points& points, double tol) {
  CollapsedPoints out;
  out.representative.resize(points.size());
  // bucket on a grid of cell size tol, then compare against neighbouring cells
  std::map<std::pair<long long, long long>, std::vector<std::size_t>> grid;
  const double cell = tol > 0.0 ? tol : 1.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const long long cx = static_cast<long long>(std::floor(points[i].x() / cell));
    const long long cy = static_cast<long long>(std::floor(points[i].y() / cell));
    std::ptrdiff_t found = -1;
    for (long long dx = -1; dx <= 1 && found < 0; ++dx)
      for (long long dy = -1; dy <= 1 && found < 0; ++dy) {
        auto it = grid.find({cx + dx, cy + dy});
        if (it == grid.end()) continue;
        for (auto u : it->second)
          if ((out.unique[u] - points[i]).norm() < tol) {
            found = static_cast<std::ptrdiff_t>(u);
            break;
          }
      }
    if (found >= 0) {
      out.representative[i] = static_cast<std::size_t>(found);
    } else {
      out.representative[i] = out.unique.size();
      grid[{cx, cy}].push_back(out.unique.size());
      out.unique.push_back(points[i]);
    }
  }
  return out;
}

}  // namespace morphoflow
