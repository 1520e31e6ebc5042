#include "edfd/scheme2d.hpp"

#include <cmath>
#include <sstream>

#include "edfd/error.hpp"

namespace edfd {

namespace {

constexpr double kEntropyVariableFloor = 1e-300;

Field logarithmic_variable(std::span<const double> u) {
  Field v(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] > 0.0)) {
      std::ostringstream msg;
      msg << "state is not strictly positive at index " << i << " (u = " << u[i] << ")";
      throw Error(ErrorCode::NonpositiveState, msg.str());
    }
    v[i] = -1.0 / u[i];
  }
  return v;
}

Field mobility(const TorusGrid& grid, std::span<const double> u, const Scheme2DConfig& config) {
  Field m = average_field(grid, u, config.average);
  for (double& x : m) x = std::pow(x, config.beta);
  return m;
}

}  // namespace

Scheme2DConfig make_scheme2d_config(double beta, AverageRule average,
                                    bool allow_unguaranteed) {
  Scheme2DConfig config{beta, lambda_2d(beta), average};
  if (!allow_unguaranteed && !lyapunov_guaranteed(config)) {
    std::ostringstream msg;
    msg << "the multi-dimensional scheme dissipates the logarithmic entropy only for "
           "beta = 2 (got "
        << beta << "); pass the no-Lyapunov-guarantee flag to run it anyway";
    throw Error(ErrorCode::InvalidArgument, msg.str());
  }
  return config;
}

bool lyapunov_guaranteed(const Scheme2DConfig& config) {
  return nonneg_margin(poly_spec_2d(config.lambdas)) >= 0.0;
}

XiPair xi_2d(const TorusGrid& grid, std::span<const double> v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) < kEntropyVariableFloor) {
      std::ostringstream msg;
      msg << "entropy variable vanishes at index " << i;
      throw Error(ErrorCode::ZeroEntropyVariable, msg.str());
    }
  }
  const double h2 = grid.h() * grid.h();
  XiPair xi{Field(grid.size(), 0.0), Field(grid.size(), 0.0)};
  for (std::size_t k = 0; k < grid.size(); ++k) {
    double lap = 0.0;
    double grad2 = 0.0;
    for (std::size_t axis = 0; axis < grid.dim(); ++axis) {
      const double vp = v[grid.next(axis, k)];
      const double vm = v[grid.prev(axis, k)];
      lap += vp - 2.0 * v[k] + vm;
      grad2 += (vp - v[k]) * (vp - v[k]);
    }
    xi.xi2[k] = lap / (v[k] * h2);
    xi.xi1sq[k] = grad2 / (v[k] * v[k] * h2);
  }
  return xi;
}

ABFields assemble_AB_2d(const TorusGrid& grid, std::span<const double> u,
                        std::span<const double> v, const XiPair& xi,
                        const Scheme2DConfig& config) {
  const Field m = mobility(grid, u, config);
  const auto& l = config.lambdas;
  ABFields ab{Field(grid.size()), Field(grid.size())};
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double inv_v = 1.0 / v[k];
    ab.A[k] = m[k] * inv_v * (l.l1 * xi.xi2[k] + l.l2 * xi.xi1sq[k]);
    ab.B[k] = m[k] * inv_v * inv_v * (l.l3 * xi.xi2[k] + l.l4 * xi.xi1sq[k]);
  }
  return ab;
}

Field rhs_2d(const TorusGrid& grid, std::span<const double> u, const Scheme2DConfig& config) {
  if (u.size() != grid.size()) {
    throw Error(ErrorCode::InvalidArgument, "state size does not match the grid");
  }
  const Field v = logarithmic_variable(u);
  const XiPair xi = xi_2d(grid, v);
  const ABFields ab = assemble_AB_2d(grid, u, v, xi, config);
  const double inv_h = 1.0 / grid.h();

  // J_mu,k = d_mu^- A - v_k d_mu^- B, then du = -sum_mu d_mu^+ J_mu.
  Field du(grid.size(), 0.0);
  Field J(grid.size());
  for (std::size_t axis = 0; axis < grid.dim(); ++axis) {
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const std::size_t km = grid.prev(axis, k);
      J[k] = ((ab.A[k] - ab.A[km]) - v[k] * (ab.B[k] - ab.B[km])) * inv_h;
    }
    for (std::size_t k = 0; k < grid.size(); ++k) {
      du[k] -= (J[grid.next(axis, k)] - J[k]) * inv_h;
    }
  }
  return du;
}

double entropy_production_2d(const TorusGrid& grid, std::span<const double> u,
                             const Scheme2DConfig& config) {
  const Field v = logarithmic_variable(u);
  const XiPair xi = xi_2d(grid, v);
  const Field m = mobility(grid, u, config);
  const PolySpec P = poly_spec_2d(config.lambdas);
  Field terms(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) terms[k] = m[k] * P(xi.xi1sq[k], xi.xi2[k]);
  return -integrate(grid, terms);
}

double dissipation_2d(const TorusGrid& grid, std::span<const double> u,
                      const Scheme2DConfig& config) {
  const Field v = logarithmic_variable(u);
  const XiPair xi = xi_2d(grid, v);
  const Field m = mobility(grid, u, config);
  Field terms(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    terms[k] = m[k] * (xi.xi2[k] * xi.xi2[k] + xi.xi1sq[k] * xi.xi1sq[k]);
  }
  return integrate(grid, terms);
}

}  // namespace edfd
