#pragma once

// Multi-dimensional thin-film scheme with logarithmic entropy (v = -1/u):
//
//   du/dt = -div^+ J,   J = grad^- A - v grad^- B,
//   A = ubar^beta / v   (l1 xi2 + l2 xi1^2),
//   B = ubar^beta / v^2 (l3 xi2 + l4 xi1^2),
//   xi2 = Lap_h v / v,  xi1^2 = |grad^+ v|^2 / v^2.
//
// The operators are written for any dimension; the Lyapunov property holds
// only for beta = 2.

#include <span>

#include "edfd/coeffs.hpp"
#include "edfd/grid.hpp"
#include "edfd/scheme1d.hpp"

namespace edfd {

struct Scheme2DConfig {
  double beta = 2.0;
  LambdaSet lambdas = lambda_2d(2.0);
  AverageRule average = AverageRule::Identity;
};

/// Throws InvalidArgument for beta != 2 unless `allow_unguaranteed` is set.
Scheme2DConfig make_scheme2d_config(double beta, AverageRule average = AverageRule::Identity,
                                    bool allow_unguaranteed = false);

/// True when the production polynomial is nonnegative (beta = 2).
bool lyapunov_guaranteed(const Scheme2DConfig& config);

XiPair xi_2d(const TorusGrid& grid, std::span<const double> v);

ABFields assemble_AB_2d(const TorusGrid& grid, std::span<const double> u,
                        std::span<const double> v, const XiPair& xi,
                        const Scheme2DConfig& config);

Field rhs_2d(const TorusGrid& grid, std::span<const double> u, const Scheme2DConfig& config);

/// -h^d sum_i ubar^beta P0(xi1, xi2); equals h^d sum_i (-1/u_i) rhs_i.
double entropy_production_2d(const TorusGrid& grid, std::span<const double> u,
                             const Scheme2DConfig& config);

/// h^d sum_i ubar^beta (xi2^2 + xi1^4).
double dissipation_2d(const TorusGrid& grid, std::span<const double> u,
                      const Scheme2DConfig& config);

}  // namespace edfd
