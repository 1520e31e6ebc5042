#pragma once

// Entropy-dissipating semi-discretization on the 1D torus:
//
//   du_i/dt = -(J_{i+1/2} - J_{i-1/2}) / h,
//   J_{i+1/2} = (A_{i+1} - A_i)/h - c_{i+1/2} (B_{i+1} - B_i)/h,
//
// with c = (v_{i+1} + v_i)/2 (central), c = v_i (noncentral), or
// c = (w_{i+1} + w_i)/2 for the Shannon entropy, where v = s'_alpha(u) and
// w = -1/u. Each flux variant is paired with its own xi definitions so that
// summation by parts reproduces the continuous production polynomial exactly.

#include <optional>
#include <span>

#include "edfd/coeffs.hpp"
#include "edfd/grid.hpp"

namespace edfd {

enum class FluxVariant { Central, Noncentral };

/// How the local average u-bar entering the A/B weights is formed.
enum class AverageRule { Identity, ArithmeticNbr, Geometric };

struct SchemeConfig {
  EntropySpec entropy{0.0};
  ModelParams model;
  LambdaSet lambdas;
  FluxVariant variant = FluxVariant::Central;
  AverageRule average = AverageRule::Identity;
};

/// Builds a consistent configuration; lambda4 defaults to the optimal value.
SchemeConfig make_scheme_config(const EntropySpec& entropy, const ModelParams& model,
                                FluxVariant variant = FluxVariant::Central,
                                AverageRule average = AverageRule::Identity,
                                std::optional<double> lambda4 = std::nullopt);

/// Throws InvalidArgument if the variant, entropy and lambdas do not fit together.
void validate(const SchemeConfig& config);

struct EntropyVariables {
  Field v;
  std::optional<Field> w;  // only for alpha = 1
};

struct XiPair {
  Field xi1sq;
  Field xi2;
};

struct ABFields {
  Field A;
  Field B;
};

/// s_alpha(u) and its derivative.
double entropy_density(double u, double alpha) noexcept;
double entropy_derivative(double u, double alpha) noexcept;

/// Local average over the point and its axis neighbours (any dimension).
Field average_field(const TorusGrid& grid, std::span<const double> u, AverageRule rule);

EntropyVariables entropy_variables(std::span<const double> u, const EntropySpec& entropy);

XiPair xi_central(const TorusGrid& grid, const EntropyVariables& vars);
XiPair xi_noncentral(const TorusGrid& grid, const EntropyVariables& vars);
/// alpha = 1: xi2 = -(v_x w)_x / w with v = log u, w = -1/u (a two-point
/// product stencil), and xi1^2 = xi2 + v_xx. Writing r = u_{i+1}/u_i and
/// s = u_{i-1}/u_i, xi1^2 h^2 = (ln r (1 - 1/r) + ln s (1 - 1/s)) / 2 >= 0.
XiPair xi_alpha1(const TorusGrid& grid, const EntropyVariables& vars);

ABFields assemble_AB(const TorusGrid& grid, std::span<const double> u,
                     const EntropyVariables& vars, const XiPair& xi,
                     const SchemeConfig& config);
ABFields assemble_AB_alpha1(const TorusGrid& grid, std::span<const double> u,
                            const EntropyVariables& vars, const XiPair& xi,
                            const SchemeConfig& config);

/// J_{i+1/2}, stored at index i.
Field flux(const TorusGrid& grid, const ABFields& ab, const EntropyVariables& vars,
           const SchemeConfig& config);

Field rhs(const TorusGrid& grid, std::span<const double> u, const SchemeConfig& config);

/// -h sum_i W_i P(xi_{1,i}, xi_{2,i}) with W = ubar^(alpha+beta)/(alpha-1)^2
/// (ubar^(beta+1) for alpha = 1). Equals h sum_i s'(u_i) rhs_i.
double entropy_production_closed_form(const TorusGrid& grid, std::span<const double> u,
                                      const SchemeConfig& config);

/// h sum_i ubar^(alpha+beta) (xi2^2 + xi1^4).
double dissipation_functional(const TorusGrid& grid, std::span<const double> u,
                              const SchemeConfig& config);

/// Weight applied to the dissipation functional in the quantitative bound
/// production + weight * dissipation <= 0: c0/(alpha-1)^2, or c0 for alpha = 1.
double dissipation_weight(const SchemeConfig& config);

}  // namespace edfd
