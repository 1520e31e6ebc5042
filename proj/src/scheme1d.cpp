#include "edfd/scheme1d.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "edfd/error.hpp"

namespace edfd {

namespace {

constexpr double kEntropyVariableFloor = 1e-300;
constexpr double kLambdaTolerance = 1e-10;

void require_1d(const TorusGrid& grid) {
  if (grid.dim() != 1) {
    throw Error(ErrorCode::InvalidArgument, "the 1D scheme needs a one-dimensional grid");
  }
}

void require_positive(std::span<const double> u) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] > 0.0)) {
      std::ostringstream msg;
      msg << "state is not strictly positive at index " << i << " (u = " << u[i] << ")";
      throw Error(ErrorCode::NonpositiveState, msg.str());
    }
  }
}

void require_nonzero(std::span<const double> v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) < kEntropyVariableFloor) {
      std::ostringstream msg;
      msg << "entropy variable vanishes at index " << i;
      throw Error(ErrorCode::ZeroEntropyVariable, msg.str());
    }
  }
}

bool is_shannon(const SchemeConfig& config) {
  return config.entropy.kind() == EntropyKind::Shannon;
}

XiPair xi_for(const TorusGrid& grid, const EntropyVariables& vars,
              const SchemeConfig& config) {
  if (is_shannon(config)) return xi_alpha1(grid, vars);
  return config.variant == FluxVariant::Central ? xi_central(grid, vars)
                                                : xi_noncentral(grid, vars);
}

// Weight W_i multiplying the production polynomial at node i.
Field production_weight(std::span<const double> ubar, const SchemeConfig& config) {
  const double al = config.entropy.alpha();
  const double p = al + config.model.beta;
  const double scale = is_shannon(config) ? 1.0 : 1.0 / ((al - 1.0) * (al - 1.0));
  Field w(ubar.size());
  for (std::size_t i = 0; i < ubar.size(); ++i) w[i] = scale * std::pow(ubar[i], p);
  return w;
}

}  // namespace

SchemeConfig make_scheme_config(const EntropySpec& entropy, const ModelParams& model,
                                FluxVariant variant, AverageRule average,
                                std::optional<double> lambda4) {
  model.validate();
  const double l4 = lambda4.value_or(lambda4_optimal(entropy, model));
  SchemeConfig config{entropy, model, lambda_for(entropy, model, l4), variant, average};
  validate(config);
  return config;
}

void validate(const SchemeConfig& config) {
  config.model.validate();
  if (is_shannon(config)) {
    if (config.variant == FluxVariant::Noncentral) {
      throw Error(ErrorCode::InvalidArgument,
                  "the noncentral flux is only available for alpha != 1");
    }
    const LambdaSet ref = lambda_alpha1(config.model, config.lambdas.l4);
    const double dev = std::max({std::abs(ref.l1 - config.lambdas.l1),
                                 std::abs(ref.l2 - config.lambdas.l2),
                                 std::abs(ref.l3 - config.lambdas.l3)});
    if (dev > kLambdaTolerance) {
      throw Error(ErrorCode::InvalidArgument,
                  "lambda set does not match the alpha = 1 identification");
    }
    return;
  }
  const double res = verify_flux_identification(config.lambdas, config.entropy, config.model);
  if (res > kLambdaTolerance) {
    std::ostringstream msg;
    msg << "lambda set does not decompose the flux (residual " << res << ")";
    throw Error(ErrorCode::InvalidArgument, msg.str());
  }
}

double entropy_density(double u, double alpha) noexcept {
  if (alpha == 0.0) return -std::log(u);
  if (alpha == 1.0) return u * (std::log(u) - 1.0);
  return std::pow(u, alpha) / (alpha * (alpha - 1.0));
}

double entropy_derivative(double u, double alpha) noexcept {
  if (alpha == 0.0) return -1.0 / u;
  if (alpha == 1.0) return std::log(u);
  return std::pow(u, alpha - 1.0) / (alpha - 1.0);
}

Field average_field(const TorusGrid& grid, std::span<const double> u, AverageRule rule) {
  Field ubar(u.begin(), u.end());
  if (rule == AverageRule::Identity) return ubar;
  const double count = 1.0 + 2.0 * static_cast<double>(grid.dim());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (rule == AverageRule::ArithmeticNbr) {
      double s = u[k];
      for (std::size_t axis = 0; axis < grid.dim(); ++axis) {
        s += u[grid.prev(axis, k)] + u[grid.next(axis, k)];
      }
      ubar[k] = s / count;
    } else {
      double s = std::log(u[k]);
      for (std::size_t axis = 0; axis < grid.dim(); ++axis) {
        s += std::log(u[grid.prev(axis, k)]) + std::log(u[grid.next(axis, k)]);
      }
      ubar[k] = std::exp(s / count);
    }
  }
  return ubar;
}

EntropyVariables entropy_variables(std::span<const double> u, const EntropySpec& entropy) {
  require_positive(u);
  EntropyVariables vars;
  vars.v.resize(u.size());
  const double al = entropy.alpha();
  for (std::size_t i = 0; i < u.size(); ++i) vars.v[i] = entropy_derivative(u[i], al);
  if (entropy.kind() == EntropyKind::Shannon) {
    Field w(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) w[i] = -1.0 / u[i];
    vars.w = std::move(w);
  }
  return vars;
}

XiPair xi_central(const TorusGrid& grid, const EntropyVariables& vars) {
  require_1d(grid);
  const auto& v = vars.v;
  require_nonzero(v);
  const double h2 = grid.h() * grid.h();
  XiPair xi{Field(grid.size()), Field(grid.size())};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double vp = v[grid.next(0, i)];
    const double vm = v[grid.prev(0, i)];
    const double dp = vp - v[i];
    const double dm = v[i] - vm;
    xi.xi2[i] = (vp - 2.0 * v[i] + vm) / (v[i] * h2);
    xi.xi1sq[i] = (dp * dp + dm * dm) / (2.0 * v[i] * v[i] * h2);
  }
  return xi;
}

XiPair xi_noncentral(const TorusGrid& grid, const EntropyVariables& vars) {
  require_1d(grid);
  const auto& v = vars.v;
  require_nonzero(v);
  const double h2 = grid.h() * grid.h();
  XiPair xi{Field(grid.size()), Field(grid.size())};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double vp = v[grid.next(0, i)];
    const double vm = v[grid.prev(0, i)];
    const double dm = v[i] - vm;
    xi.xi2[i] = (vp - 2.0 * v[i] + vm) / (v[i] * h2);
    xi.xi1sq[i] = dm * dm / (v[i] * v[i] * h2);
  }
  return xi;
}

XiPair xi_alpha1(const TorusGrid& grid, const EntropyVariables& vars) {
  require_1d(grid);
  if (!vars.w) {
    throw Error(ErrorCode::InvalidArgument, "xi_alpha1 needs the auxiliary variable w");
  }
  const auto& v = vars.v;
  const auto& w = *vars.w;
  const double h2 = grid.h() * grid.h();
  XiPair xi{Field(grid.size()), Field(grid.size())};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const std::size_t ip = grid.next(0, i);
    const std::size_t im = grid.prev(0, i);
    // Discrete (v_x w)_x tends to -w_xx; dividing by -w_i yields w_xx / w.
    const double vxw_x =
        ((v[ip] - v[i]) * (w[ip] + w[i]) - (v[i] - v[im]) * (w[i] + w[im])) / (2.0 * h2);
    xi.xi2[i] = -vxw_x / w[i];
    xi.xi1sq[i] = xi.xi2[i] + (v[ip] - 2.0 * v[i] + v[im]) / h2;
  }
  return xi;
}

ABFields assemble_AB(const TorusGrid& grid, std::span<const double> u,
                     const EntropyVariables& vars, const XiPair& xi,
                     const SchemeConfig& config) {
  if (is_shannon(config)) {
    throw Error(ErrorCode::InvalidAlpha, "assemble_AB is for alpha != 1");
  }
  require_nonzero(vars.v);
  const Field ubar = average_field(grid, u, config.average);
  const Field weight = production_weight(ubar, config);
  const auto& l = config.lambdas;
  ABFields ab{Field(grid.size()), Field(grid.size())};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double inv_v = 1.0 / vars.v[i];
    ab.A[i] = weight[i] * inv_v * (l.l1 * xi.xi2[i] + l.l2 * xi.xi1sq[i]);
    ab.B[i] = weight[i] * inv_v * inv_v * (l.l3 * xi.xi2[i] + l.l4 * xi.xi1sq[i]);
  }
  return ab;
}

ABFields assemble_AB_alpha1(const TorusGrid& grid, std::span<const double> u,
                            const EntropyVariables& vars, const XiPair& xi,
                            const SchemeConfig& config) {
  if (!is_shannon(config)) {
    throw Error(ErrorCode::InvalidAlpha, "assemble_AB_alpha1 is for alpha = 1");
  }
  if (!vars.w) {
    throw Error(ErrorCode::InvalidArgument, "alpha = 1 needs the auxiliary variable w");
  }
  require_positive(u);
  const auto& w = *vars.w;
  const Field ubar = average_field(grid, u, config.average);
  const Field weight = production_weight(ubar, config);
  const auto& l = config.lambdas;
  ABFields ab{Field(grid.size()), Field(grid.size())};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    ab.A[i] = -weight[i] * (l.l1 * xi.xi2[i] + l.l2 * xi.xi1sq[i]);
    // B carries 1/(-w_i) = u_i so that B tends to u^beta / w^2 (...).
    ab.B[i] = -weight[i] / w[i] * (l.l3 * xi.xi2[i] + l.l4 * xi.xi1sq[i]);
  }
  return ab;
}

Field flux(const TorusGrid& grid, const ABFields& ab, const EntropyVariables& vars,
           const SchemeConfig& config) {
  require_1d(grid);
  const bool shannon = is_shannon(config);
  if (shannon && !vars.w) {
    throw Error(ErrorCode::InvalidArgument, "alpha = 1 flux needs the auxiliary variable w");
  }
  const auto& c = shannon ? *vars.w : vars.v;
  const bool central = shannon || config.variant == FluxVariant::Central;
  const double inv_h = 1.0 / grid.h();
  Field J(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const std::size_t ip = grid.next(0, i);
    const double coef = central ? 0.5 * (c[ip] + c[i]) : c[i];
    J[i] = ((ab.A[ip] - ab.A[i]) - coef * (ab.B[ip] - ab.B[i])) * inv_h;
  }
  return J;
}

Field rhs(const TorusGrid& grid, std::span<const double> u, const SchemeConfig& config) {
  require_1d(grid);
  if (u.size() != grid.size()) {
    throw Error(ErrorCode::InvalidArgument, "state size does not match the grid");
  }
  const EntropyVariables vars = entropy_variables(u, config.entropy);
  const XiPair xi = xi_for(grid, vars, config);
  const ABFields ab = is_shannon(config) ? assemble_AB_alpha1(grid, u, vars, xi, config)
                                         : assemble_AB(grid, u, vars, xi, config);
  const Field J = flux(grid, ab, vars, config);
  const double inv_h = 1.0 / grid.h();
  Field du(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    du[i] = -(J[i] - J[grid.prev(0, i)]) * inv_h;
  }
  return du;
}

double entropy_production_closed_form(const TorusGrid& grid, std::span<const double> u,
                                      const SchemeConfig& config) {
  require_1d(grid);
  const EntropyVariables vars = entropy_variables(u, config.entropy);
  const XiPair xi = xi_for(grid, vars, config);
  const Field ubar = average_field(grid, u, config.average);
  const Field weight = production_weight(ubar, config);
  const PolySpec P = poly_spec(config.entropy, config.lambdas);
  Field terms(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    terms[i] = weight[i] * P(xi.xi1sq[i], xi.xi2[i]);
  }
  return -integrate(grid, terms);
}

double dissipation_functional(const TorusGrid& grid, std::span<const double> u,
                              const SchemeConfig& config) {
  require_1d(grid);
  const EntropyVariables vars = entropy_variables(u, config.entropy);
  const XiPair xi = xi_for(grid, vars, config);
  const Field ubar = average_field(grid, u, config.average);
  const double p = config.entropy.alpha() + config.model.beta;
  Field terms(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    terms[i] = std::pow(ubar[i], p) *
               (xi.xi2[i] * xi.xi2[i] + xi.xi1sq[i] * xi.xi1sq[i]);
  }
  return integrate(grid, terms);
}

double dissipation_weight(const SchemeConfig& config) {
  const double c0 = coercivity_constant(poly_spec(config.entropy, config.lambdas));
  if (is_shannon(config)) return c0;
  const double am1 = config.entropy.alpha() - 1.0;
  return c0 / (am1 * am1);
}

}  // namespace edfd
