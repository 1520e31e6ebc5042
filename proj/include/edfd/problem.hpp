#pragma once

// Glue between a spatial scheme and the time integrator: one object that
// evaluates the right-hand side, the scheme's own entropy functionals, and
// builds the OdeSystem with the right sparsity pattern.

#include <span>
#include <variant>
#include <vector>

#include "edfd/diagnostics.hpp"
#include "edfd/integrator.hpp"
#include "edfd/scheme1d.hpp"
#include "edfd/scheme2d.hpp"

namespace edfd {

class Discretization {
 public:
  Discretization(TorusGrid grid, SchemeConfig scheme);
  Discretization(TorusGrid grid, Scheme2DConfig scheme);

  const TorusGrid& grid() const noexcept { return grid_; }
  bool is_multid() const noexcept { return std::holds_alternative<Scheme2DConfig>(scheme_); }
  const SchemeConfig* scheme1d() const noexcept { return std::get_if<SchemeConfig>(&scheme_); }
  const Scheme2DConfig* scheme2d() const noexcept { return std::get_if<Scheme2DConfig>(&scheme_); }

  /// The entropy the scheme dissipates (alpha = 0 for the multi-d scheme).
  EntropySpec entropy() const;

  Field rhs(std::span<const double> u) const;
  double entropy_production(std::span<const double> u) const;
  double dissipation(std::span<const double> u) const;

  OdeSystem system() const;

 private:
  TorusGrid grid_;
  std::variant<SchemeConfig, Scheme2DConfig> scheme_;
};

/// Integrates and records scalar diagnostics at every accepted step plus a
/// snapshot at each requested output time (t = 0 included when listed).
TrajectoryRecord evolve(const Discretization& disc, Field u0, const SolverConfig& solver,
                        double t_end, std::span<const double> output_times = {},
                        IntegrationResult* stats = nullptr);

}  // namespace edfd
