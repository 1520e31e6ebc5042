#pragma once

#include <span>
#include <utility>
#include <vector>

#include "edfd/coeffs.hpp"
#include "edfd/grid.hpp"

namespace edfd {

/// h^d sum_i s_alpha(u_i). Throws NonpositiveState.
double discrete_entropy(const TorusGrid& grid, std::span<const double> u,
                        const EntropySpec& entropy);

/// h^d sum_i u_i.
double mass(const TorusGrid& grid, std::span<const double> u) noexcept;

/// Entropy of the constant state with the same mass: s_alpha(mean u) * measure.
double equilibrium_entropy(const TorusGrid& grid, std::span<const double> u,
                           const EntropySpec& entropy);

/// h^d sum_i |grad^+ u_i|^2.
double high_frequency_energy(const TorusGrid& grid, std::span<const double> u);

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<double> mass;
  std::vector<double> entropy;
  std::vector<double> entropy_production;
  std::vector<double> dissipation;
  std::vector<double> min_u;
  std::vector<double> max_u;
  std::vector<std::pair<double, Field>> snapshots;

  std::size_t size() const noexcept { return times.size(); }
};

/// Least-squares slope of -log(S(t) - s_inf) over samples with t in [t0, t1].
/// Throws DegenerateWindow with fewer than 3 usable samples (S - s_inf must
/// be positive).
double decay_rate(const TrajectoryRecord& record, double t0, double t1, double s_inf);

/// Discrete l2 distance (h^d sum (u - u_ref)^2)^(1/2) after sampling the fine
/// reference at the coarse nodes. Throws IncompatibleGrids.
double l2_error(const TorusGrid& coarse, std::span<const double> u, const TorusGrid& fine,
                std::span<const double> u_ref);

/// Regression slope of log(error) against log(h). Throws InvalidArgument for
/// fewer than two distinct h or nonpositive entries.
double convergence_order(std::span<const double> hs, std::span<const double> errors);

}  // namespace edfd
