#include "edfd/problem.hpp"

#include <algorithm>

#include "edfd/error.hpp"

namespace edfd {

Discretization::Discretization(TorusGrid grid, SchemeConfig scheme)
    : grid_(std::move(grid)), scheme_(std::move(scheme)) {
  if (grid_.dim() != 1) {
    throw Error(ErrorCode::InvalidArgument, "the one-dimensional scheme needs a 1D grid");
  }
  validate(std::get<SchemeConfig>(scheme_));
}

Discretization::Discretization(TorusGrid grid, Scheme2DConfig scheme)
    : grid_(std::move(grid)), scheme_(std::move(scheme)) {}

EntropySpec Discretization::entropy() const {
  if (const auto* s = scheme1d()) return s->entropy;
  return EntropySpec(0.0);
}

Field Discretization::rhs(std::span<const double> u) const {
  if (const auto* s = scheme1d()) return edfd::rhs(grid_, u, *s);
  return rhs_2d(grid_, u, *scheme2d());
}

double Discretization::entropy_production(std::span<const double> u) const {
  if (const auto* s = scheme1d()) return entropy_production_closed_form(grid_, u, *s);
  return entropy_production_2d(grid_, u, *scheme2d());
}

double Discretization::dissipation(std::span<const double> u) const {
  if (const auto* s = scheme1d()) return dissipation_functional(grid_, u, *s);
  return dissipation_2d(grid_, u, *scheme2d());
}

OdeSystem Discretization::system() const {
  OdeSystem sys;
  sys.size = grid_.size();
  sys.pattern = stencil_pattern(grid_, 2);
  sys.rhs = [this](std::span<const double> u, std::span<double> du) {
    const Field f = rhs(u);
    std::copy(f.begin(), f.end(), du.begin());
  };
  return sys;
}

TrajectoryRecord evolve(const Discretization& disc, Field u0, const SolverConfig& solver,
                        double t_end, std::span<const double> output_times,
                        IntegrationResult* stats) {
  TrajectoryRecord rec;
  const EntropySpec entropy = disc.entropy();
  const TorusGrid& grid = disc.grid();
  auto observe = [&](double t, std::span<const double> u, bool output_time) {
    if (!rec.times.empty() && t <= rec.times.back()) return;
    const auto [lo, hi] = std::minmax_element(u.begin(), u.end());
    rec.times.push_back(t);
    rec.mass.push_back(mass(grid, u));
    rec.entropy.push_back(discrete_entropy(grid, u, entropy));
    rec.entropy_production.push_back(disc.entropy_production(u));
    rec.dissipation.push_back(disc.dissipation(u));
    rec.min_u.push_back(*lo);
    rec.max_u.push_back(*hi);
    if (output_time) rec.snapshots.emplace_back(t, Field(u.begin(), u.end()));
  };
  const OdeSystem sys = disc.system();
  IntegrationResult res = integrate(sys, std::move(u0), solver, t_end, output_times, observe);
  if (stats) *stats = std::move(res);
  return rec;
}

}  // namespace edfd
