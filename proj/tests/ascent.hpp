#pragma once

// Gradient ascent on the scale-free ratio production / dissipation of the
// multi-dimensional scheme, used to exhibit entropy-producing states when the
// production polynomial is indefinite.

#include <cmath>
#include <cstdint>
#include <random>

#include "edfd/scheme2d.hpp"

namespace testing {

struct AscentResult {
  edfd::Field u;
  double ratio = -INFINITY;
  double production = 0.0;
  int iterations = 0;
};

inline double production_ratio(const edfd::TorusGrid& g, std::span<const double> u,
                               const edfd::Scheme2DConfig& c) {
  const double d = edfd::dissipation_2d(g, u, c);
  return d > 0.0 ? edfd::entropy_production_2d(g, u, c) / d : -INFINITY;
}

inline AscentResult ascend_production(const edfd::TorusGrid& g, const edfd::Scheme2DConfig& c,
                                      std::uint64_t seed, int max_iter = 300) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.3);
  std::vector<double> z(g.size());
  for (double& x : z) x = noise(rng);
  auto state = [&](const std::vector<double>& zz) {
    edfd::Field u(zz.size());
    for (std::size_t k = 0; k < zz.size(); ++k) u[k] = std::exp(zz[k]);
    return u;
  };
  AscentResult best;
  best.u = state(z);
  best.ratio = production_ratio(g, best.u, c);
  double step = 0.1;
  bool stalled = false;
  for (int it = 0; it < max_iter && best.ratio <= 0.0 && !stalled; ++it) {
    best.iterations = it + 1;
    std::vector<double> grad(z.size());
    const double eps = 1e-6;
    for (std::size_t k = 0; k < z.size(); ++k) {
      auto zp = z;
      zp[k] += eps;
      grad[k] = (production_ratio(g, state(zp), c) - best.ratio) / eps;
    }
    double norm = 0.0;
    for (double x : grad) norm += x * x;
    norm = std::sqrt(norm);
    if (!(norm > 0.0)) break;
    for (;;) {
      auto trial = z;
      for (std::size_t k = 0; k < z.size(); ++k) trial[k] += step * grad[k] / norm;
      const auto u = state(trial);
      const double r = production_ratio(g, u, c);
      if (r > best.ratio) {
        z = trial;
        best.u = u;
        best.ratio = r;
        step *= 1.5;
        break;
      }
      step *= 0.5;
      if (step < 1e-12) {
        stalled = true;
        break;
      }
    }
  }
  best.production = edfd::entropy_production_2d(g, best.u, c);
  return best;
}

}  // namespace testing
