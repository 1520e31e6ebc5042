#include "edfd/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "edfd/error.hpp"
#include "edfd/scheme1d.hpp"

namespace edfd {

namespace {

void require_positive(std::span<const double> u) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] > 0.0)) {
      std::ostringstream msg;
      msg << "state is not strictly positive at index " << i << " (u = " << u[i] << ")";
      throw Error(ErrorCode::NonpositiveState, msg.str());
    }
  }
}

double slope(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace

double discrete_entropy(const TorusGrid& grid, std::span<const double> u,
                        const EntropySpec& entropy) {
  require_positive(u);
  Field s(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) s[i] = entropy_density(u[i], entropy.alpha());
  return integrate(grid, s);
}

double mass(const TorusGrid& grid, std::span<const double> u) noexcept {
  return integrate(grid, u);
}

double equilibrium_entropy(const TorusGrid& grid, std::span<const double> u,
                           const EntropySpec& entropy) {
  require_positive(u);
  const double mean = pairwise_sum(u) / static_cast<double>(u.size());
  return entropy_density(mean, entropy.alpha()) * grid.measure();
}

double high_frequency_energy(const TorusGrid& grid, std::span<const double> u) {
  Field e(grid.size(), 0.0);
  for (std::size_t axis = 0; axis < grid.dim(); ++axis) {
    const Field d = forward_diff(grid, u, axis);
    for (std::size_t k = 0; k < e.size(); ++k) e[k] += d[k] * d[k];
  }
  return integrate(grid, e);
}

double decay_rate(const TrajectoryRecord& record, double t0, double t1, double s_inf) {
  std::vector<double> ts;
  std::vector<double> logs;
  for (std::size_t k = 0; k < record.size(); ++k) {
    const double t = record.times[k];
    const double gap = record.entropy[k] - s_inf;
    if (t >= t0 && t <= t1 && gap > 0.0) {
      ts.push_back(t);
      logs.push_back(std::log(gap));
    }
  }
  if (ts.size() < 3 || std::all_of(ts.begin(), ts.end(), [&](double t) { return t == ts[0]; })) {
    std::ostringstream msg;
    msg << "decay window [" << t0 << ", " << t1 << "] holds " << ts.size()
        << " usable samples (need 3)";
    throw Error(ErrorCode::DegenerateWindow, msg.str());
  }
  return -slope(ts, logs);
}

double l2_error(const TorusGrid& coarse, std::span<const double> u, const TorusGrid& fine,
                std::span<const double> u_ref) {
  if (u.size() != coarse.size() || u_ref.size() != fine.size()) {
    throw Error(ErrorCode::InvalidArgument, "field size does not match its grid");
  }
  if (coarse.dim() != fine.dim()) {
    throw Error(ErrorCode::IncompatibleGrids, "grids have different dimensions");
  }
  std::vector<std::size_t> ratio(coarse.dim());
  for (std::size_t axis = 0; axis < coarse.dim(); ++axis) {
    const std::size_t nc = coarse.dims()[axis];
    const std::size_t nf = fine.dims()[axis];
    const double len_c = static_cast<double>(nc) * coarse.h();
    const double len_f = static_cast<double>(nf) * fine.h();
    if (nf % nc != 0 || std::abs(len_c - len_f) > 1e-12 * len_f) {
      std::ostringstream msg;
      msg << "fine resolution " << nf << " is not an integer multiple of " << nc
          << " on the same domain";
      throw Error(ErrorCode::IncompatibleGrids, msg.str());
    }
    ratio[axis] = nf / nc;
  }
  Field sq(coarse.size());
  for (std::size_t k = 0; k < coarse.size(); ++k) {
    std::size_t kf = 0;
    for (std::size_t axis = 0; axis < coarse.dim(); ++axis) {
      kf += coarse.coordinate(axis, k) * ratio[axis] * fine.stride(axis);
    }
    const double d = u[k] - u_ref[kf];
    sq[k] = d * d;
  }
  return std::sqrt(integrate(coarse, sq));
}

double convergence_order(std::span<const double> hs, std::span<const double> errors) {
  if (hs.size() != errors.size() || hs.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "need at least two (h, error) pairs");
  }
  std::vector<double> lh, le;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    if (!(hs[i] > 0.0) || !(errors[i] > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "h and error values must be positive");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (hs[j] == hs[i]) throw Error(ErrorCode::InvalidArgument, "duplicate h in the list");
    }
    lh.push_back(std::log(hs[i]));
    le.push_back(std::log(errors[i]));
  }
  return slope(lh, le);
}

}  // namespace edfd
