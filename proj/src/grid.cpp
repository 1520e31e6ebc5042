#include "edfd/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <sstream>

#include "edfd/error.hpp"

namespace edfd {

TorusGrid::TorusGrid(std::vector<std::size_t> dims, double h)
    : dims_(std::move(dims)), h_(h) {
  if (dims_.empty()) {
    throw Error(ErrorCode::InvalidArgument, "grid needs at least one axis");
  }
  if (!(h_ > 0.0) || !std::isfinite(h_)) {
    throw Error(ErrorCode::InvalidArgument, "grid spacing h must be positive");
  }
  for (std::size_t n : dims_) {
    if (n < 3) {
      std::ostringstream msg;
      msg << "every axis needs at least 3 points, got " << n;
      throw Error(ErrorCode::InvalidArgument, msg.str());
    }
  }
  const std::size_t d = dims_.size();
  strides_.assign(d, 1);
  for (std::size_t axis = d - 1; axis > 0; --axis) {
    strides_[axis - 1] = strides_[axis] * dims_[axis];
  }
  size_ = strides_[0] * dims_[0];
  cell_volume_ = std::pow(h_, static_cast<double>(d));

  next_.resize(d * size_);
  prev_.resize(d * size_);
  for (std::size_t axis = 0; axis < d; ++axis) {
    const std::size_t n = dims_[axis];
    const std::size_t s = strides_[axis];
    for (std::size_t k = 0; k < size_; ++k) {
      const std::size_t c = (k / s) % n;
      const std::size_t base = k - c * s;
      next_[axis * size_ + k] = base + ((c + 1) % n) * s;
      prev_[axis * size_ + k] = base + ((c + n - 1) % n) * s;
    }
  }
}

TorusGrid TorusGrid::unit(std::size_t n) {
  return TorusGrid({n}, 1.0 / static_cast<double>(n));
}

std::size_t TorusGrid::shifted(std::size_t k, std::size_t axis, long offset) const noexcept {
  const long n = static_cast<long>(dims_[axis]);
  const std::size_t s = strides_[axis];
  const long c = static_cast<long>((k / s) % dims_[axis]);
  const long c2 = ((c + offset) % n + n) % n;
  return k - static_cast<std::size_t>(c) * s + static_cast<std::size_t>(c2) * s;
}

Field forward_diff(const TorusGrid& grid, std::span<const double> f, std::size_t axis) {
  Field out(grid.size());
  const double inv_h = 1.0 / grid.h();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    out[k] = (f[grid.next(axis, k)] - f[k]) * inv_h;
  }
  return out;
}

Field backward_diff(const TorusGrid& grid, std::span<const double> f, std::size_t axis) {
  Field out(grid.size());
  const double inv_h = 1.0 / grid.h();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    out[k] = (f[k] - f[grid.prev(axis, k)]) * inv_h;
  }
  return out;
}

VectorField gradient_fwd(const TorusGrid& grid, std::span<const double> f) {
  VectorField g;
  for (std::size_t axis = 0; axis < grid.dim(); ++axis) {
    g.components.push_back(forward_diff(grid, f, axis));
  }
  return g;
}

VectorField gradient_bwd(const TorusGrid& grid, std::span<const double> f) {
  VectorField g;
  for (std::size_t axis = 0; axis < grid.dim(); ++axis) {
    g.components.push_back(backward_diff(grid, f, axis));
  }
  return g;
}

Field divergence(const TorusGrid& grid, const VectorField& F) {
  if (F.components.size() != grid.dim()) {
    throw Error(ErrorCode::InvalidArgument, "vector field has wrong component count");
  }
  Field out(grid.size(), 0.0);
  for (std::size_t axis = 0; axis < grid.dim(); ++axis) {
    const Field d = forward_diff(grid, F.components[axis], axis);
    for (std::size_t k = 0; k < grid.size(); ++k) out[k] += d[k];
  }
  return out;
}

Field laplacian(const TorusGrid& grid, std::span<const double> f) {
  return divergence(grid, gradient_bwd(grid, f));
}

double pairwise_sum(std::span<const double> values) noexcept {
  constexpr std::size_t kBlock = 64;
  if (values.size() <= kBlock) {
    double s = 0.0;
    for (double x : values) s += x;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double integrate(const TorusGrid& grid, std::span<const double> f) noexcept {
  return grid.cell_volume() * pairwise_sum(f);
}

std::vector<std::vector<std::size_t>> stencil_pattern(const TorusGrid& grid, int radius) {
  // All integer offsets with |offset|_1 <= radius.
  const std::size_t d = grid.dim();
  std::vector<std::vector<long>> offsets;
  std::vector<long> cur(d, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t axis, int budget) {
    if (axis == d) {
      offsets.push_back(cur);
      return;
    }
    for (long o = -budget; o <= budget; ++o) {
      cur[axis] = o;
      rec(axis + 1, budget - static_cast<int>(std::labs(o)));
    }
    cur[axis] = 0;
  };
  rec(0, radius);

  std::vector<std::vector<std::size_t>> pattern(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    auto& rows = pattern[j];
    for (const auto& off : offsets) {
      std::size_t k = j;
      for (std::size_t axis = 0; axis < d; ++axis) k = grid.shifted(k, axis, off[axis]);
      rows.push_back(k);
    }
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  }
  return pattern;
}

}  // namespace edfd
