#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace edfd {

using Field = std::vector<double>;

/// Uniform periodic grid with spacing h shared by all axes. Storage is
/// row-major with the last axis varying fastest; neighbor lookups go through
/// precomputed wrap tables.
class TorusGrid {
 public:
  TorusGrid(std::vector<std::size_t> dims, double h);

  /// n points on the unit torus, h = 1/n.
  static TorusGrid unit(std::size_t n);

  const std::vector<std::size_t>& dims() const noexcept { return dims_; }
  std::size_t dim() const noexcept { return dims_.size(); }
  double h() const noexcept { return h_; }
  std::size_t size() const noexcept { return size_; }

  /// Quadrature weight h^d.
  double cell_volume() const noexcept { return cell_volume_; }
  double measure() const noexcept { return cell_volume_ * static_cast<double>(size_); }

  std::size_t next(std::size_t axis, std::size_t k) const noexcept {
    return next_[axis * size_ + k];
  }
  std::size_t prev(std::size_t axis, std::size_t k) const noexcept {
    return prev_[axis * size_ + k];
  }

  /// Integer coordinate of flat index k along an axis.
  std::size_t coordinate(std::size_t axis, std::size_t k) const noexcept {
    return (k / strides_[axis]) % dims_[axis];
  }
  std::size_t stride(std::size_t axis) const noexcept { return strides_[axis]; }

  /// Flat index of k shifted by `offset` points along `axis` (periodic).
  std::size_t shifted(std::size_t k, std::size_t axis, long offset) const noexcept;

  bool operator==(const TorusGrid& other) const noexcept {
    return dims_ == other.dims_ && h_ == other.h_;
  }

 private:
  std::vector<std::size_t> dims_;
  std::vector<std::size_t> strides_;
  double h_;
  std::size_t size_;
  double cell_volume_;
  std::vector<std::size_t> next_;
  std::vector<std::size_t> prev_;
};

struct VectorField {
  std::vector<Field> components;
};

Field forward_diff(const TorusGrid& grid, std::span<const double> f, std::size_t axis);
Field backward_diff(const TorusGrid& grid, std::span<const double> f, std::size_t axis);
VectorField gradient_fwd(const TorusGrid& grid, std::span<const double> f);
VectorField gradient_bwd(const TorusGrid& grid, std::span<const double> f);

/// Forward divergence sum_mu d_mu^+ F_mu.
Field divergence(const TorusGrid& grid, const VectorField& F);

/// div^+ grad^-, the standard (2d+1)-point Laplacian.
Field laplacian(const TorusGrid& grid, std::span<const double> f);

/// Fixed-order pairwise summation; results do not depend on thread count.
double pairwise_sum(std::span<const double> values) noexcept;

/// h^d sum_i f_i.
double integrate(const TorusGrid& grid, std::span<const double> f) noexcept;

/// For each column j, the rows whose stencil touches u_j, for a stencil made
/// of all offsets with |offset|_1 <= radius. Used for Jacobian coloring.
std::vector<std::vector<std::size_t>> stencil_pattern(const TorusGrid& grid,
                                                      int radius);

}  // namespace edfd
