#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <optional>
#include <vector>

#include "edfd/error.hpp"

namespace testing {

inline std::vector<double> uniform_field(std::size_t n, double lo, double hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> f(n);
  for (double& x : f) x = d(rng);
  return f;
}

inline double max_abs(std::span<const double> f) {
  double m = 0.0;
  for (double x : f) m = std::max(m, std::abs(x));
  return m;
}

/// The code of the edfd::Error thrown by f, or nothing.
inline std::optional<edfd::ErrorCode> code_of(auto&& f) {
  try {
    f();
  } catch (const edfd::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

inline double rel_gap(double x, double y) {
  const double s = std::max({std::abs(x), std::abs(y), 1e-300});
  return std::abs(x - y) / s;
}

// Truncated Taylor series around a point: c[k] is the k-th coefficient.
template <std::size_t N>
struct Jet {
  std::array<double, N> c{};

  static Jet constant(double v) {
    Jet j;
    j.c[0] = v;
    return j;
  }
  double value() const { return c[0]; }
  // k-th derivative at the expansion point.
  double derivative(std::size_t k) const {
    double f = 1.0;
    for (std::size_t i = 2; i <= k; ++i) f *= static_cast<double>(i);
    return c[k] * f;
  }
  Jet d() const {
    Jet r;
    for (std::size_t k = 0; k + 1 < N; ++k) r.c[k] = static_cast<double>(k + 1) * c[k + 1];
    return r;
  }
  friend Jet operator+(Jet x, const Jet& y) {
    for (std::size_t k = 0; k < N; ++k) x.c[k] += y.c[k];
    return x;
  }
  friend Jet operator-(Jet x, const Jet& y) {
    for (std::size_t k = 0; k < N; ++k) x.c[k] -= y.c[k];
    return x;
  }
  friend Jet operator*(double s, Jet x) {
    for (double& v : x.c) v *= s;
    return x;
  }
  friend Jet operator*(const Jet& x, const Jet& y) {
    Jet r;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; i + j < N; ++j) r.c[i + j] += x.c[i] * y.c[j];
    return r;
  }
  friend Jet operator/(const Jet& x, const Jet& y) {
    Jet r;
    for (std::size_t k = 0; k < N; ++k) {
      double s = x.c[k];
      for (std::size_t j = 1; j <= k; ++j) s -= y.c[j] * r.c[k - j];
      r.c[k] = s / y.c[0];
    }
    return r;
  }
  friend Jet exp(const Jet& x) {
    Jet r;
    r.c[0] = std::exp(x.c[0]);
    for (std::size_t k = 1; k < N; ++k) {
      double s = 0.0;
      for (std::size_t j = 1; j <= k; ++j) s += static_cast<double>(j) * x.c[j] * r.c[k - j];
      r.c[k] = s / static_cast<double>(k);
    }
    return r;
  }
  friend Jet log(const Jet& x) {
    Jet r;
    r.c[0] = std::log(x.c[0]);
    for (std::size_t k = 1; k < N; ++k) {
      double s = static_cast<double>(k) * x.c[k];
      for (std::size_t j = 1; j < k; ++j) s -= static_cast<double>(j) * r.c[j] * x.c[k - j];
      r.c[k] = s / (static_cast<double>(k) * x.c[0]);
    }
    return r;
  }
  friend Jet pow(const Jet& x, double p) { return exp(p * log(x)); }
};

}  // namespace testing
