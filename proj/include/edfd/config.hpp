#pragma once

// Run configuration: flat `key = value` text grouped in [sections].
//
//   [model]    equation (dlss | thin-film, shorthand that sets a, b, beta), a, b, beta
//   [entropy]  alpha
//   [scheme]   dimension (1 | 2), variant, average, lambda4 (optimal | number),
//              allow_unguaranteed
//   [grid]     dims (e.g. 100 or 100x77), h (0 means 1/dims[0])
//   [initial]  preset, seed, value, image, floor
//   [solver]   method, jacobian, atol, rtol, dt_init, dt_min, dt_max,
//              newton_tol, newton_max_iter, enforce_positivity
//   [run]      t_end, output_times (comma list), out_dir
//   [convergence] n_list (comma list), n_ref
//
// '#' and ';' start comments. Keys may also be written as section.key.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "edfd/integrator.hpp"
#include "edfd/scheme1d.hpp"

namespace edfd {

struct RunConfig {
  double a = -2.0;
  double b = 1.0;
  double beta = 0.0;
  double alpha = 0.0;

  int dimension = 1;
  FluxVariant variant = FluxVariant::Central;
  AverageRule average = AverageRule::Identity;
  std::optional<double> lambda4;
  bool allow_unguaranteed = false;

  std::vector<std::size_t> dims{100};
  double h = 0.0;

  std::string preset = "sine";
  std::uint64_t seed = 1;
  double value = 1.0;
  std::string image;
  double floor = 1e-2;

  SolverConfig solver;

  double t_end = 1e-3;
  std::vector<double> output_times;
  std::string out_dir = "out";

  std::vector<std::size_t> n_list{32, 64, 128};
  std::size_t n_ref = 512;

  double grid_h() const { return h > 0.0 ? h : 1.0 / static_cast<double>(dims.at(0)); }

  bool operator==(const RunConfig&) const = default;
};

/// Throws ConfigError with the offending line on malformed input.
RunConfig parse_config(const std::string& text, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});

/// Applies one `key = value` (key as section.key or a bare unique key).
void set_config_value(RunConfig& config, const std::string& key, const std::string& value);

/// Full text form; parse_config(render_config(c)) == c.
std::string render_config(const RunConfig& config);

std::string to_string(FluxVariant v);
std::string to_string(AverageRule r);
std::string to_string(Method m);
std::string to_string(JacobianKind j);

}  // namespace edfd
