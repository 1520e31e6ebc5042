#pragma once

// Experiment orchestration shared by the CLI and the C API.

#include <string>
#include <vector>

#include "edfd/config.hpp"
#include "edfd/diagnostics.hpp"
#include "edfd/pgm.hpp"
#include "edfd/problem.hpp"

namespace edfd {

/// Nodal samples x_i = i h of a named initial datum. On 2D grids the datum
/// varies along axis 0 only, except random-positive. Presets: cos16, step,
/// sine, sine-full, constant (uses `value`), random-positive (uses `seed`).
/// Throws UnknownPreset.
Field preset_initial_data(const std::string& name, const TorusGrid& grid,
                          std::uint64_t seed = 1, double value = 1.0);

/// Uniform values in [0.5, 1.5) from a portable 64-bit generator.
Field random_positive(std::size_t n, std::uint64_t seed);

/// Grid, scheme and initial state resolved from a configuration.
struct Problem {
  Discretization disc;
  Field u0;
  double K = 0.0;  // admissibility value; negative means no dissipation guarantee
};

Problem build_problem(const RunConfig& config);

struct EvolveSummary {
  TrajectoryRecord record;
  IntegrationResult stats;
  double K = 0.0;  // admissibility value of the configuration (2D: polynomial margin)
  std::vector<std::string> files;
};

/// Writes series.csv and snapshot_<t>.csv into config.out_dir.
EvolveSummary run_evolve(const RunConfig& config);

struct ConvergenceSummary {
  std::vector<double> hs;
  std::vector<double> errors;
  double order = 0.0;
};

/// Self-convergence study at t_end against the n_ref solution; writes
/// convergence.csv. Throws IncompatibleGrids when n_ref is not a multiple.
ConvergenceSummary run_convergence(const RunConfig& config);

/// 2D thin-film evolution of a PGM image (config.image, floor config.floor);
/// writes series.csv and denoised_<t>.pgm for each output time.
EvolveSummary run_denoise(const RunConfig& config);

enum class CheckStatus { Pass, Fail, NotGuaranteed };

struct CheckRow {
  std::string name;
  CheckStatus status;
  std::string detail;
};

struct CheckReport {
  std::vector<CheckRow> rows;
  bool passed() const;
  std::string table() const;
};

/// Runs the invariant suites for the configured scheme on random states.
CheckReport run_check(const RunConfig& config);

/// Formats t for file names: "1e-08", "0.0005".
std::string time_label(double t);

}  // namespace edfd
