#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "edfd/grid.hpp"

namespace edfd {

enum class Method { ImplicitEuler, BDF2, ExplicitRK45 };

enum class JacobianKind {
  FiniteDifferenceBanded,   // 1D periodic stencils, coupling within +-2 points
  FiniteDifferenceColored,  // any sparsity pattern, column coloring
  MatrixFree,               // Newton-Krylov, finite-difference J*v inside GMRES
};

struct SolverConfig {
  Method method = Method::BDF2;
  double atol = 1e-3;
  double rtol = 1e-6;
  /// Upper bound for the first step; integrate() shrinks it to
  /// 0.01 |u0| / |F(u0)| (weighted max norms) when that is smaller.
  double dt_init = 1e-10;
  double dt_min = 1e-40;
  double dt_max = 1.0;
  double newton_tol = 1e-10;
  int newton_max_iter = 25;
  JacobianKind jacobian = JacobianKind::FiniteDifferenceBanded;
  /// Reject Newton iterates and explicit stages that leave the positive cone.
  bool enforce_positivity = true;
  std::size_t max_steps = 5'000'000;

  void validate() const;

  bool operator==(const SolverConfig&) const = default;
};

struct StepResult {
  bool accepted = false;
  double dt_used = 0.0;
  double dt_next = 0.0;
  int newton_iters = 0;
  double error_estimate = 0.0;
};

/// du/dt = F(u). `pattern[j]` lists the rows of dF/du with a nonzero in
/// column j; an empty pattern means dense coupling.
struct OdeSystem {
  std::size_t size = 0;
  std::function<void(std::span<const double> u, std::span<double> du)> rhs;
  std::vector<std::vector<std::size_t>> pattern;
};

/// One adaptive integrator state. BDF2 keeps its own history and starts with
/// an implicit Euler step.
class Stepper {
 public:
  Stepper(const OdeSystem& system, const SolverConfig& config, Field u0, double t0 = 0.0);
  ~Stepper();
  Stepper(Stepper&&) noexcept;
  Stepper& operator=(Stepper&&) noexcept;

  /// Attempts a step of size dt. On acceptance the state and time advance.
  /// Throws StepSizeUnderflow or PositivityLoss when a rejected step would
  /// need dt below dt_min.
  StepResult try_step(double dt);

  double time() const noexcept;
  const Field& state() const noexcept;
  double last_dt() const noexcept;

  /// min(dt_init, 0.01 |u| / |F(u)|) in the weighted max norm.
  double initial_step();

  std::size_t accepted_steps() const noexcept;
  std::size_t rejected_steps() const noexcept;
  std::size_t rhs_evaluations() const noexcept;
  std::size_t jacobian_evaluations() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Single step from (u, t = 0) with one-step methods (BDF2 falls back to its
/// implicit Euler starter).
std::pair<Field, StepResult> step(std::span<const double> u, const OdeSystem& system,
                                  const SolverConfig& config, double dt);

using Observer = std::function<void(double t, std::span<const double> u, bool output_time)>;

struct IntegrationResult {
  Field final_state;
  double t_final = 0.0;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  std::size_t rhs_evaluations = 0;
  std::size_t jacobian_evaluations = 0;
};

/// Integrates to t_end with a PI step-size controller. Steps are shortened to
/// land exactly on each requested output time; the observer sees the initial
/// state, every accepted step, and is told which states are output times.
/// Errors are rethrown with the failing time in the message.
IntegrationResult integrate(const OdeSystem& system, Field u0, const SolverConfig& config,
                            double t_end, std::span<const double> output_times = {},
                            const Observer& observer = {});

}  // namespace edfd
