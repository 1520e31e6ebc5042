#include "edfd/integrator.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "edfd/error.hpp"

namespace edfd {

namespace {

constexpr double kSafety = 0.9;
constexpr double kMaxGrowth = 5.0;
constexpr double kMinShrink = 0.2;
constexpr double kBdf2MaxRatio = 2.0;
constexpr double kRefreshRatio = 0.3;
constexpr double kReuseBand = 0.3;
// Relative size of rounding noise in a residual; Newton stops once the
// residual or the increment is at this level even if newton_tol is tighter.
constexpr double kRoundoff = 1024 * std::numeric_limits<double>::epsilon();

enum class Failure { None, Newton, Positivity, Linear };

bool all_positive(std::span<const double> u) {
  return std::all_of(u.begin(), u.end(), [](double x) { return x > 0.0; });
}

double weighted_max(std::span<const double> e, std::span<const double> ref_a,
                    std::span<const double> ref_b, double atol, double rtol) {
  double m = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double scale = atol + rtol * std::max(std::abs(ref_a[i]), std::abs(ref_b[i]));
    m = std::max(m, std::abs(e[i]) / scale);
  }
  return m;
}

struct Counters {
  std::size_t rhs = 0;
  std::size_t jacobians = 0;
};

class RhsEvaluator {
 public:
  RhsEvaluator(const OdeSystem& system, Counters& counters)
      : system_(system), counters_(counters) {}

  void operator()(std::span<const double> u, std::span<double> du) const {
    ++counters_.rhs;
    system_.rhs(u, du);
  }

  std::size_t size() const { return system_.size; }

 private:
  const OdeSystem& system_;
  Counters& counters_;
};

/// Solves (I - c J(y)) x = b for the Newton iteration of an implicit step.
class LinearSolver {
 public:
  virtual ~LinearSolver() = default;
  virtual bool prepare(std::span<const double> y, std::span<const double> fy, double c) = 0;
  virtual bool solve(std::span<const double> b, std::span<double> x) = 0;
};

class ColoredJacobianSolver final : public LinearSolver {
 public:
  ColoredJacobianSolver(const OdeSystem& system, const SolverConfig& config,
                        const RhsEvaluator& rhs, Counters& counters)
      : rhs_(rhs), counters_(counters), atol_(config.atol) {
    const std::size_t n = system.size;
    pattern_ = system.pattern;
    if (pattern_.empty()) {
      pattern_.assign(n, {});
      for (auto& col : pattern_) {
        col.resize(n);
        for (std::size_t i = 0; i < n; ++i) col[i] = i;
      }
    }
    if (pattern_.size() != n) {
      throw Error(ErrorCode::InvalidArgument, "sparsity pattern has the wrong column count");
    }
    for (std::size_t j = 0; j < n; ++j) {
      auto& col = pattern_[j];
      col.push_back(j);
      std::sort(col.begin(), col.end());
      col.erase(std::unique(col.begin(), col.end()), col.end());
    }
    if (config.jacobian == JacobianKind::FiniteDifferenceBanded) check_banded();
    build_coloring();

    std::vector<Eigen::Triplet<double>> triplets;
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i : pattern_[j]) {
        triplets.emplace_back(static_cast<int>(i), static_cast<int>(j), 1.0);
      }
    }
    matrix_.resize(static_cast<int>(n), static_cast<int>(n));
    matrix_.setFromTriplets(triplets.begin(), triplets.end());
    matrix_.makeCompressed();
  }

  bool prepare(std::span<const double> y, std::span<const double> fy, double c) override {
    ++counters_.jacobians;
    const std::size_t n = y.size();
    Field yp(y.begin(), y.end());
    Field fp(n);
    Field eps(n);
    const double sqrt_eps = std::sqrt(std::numeric_limits<double>::epsilon());
    for (std::size_t j = 0; j < n; ++j) eps[j] = sqrt_eps * std::max(std::abs(y[j]), atol_);

    double* values = matrix_.valuePtr();
    const int* outer = matrix_.outerIndexPtr();
    const int* inner = matrix_.innerIndexPtr();
    for (const auto& group : colors_) {
      for (std::size_t j : group) yp[j] = y[j] + eps[j];
      try {
        rhs_(yp, fp);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::NonpositiveState) return false;
        throw;
      }
      for (std::size_t j : group) {
        yp[j] = y[j];
        for (int p = outer[j]; p < outer[j + 1]; ++p) {
          const auto i = static_cast<std::size_t>(inner[p]);
          const double jac = (fp[i] - fy[i]) / eps[j];
          values[p] = (i == j ? 1.0 : 0.0) - c * jac;
        }
      }
    }
    if (!analyzed_) {
      lu_.analyzePattern(matrix_);
      analyzed_ = true;
    }
    lu_.factorize(matrix_);
    return lu_.info() == Eigen::Success;
  }

  bool solve(std::span<const double> b, std::span<double> x) override {
    Eigen::Map<const Eigen::VectorXd> bv(b.data(), static_cast<Eigen::Index>(b.size()));
    Eigen::VectorXd xv = lu_.solve(bv);
    if (lu_.info() != Eigen::Success || !xv.allFinite()) return false;
    std::copy(xv.data(), xv.data() + xv.size(), x.begin());
    return true;
  }

 private:
  void check_banded() const {
    const std::size_t n = pattern_.size();
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i : pattern_[j]) {
        const std::size_t d = i > j ? i - j : j - i;
        if (std::min(d, n - d) > 2) {
          throw Error(ErrorCode::InvalidArgument,
                      "banded Jacobian requested but the system couples beyond +-2 points");
        }
      }
    }
  }

  // Greedy distance-2 coloring: columns sharing a row get different colors.
  void build_coloring() {
    const std::size_t n = pattern_.size();
    std::vector<std::vector<std::size_t>> row_cols(n);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i : pattern_[j]) row_cols[i].push_back(j);
    }
    std::vector<int> color(n, -1);
    std::vector<std::size_t> mark;
    int ncolors = 0;
    for (std::size_t j = 0; j < n; ++j) {
      mark.assign(static_cast<std::size_t>(ncolors) + 1, n);
      for (std::size_t i : pattern_[j]) {
        for (std::size_t k : row_cols[i]) {
          if (color[k] >= 0) mark[static_cast<std::size_t>(color[k])] = j;
        }
      }
      int c = 0;
      while (mark[static_cast<std::size_t>(c)] == j) ++c;
      color[j] = c;
      ncolors = std::max(ncolors, c + 1);
    }
    colors_.assign(static_cast<std::size_t>(ncolors), {});
    for (std::size_t j = 0; j < n; ++j) colors_[static_cast<std::size_t>(color[j])].push_back(j);
  }

  const RhsEvaluator& rhs_;
  Counters& counters_;
  double atol_;
  std::vector<std::vector<std::size_t>> pattern_;
  std::vector<std::vector<std::size_t>> colors_;
  Eigen::SparseMatrix<double> matrix_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
  bool analyzed_ = false;
};

// Restarted GMRES on x - c (F(y + e x) - F(y)) / e.
class MatrixFreeSolver final : public LinearSolver {
 public:
  MatrixFreeSolver(const RhsEvaluator& rhs) : rhs_(rhs) {}

  bool prepare(std::span<const double> y, std::span<const double> fy, double c) override {
    y_.assign(y.begin(), y.end());
    fy_.assign(fy.begin(), fy.end());
    c_ = c;
    return true;
  }

  bool solve(std::span<const double> b, std::span<double> x) override {
    const std::size_t n = b.size();
    constexpr int kRestart = 40;
    constexpr int kMaxCycles = 25;
    constexpr double kRelTol = 1e-12;

    std::fill(x.begin(), x.end(), 0.0);
    const double bnorm = norm(b);
    if (bnorm == 0.0) return true;

    Field r(b.begin(), b.end());
    Field w(n);
    for (int cycle = 0; cycle < kMaxCycles; ++cycle) {
      const double beta = norm(r);
      if (beta <= kRelTol * bnorm) return true;
      std::vector<Field> V(1, Field(n));
      for (std::size_t i = 0; i < n; ++i) V[0][i] = r[i] / beta;
      std::vector<std::vector<double>> H(kRestart + 1, std::vector<double>(kRestart, 0.0));
      std::vector<double> cs(kRestart), sn(kRestart), g(kRestart + 1, 0.0);
      g[0] = beta;
      int k = 0;
      for (; k < kRestart; ++k) {
        if (!apply(V[static_cast<std::size_t>(k)], w)) return false;
        for (int i = 0; i <= k; ++i) {
          H[i][k] = dot(w, V[static_cast<std::size_t>(i)]);
          for (std::size_t p = 0; p < n; ++p) w[p] -= H[i][k] * V[static_cast<std::size_t>(i)][p];
        }
        H[k + 1][k] = norm(w);
        for (int i = 0; i < k; ++i) {
          const double t = cs[i] * H[i][k] + sn[i] * H[i + 1][k];
          H[i + 1][k] = -sn[i] * H[i][k] + cs[i] * H[i + 1][k];
          H[i][k] = t;
        }
        const double denom = std::hypot(H[k][k], H[k + 1][k]);
        if (denom == 0.0) break;
        cs[k] = H[k][k] / denom;
        sn[k] = H[k + 1][k] / denom;
        const double hk1 = H[k + 1][k];
        H[k][k] = cs[k] * H[k][k] + sn[k] * hk1;
        H[k + 1][k] = 0.0;
        g[k + 1] = -sn[k] * g[k];
        g[k] = cs[k] * g[k];
        if (std::abs(g[k + 1]) <= kRelTol * bnorm || hk1 == 0.0) {
          ++k;
          break;
        }
        Field next(n);
        for (std::size_t p = 0; p < n; ++p) next[p] = w[p] / hk1;
        V.push_back(std::move(next));
      }
      // Back substitution for the k x k upper-triangular system.
      std::vector<double> yk(static_cast<std::size_t>(k), 0.0);
      for (int i = k - 1; i >= 0; --i) {
        double s = g[i];
        for (int j = i + 1; j < k; ++j) s -= H[i][j] * yk[static_cast<std::size_t>(j)];
        yk[static_cast<std::size_t>(i)] = s / H[i][i];
      }
      for (int i = 0; i < k; ++i) {
        for (std::size_t p = 0; p < n; ++p) x[p] += yk[static_cast<std::size_t>(i)] * V[static_cast<std::size_t>(i)][p];
      }
      if (!apply(Field(x.begin(), x.end()), w)) return false;
      for (std::size_t p = 0; p < n; ++p) r[p] = b[p] - w[p];
    }
    return norm(r) <= 1e-6 * bnorm;
  }

 private:
  static double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  }
  static double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

  bool apply(std::span<const double> v, std::span<double> out) {
    const double vn = norm(v);
    if (vn == 0.0) {
      std::fill(out.begin(), out.end(), 0.0);
      return true;
    }
    const double e = std::sqrt(std::numeric_limits<double>::epsilon()) * (1.0 + norm(y_)) / vn;
    Field yp(y_.size());
    Field fp(y_.size());
    for (std::size_t i = 0; i < y_.size(); ++i) yp[i] = y_[i] + e * v[i];
    try {
      rhs_(yp, fp);
    } catch (const Error& err) {
      if (err.code() == ErrorCode::NonpositiveState) return false;
      throw;
    }
    for (std::size_t i = 0; i < y_.size(); ++i) out[i] = v[i] - c_ * (fp[i] - fy_[i]) / e;
    return true;
  }

  const RhsEvaluator& rhs_;
  Field y_;
  Field fy_;
  double c_ = 0.0;
};

// Dormand-Prince 5(4) tableau.
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr double kErr[7] = {71.0 / 57600,      0.0,        -71.0 / 16695, 71.0 / 1920,
                            -17253.0 / 339200, 22.0 / 525, -1.0 / 40};

}  // namespace

void SolverConfig::validate() const {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, what); };
  if (!(atol > 0.0) || !(rtol > 0.0)) bad("atol and rtol must be positive");
  if (!(dt_min > 0.0) || !(dt_min <= dt_init) || !(dt_init <= dt_max)) {
    bad("step sizes must satisfy 0 < dt_min <= dt_init <= dt_max");
  }
  if (!(newton_tol > 0.0)) bad("newton_tol must be positive");
  if (newton_max_iter < 1) bad("newton_max_iter must be at least 1");
}

struct Stepper::Impl {
  OdeSystem system;
  SolverConfig config;
  Counters counters;
  RhsEvaluator rhs{system, counters};
  std::unique_ptr<LinearSolver> solver;

  double t = 0.0;
  Field u;
  Field fu;
  bool fu_valid = false;

  // Previous accepted states, most recent first: (t_{n-1}, u_{n-1}), (t_{n-2}, u_{n-2}).
  std::vector<std::pair<double, Field>> history;

  double last_dt = 0.0;
  double err_prev = 1.0;
  double factor_c = 0.0;
  bool factor_valid = false;
  std::size_t accepted = 0;
  std::size_t rejected = 0;

  Impl(const OdeSystem& sys, const SolverConfig& cfg, Field u0, double t0)
      : system(sys), config(cfg), t(t0), u(std::move(u0)) {
    config.validate();
    if (!system.rhs) throw Error(ErrorCode::InvalidArgument, "ODE system has no rhs");
    if (u.size() != system.size) {
      throw Error(ErrorCode::InvalidArgument, "initial state has the wrong size");
    }
    if (config.enforce_positivity && !all_positive(u)) {
      throw Error(ErrorCode::NonpositiveState, "initial state is not strictly positive");
    }
    if (config.method != Method::ExplicitRK45) {
      if (config.jacobian == JacobianKind::MatrixFree) {
        solver = std::make_unique<MatrixFreeSolver>(rhs);
      } else {
        solver = std::make_unique<ColoredJacobianSolver>(system, config, rhs, counters);
      }
    }
    fu.resize(u.size());
  }

  bool refactor(std::span<const double> y, std::span<const double> fy, double c) {
    factor_valid = solver->prepare(y, fy, c);
    factor_c = c;
    return factor_valid;
  }

  void ensure_fu() {
    if (!fu_valid) {
      rhs(u, fu);
      fu_valid = true;
    }
  }

  bool admissible(std::span<const double> y) const {
    if (!config.enforce_positivity) {
      return std::all_of(y.begin(), y.end(), [](double x) { return std::isfinite(x); });
    }
    return all_positive(y);
  }

  double controller(double err, int order) const {
    const double k = 1.0 / (order + 1);
    if (err == 0.0) return kMaxGrowth;
    const double fac = kSafety * std::pow(err, -0.7 * k) * std::pow(err_prev, 0.4 * k);
    return std::clamp(fac, kMinShrink, kMaxGrowth);
  }

  StepResult reject(double dt, double factor, Failure why, int iters, double err) {
    ++rejected;
    StepResult res;
    res.accepted = false;
    res.dt_used = dt;
    res.dt_next = dt * factor;
    res.newton_iters = iters;
    res.error_estimate = err;
    const double floor = std::max(config.dt_min, 4.0 * std::numeric_limits<double>::epsilon() * std::abs(t));
    if (res.dt_next < floor) {
      std::ostringstream msg;
      if (why == Failure::Positivity) {
        msg << "no positive solution path at dt = " << res.dt_next << " (dt_min "
            << floor << ")";
        throw Error(ErrorCode::PositivityLoss, msg.str());
      }
      msg << "step size " << res.dt_next << " fell below the minimum " << floor;
      throw Error(ErrorCode::StepSizeUnderflow, msg.str());
    }
    return res;
  }

  void accept(double dt, Field y, Field fy, bool fy_valid, double err) {
    history.insert(history.begin(), {t, std::move(u)});
    if (history.size() > 2) history.pop_back();
    t += dt;
    u = std::move(y);
    fu = std::move(fy);
    fu_valid = fy_valid;
    if (!fu_valid) fu.assign(u.size(), 0.0);
    last_dt = dt;
    err_prev = std::max(err, 1e-4);
    ++accepted;
  }

  StepResult implicit_step(double dt) {
    const std::size_t n = u.size();
    const double atol = config.atol;
    const double rtol = config.rtol;

    bool bdf2 = config.method == Method::BDF2 && !history.empty();
    double omega = 0.0;
    if (bdf2) {
      omega = dt / (t - history[0].first);
      if (omega > kBdf2MaxRatio + 0.5) bdf2 = false;
    }
    const double gamma = bdf2 ? (1.0 + omega) / (1.0 + 2.0 * omega) : 1.0;
    const double c = gamma * dt;

    Field psi(n);
    Field y(n);
    if (bdf2) {
      const Field& um = history[0].second;
      // ((1+w)^2 u_n - w^2 u_{n-1}) / (1+2w), written so a steady state stays bit-exact.
      const double cm = omega * omega / (1.0 + 2.0 * omega);
      for (std::size_t i = 0; i < n; ++i) {
        psi[i] = u[i] + cm * (u[i] - um[i]);
        y[i] = u[i] + omega * (u[i] - um[i]);
      }
      if (!admissible(y)) y = u;
    } else {
      psi = u;
      y = u;
    }

    ensure_fu();
    Field fy(n);
    Field r(n);
    Field delta(n);
    Field trial(n);
    // Reuse the previous factorization while c stays close to the factored value.
    bool prepared = factor_valid && std::abs(c / factor_c - 1.0) <= kReuseBand;
    bool fresh = false;
    bool refresh = false;
    bool converged = false;
    int iters = 0;
    double prev_norm = std::numeric_limits<double>::infinity();

    auto eval = [&](std::span<const double> state, std::span<double> out) -> bool {
      try {
        rhs(state, out);
        return true;
      } catch (const Error& e) {
        if (e.code() == ErrorCode::NonpositiveState ||
            e.code() == ErrorCode::ZeroEntropyVariable) {
          return false;
        }
        throw;
      }
    };

    auto scale = [&](std::size_t i) { return atol + rtol * std::max(std::abs(u[i]), std::abs(y[i])); };

    if (!eval(y, fy)) return reject(dt, 0.5, Failure::Positivity, 0, 0.0);
    for (iters = 1; iters <= config.newton_max_iter; ++iters) {
      double rmax = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        r[i] = y[i] - psi[i] - c * fy[i];
        const double noise = kRoundoff * (std::abs(y[i]) + std::abs(psi[i]) + std::abs(c * fy[i]));
        rmax = std::max(rmax, std::abs(r[i]) / (config.newton_tol * scale(i) + noise));
      }
      if (rmax <= 1.0) {
        converged = true;
        break;
      }
      if (!prepared || refresh) {
        if (!refactor(y, fy, c)) return reject(dt, 0.5, Failure::Linear, iters, 0.0);
        prepared = true;
        fresh = true;
        refresh = false;
      }
      for (std::size_t i = 0; i < n; ++i) r[i] = -r[i];
      if (!solver->solve(r, delta)) return reject(dt, 0.5, Failure::Linear, iters, 0.0);

      double theta = 1.0;
      bool positive = false;
      for (int halving = 0; halving < 40; ++halving) {
        for (std::size_t i = 0; i < n; ++i) trial[i] = y[i] + theta * delta[i];
        if (admissible(trial)) {
          positive = true;
          break;
        }
        theta *= 0.5;
      }
      if (!positive) return reject(dt, 0.5, Failure::Positivity, iters, 0.0);
      for (std::size_t i = 0; i < n; ++i) delta[i] = trial[i] - y[i];
      const double dnorm = weighted_max(delta, u, trial, atol, rtol);
      bool small_step = true;
      for (std::size_t i = 0; i < n && small_step; ++i) {
        small_step = std::abs(delta[i]) <= config.newton_tol * scale(i) + kRoundoff * std::abs(y[i]);
      }
      y.swap(trial);
      if (!eval(y, fy)) return reject(dt, 0.5, Failure::Positivity, iters, 0.0);
      if (small_step) {
        converged = true;
        break;
      }
      if (iters > 1 && dnorm > 2.0 * prev_norm) {
        if (fresh) break;
        refresh = true;
      }
      // Slow contraction: the frozen Jacobian is stale, switch to full Newton.
      if (dnorm > kRefreshRatio * prev_norm) refresh = true;
      prev_norm = dnorm;
    }
    if (!converged) return reject(dt, 0.5, Failure::Newton, iters, 0.0);

    // Local error estimate.
    Field e(n);
    int order = 1;
    if (bdf2 && history.size() >= 2) {
      order = 2;
      const double t0 = history[1].first;
      const double t1 = history[0].first;
      const double t2 = t;
      const double t3 = t + dt;
      const Field& u0 = history[1].second;
      const Field& u1 = history[0].second;
      const double h_prev = t2 - t1;
      const double lte_scale = dt * dt * (dt + h_prev) * (1.0 + omega) / (1.0 + 2.0 * omega);
      for (std::size_t i = 0; i < n; ++i) {
        const double d01 = (u1[i] - u0[i]) / (t1 - t0);
        const double d12 = (u[i] - u1[i]) / (t2 - t1);
        const double d23 = (y[i] - u[i]) / (t3 - t2);
        const double d012 = (d12 - d01) / (t2 - t0);
        const double d123 = (d23 - d12) / (t3 - t1);
        const double d0123 = (d123 - d012) / (t3 - t0);
        e[i] = d0123 * lte_scale;
      }
    } else {
      // Implicit Euler: (I - c J)^{-1} (y - u - dt F(u)) / 2 damps the stiff modes.
      Field rhs_e(n);
      for (std::size_t i = 0; i < n; ++i) rhs_e[i] = 0.5 * (y[i] - u[i] - dt * fu[i]);
      if (!prepared) {
        if (!refactor(y, fy, c)) return reject(dt, 0.5, Failure::Linear, iters, 0.0);
        prepared = true;
      }
      if (!solver->solve(rhs_e, e)) return reject(dt, 0.5, Failure::Linear, iters, 0.0);
    }
    const double err = weighted_max(e, u, y, atol, rtol);
    if (!(err <= 1.0)) {
      const double fac = std::isfinite(err)
                             ? std::max(0.1, kSafety * std::pow(err, -1.0 / (order + 1)))
                             : 0.1;
      return reject(dt, fac, Failure::None, iters, err);
    }
    StepResult res;
    res.accepted = true;
    res.dt_used = dt;
    res.dt_next = std::min(config.dt_max, dt * controller(err, order));
    res.newton_iters = iters;
    res.error_estimate = err;
    accept(dt, std::move(y), std::move(fy), true, err);
    return res;
  }

  StepResult rk_step(double dt) {
    const std::size_t n = u.size();
    ensure_fu();
    std::vector<Field> k(7, Field(n));
    k[0] = fu;
    Field stage(n);
    for (int s = 1; s < 7; ++s) {
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < s; ++j) acc += kA[s][j] * k[static_cast<std::size_t>(j)][i];
        stage[i] = u[i] + dt * acc;
      }
      if (!admissible(stage)) return reject(dt, 0.5, Failure::Positivity, 0, 0.0);
      try {
        rhs(stage, k[static_cast<std::size_t>(s)]);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::NonpositiveState) {
          return reject(dt, 0.5, Failure::Positivity, 0, 0.0);
        }
        throw;
      }
    }
    // Stage 7 is evaluated at the 5th-order solution (FSAL).
    Field e(n);
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int j = 0; j < 7; ++j) acc += kErr[j] * k[static_cast<std::size_t>(j)][i];
      e[i] = dt * acc;
    }
    const double err = weighted_max(e, u, stage, config.atol, config.rtol);
    if (!(err <= 1.0)) {
      const double fac = std::isfinite(err) ? std::max(0.1, kSafety * std::pow(err, -0.2)) : 0.1;
      return reject(dt, fac, Failure::None, 0, err);
    }
    StepResult res;
    res.accepted = true;
    res.dt_used = dt;
    res.dt_next = std::min(config.dt_max, dt * controller(err, 4));
    res.error_estimate = err;
    accept(dt, std::move(stage), std::move(k[6]), true, err);
    return res;
  }
};

Stepper::Stepper(const OdeSystem& system, const SolverConfig& config, Field u0, double t0)
    : impl_(std::make_unique<Impl>(system, config, std::move(u0), t0)) {}
Stepper::~Stepper() = default;
Stepper::Stepper(Stepper&&) noexcept = default;
Stepper& Stepper::operator=(Stepper&&) noexcept = default;

StepResult Stepper::try_step(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw Error(ErrorCode::InvalidArgument, "step size must be positive and finite");
  }
  return impl_->config.method == Method::ExplicitRK45 ? impl_->rk_step(dt)
                                                      : impl_->implicit_step(dt);
}

double Stepper::time() const noexcept { return impl_->t; }
const Field& Stepper::state() const noexcept { return impl_->u; }
double Stepper::last_dt() const noexcept { return impl_->last_dt; }

double Stepper::initial_step() {
  Impl& m = *impl_;
  m.ensure_fu();
  const double du = weighted_max(m.u, m.u, m.u, m.config.atol, m.config.rtol);
  const double df = weighted_max(m.fu, m.u, m.u, m.config.atol, m.config.rtol);
  double dt = m.config.dt_init;
  if (df > 0.0) dt = std::min(dt, 0.01 * std::max(du, 1.0) / df);
  return std::max(dt, m.config.dt_min);
}
std::size_t Stepper::accepted_steps() const noexcept { return impl_->accepted; }
std::size_t Stepper::rejected_steps() const noexcept { return impl_->rejected; }
std::size_t Stepper::rhs_evaluations() const noexcept { return impl_->counters.rhs; }
std::size_t Stepper::jacobian_evaluations() const noexcept { return impl_->counters.jacobians; }

std::pair<Field, StepResult> step(std::span<const double> u, const OdeSystem& system,
                                  const SolverConfig& config, double dt) {
  Stepper stepper(system, config, Field(u.begin(), u.end()));
  StepResult res = stepper.try_step(dt);
  return {stepper.state(), res};
}

IntegrationResult integrate(const OdeSystem& system, Field u0, const SolverConfig& config,
                            double t_end, std::span<const double> output_times,
                            const Observer& observer) {
  if (!(t_end > 0.0)) throw Error(ErrorCode::InvalidArgument, "t_end must be positive");
  std::vector<double> outs;
  for (double t : output_times) {
    if (t > 0.0 && t <= t_end) outs.push_back(t);
  }
  std::sort(outs.begin(), outs.end());
  outs.erase(std::unique(outs.begin(), outs.end()), outs.end());
  if (outs.empty() || outs.back() != t_end) outs.push_back(t_end);

  const bool initial_is_output =
      std::any_of(output_times.begin(), output_times.end(), [](double t) { return t == 0.0; });

  Stepper stepper(system, config, std::move(u0));
  if (observer) observer(0.0, stepper.state(), initial_is_output);

  double dt = stepper.initial_step();
  std::size_t next_out = 0;
  const bool bdf2 = config.method == Method::BDF2;
  try {
    while (next_out < outs.size()) {
      if (stepper.accepted_steps() + stepper.rejected_steps() >= config.max_steps) {
        throw Error(ErrorCode::StepSizeUnderflow, "step budget exhausted");
      }
      const double t = stepper.time();
      const double target = outs[next_out];
      double h = std::min(dt, config.dt_max);
      if (bdf2 && stepper.last_dt() > 0.0) h = std::min(h, kBdf2MaxRatio * stepper.last_dt());
      bool lands = false;
      if (t + h >= target - 1e-12 * std::abs(target)) {
        h = target - t;
        lands = true;
      } else if (t + 2.0 * h > target) {
        // Split the remainder evenly instead of leaving a sliver.
        h = 0.5 * (target - t);
      }
      const StepResult res = stepper.try_step(h);
      if (!res.accepted) {
        dt = res.dt_next;
        continue;
      }
      if (lands) {
        // Snap to the requested time; accumulated rounding stays below 1 ulp-ish.
        ++next_out;
      }
      dt = lands ? std::max(res.dt_next, dt) : res.dt_next;
      if (observer) observer(lands ? target : stepper.time(), stepper.state(), lands);
    }
  } catch (const Error& e) {
    std::ostringstream msg;
    msg << e.what() << " (at t = " << stepper.time() << ")";
    throw Error(e.code(), msg.str());
  }

  IntegrationResult result;
  result.final_state = stepper.state();
  result.t_final = t_end;
  result.accepted_steps = stepper.accepted_steps();
  result.rejected_steps = stepper.rejected_steps();
  result.rhs_evaluations = stepper.rhs_evaluations();
  result.jacobian_evaluations = stepper.jacobian_evaluations();
  return result;
}

}  // namespace edfd
