// Acceptance gates: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "ascent.hpp"
#include "edfd/coeffs.hpp"
#include "edfd/diagnostics.hpp"
#include "edfd/error.hpp"
#include "edfd/experiments.hpp"
#include "edfd/pgm.hpp"
#include "edfd/problem.hpp"
#include "edfd/scheme1d.hpp"
#include "edfd/scheme2d.hpp"

#ifndef EDFD_DATA_DIR
#define EDFD_DATA_DIR "data"
#endif

using namespace edfd;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... xs) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, xs...);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double rel(double x, double y) {
  return std::abs(x - y) / std::max({std::abs(x), std::abs(y), 1e-300});
}

Field random_state(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(0.2, 2.0);
  Field u(n);
  for (double& x : u) x = d(rng);
  return u;
}

double h_sum_v_rhs(const TorusGrid& g, std::span<const double> u, std::span<const double> du,
                   double alpha) {
  Field p(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) p[i] = entropy_derivative(u[i], alpha) * du[i];
  return integrate(g, p);
}

// Largest entropy increase between accepted steps beyond the allowed slack.
struct TrajectoryStats {
  double worst_excess = -INFINITY;  // max over k of (S_k - S_{k-1}) - slack_k
  double max_rise = 0.0;
  double mass_drift = 0.0;
  double min_u = INFINITY;
};

TrajectoryStats trajectory_stats(const TrajectoryRecord& r, double slack_abs, double slack_rel) {
  TrajectoryStats s;
  for (std::size_t k = 0; k < r.size(); ++k) {
    s.min_u = std::min(s.min_u, r.min_u[k]);
    s.mass_drift = std::max(s.mass_drift, std::abs(r.mass[k] - r.mass[0]) / std::abs(r.mass[0]));
    if (k == 0) continue;
    const double rise = r.entropy[k] - r.entropy[k - 1];
    s.max_rise = std::max(s.max_rise, rise);
    s.worst_excess = std::max(s.worst_excess, rise - (slack_abs + slack_rel * std::abs(r.entropy[k - 1])));
  }
  return s;
}

Verdict c1_identification() {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> A(0.0, 3.0), B(0.0, 4.0), a(-3.0, 1.0), b(-1.0, 2.0),
      L(-5.0, 5.0);
  const auto t0 = Clock::now();
  double worst = 0.0;
  int done = 0;
  while (done < 1000) {
    const double alpha = A(rng), beta = B(rng), aa = a(rng), bb = b(rng), l4 = L(rng);
    if (alpha == 1.0) continue;
    const EntropySpec e(alpha);
    const ModelParams m{aa, bb, beta};
    worst = std::max(worst, verify_flux_identification(lambda_general(e, m, l4), e, m));
    ++done;
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-10 && t < 1.0, fmt("max residual %.3g over 1000 samples in %.3f s", worst, t)};
}

Verdict c2_optimality() {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> A(0.0, 3.0), B(0.0, 4.0), a(-3.0, 1.0), b(-1.0, 2.0);
  double worst_gap = 0.0, worst_gain = -INFINITY;
  for (int s = 0; s < 500; ++s) {
    const double alpha = A(rng), beta = B(rng);
    const ModelParams m{a(rng), b(rng), beta};
    const EntropySpec e(alpha);
    const double l4 = lambda4_optimal(e, m);
    auto margin = [&](double x) { return nonneg_margin(poly_spec(e, lambda_for(e, m, x))); };
    const double best = margin(l4);
    const double expect = 4.0 * admissibility_K(e, m) / (9.0 * (alpha - 1.0) * (alpha - 1.0));
    worst_gap = std::max(worst_gap, rel(best, expect));
    for (double d : {-0.1, 0.1}) {
      worst_gain = std::max(worst_gain, (margin(l4 + d) - best) / std::max(std::abs(best), 1.0));
    }
  }
  return {worst_gap <= 1e-9 && worst_gain <= 1e-12,
          fmt("max relative gap %.3g, max perturbation gain %.3g over 500 samples", worst_gap, worst_gain)};
}

Verdict c3_regions() {
  int mismatches = 0;
  double boundary = 0.0;
  auto classify = [&](double K, bool inside) {
    if (inside ? K < -1e-9 : K >= 0.0) ++mismatches;
  };
  for (int i = 0; i <= 3000; ++i) {
    const double alpha = i / 1000.0;
    const double K = admissibility_K(EntropySpec(alpha), ModelParams::dlss());
    if (i == 0 || i == 1500) {
      boundary = std::max(boundary, std::abs(K));
    } else {
      classify(K, alpha <= 1.5);
    }
  }
  for (double alpha : {0.0, 0.5, 1.0, 2.0}) {
    for (int j = static_cast<int>(alpha * 1000); j <= 4500; ++j) {
      const double s = j / 1000.0;
      const double beta = s - alpha;
      if (beta < 0.0) continue;
      const double K = admissibility_K(EntropySpec(alpha), ModelParams::thin_film(beta));
      if (j == 1500 || j == 3000) {
        boundary = std::max(boundary, std::abs(K));
      } else {
        classify(K, s >= 1.5 && s <= 3.0);
      }
    }
  }
  return {mismatches == 0 && boundary <= 1e-9,
          fmt("%d sign mismatches on the 1e-3 sweeps, max |K| at the boundaries %.3g", mismatches, boundary)};
}

Verdict c4_identity() {
  struct Variant {
    const char* name;
    SchemeConfig c;
  };
  const std::vector<Variant> variants{
      {"1D central", make_scheme_config(EntropySpec(0.5), ModelParams::dlss())},
      {"1D noncentral", make_scheme_config(EntropySpec(0.5), ModelParams::dlss(), FluxVariant::Noncentral)},
      {"alpha=0", make_scheme_config(EntropySpec(0.0), ModelParams::thin_film(2.0))},
      {"alpha=1", make_scheme_config(EntropySpec(1.0), ModelParams::thin_film(2.0))},
  };
  std::mt19937_64 rng(4);
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::string where;
  const TorusGrid g1 = TorusGrid::unit(64);
  for (const auto& v : variants) {
    for (int s = 0; s < 100; ++s) {
      const Field u = random_state(64, rng);
      const double gap = rel(h_sum_v_rhs(g1, u, rhs(g1, u, v.c), v.c.entropy.alpha()),
                             entropy_production_closed_form(g1, u, v.c));
      if (gap > worst) {
        worst = gap;
        where = v.name;
      }
    }
  }
  const TorusGrid g2({32, 32}, 1.0 / 32);
  const auto c2 = make_scheme2d_config(2.0);
  for (int s = 0; s < 100; ++s) {
    const Field u = random_state(g2.size(), rng);
    const double gap = rel(h_sum_v_rhs(g2, u, rhs_2d(g2, u, c2), 0.0), entropy_production_2d(g2, u, c2));
    if (gap > worst) {
      worst = gap;
      where = "2D beta=2";
    }
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-10 && t < 10.0,
          fmt("max relative gap %.3g (%s), 500 states in %.2f s", worst, where.c_str(), t)};
}

Verdict c5_chain_product() {
  std::mt19937_64 rng(5);
  double chain = 0.0, product = 0.0;
  for (double alpha : {0.0, 0.5, 2.0, 2.5}) {
    for (std::size_t n : {8u, 16u, 64u}) {
      const TorusGrid g = TorusGrid::unit(n);
      for (int s = 0; s < 20; ++s) {
        const Field u = random_state(n, rng);
        const auto vars = entropy_variables(u, EntropySpec(alpha));
        const auto xi = xi_central(g, vars);
        const auto& v = vars.v;
        const double h2 = g.h() * g.h();
        for (std::size_t i = 0; i < n; ++i) {
          const double vp = v[g.next(0, i)], vm = v[g.prev(0, i)];
          const double lhs = (vp * vp - 2 * v[i] * v[i] + vm * vm) / (2 * h2);
          const double r = v[i] * v[i] * (xi.xi2[i] + xi.xi1sq[i]);
          const double scale = (vp * vp + 2 * v[i] * v[i] + vm * vm) / (2 * h2);
          chain = std::max(chain, std::abs(lhs - r) / scale);
        }
      }
    }
  }
  for (auto dims : {std::vector<std::size_t>{10, 7}, std::vector<std::size_t>{16, 16}}) {
    const TorusGrid g(dims, 1.0 / dims[0]);
    for (int s = 0; s < 20; ++s) {
      const Field u = random_state(g.size(), rng);
      Field v(g.size());
      for (std::size_t k = 0; k < g.size(); ++k) v[k] = -1.0 / u[k];
      const auto xi = xi_2d(g, v);
      const auto gm = gradient_bwd(g, v);
      VectorField vg;
      for (const auto& comp : gm.components) {
        Field p(g.size());
        for (std::size_t k = 0; k < g.size(); ++k) p[k] = v[k] * comp[k];
        vg.components.push_back(p);
      }
      const auto lhs = divergence(g, vg);
      for (std::size_t k = 0; k < g.size(); ++k) {
        const double r = v[k] * v[k] * (xi.xi2[k] + xi.xi1sq[k]);
        const double scale = v[k] * v[k] * (std::abs(xi.xi2[k]) + xi.xi1sq[k]);
        product = std::max(product, std::abs(lhs[k] - r) / scale);
      }
    }
  }
  return {chain <= 1e-12 && product <= 1e-12,
          fmt("chain rule residual %.3g, product rule residual %.3g", chain, product)};
}

struct LyapunovRun {
  const char* name;
  SchemeConfig scheme;
  const char* preset;
  double t_end;
};

const std::vector<LyapunovRun>& lyapunov_runs() {
  static const std::vector<LyapunovRun> runs{
      {"DLSS cos16", make_scheme_config(EntropySpec(0.0), ModelParams::dlss()), "cos16", 1e-4},
      {"thin-film sine", make_scheme_config(EntropySpec(0.0), ModelParams::thin_film(2.0)), "sine", 5e-3},
  };
  return runs;
}

// Criteria 6 and 7 share the four trajectories.
struct LyapunovOutcome {
  bool monotone = true;
  bool fast = true;
  double worst_mass = 0.0;
  std::string detail;
};

const LyapunovOutcome& lyapunov_outcome() {
  static const LyapunovOutcome out = [] {
    LyapunovOutcome o;
    const TorusGrid g = TorusGrid::unit(100);
    for (const auto& run : lyapunov_runs()) {
      const Discretization disc(g, run.scheme);
      const Field u0 = preset_initial_data(run.preset, g);
      for (bool tight : {false, true}) {
        SolverConfig c;
        if (tight) c.atol = c.rtol = 1e-10;
        const auto t0 = Clock::now();
        const auto rec = evolve(disc, u0, c, run.t_end);
        const double t = seconds_since(t0);
        // Default tolerances: 10x the step error tolerance; tight: 1e-9.
        const auto s = tight ? trajectory_stats(rec, 1e-9, 0.0)
                             : trajectory_stats(rec, 10 * c.atol, 10 * c.rtol);
        o.monotone = o.monotone && s.worst_excess <= 0.0;
        o.fast = o.fast && t <= 60.0;
        o.worst_mass = std::max(o.worst_mass, s.mass_drift);
        o.detail += fmt("%s%s %s: max rise %.3g, %zu steps, %.1f s", o.detail.empty() ? "" : "; ",
                        run.name, tight ? "tight" : "default", s.max_rise, rec.size() - 1, t);
      }
    }
    return o;
  }();
  return out;
}

Verdict c6_lyapunov() {
  const auto& o = lyapunov_outcome();
  return {o.monotone && o.fast, o.detail};
}

Verdict c7_mass() {
  const auto& o = lyapunov_outcome();
  return {o.worst_mass <= 1e-8, fmt("max relative mass drift %.3g over the four runs", o.worst_mass)};
}

Verdict c8_positivity() {
  const TorusGrid g = TorusGrid::unit(100);
  const Discretization disc(g, make_scheme_config(EntropySpec(0.0), ModelParams::dlss()));
  const Field u0 = preset_initial_data("step", g);
  try {
    const auto rec = evolve(disc, u0, SolverConfig{}, 1e-3);
    const auto s = trajectory_stats(rec, 0.0, 0.0);
    return {s.min_u > 0.0, fmt("min u %.3g over %zu steps", s.min_u, rec.size() - 1)};
  } catch (const Error& e) {
    return {false, std::string(error_code_name(e.code())) + ": " + e.what()};
  }
}

Verdict c9_convergence() {
  RunConfig c;
  c.preset = "sine";
  c.t_end = 1e-3;
  c.n_list = {32, 64, 128};
  c.n_ref = 512;
  c.solver.atol = c.solver.rtol = 1e-10;
  c.out_dir = (std::filesystem::temp_directory_path() / "edfd_acceptance_convergence").string();
  const auto t0 = Clock::now();
  const auto s = run_convergence(c);
  const double t = seconds_since(t0);
  return {s.order >= 1.7 && s.order <= 2.3 && t <= 300.0,
          fmt("slope %.3f (errors %.3g, %.3g, %.3g) in %.1f s", s.order, s.errors[0], s.errors[1],
              s.errors[2], t)};
}

Verdict c10_decay() {
  std::vector<double> rates;
  for (std::size_t n : {20u, 200u}) {
    const TorusGrid g = TorusGrid::unit(n);
    const Discretization disc(g, make_scheme_config(EntropySpec(0.0), ModelParams::dlss()));
    const Field u0 = preset_initial_data("step", g);
    SolverConfig c;
    c.atol = c.rtol = 1e-8;
    const auto rec = evolve(disc, u0, c, 1e-3);
    rates.push_back(decay_rate(rec, 1e-4, 1e-3, equilibrium_entropy(g, u0, disc.entropy())));
  }
  const double gap = std::abs(rates[0] - rates[1]) / rates[1];
  return {gap <= 0.15, fmt("rates %.1f (h=1/20) and %.1f (h=1/200) on [1e-4, 1e-3], gap %.1f%%",
                           rates[0], rates[1], 100 * gap)};
}

Verdict c11_structure() {
  const TorusGrid g = TorusGrid::unit(100);
  const Discretization disc(g, make_scheme_config(EntropySpec(0.0), ModelParams::dlss()));
  const Field u0 = preset_initial_data("cos16", g);
  SolverConfig c;
  c.atol = 1e-14;
  c.rtol = 1e-8;
  const std::vector<double> outs{1e-8};
  const auto rec = evolve(disc, u0, c, 1e-8, outs);
  const Field& u = rec.snapshots.back().second;
  const bool peak = u[50] > u[49] && u[50] > u[51];
  return {peak, fmt("u[49..51] = %.4g, %.4g, %.4g at t = 1e-8", u[49], u[50], u[51])};
}

Verdict c12_denoise() {
  RunConfig c;
  c.beta = 2.0;
  c.a = c.b = 0.0;
  c.dimension = 2;
  c.image = std::string(EDFD_DATA_DIR) + "/synthetic_77x100.pgm";
  c.floor = 1e-2;
  c.solver.method = Method::ExplicitRK45;
  c.solver.jacobian = JacobianKind::FiniteDifferenceColored;
  c.t_end = 1e-6;
  c.output_times = {3e-9, 1e-8, 1e-6};
  c.out_dir = (std::filesystem::temp_directory_path() / "edfd_acceptance_denoise").string();
  const auto t0 = Clock::now();
  const auto sum = run_denoise(c);
  const double t = seconds_since(t0);
  const auto s = trajectory_stats(sum.record, 10 * c.solver.atol, 10 * c.solver.rtol);
  const GrayImage img = load_pgm(c.image);
  const TorusGrid g = image_grid(img);
  const double hf0 = high_frequency_energy(g, image_to_field(img, c.floor));
  double hf = INFINITY;
  for (const auto& [ts, u] : sum.record.snapshots) {
    if (ts == 1e-8) hf = high_frequency_energy(g, u);
  }
  const bool ok = s.worst_excess <= 0.0 && s.mass_drift <= 1e-8 && s.min_u >= 0.9 * c.floor &&
                  hf < hf0 && t <= 600.0;
  return {ok, fmt("max entropy rise %.3g, mass drift %.3g, min u %.4g, HF energy %.4g -> %.4g, "
                  "%zu steps in %.1f s",
                  s.max_rise, s.mass_drift, s.min_u, hf0, hf, sum.record.size() - 1, t)};
}

Verdict c13_negative_control() {
  const auto c = make_scheme2d_config(1.0, AverageRule::Identity, true);
  const TorusGrid g({8, 8}, 1.0 / 8);
  const auto r = testing::ascend_production(g, c, 1);
  return {r.production > 0.0,
          fmt("ascent found production %.3g after %d iterations (margin %.3g)", r.production,
              r.iterations, nonneg_margin(poly_spec_2d(c.lambdas)))};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria{
      {"coefficient identification", c1_identification},
      {"optimal lambda4", c2_optimality},
      {"admissibility regions", c3_regions},
      {"entropy production identity", c4_identity},
      {"chain and product rules", c5_chain_product},
      {"Lyapunov property", c6_lyapunov},
      {"mass conservation", c7_mass},
      {"positivity", c8_positivity},
      {"convergence order", c9_convergence},
      {"exponential decay", c10_decay},
      {"DLSS local maximum", c11_structure},
      {"2D thin-film smoothing", c12_denoise},
      {"beta = 1 negative control", c13_negative_control},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].run();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    if (!v.pass) ++failed;
    std::printf("%s  %2zu %-28s %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].name, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu of %zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
