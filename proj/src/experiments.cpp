#include "edfd/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "edfd/error.hpp"

namespace edfd {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  return out;
}

std::filesystem::path prepare_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create output directory '" + dir + "'");
  return dir;
}

SolverConfig effective_solver(const RunConfig& config, const TorusGrid& grid) {
  SolverConfig s = config.solver;
  if (grid.dim() > 1 && s.jacobian == JacobianKind::FiniteDifferenceBanded) {
    s.jacobian = JacobianKind::FiniteDifferenceColored;
  }
  return s;
}

void write_series(const std::filesystem::path& path, const TrajectoryRecord& rec) {
  auto out = open_out(path);
  out << "t,mass,entropy,entropy_production,dissipation,min_u,max_u\n";
  for (std::size_t k = 0; k < rec.size(); ++k) {
    out << num(rec.times[k]) << ',' << num(rec.mass[k]) << ',' << num(rec.entropy[k]) << ','
        << num(rec.entropy_production[k]) << ',' << num(rec.dissipation[k]) << ','
        << num(rec.min_u[k]) << ',' << num(rec.max_u[k]) << '\n';
  }
}

void write_snapshot(const std::filesystem::path& path, const TorusGrid& grid,
                    std::span<const double> u) {
  auto out = open_out(path);
  const double h = grid.h();
  if (grid.dim() == 1) {
    out << "x,u\n";
    for (std::size_t k = 0; k < u.size(); ++k) {
      out << num(static_cast<double>(k) * h) << ',' << num(u[k]) << '\n';
    }
  } else {
    // Axis 1 is x (columns), axis 0 is y (rows).
    out << "x,y,u\n";
    for (std::size_t k = 0; k < u.size(); ++k) {
      out << num(static_cast<double>(grid.coordinate(1, k)) * h) << ','
          << num(static_cast<double>(grid.coordinate(0, k)) * h) << ',' << num(u[k]) << '\n';
    }
  }
}

double relative_gap(double a, double b, double scale) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), scale, 1e-300});
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

}  // namespace

std::string time_label(double t) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", t);
  return buf;
}

Field random_positive(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Field u(n);
  for (double& x : u) x = 0.5 + static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return u;
}

Field preset_initial_data(const std::string& name, const TorusGrid& grid, std::uint64_t seed,
                          double value) {
  const std::size_t n = grid.size();
  if (name == "random-positive") return random_positive(n, seed);
  Field u(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double x = static_cast<double>(grid.coordinate(0, k)) * grid.h();
    if (name == "cos16") {
      u[k] = std::max(1e-10, std::pow(std::cos(kPi * x), 16));
    } else if (name == "step") {
      u[k] = (x > 0.0 && x < 0.5) ? 2.0 - 1e-6 : 1e-6;
    } else if (name == "sine") {
      u[k] = 1.0 + 0.5 * std::sin(2.0 * kPi * x);
    } else if (name == "sine-full") {
      u[k] = 1.0 + (1.0 - 1e-16) * std::sin(2.0 * kPi * x);
    } else if (name == "constant") {
      u[k] = value;
    } else {
      throw Error(ErrorCode::UnknownPreset,
                  "unknown initial-data preset '" + name +
                      "' (cos16, step, sine, sine-full, constant, random-positive, image)");
    }
  }
  return u;
}

Problem build_problem(const RunConfig& c) {
  const ModelParams model{c.a, c.b, c.beta};
  model.validate();
  std::optional<TorusGrid> grid;
  Field u0;
  int dimension = c.dimension;
  if (c.preset == "image") {
    if (c.image.empty()) throw Error(ErrorCode::ConfigError, "preset 'image' needs initial.image");
    const GrayImage img = load_pgm(c.image);
    grid.emplace(image_grid(img));
    u0 = image_to_field(img, c.floor);
    dimension = 2;
  } else {
    std::vector<std::size_t> dims = c.dims;
    if (dimension == 2 && dims.size() == 1) dims.push_back(dims[0]);
    if (dimension == 1 && dims.size() != 1) {
      throw Error(ErrorCode::ConfigError, "a one-dimensional run needs a single grid size");
    }
    grid.emplace(dims, c.grid_h());
    u0 = preset_initial_data(c.preset, *grid, c.seed, c.value);
  }
  if (dimension == 1) {
    SchemeConfig s = make_scheme_config(EntropySpec(c.alpha), model, c.variant, c.average, c.lambda4);
    const double K = admissibility_K(s.entropy, model);
    return Problem{Discretization(*grid, std::move(s)), std::move(u0), K};
  }
  Scheme2DConfig s = make_scheme2d_config(c.beta, c.average, c.allow_unguaranteed);
  const double margin = nonneg_margin(poly_spec_2d(s.lambdas));
  return Problem{Discretization(*grid, std::move(s)), std::move(u0), margin};
}

EvolveSummary run_evolve(const RunConfig& config) {
  if (!(config.t_end > 0.0)) throw Error(ErrorCode::ConfigError, "run.t_end must be positive");
  Problem p = build_problem(config);
  const auto dir = prepare_dir(config.out_dir);
  EvolveSummary sum;
  sum.K = p.K;
  sum.record = evolve(p.disc, p.u0, effective_solver(config, p.disc.grid()), config.t_end,
                      config.output_times, &sum.stats);
  write_series(dir / "series.csv", sum.record);
  sum.files.push_back((dir / "series.csv").string());
  for (const auto& [t, u] : sum.record.snapshots) {
    const auto path = dir / ("snapshot_" + time_label(t) + ".csv");
    write_snapshot(path, p.disc.grid(), u);
    sum.files.push_back(path.string());
  }
  return sum;
}

ConvergenceSummary run_convergence(const RunConfig& config) {
  if (config.dimension != 1) {
    throw Error(ErrorCode::ConfigError, "convergence studies run the one-dimensional scheme");
  }
  if (config.n_list.size() < 2) throw Error(ErrorCode::ConfigError, "n_list needs two entries");
  for (std::size_t i = 0; i < config.n_list.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (config.n_list[i] == config.n_list[j]) {
        throw Error(ErrorCode::ConfigError, "n_list contains a repeated resolution");
      }
    }
    if (config.n_list[i] == 0 || config.n_ref % config.n_list[i] != 0) {
      throw Error(ErrorCode::IncompatibleGrids,
                  "n_ref = " + std::to_string(config.n_ref) + " is not a multiple of " +
                      std::to_string(config.n_list[i]));
    }
  }
  auto solve = [&](std::size_t n) {
    RunConfig c = config;
    c.dims = {n};
    c.h = 0.0;
    Problem p = build_problem(c);
    const OdeSystem sys = p.disc.system();
    IntegrationResult r = integrate(sys, p.u0, effective_solver(c, p.disc.grid()), c.t_end);
    return std::make_pair(p.disc.grid(), r.final_state);
  };
  const auto [ref_grid, ref] = solve(config.n_ref);
  ConvergenceSummary sum;
  for (std::size_t n : config.n_list) {
    const auto [grid, u] = solve(n);
    sum.hs.push_back(grid.h());
    sum.errors.push_back(l2_error(grid, u, ref_grid, ref));
  }
  sum.order = convergence_order(sum.hs, sum.errors);

  const auto dir = prepare_dir(config.out_dir);
  auto out = open_out(dir / "convergence.csv");
  out << "h,error,local_order\n";
  for (std::size_t i = 0; i < sum.hs.size(); ++i) {
    out << num(sum.hs[i]) << ',' << num(sum.errors[i]) << ',';
    if (i > 0) {
      out << num(std::log(sum.errors[i] / sum.errors[i - 1]) / std::log(sum.hs[i] / sum.hs[i - 1]));
    }
    out << '\n';
  }
  return sum;
}

EvolveSummary run_denoise(const RunConfig& config) {
  if (config.image.empty()) throw Error(ErrorCode::ConfigError, "denoise needs initial.image");
  RunConfig c = config;
  c.preset = "image";
  c.dimension = 2;
  Problem p = build_problem(c);
  const auto dir = prepare_dir(c.out_dir);
  std::vector<double> times = c.output_times;
  double t_end = c.t_end;
  if (!times.empty()) t_end = std::max(t_end, *std::max_element(times.begin(), times.end()));
  EvolveSummary sum;
  sum.K = p.K;
  sum.record = evolve(p.disc, p.u0, effective_solver(c, p.disc.grid()), t_end, times, &sum.stats);
  write_series(dir / "series.csv", sum.record);
  sum.files.push_back((dir / "series.csv").string());
  const auto& dims = p.disc.grid().dims();
  for (const auto& [t, u] : sum.record.snapshots) {
    const auto path = dir / ("denoised_" + time_label(t) + ".pgm");
    save_pgm(field_to_image(u, dims[1], dims[0]), path.string());
    sum.files.push_back(path.string());
  }
  return sum;
}

bool CheckReport::passed() const {
  return std::none_of(rows.begin(), rows.end(),
                      [](const CheckRow& r) { return r.status == CheckStatus::Fail; });
}

std::string CheckReport::table() const {
  std::ostringstream out;
  for (const auto& r : rows) {
    const char* tag = r.status == CheckStatus::Pass   ? "PASS"
                      : r.status == CheckStatus::Fail ? "FAIL"
                                                      : "WARN";
    char line[160];
    std::snprintf(line, sizeof line, "%-5s %-30s ", tag, r.name.c_str());
    out << line << r.detail << '\n';
  }
  return out.str();
}

CheckReport run_check(const RunConfig& config) {
  CheckReport rep;
  auto add = [&](std::string name, bool ok, std::string detail) {
    rep.rows.push_back({std::move(name), ok ? CheckStatus::Pass : CheckStatus::Fail, std::move(detail)});
  };
  const ModelParams model{config.a, config.b, config.beta};
  constexpr int kStates = 20;

  if (config.dimension == 1) {
    SchemeConfig s;
    try {
      s = make_scheme_config(EntropySpec(config.alpha), model, config.variant, config.average,
                             config.lambda4);
    } catch (const Error& e) {
      add("configuration", false, e.what());
      return rep;
    }
    const bool shannon = s.entropy.kind() == EntropyKind::Shannon;

    if (!shannon) {
      const double res = verify_flux_identification(s.lambdas, s.entropy, model);
      add("lambda identification", res <= 1e-10, fmt("residual %.3g", res));
    } else {
      const LambdaSet ref = lambda_alpha1(model, s.lambdas.l4);
      const double d = std::max({std::abs(ref.l1 - s.lambdas.l1), std::abs(ref.l2 - s.lambdas.l2),
                                 std::abs(ref.l3 - s.lambdas.l3)});
      add("lambda identification", d <= 1e-12, fmt("deviation %.3g", d));
    }

    double chain = 0.0, ident = 0.0, cons = 0.0, worst_prod = -1e300;
    std::uint64_t seed = config.seed;
    for (std::size_t n : {8u, 16u, 64u}) {
      const TorusGrid grid = TorusGrid::unit(n);
      for (int k = 0; k < kStates; ++k) {
        const Field u = random_positive(n, seed++);
        const EntropyVariables vars = entropy_variables(u, s.entropy);
        if (!shannon) {
          const XiPair xi = xi_central(grid, vars);
          const auto& v = vars.v;
          const double h2 = grid.h() * grid.h();
          for (std::size_t i = 0; i < n; ++i) {
            const double vp = v[grid.next(0, i)], vm = v[grid.prev(0, i)];
            const double lhs = (vp * vp - 2 * v[i] * v[i] + vm * vm) / (2 * h2);
            const double rhs_v = v[i] * v[i] * (xi.xi2[i] + xi.xi1sq[i]);
            const double scale = (vp * vp + 2 * v[i] * v[i] + vm * vm) / (2 * h2);
            chain = std::max(chain, std::abs(lhs - rhs_v) / scale);
          }
        }
        const Field du = rhs(grid, u, s);
        Field prod(n), absprod(n), absdu(n);
        for (std::size_t i = 0; i < n; ++i) {
          prod[i] = vars.v[i] * du[i];
          absprod[i] = std::abs(prod[i]);
          absdu[i] = std::abs(du[i]);
        }
        const double direct = integrate(grid, prod);
        const double closed = entropy_production_closed_form(grid, u, s);
        ident = std::max(ident, relative_gap(direct, closed, 0.0));
        cons = std::max(cons, std::abs(integrate(grid, du)) / std::max(integrate(grid, absdu), 1e-300));
        worst_prod = std::max(worst_prod, closed / std::max(integrate(grid, absprod), 1e-300));
      }
    }
    if (!shannon) add("discrete chain rule", chain <= 1e-12, fmt("max relative residual %.3g", chain));
    add("entropy production identity", ident <= 1e-10, fmt("max relative gap %.3g", ident));
    add("mass conservation", cons <= 1e-13, fmt("max relative drift %.3g", cons));

    const PolySpec P = poly_spec(s.entropy, s.lambdas);
    const double margin = nonneg_margin(P);
    const double K = admissibility_K(s.entropy, model);
    const bool guaranteed = margin >= -1e-12 && P.c11 >= -1e-12;
    const std::string kdetail = fmt("margin %.6g", margin) + fmt(", K(alpha,beta) = %.6g", K);
    if (guaranteed) {
      add("polynomial nonnegativity", true, kdetail);
      add("entropy production sign", worst_prod <= 1e-12, fmt("max scaled production %.3g", worst_prod));
    } else {
      rep.rows.push_back({"polynomial nonnegativity", CheckStatus::NotGuaranteed,
                          kdetail + " (not guaranteed)"});
      rep.rows.push_back({"entropy production sign", CheckStatus::NotGuaranteed,
                          fmt("max scaled production %.3g (not guaranteed)", worst_prod)});
    }
    return rep;
  }

  const Scheme2DConfig s = make_scheme2d_config(config.beta, config.average, true);
  add("lambda identification", std::abs(s.lambdas.l1 - s.lambdas.l3 - 1.0) <= 1e-12,
      fmt("lambda1 - lambda3 - 1 = %.3g", s.lambdas.l1 - s.lambdas.l3 - 1.0));
  double prodrule = 0.0, ident = 0.0, cons = 0.0, worst_prod = -1e300;
  std::uint64_t seed = config.seed;
  const TorusGrid grid({16, 16}, 1.0 / 16);
  for (int k = 0; k < kStates; ++k) {
    const Field u = random_positive(grid.size(), seed++);
    Field v(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) v[i] = -1.0 / u[i];
    const XiPair xi = xi_2d(grid, v);
    VectorField vg = gradient_bwd(grid, v);
    for (auto& comp : vg.components) {
      for (std::size_t i = 0; i < comp.size(); ++i) comp[i] *= v[i];
    }
    const Field lhs = divergence(grid, vg);
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double r = v[i] * v[i] * (xi.xi2[i] + xi.xi1sq[i]);
      prodrule = std::max(prodrule, std::abs(lhs[i] - r) / std::max(std::abs(r), v[i] * v[i] / (grid.h() * grid.h())));
    }
    const Field du = rhs_2d(grid, u, s);
    Field prod(u.size()), absprod(u.size()), absdu(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      prod[i] = v[i] * du[i];
      absprod[i] = std::abs(prod[i]);
      absdu[i] = std::abs(du[i]);
    }
    const double direct = integrate(grid, prod);
    const double closed = entropy_production_2d(grid, u, s);
    ident = std::max(ident, relative_gap(direct, closed, 0.0));
    cons = std::max(cons, std::abs(integrate(grid, du)) / std::max(integrate(grid, absdu), 1e-300));
    worst_prod = std::max(worst_prod, closed / std::max(integrate(grid, absprod), 1e-300));
  }
  add("discrete product rule", prodrule <= 1e-12, fmt("max relative residual %.3g", prodrule));
  add("entropy production identity", ident <= 1e-10, fmt("max relative gap %.3g", ident));
  add("mass conservation", cons <= 1e-13, fmt("max relative drift %.3g", cons));
  const double margin = nonneg_margin(poly_spec_2d(s.lambdas));
  add("polynomial nonnegativity", margin >= 0.0,
      fmt("margin %.6g", margin) + (margin < 0.0 ? " (the scheme needs beta = 2)" : ""));
  if (margin >= 0.0) {
    add("entropy production sign", worst_prod <= 1e-12, fmt("max scaled production %.3g", worst_prod));
  }
  return rep;
}

}  // namespace edfd
