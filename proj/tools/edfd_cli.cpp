// Command-line driver. Talks to the solver only through the C API.

#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "edfd.h"

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kPositivity = 3, kUnderflow = 4, kCheck = 5 };

int exit_code(edfd_status st) {
  switch (st) {
    case EDFD_OK: return kOk;
    case EDFD_POSITIVITY_LOSS:
    case EDFD_NONPOSITIVE_STATE: return kPositivity;
    case EDFD_STEP_SIZE_UNDERFLOW: return kUnderflow;
    case EDFD_CHECK_FAILED: return kCheck;
    case EDFD_CONFIG_ERROR:
    case EDFD_INVALID_ARGUMENT:
    case EDFD_INVALID_ALPHA:
    case EDFD_SINGULAR_DENOMINATOR:
    case EDFD_UNKNOWN_PRESET:
    case EDFD_MALFORMED_HEADER:
    case EDFD_TRUNCATED_DATA:
    case EDFD_INCOMPATIBLE_GRIDS:
    case EDFD_IO_ERROR: return kConfig;
    default: return kFailure;
  }
}

int report(edfd_status st) {
  if (st != EDFD_OK && st != EDFD_CHECK_FAILED) {
    std::fprintf(stderr, "error (%s): %s\n", edfd_status_name(st), edfd_last_error());
  }
  return exit_code(st);
}

struct Overrides {
  std::string config_path;
  std::optional<std::string> alpha, beta, a, b, n, h, t_end, out_dir, variant, average;
  std::optional<std::string> equation, preset, method, jacobian, output_times, image, floor;
  std::vector<std::string> sets;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "configuration file (key = value with [sections])");
    cmd->add_option("--alpha", alpha, "entropy index");
    cmd->add_option("--beta", beta, "mobility exponent");
    cmd->add_option("--a", a, "coefficient a");
    cmd->add_option("--b", b, "coefficient b");
    cmd->add_option("--equation", equation, "dlss or thin-film (sets a, b and, for dlss, beta)");
    cmd->add_option("--n", n, "grid points per axis (N or NxM)");
    cmd->add_option("--h", h, "grid spacing (default 1/N)");
    cmd->add_option("--t-end", t_end, "final time");
    cmd->add_option("--out-dir", out_dir, "output directory");
    cmd->add_option("--variant", variant, "central or noncentral")
        ->check(CLI::IsMember({"central", "noncentral"}));
    cmd->add_option("--average", average, "identity, arith or geom")
        ->check(CLI::IsMember({"identity", "arith", "geom"}));
    cmd->add_option("--preset", preset, "initial datum");
    cmd->add_option("--method", method, "bdf2, implicit-euler or rk45");
    cmd->add_option("--jacobian", jacobian, "banded, colored or matrix-free");
    cmd->add_option("--output-times", output_times, "comma separated output times");
    cmd->add_option("--image", image, "input PGM for denoise");
    cmd->add_option("--floor", floor, "positivity floor for image pixels");
    cmd->add_option("--set", sets, "extra section.key=value override (repeatable)");
  }

  edfd_status apply(edfd_config* cfg) const {
    // Equation first so explicit coefficients override the preset.
    const std::vector<std::pair<const char*, const std::optional<std::string>*>> table = {
        {"model.equation", &equation}, {"model.a", &a},          {"model.b", &b},
        {"model.beta", &beta},         {"entropy.alpha", &alpha}, {"grid.dims", &n},
        {"grid.h", &h},                {"run.t_end", &t_end},     {"run.out_dir", &out_dir},
        {"scheme.variant", &variant},  {"scheme.average", &average}, {"initial.preset", &preset},
        {"solver.method", &method},    {"solver.jacobian", &jacobian},
        {"run.output_times", &output_times}, {"initial.image", &image}, {"initial.floor", &floor},
    };
    for (const auto& [key, value] : table) {
      if (!*value) continue;
      if (const edfd_status st = edfd_config_set(cfg, key, (*value)->c_str()); st != EDFD_OK) return st;
    }
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) return edfd_config_set(cfg, kv.c_str(), "");
      const std::string key = kv.substr(0, eq);
      const std::string value = kv.substr(eq + 1);
      if (const edfd_status st = edfd_config_set(cfg, key.c_str(), value.c_str()); st != EDFD_OK) return st;
    }
    return EDFD_OK;
  }
};

class ConfigHandle {
 public:
  ~ConfigHandle() { edfd_config_free(cfg_); }
  edfd_status open(const Overrides& o) {
    const edfd_status st = o.config_path.empty() ? edfd_config_new(&cfg_)
                                                 : edfd_config_load(o.config_path.c_str(), &cfg_);
    if (st != EDFD_OK) return st;
    return o.apply(cfg_);
  }
  edfd_config* get() const { return cfg_; }

 private:
  edfd_config* cfg_ = nullptr;
};

void print_summary(const edfd_run_summary& s) {
  if (s.admissibility < 0.0) {
    std::fprintf(stderr, "warning: admissibility %.6g < 0, entropy dissipation is not guaranteed\n",
                 s.admissibility);
  }
  std::printf("admissibility       %.6g\n", s.admissibility);
  std::printf("accepted steps      %zu\n", s.accepted_steps);
  std::printf("rejected steps      %zu\n", s.rejected_steps);
  std::printf("final time          %.17g\n", s.t_final);
  std::printf("entropy             %.17g -> %.17g\n", s.entropy_initial, s.entropy_final);
  std::printf("max entropy rise    %.3g\n", s.max_entropy_increase);
  std::printf("mass drift          %.3g\n", s.mass_relative_drift);
  std::printf("min u               %.6g\n", s.min_u);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropy-dissipating finite differences for fourth-order parabolic equations"};
  app.require_subcommand(1);
  // "--h" is the grid spacing, so help is long-form only.
  app.set_help_flag("--help", "print this help and exit");

  Overrides evolve_o, conv_o, denoise_o, check_o, show_o;
  auto* evolve = app.add_subcommand("evolve", "integrate one configuration, write series.csv and snapshots");
  auto* conv = app.add_subcommand("convergence", "self-convergence study, write convergence.csv");
  auto* denoise = app.add_subcommand("denoise", "2D thin-film evolution of a PGM image");
  auto* check = app.add_subcommand("check", "run the invariant suites and print a pass/fail table");
  auto* show = app.add_subcommand("show-config", "print the resolved configuration");
  evolve_o.attach(evolve);
  conv_o.attach(conv);
  denoise_o.attach(denoise);
  check_o.attach(check);
  show_o.attach(show);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  ConfigHandle cfg;
  if (evolve->parsed()) {
    if (const auto st = cfg.open(evolve_o); st != EDFD_OK) return report(st);
    edfd_run_summary s{};
    const auto st = edfd_run_evolve(cfg.get(), &s);
    if (st == EDFD_OK) print_summary(s);
    return report(st);
  }
  if (conv->parsed()) {
    if (const auto st = cfg.open(conv_o); st != EDFD_OK) return report(st);
    double order = 0.0;
    const auto st = edfd_run_convergence(cfg.get(), &order);
    if (st == EDFD_OK) std::printf("observed order      %.4f\n", order);
    return report(st);
  }
  if (denoise->parsed()) {
    if (const auto st = cfg.open(denoise_o); st != EDFD_OK) return report(st);
    edfd_run_summary s{};
    const auto st = edfd_run_denoise(cfg.get(), &s);
    if (st == EDFD_OK) print_summary(s);
    return report(st);
  }
  if (check->parsed()) {
    if (const auto st = cfg.open(check_o); st != EDFD_OK) return report(st);
    std::string table(1 << 16, '\0');
    size_t needed = 0;
    const edfd_status st = edfd_run_check(cfg.get(), table.data(), table.size(), &needed);
    std::fputs(table.c_str(), stdout);
    return report(st);
  }
  if (const auto st = cfg.open(show_o); st != EDFD_OK) return report(st);
  size_t needed = 0;
  edfd_config_render(cfg.get(), nullptr, 0, &needed);
  std::string text(needed + 1, '\0');
  edfd_config_render(cfg.get(), text.data(), text.size(), &needed);
  std::fputs(text.c_str(), stdout);
  return kOk;
}
