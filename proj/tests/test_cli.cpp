#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "edfd/config.hpp"
#include "edfd/error.hpp"
#include "edfd/experiments.hpp"
#include "edfd/pgm.hpp"
#include "support.hpp"

using namespace edfd;
using testing::code_of;

namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("edfd_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::ifstream in(path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::string error_message(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("configuration text round-trips") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    RunConfig c;
    c.a = d(rng);
    c.b = d(rng);
    c.beta = std::abs(d(rng));
    c.alpha = std::abs(d(rng));
    c.dimension = 1 + trial % 2;
    c.variant = trial % 3 ? FluxVariant::Central : FluxVariant::Noncentral;
    c.average = static_cast<AverageRule>(trial % 3);
    if (trial % 2) c.lambda4 = d(rng);
    c.allow_unguaranteed = trial % 4 == 0;
    c.dims = trial % 2 ? std::vector<std::size_t>{77, 100} : std::vector<std::size_t>{64};
    c.h = trial % 5 ? 0.0 : 1.0 / 3.0;
    c.preset = "cos16";
    c.seed = rng();
    c.value = std::exp(d(rng));
    c.image = trial % 2 ? "some dir/pic.pgm" : "";
    c.floor = 0.01 + 0.1 * std::abs(d(rng));
    c.solver.method = static_cast<Method>(trial % 3);
    c.solver.jacobian = static_cast<JacobianKind>((trial / 3) % 3);
    c.solver.atol = std::exp(d(rng) - 10);
    c.solver.rtol = std::exp(d(rng) - 10);
    c.solver.dt_min = 1e-30;
    c.solver.dt_init = 1e-9 * std::exp(d(rng));
    c.solver.dt_max = 0.1;
    c.solver.newton_max_iter = 3 + trial;
    c.solver.enforce_positivity = trial % 3 != 0;
    c.t_end = std::exp(d(rng));
    c.output_times = {1e-8, 1.0 / 3.0};
    c.out_dir = "results/run " + std::to_string(trial);
    c.n_list = {16, 32};
    c.n_ref = 256;
    CHECK(parse_config(render_config(c)) == c);
  }
}

TEST_CASE("configuration parsing") {
  const auto c = parse_config(
      "# comment\n"
      "[model]\n"
      "equation = thin-film   ; trailing comment\n"
      "beta = 2\n"
      "[entropy]\n"
      "alpha = 0.5\n"
      "solver.method = rk45\n"
      "[grid]\n"
      "dims = 100x77\n"
      "[run]\n"
      "output_times = 1e-8, 1e-6\n");
  CHECK(c.a == 0.0);
  CHECK(c.b == 0.0);
  CHECK(c.beta == 2.0);
  CHECK(c.alpha == 0.5);
  CHECK(c.solver.method == Method::ExplicitRK45);
  CHECK(c.dims == std::vector<std::size_t>{100, 77});
  CHECK(c.output_times == std::vector<double>{1e-8, 1e-6});

  const auto dl = parse_config("equation = dlss\n", c);
  CHECK(dl.a == -2.0);
  CHECK(dl.b == 1.0);
  CHECK(dl.beta == 0.0);
  CHECK(dl.alpha == 0.5);

  CHECK(error_message([] { parse_config("[model]\n\nbeta = two\n"); }).find("line 3") != std::string::npos);
  CHECK(error_message([] { parse_config("alpha = 1\nnope = 2\n"); }).find("line 2") != std::string::npos);
  CHECK(code_of([] { parse_config("[model\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { parse_config("just words\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { parse_config("solver.method = euler\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { parse_config("grid.dims = -4\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { load_config("/nonexistent/run.cfg"); }) == ErrorCode::IoError);

  RunConfig s;
  set_config_value(s, "lambda4", "optimal");
  CHECK_FALSE(s.lambda4.has_value());
  set_config_value(s, "scheme.lambda4", "-4");
  CHECK(s.lambda4 == -4.0);
}

TEST_CASE("PGM decoding and encoding") {
  const auto a = parse_pgm("P2\n# a comment\n2 2\n255\n0 255\n128 64\n");
  CHECK(a.width == 2);
  CHECK(a.height == 2);
  CHECK(a.pixels == std::vector<std::uint8_t>{0, 255, 128, 64});

  std::string p5 = "P5 1 1 255\n";
  p5.push_back(static_cast<char>(200));
  const auto b = parse_pgm(p5);
  CHECK(b.pixels == std::vector<std::uint8_t>{200});

  GrayImage img{7, 5, {}};
  std::mt19937 rng(3);
  for (int k = 0; k < 35; ++k) img.pixels.push_back(static_cast<std::uint8_t>(rng()));
  CHECK(parse_pgm(encode_pgm(img, true)) == img);
  CHECK(parse_pgm(encode_pgm(img, false)) == img);

  CHECK(code_of([] { parse_pgm("P6 1 1 255\nx"); }) == ErrorCode::MalformedHeader);
  CHECK(code_of([] { parse_pgm("P5 2 2 65535\n"); }) == ErrorCode::MalformedHeader);
  CHECK(code_of([] { parse_pgm("P5 2"); }) == ErrorCode::MalformedHeader);
  CHECK(code_of([] { parse_pgm("P5 2 2 255\nabc"); }) == ErrorCode::TruncatedData);
  CHECK(code_of([] { parse_pgm("P2 2 2 255\n1 2 3"); }) == ErrorCode::TruncatedData);
  CHECK(code_of([] { load_pgm("/nonexistent.pgm"); }) == ErrorCode::IoError);

  const auto dir = scratch_dir("pgm");
  save_pgm(img, (dir / "x.pgm").string());
  CHECK(load_pgm((dir / "x.pgm").string()) == img);
}

TEST_CASE("images map to fields and back") {
  const GrayImage img{3, 2, {0, 255, 128, 1, 2, 51}};
  const GrayImage wide{4, 3, std::vector<std::uint8_t>(12, 9)};
  const TorusGrid g = image_grid(wide);
  CHECK(g.dims() == std::vector<std::size_t>{3, 4});
  CHECK(g.h() == 0.25);
  const Field u = image_to_field(img, 0.01);
  CHECK(u[0] == 0.01);
  CHECK(u[1] == 1.0);
  CHECK(u[2] == doctest::Approx(128.0 / 255.0));
  CHECK(u[4] == 0.01);
  CHECK(u[5] == doctest::Approx(0.2));
  CHECK(code_of([&] { image_to_field(img, 0.0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { image_to_field(img, 0.5); }) == ErrorCode::InvalidArgument);

  const GrayImage back = field_to_image(u, 3, 2);
  CHECK(back.pixels == std::vector<std::uint8_t>{3, 255, 128, 3, 3, 51});
  CHECK(field_to_image(Field{-1.0, 2.0}, 2, 1).pixels == std::vector<std::uint8_t>{0, 255});
}

TEST_CASE("initial data presets") {
  const TorusGrid g = TorusGrid::unit(100);
  const auto cos16 = preset_initial_data("cos16", g);
  CHECK(cos16[0] == 1.0);
  CHECK(cos16[50] == 1e-10);
  CHECK(*std::min_element(cos16.begin(), cos16.end()) == 1e-10);

  const auto sine = preset_initial_data("sine", g);
  double m = 0.0;
  for (double x : sine) m += x * g.h();
  CHECK(m == doctest::Approx(1.0).epsilon(1e-14));

  const auto step = preset_initial_data("step", g);
  CHECK(*std::min_element(step.begin(), step.end()) == 1e-6);
  CHECK(step[0] == 1e-6);
  CHECK(step[25] == 2.0 - 1e-6);

  const auto c = preset_initial_data("constant", g, 1, 0.7);
  CHECK(std::all_of(c.begin(), c.end(), [](double x) { return x == 0.7; }));

  const auto r1 = preset_initial_data("random-positive", g, 5);
  CHECK(r1 == preset_initial_data("random-positive", g, 5));
  CHECK(r1 != preset_initial_data("random-positive", g, 6));
  CHECK(std::all_of(r1.begin(), r1.end(), [](double x) { return x >= 0.5 && x < 1.5; }));

  const TorusGrid g2({4, 3}, 0.25);
  const auto s2 = preset_initial_data("sine", g2);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(s2[i * 3 + j] == s2[i * 3]);

  CHECK(code_of([&] { preset_initial_data("gauss", g); }) == ErrorCode::UnknownPreset);
}

TEST_CASE("evolve writes a series and snapshots") {
  RunConfig c;
  c.dims = {32};
  c.alpha = 0.5;
  c.preset = "constant";
  c.value = 0.4;
  c.t_end = 1e-3;
  c.output_times = {1e-4};
  c.out_dir = scratch_dir("evolve").string();
  const auto sum = run_evolve(c);
  CHECK(sum.K > 0.0);
  CHECK(sum.record.snapshots.size() == 2);
  CHECK(sum.record.snapshots.back().second == Field(32, 0.4));
  const auto rows = read_csv(fs::path(c.out_dir) / "series.csv");
  REQUIRE(rows.size() >= 3);
  CHECK(rows[0][0] == "t");
  for (std::size_t k = 2; k < rows.size(); ++k) CHECK(std::stod(rows[k][0]) > std::stod(rows[k - 1][0]));
  CHECK(fs::exists(fs::path(c.out_dir) / "snapshot_0.0001.csv"));
  CHECK(fs::exists(fs::path(c.out_dir) / "snapshot_0.001.csv"));
  CHECK(time_label(1e-8) == "1e-08");
  CHECK(time_label(5e-4) == "0.0005");
}

TEST_CASE("convergence study input checks") {
  RunConfig c;
  c.out_dir = scratch_dir("conv").string();
  c.n_list = {32, 32};
  CHECK(code_of([&] { run_convergence(c); }) == ErrorCode::ConfigError);
  c.n_list = {32, 48};
  CHECK(code_of([&] { run_convergence(c); }) == ErrorCode::IncompatibleGrids);
}

TEST_CASE("invariant checks") {
  RunConfig dlss;
  dlss.alpha = 0.5;
  const auto ok = run_check(dlss);
  CHECK(ok.passed());
  CHECK(ok.table().find("FAIL") == std::string::npos);

  RunConfig tf = parse_config("equation = thin-film\nbeta = 2\nalpha = 1\n");
  CHECK(run_check(tf).passed());

  // Outside the admissible region the report warns instead of failing.
  RunConfig bad = dlss;
  bad.alpha = 2.0;
  const auto warn = run_check(bad);
  CHECK(warn.passed());
  CHECK(warn.table().find("WARN") != std::string::npos);

  RunConfig two = parse_config("equation = thin-film\nbeta = 1\ndimension = 2\nallow_unguaranteed = true\n");
  const auto rep2 = run_check(two);
  CHECK_FALSE(rep2.passed());
  two.beta = 2.0;
  CHECK(run_check(two).passed());
}
