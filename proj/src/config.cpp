#include "edfd/config.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "edfd/error.hpp"

namespace edfd {

namespace {

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

double to_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE) {
    fail("'" + key + "' expects a number, got '" + text + "'");
  }
  return x;
}

std::uint64_t to_uint(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  errno = 0;
  const unsigned long long x = std::strtoull(t.c_str(), &end, 10);
  if (t.empty() || t[0] == '-' || end != t.c_str() + t.size() || errno == ERANGE) {
    fail("'" + key + "' expects a nonnegative integer, got '" + text + "'");
  }
  return x;
}

bool to_bool(const std::string& key, const std::string& text) {
  const std::string t = lower(trim(text));
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  fail("'" + key + "' expects true or false, got '" + text + "'");
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

template <class T>
std::string join(const std::vector<T>& xs, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    if constexpr (std::is_floating_point_v<T>) {
      out += num(xs[i]);
    } else {
      out += std::to_string(xs[i]);
    }
  }
  return out;
}

FluxVariant parse_variant(const std::string& v) {
  const std::string t = lower(trim(v));
  if (t == "central") return FluxVariant::Central;
  if (t == "noncentral") return FluxVariant::Noncentral;
  fail("variant must be central or noncentral, got '" + v + "'");
}

AverageRule parse_average(const std::string& v) {
  const std::string t = lower(trim(v));
  if (t == "identity") return AverageRule::Identity;
  if (t == "arith" || t == "arithmetic") return AverageRule::ArithmeticNbr;
  if (t == "geom" || t == "geometric") return AverageRule::Geometric;
  fail("average must be identity, arith or geom, got '" + v + "'");
}

Method parse_method(const std::string& v) {
  const std::string t = lower(trim(v));
  if (t == "bdf2") return Method::BDF2;
  if (t == "implicit-euler" || t == "ie") return Method::ImplicitEuler;
  if (t == "rk45") return Method::ExplicitRK45;
  fail("method must be bdf2, implicit-euler or rk45, got '" + v + "'");
}

JacobianKind parse_jacobian(const std::string& v) {
  const std::string t = lower(trim(v));
  if (t == "banded") return JacobianKind::FiniteDifferenceBanded;
  if (t == "colored") return JacobianKind::FiniteDifferenceColored;
  if (t == "matrix-free") return JacobianKind::MatrixFree;
  fail("jacobian must be banded, colored or matrix-free, got '" + v + "'");
}

struct KeyInfo {
  const char* section;
  const char* name;
};

constexpr KeyInfo kKeys[] = {
    {"model", "equation"},       {"model", "a"},
    {"model", "b"},              {"model", "beta"},
    {"entropy", "alpha"},        {"scheme", "dimension"},
    {"scheme", "variant"},       {"scheme", "average"},
    {"scheme", "lambda4"},       {"scheme", "allow_unguaranteed"},
    {"grid", "dims"},            {"grid", "h"},
    {"initial", "preset"},       {"initial", "seed"},
    {"initial", "value"},        {"initial", "image"},
    {"initial", "floor"},        {"solver", "method"},
    {"solver", "jacobian"},      {"solver", "atol"},
    {"solver", "rtol"},          {"solver", "dt_init"},
    {"solver", "dt_min"},        {"solver", "dt_max"},
    {"solver", "newton_tol"},    {"solver", "newton_max_iter"},
    {"solver", "enforce_positivity"}, {"run", "t_end"},
    {"run", "output_times"},     {"run", "out_dir"},
    {"convergence", "n_list"},   {"convergence", "n_ref"},
};

std::string qualify(const std::string& key) {
  if (key.find('.') != std::string::npos) return key;
  std::string found;
  for (const auto& k : kKeys) {
    if (key == k.name) {
      if (!found.empty()) fail("key '" + key + "' is ambiguous; write it as section.key");
      found = std::string(k.section) + "." + k.name;
    }
  }
  if (found.empty()) fail("unknown key '" + key + "'");
  return found;
}

}  // namespace

std::string to_string(FluxVariant v) { return v == FluxVariant::Central ? "central" : "noncentral"; }

std::string to_string(AverageRule r) {
  switch (r) {
    case AverageRule::Identity: return "identity";
    case AverageRule::ArithmeticNbr: return "arith";
    case AverageRule::Geometric: return "geom";
  }
  return "identity";
}

std::string to_string(Method m) {
  switch (m) {
    case Method::BDF2: return "bdf2";
    case Method::ImplicitEuler: return "implicit-euler";
    case Method::ExplicitRK45: return "rk45";
  }
  return "bdf2";
}

std::string to_string(JacobianKind j) {
  switch (j) {
    case JacobianKind::FiniteDifferenceBanded: return "banded";
    case JacobianKind::FiniteDifferenceColored: return "colored";
    case JacobianKind::MatrixFree: return "matrix-free";
  }
  return "banded";
}

void set_config_value(RunConfig& c, const std::string& raw_key, const std::string& value) {
  const std::string key = qualify(lower(trim(raw_key)));
  const std::string v = trim(value);
  SolverConfig& s = c.solver;

  if (key == "model.equation") {
    const std::string e = lower(v);
    if (e == "dlss") {
      c.a = -2.0;
      c.b = 1.0;
      c.beta = 0.0;
    } else if (e == "thin-film") {
      c.a = 0.0;
      c.b = 0.0;
    } else {
      fail("equation must be dlss or thin-film, got '" + v + "'");
    }
  } else if (key == "model.a") {
    c.a = to_double(key, v);
  } else if (key == "model.b") {
    c.b = to_double(key, v);
  } else if (key == "model.beta") {
    c.beta = to_double(key, v);
  } else if (key == "entropy.alpha") {
    c.alpha = to_double(key, v);
  } else if (key == "scheme.dimension") {
    const auto d = to_uint(key, v);
    if (d != 1 && d != 2) fail("dimension must be 1 or 2");
    c.dimension = static_cast<int>(d);
  } else if (key == "scheme.variant") {
    c.variant = parse_variant(v);
  } else if (key == "scheme.average") {
    c.average = parse_average(v);
  } else if (key == "scheme.lambda4") {
    if (lower(v) == "optimal") {
      c.lambda4.reset();
    } else {
      c.lambda4 = to_double(key, v);
    }
  } else if (key == "scheme.allow_unguaranteed") {
    c.allow_unguaranteed = to_bool(key, v);
  } else if (key == "grid.dims") {
    std::vector<std::size_t> dims;
    for (const auto& p : split(lower(v), 'x')) dims.push_back(to_uint(key, p));
    if (dims.empty() || dims.size() > 2) fail("dims must be N or NxM");
    c.dims = dims;
  } else if (key == "grid.h") {
    c.h = to_double(key, v);
  } else if (key == "initial.preset") {
    c.preset = lower(v);
  } else if (key == "initial.seed") {
    c.seed = to_uint(key, v);
  } else if (key == "initial.value") {
    c.value = to_double(key, v);
  } else if (key == "initial.image") {
    c.image = v;
  } else if (key == "initial.floor") {
    c.floor = to_double(key, v);
  } else if (key == "solver.method") {
    s.method = parse_method(v);
  } else if (key == "solver.jacobian") {
    s.jacobian = parse_jacobian(v);
  } else if (key == "solver.atol") {
    s.atol = to_double(key, v);
  } else if (key == "solver.rtol") {
    s.rtol = to_double(key, v);
  } else if (key == "solver.dt_init") {
    s.dt_init = to_double(key, v);
  } else if (key == "solver.dt_min") {
    s.dt_min = to_double(key, v);
  } else if (key == "solver.dt_max") {
    s.dt_max = to_double(key, v);
  } else if (key == "solver.newton_tol") {
    s.newton_tol = to_double(key, v);
  } else if (key == "solver.newton_max_iter") {
    s.newton_max_iter = static_cast<int>(to_uint(key, v));
  } else if (key == "solver.enforce_positivity") {
    s.enforce_positivity = to_bool(key, v);
  } else if (key == "run.t_end") {
    c.t_end = to_double(key, v);
  } else if (key == "run.output_times") {
    c.output_times.clear();
    for (const auto& p : split(v, ',')) c.output_times.push_back(to_double(key, p));
  } else if (key == "run.out_dir") {
    c.out_dir = v;
  } else if (key == "convergence.n_list") {
    c.n_list.clear();
    for (const auto& p : split(v, ',')) c.n_list.push_back(to_uint(key, p));
  } else if (key == "convergence.n_ref") {
    c.n_ref = to_uint(key, v);
  } else {
    fail("unknown key '" + raw_key + "'");
  }
}

RunConfig parse_config(const std::string& text, RunConfig config) {
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto cut = line.find_first_of("#;");
    if (cut != std::string::npos) line.erase(cut);
    line = trim(line);
    if (line.empty()) continue;
    try {
      if (line.front() == '[') {
        if (line.back() != ']') fail("unterminated section header");
        section = lower(trim(line.substr(1, line.size() - 2)));
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) fail("expected key = value");
      std::string key = lower(trim(line.substr(0, eq)));
      if (key.find('.') == std::string::npos && !section.empty()) key = section + "." + key;
      set_config_value(config, key, line.substr(eq + 1));
    } catch (const Error& e) {
      fail("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return config;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

std::string render_config(const RunConfig& c) {
  std::ostringstream out;
  const SolverConfig& s = c.solver;
  out << "[model]\n"
      << "a = " << num(c.a) << "\n"
      << "b = " << num(c.b) << "\n"
      << "beta = " << num(c.beta) << "\n\n"
      << "[entropy]\n"
      << "alpha = " << num(c.alpha) << "\n\n"
      << "[scheme]\n"
      << "dimension = " << c.dimension << "\n"
      << "variant = " << to_string(c.variant) << "\n"
      << "average = " << to_string(c.average) << "\n"
      << "lambda4 = " << (c.lambda4 ? num(*c.lambda4) : std::string("optimal")) << "\n"
      << "allow_unguaranteed = " << (c.allow_unguaranteed ? "true" : "false") << "\n\n"
      << "[grid]\n"
      << "dims = " << join(c.dims, "x") << "\n"
      << "h = " << num(c.h) << "\n\n"
      << "[initial]\n"
      << "preset = " << c.preset << "\n"
      << "seed = " << c.seed << "\n"
      << "value = " << num(c.value) << "\n"
      << "image = " << c.image << "\n"
      << "floor = " << num(c.floor) << "\n\n"
      << "[solver]\n"
      << "method = " << to_string(s.method) << "\n"
      << "jacobian = " << to_string(s.jacobian) << "\n"
      << "atol = " << num(s.atol) << "\n"
      << "rtol = " << num(s.rtol) << "\n"
      << "dt_init = " << num(s.dt_init) << "\n"
      << "dt_min = " << num(s.dt_min) << "\n"
      << "dt_max = " << num(s.dt_max) << "\n"
      << "newton_tol = " << num(s.newton_tol) << "\n"
      << "newton_max_iter = " << s.newton_max_iter << "\n"
      << "enforce_positivity = " << (s.enforce_positivity ? "true" : "false") << "\n\n"
      << "[run]\n"
      << "t_end = " << num(c.t_end) << "\n"
      << "output_times = " << join(c.output_times, ", ") << "\n"
      << "out_dir = " << c.out_dir << "\n\n"
      << "[convergence]\n"
      << "n_list = " << join(c.n_list, ", ") << "\n"
      << "n_ref = " << c.n_ref << "\n";
  return out.str();
}

}  // namespace edfd
