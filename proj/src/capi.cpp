#include "edfd.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <string>

#include "edfd/coeffs.hpp"
#include "edfd/config.hpp"
#include "edfd/error.hpp"
#include "edfd/experiments.hpp"

struct edfd_config {
  edfd::RunConfig value;
};

struct edfd_scheme {
  edfd::Problem problem;
};

namespace {

thread_local std::string g_last_error;

edfd_status fail(edfd_status status, const char* what) {
  g_last_error = what;
  return status;
}

template <class F>
edfd_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return EDFD_OK;
  } catch (const edfd::Error& e) {
    return fail(static_cast<edfd_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(EDFD_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(EDFD_INTERNAL_ERROR, e.what());
  } catch (...) {
    return fail(EDFD_INTERNAL_ERROR, "unknown failure");
  }
}

void copy_out(const std::string& text, char* buffer, size_t capacity, size_t* needed) {
  if (needed) *needed = text.size();
  if (buffer && capacity > 0) {
    const size_t n = std::min(capacity - 1, text.size());
    std::memcpy(buffer, text.data(), n);
    buffer[n] = '\0';
  }
}

void summarize(const edfd::EvolveSummary& s, edfd_run_summary* out) {
  if (!out) return;
  const auto& r = s.record;
  *out = edfd_run_summary{};
  out->accepted_steps = s.stats.accepted_steps;
  out->rejected_steps = s.stats.rejected_steps;
  out->records = r.size();
  out->t_final = s.stats.t_final;
  out->admissibility = s.K;
  if (r.size() == 0) return;
  out->entropy_initial = r.entropy.front();
  out->entropy_final = r.entropy.back();
  out->max_entropy_increase = 0.0;
  double drift = 0.0;
  for (size_t k = 0; k < r.size(); ++k) {
    if (k > 0) out->max_entropy_increase = std::max(out->max_entropy_increase, r.entropy[k] - r.entropy[k - 1]);
    drift = std::max(drift, std::abs(r.mass[k] - r.mass[0]) / std::abs(r.mass[0]));
  }
  out->mass_relative_drift = drift;
  out->min_u = *std::min_element(r.min_u.begin(), r.min_u.end());
}

}  // namespace

extern "C" {

const char* edfd_last_error(void) { return g_last_error.c_str(); }

const char* edfd_status_name(edfd_status status) {
  if (status == EDFD_OK) return "Ok";
  if (status == EDFD_INTERNAL_ERROR) return "InternalError";
  return edfd::error_code_name(static_cast<edfd::ErrorCode>(status));
}

edfd_status edfd_config_new(edfd_config** out) {
  if (!out) return fail(EDFD_INVALID_ARGUMENT, "null output handle");
  return guarded([&] { *out = new edfd_config{}; });
}

edfd_status edfd_config_parse(const char* text, edfd_config** out) {
  if (!text || !out) return fail(EDFD_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new edfd_config{edfd::parse_config(text)}; });
}

edfd_status edfd_config_load(const char* path, edfd_config** out) {
  if (!path || !out) return fail(EDFD_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new edfd_config{edfd::load_config(path)}; });
}

edfd_status edfd_config_set(edfd_config* config, const char* key, const char* value) {
  if (!config || !key || !value) return fail(EDFD_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    edfd::RunConfig updated = config->value;
    edfd::set_config_value(updated, key, value);
    config->value = std::move(updated);
  });
}

edfd_status edfd_config_render(const edfd_config* config, char* buffer, size_t capacity,
                               size_t* needed) {
  if (!config) return fail(EDFD_INVALID_ARGUMENT, "null config");
  return guarded([&] { copy_out(edfd::render_config(config->value), buffer, capacity, needed); });
}

void edfd_config_free(edfd_config* config) { delete config; }

edfd_status edfd_run_evolve(const edfd_config* config, edfd_run_summary* summary) {
  if (!config) return fail(EDFD_INVALID_ARGUMENT, "null config");
  return guarded([&] { summarize(edfd::run_evolve(config->value), summary); });
}

edfd_status edfd_run_denoise(const edfd_config* config, edfd_run_summary* summary) {
  if (!config) return fail(EDFD_INVALID_ARGUMENT, "null config");
  return guarded([&] { summarize(edfd::run_denoise(config->value), summary); });
}

edfd_status edfd_run_convergence(const edfd_config* config, double* order) {
  if (!config) return fail(EDFD_INVALID_ARGUMENT, "null config");
  return guarded([&] {
    const auto s = edfd::run_convergence(config->value);
    if (order) *order = s.order;
  });
}

edfd_status edfd_run_check(const edfd_config* config, char* table, size_t capacity,
                           size_t* needed) {
  if (!config) return fail(EDFD_INVALID_ARGUMENT, "null config");
  bool passed = true;
  const edfd_status st = guarded([&] {
    const auto report = edfd::run_check(config->value);
    copy_out(report.table(), table, capacity, needed);
    passed = report.passed();
  });
  if (st != EDFD_OK) return st;
  return passed ? EDFD_OK : fail(EDFD_CHECK_FAILED, "one or more checks failed");
}

edfd_status edfd_scheme_new(const edfd_config* config, edfd_scheme** out) {
  if (!config || !out) return fail(EDFD_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new edfd_scheme{edfd::build_problem(config->value)}; });
}

size_t edfd_scheme_size(const edfd_scheme* scheme) {
  return scheme ? scheme->problem.disc.grid().size() : 0;
}

edfd_status edfd_scheme_initial_state(const edfd_scheme* scheme, double* u, size_t n) {
  if (!scheme || !u) return fail(EDFD_INVALID_ARGUMENT, "null argument");
  if (n != scheme->problem.u0.size()) return fail(EDFD_INVALID_ARGUMENT, "buffer size mismatch");
  std::copy(scheme->problem.u0.begin(), scheme->problem.u0.end(), u);
  return EDFD_OK;
}

edfd_status edfd_scheme_rhs(const edfd_scheme* scheme, const double* u, double* du, size_t n) {
  if (!scheme || !u || !du) return fail(EDFD_INVALID_ARGUMENT, "null argument");
  if (n != edfd_scheme_size(scheme)) return fail(EDFD_INVALID_ARGUMENT, "buffer size mismatch");
  return guarded([&] {
    const edfd::Field f = scheme->problem.disc.rhs(std::span<const double>(u, n));
    std::copy(f.begin(), f.end(), du);
  });
}

edfd_status edfd_scheme_entropy(const edfd_scheme* scheme, const double* u, size_t n,
                                double* entropy) {
  if (!scheme || !u || !entropy) return fail(EDFD_INVALID_ARGUMENT, "null argument");
  if (n != edfd_scheme_size(scheme)) return fail(EDFD_INVALID_ARGUMENT, "buffer size mismatch");
  return guarded([&] {
    const auto& d = scheme->problem.disc;
    *entropy = edfd::discrete_entropy(d.grid(), std::span<const double>(u, n), d.entropy());
  });
}

edfd_status edfd_scheme_entropy_production(const edfd_scheme* scheme, const double* u, size_t n,
                                           double* production) {
  if (!scheme || !u || !production) return fail(EDFD_INVALID_ARGUMENT, "null argument");
  if (n != edfd_scheme_size(scheme)) return fail(EDFD_INVALID_ARGUMENT, "buffer size mismatch");
  return guarded([&] {
    *production = scheme->problem.disc.entropy_production(std::span<const double>(u, n));
  });
}

void edfd_scheme_free(edfd_scheme* scheme) { delete scheme; }

edfd_status edfd_lambda_optimal(double alpha, double a, double b, double beta, double lambda[4]) {
  if (!lambda) return fail(EDFD_INVALID_ARGUMENT, "null output");
  return guarded([&] {
    const edfd::EntropySpec e(alpha);
    const edfd::ModelParams m{a, b, beta};
    m.validate();
    const edfd::LambdaSet l = edfd::lambda_for(e, m, edfd::lambda4_optimal(e, m));
    lambda[0] = l.l1;
    lambda[1] = l.l2;
    lambda[2] = l.l3;
    lambda[3] = l.l4;
  });
}

edfd_status edfd_admissibility(double alpha, double a, double b, double beta, double* K) {
  if (!K) return fail(EDFD_INVALID_ARGUMENT, "null output");
  return guarded([&] { *K = edfd::admissibility_K(edfd::EntropySpec(alpha), edfd::ModelParams{a, b, beta}); });
}

}  // extern "C"
