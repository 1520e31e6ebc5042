#include "edfd/coeffs.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "edfd/error.hpp"

namespace edfd {

namespace {

constexpr double kDenominatorFloor = 1e-12;

// Smallest root of 4(1-c)(c11-c) = c21^2, i.e. the largest c for which the
// 2x2 form [[1-c, c21/2], [c21/2, c11-c]] stays positive semidefinite.
double quadratic_form_optimum(double c21, double c11) {
  const double disc = std::hypot(1.0 - c11, c21);
  const double c = 0.5 * ((1.0 + c11) - disc);
  return std::clamp(c, 0.0, std::min(1.0, c11));
}

}  // namespace

void ModelParams::validate() const {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(beta)) {
    throw Error(ErrorCode::InvalidArgument, "model coefficients must be finite");
  }
  if (beta < 0.0) {
    std::ostringstream msg;
    msg << "mobility exponent beta must be >= 0, got " << beta;
    throw Error(ErrorCode::InvalidArgument, msg.str());
  }
}

EntropySpec::EntropySpec(double alpha) : alpha_(alpha) {
  if (!std::isfinite(alpha) || alpha < 0.0) {
    std::ostringstream msg;
    msg << "entropy index alpha must be finite and >= 0, got " << alpha;
    throw Error(ErrorCode::InvalidArgument, msg.str());
  }
  if (alpha == 0.0) {
    kind_ = EntropyKind::Logarithmic;
  } else if (alpha == 1.0) {
    kind_ = EntropyKind::Shannon;
  } else {
    kind_ = EntropyKind::Renyi;
  }
}

LambdaSet lambda_general(const EntropySpec& entropy, const ModelParams& model,
                         double lambda4) {
  const double al = entropy.alpha();
  if (entropy.kind() == EntropyKind::Shannon) {
    throw Error(ErrorCode::InvalidAlpha,
                "lambda_general is undefined for alpha = 1; use lambda_alpha1");
  }
  const double a = model.a;
  const double b = model.b;
  const double be = model.beta;
  const double den = be - 2.0 * al + 3.0;
  if (std::abs(den) < kDenominatorFloor) {
    throw Error(ErrorCode::SingularDenominator,
                "beta - 2 alpha + 3 vanishes; lambda set is undefined");
  }
  const double am1 = al - 1.0;

  LambdaSet l;
  l.l4 = lambda4;
  l.l1 = (-2.0 * al * al + (be + 5.0) * al + a * be - be * be - a - 2.0 * b - 3.0) /
             (am1 * den) +
         2.0 * am1 / den * lambda4;
  l.l2 = (2.0 * al * al - (a + 7.0) * al + 2.0 * a + b + 6.0) / (am1 * den) +
         (be - 3.0 * al + 4.0) / den * lambda4;
  l.l3 = ((a + 1.0) * be - be * be - a - 2.0 * b) / (am1 * den) +
         2.0 * am1 / den * lambda4;
  return l;
}

LambdaSet lambda_alpha1(const ModelParams& model, double lambda4) {
  const double a = model.a;
  const double b = model.b;
  const double be = model.beta;
  const double den = be + 3.0;
  if (std::abs(den) < kDenominatorFloor) {
    throw Error(ErrorCode::SingularDenominator, "beta + 3 vanishes");
  }
  LambdaSet l;
  l.l4 = lambda4;
  l.l1 = (be * be - a * be + a + 2.0 * b + 3.0) / den - 2.0 / den * lambda4;
  l.l2 = -(2.0 * a + b + 6.0) / den + (be + 4.0) / den * lambda4;
  l.l3 = (be * be - a * be - be + a + 2.0 * b) / den - 2.0 / den * lambda4;
  return l;
}

LambdaSet lambda_for(const EntropySpec& entropy, const ModelParams& model,
                     double lambda4) {
  if (entropy.kind() == EntropyKind::Shannon) return lambda_alpha1(model, lambda4);
  return lambda_general(entropy, model, lambda4);
}

double lambda4_optimal(const EntropySpec& entropy, const ModelParams& model) {
  const double al = entropy.alpha();
  const double a = model.a;
  const double b = model.b;
  const double be = model.beta;
  if (entropy.kind() == EntropyKind::Shannon) {
    return (be * be - (3.0 * a + 14.0) * be + 9.0 * (a + b) + 3.0) / 9.0;
  }
  const double am1 = al - 1.0;
  return (-2.0 * al * al + (-3.0 * a + 8.0 * be + 3.0) * al - 3.0 * a * be + be * be +
          9.0 * (a + b) - 15.0 * be) /
         (9.0 * am1 * am1);
}

double admissibility_K(const EntropySpec& entropy, const ModelParams& model) {
  const double al = entropy.alpha();
  const double a = model.a;
  const double b = model.b;
  const double be = model.beta;
  return -2.0 * al * al + (3.0 * a - 4.0 * be + 9.0) * al - 2.0 * be * be +
         (3.0 * a + 9.0) * be - 9.0 * (a + b + 1.0);
}

PolySpec poly_spec(const EntropySpec& entropy, const LambdaSet& l) {
  if (entropy.kind() == EntropyKind::Shannon) {
    return {PolyVariant::P1, l.l1 - l.l3, -l.l1 + l.l2 - l.l4, -l.l2};
  }
  return {PolyVariant::P, l.l1 - l.l3, l.l2 - l.l3 - l.l4, -l.l4};
}

PolySpec poly_spec_2d(const LambdaSet& l) {
  return {PolyVariant::P0, l.l1 - l.l3, l.l2 - l.l3 - l.l4, -l.l4};
}

double nonneg_margin(const PolySpec& spec) {
  return 4.0 * spec.c11 - spec.c21 * spec.c21;
}

double coercivity_constant(const PolySpec& spec) {
  const double margin = nonneg_margin(spec);
  if (margin < 0.0) {
    std::ostringstream msg;
    msg << "production polynomial is not nonnegative (margin " << margin << ")";
    throw Error(ErrorCode::NotNonnegative, msg.str());
  }
  if (margin == 0.0) return 0.0;
  return quadratic_form_optimum(spec.c21, spec.c11);
}

double gradient_form_constant(double alpha) {
  return quadratic_form_optimum(2.0 * (alpha - 2.0),
                                2.0 * alpha * alpha - 6.0 * alpha + 5.0);
}

double verify_flux_identification(const LambdaSet& l, const EntropySpec& entropy,
                                  const ModelParams& model) {
  if (entropy.kind() == EntropyKind::Shannon) {
    throw Error(ErrorCode::InvalidAlpha,
                "identification residual is defined for alpha != 1 only");
  }
  const double al = entropy.alpha();
  const double be = model.beta;
  const double r1 = l.l1 - l.l3 - 1.0;
  const double r2 = (2.0 * l.l1 + 2.0 * l.l2 - l.l3 - 2.0 * l.l4) * al +
                    (l.l1 - l.l3) * be - 4.0 * l.l1 - 2.0 * l.l2 + 3.0 * l.l3 +
                    2.0 * l.l4 - model.a;
  const double r3 = (l.l3 + l.l4) * al * al +
                    (l.l1 + l.l2 - l.l3 - l.l4) * al * be -
                    (l.l1 + l.l2 + 2.0 * l.l3 + l.l4) * al +
                    (-2.0 * l.l1 - l.l2 + 2.0 * l.l3 + l.l4) * be + 2.0 * l.l1 +
                    l.l2 - model.b;
  return std::max({std::abs(r1), std::abs(r2), std::abs(r3)});
}

LambdaSet lambda_2d(double beta) {
  if (!(beta > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "2D thin-film scheme requires beta > 0");
  }
  return {beta + 1.0, -2.0 * (beta + 1.0), beta, -2.0 * beta};
}

}  // namespace edfd
