#pragma once

// Coefficient machinery for the flux decomposition J = A_x - v B_x of
//
//   u_t = -J_x,   J = u^beta u_xxx + a u^(beta-1) u_xx u_x + b u^(beta-2) u_x^3.
//
// The decomposition is parametrized by a LambdaSet; the entropy production
// of the resulting scheme is a quartic form in (xi1, xi2) described by a
// PolySpec. Everything here is a pure function of its value arguments.

namespace edfd {

struct ModelParams {
  double a = 0.0;
  double b = 0.0;
  double beta = 0.0;

  static ModelParams dlss() { return {-2.0, 1.0, 0.0}; }
  static ModelParams thin_film(double beta) { return {0.0, 0.0, beta}; }

  /// Throws InvalidArgument when beta < 0 or a coefficient is not finite.
  void validate() const;
};

enum class EntropyKind { Logarithmic, Shannon, Renyi };

/// Entropy index alpha >= 0. The kind is derived from alpha so the two can
/// never disagree.
class EntropySpec {
 public:
  explicit EntropySpec(double alpha);

  double alpha() const noexcept { return alpha_; }
  EntropyKind kind() const noexcept { return kind_; }

 private:
  double alpha_;
  EntropyKind kind_;
};

struct LambdaSet {
  double l1 = 0.0;
  double l2 = 0.0;
  double l3 = 0.0;
  double l4 = 0.0;
};

enum class PolyVariant { P, P1, P0 };

/// c22 xi2^2 + c21 xi2 xi1^2 + c11 xi1^4, stored in terms of xi1sq = xi1^2.
struct PolySpec {
  PolyVariant variant = PolyVariant::P;
  double c22 = 0.0;
  double c21 = 0.0;
  double c11 = 0.0;

  double operator()(double xi1sq, double xi2) const noexcept {
    return c22 * xi2 * xi2 + c21 * xi2 * xi1sq + c11 * xi1sq * xi1sq;
  }
};

/// lambda_1..3 as functions of the free parameter lambda4, alpha != 1.
LambdaSet lambda_general(const EntropySpec& entropy, const ModelParams& model,
                         double lambda4);

/// alpha = 1 uses the logarithmic-entropy system evaluated at (a, b, beta).
LambdaSet lambda_alpha1(const ModelParams& model, double lambda4);

/// Dispatches to lambda_general or lambda_alpha1.
LambdaSet lambda_for(const EntropySpec& entropy, const ModelParams& model,
                     double lambda4);

/// The lambda4 maximizing the nonnegativity margin of the production polynomial.
double lambda4_optimal(const EntropySpec& entropy, const ModelParams& model);

/// K(alpha, beta); K >= 0 is the sharp condition for entropy dissipation.
double admissibility_K(const EntropySpec& entropy, const ModelParams& model);

PolySpec poly_spec(const EntropySpec& entropy, const LambdaSet& lambdas);

/// Production polynomial of the multi-dimensional thin-film scheme.
PolySpec poly_spec_2d(const LambdaSet& lambdas);

/// 4 c11 - c21^2 (assumes c22 = 1). Nonnegative iff the polynomial is
/// nonnegative on R^2.
double nonneg_margin(const PolySpec& spec);

/// Largest c >= 0 with spec(xi1, xi2) >= c (xi2^2 + xi1^4) on R^2.
/// Throws NotNonnegative when the margin is negative.
double coercivity_constant(const PolySpec& spec);

/// Constant k(alpha) with xi2^2 + 2(alpha-2) xi2 xi1^2 + (2alpha^2-6alpha+5) xi1^4
/// >= k (xi2^2 + xi1^4); converts the dissipation bound into one on u-derivatives.
double gradient_form_constant(double alpha);

/// Max absolute residual of the three coefficient-identification equations.
/// Requires alpha != 1.
double verify_flux_identification(const LambdaSet& lambdas,
                                  const EntropySpec& entropy,
                                  const ModelParams& model);

/// Unique lambda-set of the multi-dimensional thin-film decomposition.
LambdaSet lambda_2d(double beta);

}  // namespace edfd
