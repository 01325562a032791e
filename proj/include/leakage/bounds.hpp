#pragma once

// Event-probability bounds in terms of dependence measures, and the
// generalization-error consequences (tail bounds, sample complexity,
// expected generalization error, hypothesis testing).

#include <cstdint>
#include <functional>
#include <optional>

#include "leakage/dist.hpp"
#include "leakage/measures.hpp"
#include "leakage/report.hpp"

namespace leakage {

/// Hölder conjugate alpha / (alpha - 1); 1 for alpha = infinity.
double holder_conjugate(double alpha);

/// Parameters shared by the learning-theoretic formulas.
struct BoundParams {
  Alpha alpha = Alpha::infinity();  // Sibson order
  double p = 2.0;                   // Hellinger order
  double sigma = 0.5;               // sub-Gaussian parameter; 1/2 for 0-1 loss
  std::uint64_t n = 1;
  double eta = 0.1;
  double delta = 0.05;

  /// Throws InvalidArgument on out-of-range fields.
  void validate() const;
};

enum class TailFamily { SibsonAlpha, MaximalLeakage, HellingerP, ChiSquared };

TailFamily parse_tail_family(std::string_view name);

// ---- event bounds -------------------------------------------------------

/// Four-parameter Hölder bound with orders alpha, alpha' > 1.
BoundReport four_param_bound(const JointDist& j, const Event& e, double alpha, double alpha_prime);

/// (esssup P_X(E_Y))^{(alpha-1)/alpha} exp(((alpha-1)/alpha) I_alpha).
BoundReport sibson_bound(const JointDist& j, const Event& e, const Alpha& alpha);

/// (esssup P_X(E_Y)) exp(L(X -> Y)).
BoundReport ml_bound(const JointDist& j, const Event& e);

/// Q(E)^{(alpha-1)/alpha} exp(((alpha-1)/alpha) D_alpha(P || Q)).
BoundReport alpha_div_bound(const JointDist& j, const Event& e, double alpha);

/// Generator data for the f-divergence bound: phi, its generalized inverse
/// and phi*(0). Generators that only increase on [1, inf) invert there,
/// which keeps the bound valid because the inverse is then at least 1.
struct FdivGenerator {
  FKind kind;
  std::function<double(double)> inverse;
  double conjugate_at_zero = 0.0;
  bool monotone_from_one = false;

  static FdivGenerator hellinger_p(double p);
  static FdivGenerator chi_squared();
  static FdivGenerator squared_hellinger();
  static FdivGenerator total_variation();
  static FdivGenerator kl();
  /// Numerical inverse and phi*(0) = -inf phi for an arbitrary kind.
  static FdivGenerator numeric(const FKind& kind, bool monotone_from_one);
  static FdivGenerator from_kind(const FKind& kind);
};

/// Q(E) phi^{-1}((I_phi + (1 - Q(E)) phi*(0)) / Q(E)), simplified when phi*(0) <= 0.
BoundReport fdiv_bound(const JointDist& j, const Event& e, const FdivGenerator& gen);

/// Q(E)^{(p-1)/p} ((p-1) H_p + 1)^{1/p}; at p = 2 also the leakage relaxation.
BoundReport hellinger_p_bound(const JointDist& j, const Event& e, double p);

/// P - Q <= H^2 + 2 H sqrt(Q), requires P(E) >= Q(E). Reported bound is the
/// right side plus Q.
BoundReport hellinger_sq_bound(const JointDist& j, const Event& e);

// ---- generalization error ----------------------------------------------

/// Raw tail bound on P(gen-err >= eta); may exceed 1.
double tail_bound(double measure_value, const BoundParams& params, TailFamily family);

inline double clamp_probability(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

enum class SampleRule {
  ClosedForm,  // standard closed-form sample sizes, constants as stated
  Exact,    // smallest n with tail_bound <= delta
};

/// Number of samples for confidence delta at accuracy eta.
std::uint64_t sample_complexity(double measure_value, const BoundParams& params, TailFamily family,
                                SampleRule rule = SampleRule::ClosedForm);

struct ExpectedGenErr {
  double bound = 0.0;           // sqrt(8 sigma^2 (log 2 + I) / n)
  double leakage_form = 0.0;    // 3 sqrt(2 sigma^2 L / n)
  double mutual_info_form = 0.0;  // sqrt(2 sigma^2 I / n)
};

ExpectedGenErr expected_generr_bound(double measure_value, std::uint64_t n, double sigma);

/// a * min{3 sqrt(log b), 2 sqrt(log 2b)} for a >= 0, b >= e.
double expectation_from_tail(double a, double b);

/// min(1, exp(L) * significance).
double hyp_test_bound(double leakage, double significance);

/// Largest significance keeping the false-positive rate below delta.
double hyp_test_significance(double leakage, double delta);

}  // namespace leakage
