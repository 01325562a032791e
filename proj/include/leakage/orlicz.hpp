#pragma once

// Orlicz functions, their Legendre conjugates and generalized inverses, and the
// Luxemburg / Amemiya norms of finitely supported random variables.

#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "leakage/dist.hpp"
#include "leakage/report.hpp"

namespace leakage {

/// Convex, non-decreasing psi: [0, inf) -> [0, inf] with psi(0) = 0.
/// Evaluation returns +infinity past the optional domain bound.
class OrliczFn {
 public:
  using Curve = std::function<double(double)>;

  /// Validates psi(0) = 0, monotonicity and convexity on a small grid.
  OrliczFn(Curve eval, std::string name, std::optional<double> domain_hint = std::nullopt);

  /// t^alpha / alpha for alpha > 1.
  static OrliczFn power(double alpha);
  static OrliczFn exp_minus_one();
  static OrliczFn linear();
  /// Registry lookup: "power:alpha=<a>", "exp-minus-one", "linear".
  static OrliczFn parse(std::string_view spec);

  double operator()(double t) const;
  const std::string& name() const { return name_; }
  std::optional<double> domain_hint() const { return domain_hint_; }

 private:
  struct Unchecked {};
  OrliczFn(Unchecked, Curve eval, std::string name, std::optional<double> domain_hint);

  Curve eval_;
  std::string name_;
  std::optional<double> domain_hint_;

  friend OrliczFn legendre_conjugate(const OrliczFn& psi);
};

/// psi*(x) = sup_{lambda > 0} lambda x - psi(lambda). Throws DivergentConjugate
/// when the supremum is unbounded.
double conjugate_value(const OrliczFn& psi, double x);

/// psi* as a function; divergent points evaluate to +infinity.
OrliczFn legendre_conjugate(const OrliczFn& psi);

/// psi** evaluated pointwise through two numerical conjugations.
OrliczFn biconjugate(const OrliczFn& psi);

/// inf{s >= 0 : f(s) > t} by bisection. Right endpoint on plateaus.
double generalized_inverse(const OrliczFn& f, double t);

/// A random variable U on a finite space together with its law mu.
class WeightedValues {
 public:
  WeightedValues(Vector values, Vector weights);
  const Vector& values() const { return values_; }
  const Vector& weights() const { return weights_; }
  Eigen::Index size() const { return values_.size(); }
  double expectation(const std::function<double(double)>& f) const;

 private:
  Vector values_;
  Vector weights_;
};

/// inf{sigma > 0 : E[psi(|U| / sigma)] <= 1}.
double luxemburg_norm(const WeightedValues& u, const OrliczFn& psi);

/// inf_{t > 0} (E[psi(t |U|)] + 1) / t.
double amemiya_norm(const WeightedValues& u, const OrliczFn& psi);

/// How the outer inverse in the single-function bound is formed.
enum class InverseMode { Biconjugate, Direct };

/// Q(E) * (psi**)^{-1}(1 / Q(E)) * ||dP/dQ||_psi with Q the product of marginals.
BoundReport theorem2_bound(const JointDist& j, const Event& e, const OrliczFn& psi,
                           InverseMode mode = InverseMode::Biconjugate);

/// Nested norm product: Luxemburg norms of fiber indicators (phi inside, psi
/// outside) times Amemiya norms of the likelihood ratio (phi*, psi*).
BoundReport theorem1_bound(const JointDist& j, const Event& e, const OrliczFn& phi, const OrliczFn& psi);

}  // namespace leakage
