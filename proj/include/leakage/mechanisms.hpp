#pragma once

// Maximal leakage of additive-noise mechanisms M(x) = g(x) + N with g valued
// in [a, c], and the bridge from differential privacy to leakage.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace leakage {

enum class NoiseKind { Laplace, Gaussian, Exponential };

NoiseKind parse_noise(std::string_view name);
std::string_view to_string(NoiseKind kind);

struct MechanismSpec {
  double range_lo = 0.0;
  double range_hi = 1.0;
  NoiseKind noise = NoiseKind::Laplace;
  double scale = 1.0;  // b for Laplace / Exponential, sigma for Gaussian

  void validate() const;
  double density(double v) const;
};

struct MechanismLeakage {
  double leakage_nats = 0.0;
  std::string formula;
  std::string provenance_note;
};

/// Closed form of log integral sup_{g in [a, c]} f_N(y - g) dy.
MechanismLeakage additive_noise_leakage(const MechanismSpec& m);

/// Same integral evaluated by quadrature, returned as exp(leakage).
double additive_noise_integral(const MechanismSpec& m);

/// epsilon-DP over n records gives leakage at most epsilon * n (an upper bound).
double dp_to_leakage(double epsilon, std::uint64_t n);

/// log(1 + epsilon n) for the Laplace mechanism on a 1/n-sensitive query.
double laplace_dp_leakage(double epsilon, std::uint64_t n);

/// sum_i log(1 + 1/b_i) for exponential noise with means b_i.
double noisy_erm_leakage(const std::vector<double>& noise_means);

/// b_i = i^{1.1} / n^{1/3}, i = 1..k.
std::vector<double> noisy_erm_schedule(std::uint64_t n, std::uint64_t k);

/// 11 n^{1/3}, the closed-form cap on the schedule's leakage.
double noisy_erm_schedule_cap(std::uint64_t n);

struct DpRegimeComparison {
  double epsilon = 0.0;
  std::uint64_t n = 1;
  double eta = 0.0;
  // exp(eps n) 2 exp(-2 n eta^2) against the leakage rate.
  double decay_exponent = 0.0;  // 2 eta^2 - eps
  bool leakage_bound_decays = false;
  bool zero_rate = false;
  double tighter_threshold = 0.0;  // 23/12 eta^2
  bool leakage_tighter = false;
  // For eps <= eta/2: 2 exp(n (eps - 2 eta^2)) against (1/4) exp(-n eta^2 / 12).
  bool small_epsilon_regime = false;
  double leakage_dp_bound = 0.0;
  double stability_bound = 0.0;
  // Optional beta comparison.
  bool has_beta = false;
  double beta = 0.0;
  double epsilon_threshold = 0.0;  // log(3 / sqrt(beta)) / n
  double hoeffding_threshold = 0.0;  // sqrt(log(1/beta) / (2n))
  double leakage_side = 0.0;  // exp(eps n) beta
  double max_info_side = 0.0;  // 3 sqrt(beta)
  bool leakage_side_smaller = false;
};

DpRegimeComparison dp_regime_comparator(double epsilon, std::uint64_t n, double eta, double beta = -1.0);

}  // namespace leakage
