#pragma once

// Random instance generators, brute-force oracles and the experiments that
// check the bounds against exact or Monte-Carlo probabilities.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "leakage/dist.hpp"

namespace leakage {

std::uint64_t splitmix64(std::uint64_t x);

/// Seed for item `index` of a run keyed by `master`; a pure function.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Deterministic stream with platform-independent conversions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform integer in [0, n) by rejection.
  std::uint64_t below(std::uint64_t n);
  /// Exponential with the given mean by inverse CDF.
  double exponential(double mean) { return -mean * std::log1p(-uniform()); }
  /// Exp(1) variate, for Dirichlet weights.
  double standard_exponential() { return exponential(1.0); }

 private:
  std::mt19937_64 engine_;
};

/// Dirichlet(1) joint with roughly `sparsity` of its atoms zeroed.
JointDist random_joint(std::uint64_t seed, std::size_t nx, std::size_t ny, double sparsity = 0.0);
Channel random_channel(std::uint64_t seed, std::size_t nx, std::size_t ny, double sparsity = 0.0);
Event random_event(std::uint64_t seed, std::size_t nx, std::size_t ny, double density = 0.5);

struct TightnessInstance {
  FiniteDist prior;
  Event event;
};

/// Prior and event for which the leakage bound is met with equality.
TightnessInstance tightness_instance(const Channel& c);

/// Direct atom summation, independent of event_prob.
double brute_force_event_prob(const JointDist& j, const Event& e);

/// beta-approximate max-information by enumerating every subset of atoms.
double beta_mi_brute_force(const JointDist& j, double beta);

// ---- noisy ERM -----------------------------------------------------------

struct ExperimentConfig {
  std::uint64_t n = 1000;
  std::uint64_t trials = 10000;
  std::uint64_t k = 50;
  /// Distribution over Z = D x C; rows are features, columns labels.
  JointDist data_dist = JointDist(Matrix::Constant(8, 2, 1.0 / 16.0));
  /// Noise means b_i; empty selects i^{1.1} / n^{1/3}.
  std::vector<double> noise_schedule;
  std::vector<double> eta_grid{0.05, 0.1, 0.2};
  std::uint64_t master_seed = 7;
  unsigned threads = 0;  // 0 = hardware concurrency

  void validate() const;
};

struct EtaResult {
  double eta = 0.0;
  double empirical_tail = 0.0;
  double standard_error = 0.0;
  double bound_raw = 0.0;  // closed form 2 exp(-n (2 eta^2 - 11 / n^{2/3}))
  double bound = 0.0;      // clamped to [0, 1]
  double exact_sum_bound = 0.0;  // 2 exp(sum log(1 + 1/b_i) - 2 n eta^2), clamped
  bool vacuous = false;
  bool holds = false;
};

struct ExperimentResult {
  double leakage = 0.0;  // sum log(1 + 1/b_i)
  double leakage_cap = 0.0;
  double mean_generalization_error = 0.0;
  std::vector<EtaResult> per_eta;
};

/// Hypothesis i labels feature d as hypotheses[i][d].
std::vector<std::vector<std::size_t>> random_labelings(std::uint64_t seed, std::size_t k, std::size_t features,
                                                       std::size_t labels);

ExperimentResult noisy_erm_experiment(const ExperimentConfig& cfg);

/// P(argmin_i (L_i + N_i) = h) for independent N_i ~ Exp(mean b_i), exactly.
std::vector<double> noisy_argmin_probs(const std::vector<double>& risks, const std::vector<double>& means);

struct HellingerErmCheck {
  double squared_hellinger = 0.0;  // between P_{S,H} and P_S P_H
  double exact_tail = 0.0;
  double bound = 0.0;
  bool holds = false;
};

/// Exact enumeration of a small noisy-ERM system, checked against
/// 2 exp(-n eta^2 / 2 sigma^2) + H^2 + 2^{3/2} H exp(-n eta^2 / 4 sigma^2).
HellingerErmCheck hellinger_erm_check(const JointDist& data, const std::vector<std::vector<std::size_t>>& hypotheses,
                                      const std::vector<double>& means, std::uint64_t n, double eta,
                                      double sigma = 0.5);

// ---- verification suite --------------------------------------------------

struct FamilyStats {
  std::size_t evaluated = 0;
  std::size_t violations = 0;
  std::size_t skipped = 0;  // precondition not met
  std::size_t equalities = 0;
  double max_slack = 0.0;
  double min_slack = 0.0;
};

struct VerificationReport {
  std::size_t instances = 0;
  std::map<std::string, FamilyStats> families;
  std::size_t curated_cases = 0;
  std::size_t curated_equalities = 0;
  std::size_t violations() const;
};

struct SuiteOptions {
  bool include_orlicz = true;
};

VerificationReport bound_verification_suite(std::uint64_t master_seed, std::size_t n_instances,
                                            const SuiteOptions& options = {});

}  // namespace leakage
