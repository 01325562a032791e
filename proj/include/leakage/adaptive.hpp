#pragma once

// Leakage accounting for adaptive sequences of algorithms: post-processing,
// the chain rule, and additive composition of per-step bounds.

#include <string>
#include <vector>

#include "leakage/dist.hpp"
#include "leakage/measures.hpp"

namespace leakage {

struct LedgerStep {
  std::string name;
  double leakage_bound = 0.0;
  bool conditional = false;
};

/// Append-only record of declared per-step leakage bounds. Values are
/// immutable; compose returns a new ledger.
class CompositionLedger {
 public:
  CompositionLedger() = default;

  CompositionLedger compose(double step_leakage, std::string name, bool conditional = false) const;

  const std::vector<LedgerStep>& steps() const { return steps_; }
  double total() const { return total_; }
  std::size_t size() const { return steps_.size(); }

 private:
  std::vector<LedgerStep> steps_;
  double total_ = 0.0;
};

/// Throws NegativeLeakage for negative input.
CompositionLedger compose(const CompositionLedger& ledger, double step_leakage, std::string name,
                          bool conditional = false);

/// L(X -> Y) + L(X -> Z | Y).
double chain_rule_bound(double ml_y, double cond_ml_z_given_y);

struct PostprocessResult {
  double before = 0.0;
  double after = 0.0;
};

/// Leakage of X to Y and to Y' = post(Y).
PostprocessResult postprocess_check(const JointDist& j, const Channel& post_channel);

/// delta / exp(total leakage).
double budget_significance(const CompositionLedger& ledger, double delta);

/// A fully specified adaptive system over finite alphabets. Step i has a
/// kernel with |X| * H_i rows and |Y_i| columns, where H_i is the number of
/// histories (y_1, ..., y_{i-1}); row index is x * H_i + h with y_1 the most
/// significant digit of h.
class AdaptiveSystem {
 public:
  AdaptiveSystem(FiniteDist prior, std::vector<Matrix> kernels);

  const FiniteDist& prior() const { return prior_; }
  std::size_t steps() const { return kernels_.size(); }
  std::size_t histories(std::size_t step) const;

  /// Joint of X against the full transcript (y_1, ..., y_k).
  JointDist transcript_joint() const;
  /// max over histories h of L(X -> A_i(X, h)) under the prior.
  double step_bound(std::size_t step) const;
  CompositionLedger declared_ledger() const;
  /// Triple (X, Y_1, Y_2) for two-step systems.
  TripleDist first_two_steps() const;

 private:
  FiniteDist prior_;
  std::vector<Matrix> kernels_;
};

struct AuditResult {
  double realized_leakage = 0.0;
  CompositionLedger ledger;
  bool holds = false;
};

/// Exact L(X -> transcript) against the sum of declared step bounds.
AuditResult audit(const AdaptiveSystem& system);

}  // namespace leakage
