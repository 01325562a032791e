#include "leakage/adaptive.hpp"

#include <cmath>
#include <string>

#include "leakage/error.hpp"
#include "leakage/measures.hpp"

namespace leakage {

CompositionLedger CompositionLedger::compose(double step_leakage, std::string name, bool conditional) const {
  if (!(step_leakage >= 0.0)) {
    throw Error(ErrorCode::NegativeLeakage, "step leakage must be non-negative", steps_.size(), step_leakage);
  }
  CompositionLedger next = *this;
  next.steps_.push_back({std::move(name), step_leakage, conditional});
  next.total_ += step_leakage;
  return next;
}

CompositionLedger compose(const CompositionLedger& ledger, double step_leakage, std::string name, bool conditional) {
  return ledger.compose(step_leakage, std::move(name), conditional);
}

double chain_rule_bound(double ml_y, double cond_ml_z_given_y) {
  if (!(ml_y >= 0.0) || !(cond_ml_z_given_y >= 0.0)) {
    throw Error(ErrorCode::NegativeLeakage, "leakage terms must be non-negative");
  }
  return ml_y + cond_ml_z_given_y;
}

PostprocessResult postprocess_check(const JointDist& j, const Channel& post_channel) {
  if (post_channel.nx() != j.ny()) {
    throw Error(ErrorCode::ShapeMismatch, "post-processing channel input differs from the Y alphabet");
  }
  const JointDist after(j.x_labels(), post_channel.y_labels(), j.probs() * post_channel.rows());
  return {maximal_leakage(j), maximal_leakage(after)};
}

double budget_significance(const CompositionLedger& ledger, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorCode::InvalidArgument, "delta must lie in (0, 1)", std::nullopt, delta);
  return delta / std::exp(ledger.total());
}

AdaptiveSystem::AdaptiveSystem(FiniteDist prior, std::vector<Matrix> kernels)
    : prior_(std::move(prior)), kernels_(std::move(kernels)) {
  if (kernels_.empty()) throw Error(ErrorCode::InvalidArgument, "adaptive system needs at least one step");
  for (std::size_t i = 0; i < kernels_.size(); ++i) {
    const auto expected_rows = static_cast<Eigen::Index>(prior_.size() * histories(i));
    if (kernels_[i].rows() != expected_rows) {
      throw Error(ErrorCode::ShapeMismatch, "kernel " + std::to_string(i) + " has the wrong number of rows", i);
    }
    validate(Channel(kernels_[i]));
  }
}

std::size_t AdaptiveSystem::histories(std::size_t step) const {
  std::size_t h = 1;
  for (std::size_t i = 0; i < step; ++i) h *= static_cast<std::size_t>(kernels_[i].cols());
  return h;
}

JointDist AdaptiveSystem::transcript_joint() const {
  const std::size_t nx = prior_.size();
  const std::size_t total = histories(kernels_.size());
  Matrix joint(static_cast<Eigen::Index>(nx), static_cast<Eigen::Index>(total));
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t t = 0; t < total; ++t) {
      // Decode t into (y_1, ..., y_k), y_1 most significant.
      double prob = prior_[x];
      std::size_t h = 0;
      std::size_t rest = t;
      std::size_t radix = total;
      for (std::size_t i = 0; i < kernels_.size(); ++i) {
        const auto cols = static_cast<std::size_t>(kernels_[i].cols());
        radix /= cols;
        const std::size_t y = rest / radix;
        rest %= radix;
        prob *= kernels_[i](static_cast<Eigen::Index>(x * histories(i) + h), static_cast<Eigen::Index>(y));
        h = h * cols + y;
      }
      joint(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(t)) = prob;
    }
  }
  return JointDist(prior_.labels(), index_labels(total), std::move(joint));
}

double AdaptiveSystem::step_bound(std::size_t step) const {
  if (step >= kernels_.size()) throw Error(ErrorCode::InvalidArgument, "step index out of range", step);
  const std::size_t nx = prior_.size();
  const std::size_t hs = histories(step);
  std::vector<bool> support(nx);
  for (std::size_t x = 0; x < nx; ++x) support[x] = prior_[x] > 0.0;
  double best = 0.0;
  for (std::size_t h = 0; h < hs; ++h) {
    Matrix rows(static_cast<Eigen::Index>(nx), kernels_[step].cols());
    for (std::size_t x = 0; x < nx; ++x) rows.row(static_cast<Eigen::Index>(x)) = kernels_[step].row(static_cast<Eigen::Index>(x * hs + h));
    best = std::max(best, maximal_leakage(Channel(std::move(rows)), support));
  }
  return best;
}

CompositionLedger AdaptiveSystem::declared_ledger() const {
  CompositionLedger ledger;
  for (std::size_t i = 0; i < kernels_.size(); ++i) ledger = ledger.compose(step_bound(i), "step" + std::to_string(i + 1), i > 0);
  return ledger;
}

TripleDist AdaptiveSystem::first_two_steps() const {
  if (kernels_.size() < 2) throw Error(ErrorCode::InvalidArgument, "system has fewer than two steps");
  const std::size_t nx = prior_.size();
  const auto ny = static_cast<std::size_t>(kernels_[0].cols());
  const auto nz = static_cast<std::size_t>(kernels_[1].cols());
  std::vector<double> probs(nx * ny * nz);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y)
      for (std::size_t z = 0; z < nz; ++z)
        probs[(x * ny + y) * nz + z] = prior_[x] * kernels_[0](static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) *
                                       kernels_[1](static_cast<Eigen::Index>(x * ny + y), static_cast<Eigen::Index>(z));
  return TripleDist(nx, ny, nz, std::move(probs));
}

AuditResult audit(const AdaptiveSystem& system) {
  AuditResult r;
  r.realized_leakage = maximal_leakage(system.transcript_joint());
  r.ledger = system.declared_ledger();
  r.holds = r.realized_leakage <= r.ledger.total() + 1e-9;
  return r;
}

}  // namespace leakage
