#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

namespace leakage {

/// Outcome of evaluating one bound family on a (joint, event) pair.
struct BoundReport {
  static constexpr double kTolerance = 1e-9;

  std::string family;
  double bound = 0.0;  // raw value, may exceed 1
  double exact_joint_prob = 0.0;
  double exact_product_prob = 0.0;
  std::map<std::string, double> params;
  std::map<std::string, double> extras;
  std::vector<std::string> notes;
  bool holds = false;

  double display_bound() const { return std::clamp(bound, 0.0, 1.0); }
  double slack() const { return bound - exact_joint_prob; }
};

inline BoundReport make_report(std::string family, double bound, double joint_prob, double product_prob,
                               std::map<std::string, double> params = {}) {
  BoundReport r;
  r.family = std::move(family);
  r.bound = bound;
  r.exact_joint_prob = joint_prob;
  r.exact_product_prob = product_prob;
  r.params = std::move(params);
  r.holds = joint_prob <= bound + BoundReport::kTolerance;
  return r;
}

}  // namespace leakage
