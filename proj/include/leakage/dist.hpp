#pragma once

// Exact finite-alphabet probability objects. Everything here is templated on
// the scalar type; the double instantiations are aliased at the bottom.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "leakage/error.hpp"

namespace leakage {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

using Labels = std::vector<std::string>;

/// Absolute tolerance on the total mass of every distribution.
inline constexpr double kNormalizationTolerance = 1e-12;

inline Labels index_labels(std::size_t n) {
  Labels labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  return labels;
}

inline void validate_labels(const Labels& labels) {
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!seen.insert(labels[i]).second) {
      throw Error(ErrorCode::DuplicateLabel, "label '" + labels[i] + "' repeated", i);
    }
  }
}

/// Checks non-negativity and total mass of a probability array, then
/// renormalizes it in place. Entries are reported in storage order.
template <typename Derived>
void validate_and_normalize(Eigen::DenseBase<Derived>& probs) {
  using Scalar = typename Derived::Scalar;
  if (probs.size() == 0) {
    throw Error(ErrorCode::InvalidArgument, "empty probability array");
  }
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    const Scalar v = probs.derived().data()[i];
    if (!(v >= Scalar(0)) || !std::isfinite(static_cast<double>(v))) {
      throw Error(ErrorCode::NegativeProbability, "entry " + std::to_string(i) + " is negative or not finite",
                  static_cast<std::size_t>(i), static_cast<double>(v));
    }
  }
  const Scalar total = probs.sum();
  if (std::abs(static_cast<double>(total) - 1.0) > kNormalizationTolerance) {
    throw Error(ErrorCode::NotNormalized, "probabilities sum to " + std::to_string(static_cast<double>(total)),
                std::nullopt, static_cast<double>(total));
  }
  // Rounding-level deviations are left alone so decimal inputs round-trip.
  const double slack = 64.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(probs.size());
  if (std::abs(static_cast<double>(total) - 1.0) > slack) probs.derived() /= total;
}

template <typename Scalar>
class BasicFiniteDist {
 public:
  BasicFiniteDist(Labels labels, Vec<Scalar> probs) : labels_(std::move(labels)), probs_(std::move(probs)) {
    if (labels_.size() != static_cast<std::size_t>(probs_.size())) {
      throw Error(ErrorCode::ShapeMismatch, "label count differs from probability count");
    }
    validate_labels(labels_);
    validate_and_normalize(probs_);
  }

  explicit BasicFiniteDist(const Vec<Scalar>& probs)
      : BasicFiniteDist(index_labels(static_cast<std::size_t>(probs.size())), probs) {}

  static BasicFiniteDist uniform(std::size_t n) {
    return BasicFiniteDist(Vec<Scalar>::Constant(static_cast<Eigen::Index>(n), Scalar(1) / Scalar(n)));
  }

  /// Ber(p) over labels {"0","1"} with P(1) = p.
  static BasicFiniteDist bernoulli(Scalar p) {
    Vec<Scalar> probs(2);
    probs << Scalar(1) - p, p;
    return BasicFiniteDist(std::move(probs));
  }

  /// Uniform over the indices flagged in `support`, zero elsewhere.
  static BasicFiniteDist uniform_on(const std::vector<bool>& support) {
    const auto count = std::count(support.begin(), support.end(), true);
    if (count == 0) throw Error(ErrorCode::EmptySupport, "uniform_on needs a non-empty support");
    Vec<Scalar> probs = Vec<Scalar>::Zero(static_cast<Eigen::Index>(support.size()));
    for (std::size_t i = 0; i < support.size(); ++i) {
      if (support[i]) probs(static_cast<Eigen::Index>(i)) = Scalar(1) / Scalar(count);
    }
    return BasicFiniteDist(std::move(probs));
  }

  const Labels& labels() const { return labels_; }
  const Vec<Scalar>& probs() const { return probs_; }
  std::size_t size() const { return labels_.size(); }
  Scalar operator[](std::size_t i) const { return probs_(static_cast<Eigen::Index>(i)); }

 private:
  Labels labels_;
  Vec<Scalar> probs_;
};

template <typename Scalar>
class BasicChannel {
 public:
  BasicChannel(Labels x_labels, Labels y_labels, Mat<Scalar> rows)
      : x_labels_(std::move(x_labels)), y_labels_(std::move(y_labels)), rows_(std::move(rows)) {
    if (x_labels_.size() != static_cast<std::size_t>(rows_.rows()) ||
        y_labels_.size() != static_cast<std::size_t>(rows_.cols())) {
      throw Error(ErrorCode::ShapeMismatch, "channel matrix shape differs from label counts");
    }
    validate_labels(x_labels_);
    validate_labels(y_labels_);
    for (Eigen::Index x = 0; x < rows_.rows(); ++x) {
      Vec<Scalar> row = rows_.row(x).transpose();
      try {
        validate_and_normalize(row);
      } catch (const Error& e) {
        throw Error(e.code(), "channel row " + std::to_string(x) + ": " + e.what(), static_cast<std::size_t>(x),
                    e.value());
      }
      rows_.row(x) = row.transpose();
    }
  }

  explicit BasicChannel(const Mat<Scalar>& rows)
      : BasicChannel(index_labels(static_cast<std::size_t>(rows.rows())),
                     index_labels(static_cast<std::size_t>(rows.cols())), rows) {}

  static BasicChannel identity(std::size_t n) {
    return BasicChannel(Mat<Scalar>::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
  }

  /// Binary symmetric channel with crossover probability p.
  static BasicChannel bsc(Scalar p) {
    Mat<Scalar> rows(2, 2);
    rows << Scalar(1) - p, p, p, Scalar(1) - p;
    return BasicChannel(std::move(rows));
  }

  /// Binary erasure channel; outputs {"0","1","e"}.
  static BasicChannel erasure(Scalar a) {
    Mat<Scalar> rows(2, 3);
    rows << Scalar(1) - a, Scalar(0), a, Scalar(0), Scalar(1) - a, a;
    return BasicChannel(index_labels(2), Labels{"0", "1", "e"}, std::move(rows));
  }

  /// Every input maps to the same output distribution.
  static BasicChannel constant(std::size_t nx, const BasicFiniteDist<Scalar>& output) {
    Mat<Scalar> rows(static_cast<Eigen::Index>(nx), static_cast<Eigen::Index>(output.size()));
    rows.rowwise() = output.probs().transpose();
    return BasicChannel(index_labels(nx), output.labels(), std::move(rows));
  }

  const Labels& x_labels() const { return x_labels_; }
  const Labels& y_labels() const { return y_labels_; }
  const Mat<Scalar>& rows() const { return rows_; }
  std::size_t nx() const { return x_labels_.size(); }
  std::size_t ny() const { return y_labels_.size(); }

 private:
  Labels x_labels_;
  Labels y_labels_;
  Mat<Scalar> rows_;
};

template <typename Scalar>
class BasicJointDist {
 public:
  /// `probs` is indexed (x, y).
  BasicJointDist(Labels x_labels, Labels y_labels, Mat<Scalar> probs)
      : x_labels_(std::move(x_labels)), y_labels_(std::move(y_labels)), probs_(std::move(probs)) {
    if (x_labels_.size() != static_cast<std::size_t>(probs_.rows()) ||
        y_labels_.size() != static_cast<std::size_t>(probs_.cols())) {
      throw Error(ErrorCode::ShapeMismatch, "joint matrix shape differs from label counts");
    }
    validate_labels(x_labels_);
    validate_labels(y_labels_);
    // Row-major entry indices in error reports match the JSON layout.
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> row_major = probs_;
    validate_and_normalize(row_major);
    probs_ = row_major;
  }

  explicit BasicJointDist(const Mat<Scalar>& probs)
      : BasicJointDist(index_labels(static_cast<std::size_t>(probs.rows())),
                       index_labels(static_cast<std::size_t>(probs.cols())), probs) {}

  const Labels& x_labels() const { return x_labels_; }
  const Labels& y_labels() const { return y_labels_; }
  const Mat<Scalar>& probs() const { return probs_; }
  std::size_t nx() const { return x_labels_.size(); }
  std::size_t ny() const { return y_labels_.size(); }
  Scalar operator()(std::size_t x, std::size_t y) const {
    return probs_(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
  }

  BasicFiniteDist<Scalar> marginal_x() const { return BasicFiniteDist<Scalar>(x_labels_, probs_.rowwise().sum()); }
  BasicFiniteDist<Scalar> marginal_y() const {
    return BasicFiniteDist<Scalar>(y_labels_, probs_.colwise().sum().transpose());
  }

  BasicJointDist product_of_marginals() const {
    const Vec<Scalar> px = probs_.rowwise().sum();
    const Vec<Scalar> py = probs_.colwise().sum().transpose();
    return BasicJointDist(x_labels_, y_labels_, px * py.transpose());
  }

  /// P_{Y|X}. Rows with P_X(x) = 0 are undefined and filled with the
  /// uniform distribution; callers restrict to the support of P_X.
  BasicChannel<Scalar> conditional_of() const {
    const Vec<Scalar> px = probs_.rowwise().sum();
    Mat<Scalar> rows(probs_.rows(), probs_.cols());
    for (Eigen::Index x = 0; x < probs_.rows(); ++x) {
      if (px(x) > Scalar(0)) {
        rows.row(x) = probs_.row(x) / px(x);
      } else {
        rows.row(x).setConstant(Scalar(1) / Scalar(probs_.cols()));
      }
    }
    return BasicChannel<Scalar>(x_labels_, y_labels_, std::move(rows));
  }

  /// Support indicator of P_X.
  std::vector<bool> x_support() const {
    const Vec<Scalar> px = probs_.rowwise().sum();
    std::vector<bool> support(static_cast<std::size_t>(px.size()));
    for (Eigen::Index x = 0; x < px.size(); ++x) support[static_cast<std::size_t>(x)] = px(x) > Scalar(0);
    return support;
  }

 private:
  Labels x_labels_;
  Labels y_labels_;
  Mat<Scalar> probs_;
};

/// Boolean mask over X × Y. The fiber E_y is column y of the mask.
class Event {
 public:
  explicit Event(Mask mask) : mask_(std::move(mask)) {}

  static Event empty(std::size_t nx, std::size_t ny) {
    return Event(Mask::Constant(static_cast<Eigen::Index>(nx), static_cast<Eigen::Index>(ny), false));
  }
  static Event full(std::size_t nx, std::size_t ny) {
    return Event(Mask::Constant(static_cast<Eigen::Index>(nx), static_cast<Eigen::Index>(ny), true));
  }
  /// {(x, y) : x == y} on index positions.
  static Event diagonal(std::size_t nx, std::size_t ny) {
    Event e = empty(nx, ny);
    for (std::size_t i = 0; i < std::min(nx, ny); ++i) e.mask_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = true;
    return e;
  }
  static Event from_pairs(std::size_t nx, std::size_t ny, const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
    Event e = empty(nx, ny);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const auto [x, y] = pairs[k];
      if (x >= nx || y >= ny) {
        throw Error(ErrorCode::ShapeMismatch, "event pair outside the alphabet", k);
      }
      e.mask_(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = true;
    }
    return e;
  }

  const Mask& mask() const { return mask_; }
  std::size_t nx() const { return static_cast<std::size_t>(mask_.rows()); }
  std::size_t ny() const { return static_cast<std::size_t>(mask_.cols()); }
  bool contains(std::size_t x, std::size_t y) const {
    return mask_(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
  }

  std::vector<std::size_t> fiber(std::size_t y) const {
    std::vector<std::size_t> xs;
    for (std::size_t x = 0; x < nx(); ++x) {
      if (contains(x, y)) xs.push_back(x);
    }
    return xs;
  }

  std::vector<std::pair<std::size_t, std::size_t>> pairs() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t x = 0; x < nx(); ++x) {
      for (std::size_t y = 0; y < ny(); ++y) {
        if (contains(x, y)) out.emplace_back(x, y);
      }
    }
    return out;
  }

  Event complement() const { return Event(!mask_); }

 private:
  Mask mask_;
};

template <typename Scalar>
BasicJointDist<Scalar> joint_from(const BasicFiniteDist<Scalar>& prior, const BasicChannel<Scalar>& channel) {
  if (prior.labels() != channel.x_labels()) {
    throw Error(ErrorCode::LabelMismatch, "prior labels differ from channel input labels");
  }
  return BasicJointDist<Scalar>(channel.x_labels(), channel.y_labels(),
                                prior.probs().asDiagonal() * channel.rows());
}

/// Cascade X -> Y -> Z.
template <typename Scalar>
BasicChannel<Scalar> compose(const BasicChannel<Scalar>& first, const BasicChannel<Scalar>& second) {
  if (first.y_labels() != second.x_labels()) {
    throw Error(ErrorCode::LabelMismatch, "cascaded channels disagree on the middle alphabet");
  }
  return BasicChannel<Scalar>(first.x_labels(), second.y_labels(), first.rows() * second.rows());
}

template <typename Scalar>
Scalar event_prob(const BasicJointDist<Scalar>& measure, const Event& event) {
  if (measure.nx() != event.nx() || measure.ny() != event.ny()) {
    throw Error(ErrorCode::ShapeMismatch, "event shape differs from the joint");
  }
  return event.mask().select(measure.probs().array(), Scalar(0)).sum();
}

/// P_X(E_y) for every y.
template <typename Scalar>
Vec<Scalar> fiber_probs(const BasicFiniteDist<Scalar>& dist_x, const Event& event) {
  if (dist_x.size() != event.nx()) {
    throw Error(ErrorCode::ShapeMismatch, "event rows differ from the X alphabet");
  }
  Vec<Scalar> out(static_cast<Eigen::Index>(event.ny()));
  for (Eigen::Index y = 0; y < out.size(); ++y) {
    out(y) = event.mask().col(y).select(dist_x.probs().array(), Scalar(0)).sum();
  }
  return out;
}

/// esssup over P_Y of P_X(E_Y): the largest fiber probability among y with
/// P_Y(y) > 0.
template <typename Scalar>
Scalar esssup_fiber_prob(const BasicJointDist<Scalar>& joint, const Event& event) {
  const Vec<Scalar> fibers = fiber_probs(joint.marginal_x(), event);
  const Vec<Scalar> py = joint.probs().colwise().sum().transpose();
  Scalar best(0);
  for (Eigen::Index y = 0; y < fibers.size(); ++y) {
    if (py(y) > Scalar(0)) best = std::max(best, fibers(y));
  }
  return best;
}

// Re-validation entry points. Construction already enforces the invariants;
// these exist for values assembled elsewhere (e.g. deserialized copies).
template <typename Scalar>
void validate(const BasicFiniteDist<Scalar>& d) {
  BasicFiniteDist<Scalar>(d.labels(), d.probs());
}
template <typename Scalar>
void validate(const BasicJointDist<Scalar>& j) {
  BasicJointDist<Scalar>(j.x_labels(), j.y_labels(), j.probs());
}
template <typename Scalar>
void validate(const BasicChannel<Scalar>& c) {
  BasicChannel<Scalar>(c.x_labels(), c.y_labels(), c.rows());
}

using FiniteDist = BasicFiniteDist<double>;
using JointDist = BasicJointDist<double>;
using Channel = BasicChannel<double>;
using Vector = Vec<double>;
using Matrix = Mat<double>;

}  // namespace leakage
