#pragma once

// Divergences and dependence measures on finite alphabets. All values are in
// nats. Infinite divergences are returned as +infinity; callers that need
// absolute continuity check for it explicitly.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "leakage/dist.hpp"
#include "leakage/error.hpp"

namespace leakage {

/// Order of a Rényi divergence or Sibson information. One and Infinity are
/// distinct variants; finite orders too close to 1 are rejected.
class Alpha {
 public:
  enum class Kind { Finite, One, Infinity };

  /// Finite orders with |alpha - 1| below this are DegenerateAlpha.
  static constexpr double kDegenerateWidth = 5e-7;

  static Alpha one() { return Alpha(Kind::One, 1.0); }
  static Alpha infinity() { return Alpha(Kind::Infinity, std::numeric_limits<double>::infinity()); }
  static Alpha finite(double value) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw Error(ErrorCode::InvalidArgument, "alpha must be a positive finite real", std::nullopt, value);
    }
    if (std::abs(value - 1.0) < kDegenerateWidth) {
      throw Error(ErrorCode::DegenerateAlpha, "alpha within 5e-7 of 1; use the explicit One variant",
                  std::nullopt, value);
    }
    return Alpha(Kind::Finite, value);
  }

  /// Accepts "inf"/"infinity", "one", the literal "1", or a decimal.
  static Alpha parse(std::string_view text) {
    const std::string s(text);
    if (s == "inf" || s == "infinity" || s == "Infinity") return infinity();
    if (s == "one" || s == "1") return one();
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "cannot parse alpha '" + s + "'");
    }
    if (used != s.size()) throw Error(ErrorCode::InvalidArgument, "cannot parse alpha '" + s + "'");
    return finite(v);
  }

  Kind kind() const { return kind_; }
  bool is_one() const { return kind_ == Kind::One; }
  bool is_infinity() const { return kind_ == Kind::Infinity; }
  bool is_finite() const { return kind_ == Kind::Finite; }
  /// Numeric order; +infinity for the Infinity variant and 1 for One.
  double value() const { return value_; }
  /// (alpha - 1) / alpha, i.e. 1/gamma for the Hölder conjugate gamma.
  double exponent() const {
    if (is_infinity()) return 1.0;
    return (value_ - 1.0) / value_;
  }

  std::string to_string() const {
    if (is_infinity()) return "inf";
    if (is_one()) return "1";
    return std::to_string(value_);
  }

 private:
  Alpha(Kind kind, double value) : kind_(kind), value_(value) {}
  Kind kind_;
  double value_;
};

/// Generator f of an f-divergence.
class FKind {
 public:
  enum class Family { KL, TotalVariation, SquaredHellinger, ChiSquared, HellingerP, Custom };

  static FKind kl() { return FKind(Family::KL, 0.0, "kl"); }
  static FKind total_variation() { return FKind(Family::TotalVariation, 0.0, "tv"); }
  static FKind squared_hellinger() { return FKind(Family::SquaredHellinger, 0.0, "hellinger-sq"); }
  static FKind chi_squared() { return FKind(Family::ChiSquared, 0.0, "chi2"); }
  /// phi_p(t) = (t^p - 1) / (p - 1).
  static FKind hellinger_p(double p) {
    if (!(p > 0.0) || !std::isfinite(p) || std::abs(p - 1.0) < Alpha::kDegenerateWidth) {
      throw Error(ErrorCode::InvalidArgument, "Hellinger order must be positive and different from 1",
                  std::nullopt, p);
    }
    return FKind(Family::HellingerP, p, "hellinger-p");
  }
  static FKind custom(std::function<double(double)> f, std::string name = "custom") {
    const double at_one = f(1.0);
    if (!(std::abs(at_one) <= 1e-12)) {
      throw Error(ErrorCode::NotConvexAtOne, "custom generator must satisfy f(1) = 0", std::nullopt, at_one);
    }
    FKind k(Family::Custom, 0.0, std::move(name));
    k.custom_ = std::move(f);
    return k;
  }

  Family family() const { return family_; }
  double p() const { return p_; }
  const std::string& name() const { return name_; }

  template <typename Scalar>
  Scalar operator()(Scalar t) const {
    using std::abs;
    using std::log;
    using std::pow;
    using std::sqrt;
    switch (family_) {
      case Family::KL: return t > Scalar(0) ? t * log(t) : Scalar(0);
      case Family::TotalVariation: return abs(t - Scalar(1)) / Scalar(2);
      case Family::SquaredHellinger: {
        const Scalar r = sqrt(t) - Scalar(1);
        return r * r;
      }
      case Family::ChiSquared: return (t - Scalar(1)) * (t - Scalar(1));
      case Family::HellingerP: return (pow(t, Scalar(p_)) - Scalar(1)) / Scalar(p_ - 1.0);
      case Family::Custom: return Scalar(custom_(static_cast<double>(t)));
    }
    return Scalar(0);
  }

  /// lim_{t -> inf} f(t) / t, the cost of mass where the reference is zero.
  double asymptotic_slope() const {
    switch (family_) {
      case Family::KL: return std::numeric_limits<double>::infinity();
      case Family::TotalVariation: return 0.5;
      case Family::SquaredHellinger: return 1.0;
      case Family::ChiSquared: return std::numeric_limits<double>::infinity();
      case Family::HellingerP: return p_ > 1.0 ? std::numeric_limits<double>::infinity() : 0.0;
      case Family::Custom: {
        // Secant slope far out; convexity makes it non-decreasing in the base.
        const double t = 1e8;
        const double slope = (custom_(2.0 * t) - custom_(t)) / t;
        return std::isfinite(slope) && slope < 1e6 ? slope : std::numeric_limits<double>::infinity();
      }
    }
    return 0.0;
  }

 private:
  FKind(Family family, double p, std::string name) : family_(family), p_(p), name_(std::move(name)) {}

  Family family_;
  double p_;
  std::string name_;
  std::function<double(double)> custom_;
};

namespace detail {

template <typename Scalar>
Vec<Scalar> flatten(const Mat<Scalar>& m) {
  return Eigen::Map<const Vec<Scalar>>(m.data(), m.size());
}

template <typename Scalar>
void require_same_shape(const Vec<Scalar>& p, const Vec<Scalar>& q) {
  if (p.size() != q.size()) throw Error(ErrorCode::ShapeMismatch, "distributions have different sizes");
}

inline constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace detail

/// True iff q_i = 0 implies p_i = 0.
template <typename Scalar>
bool absolutely_continuous(const Vec<Scalar>& p, const Vec<Scalar>& q) {
  detail::require_same_shape(p, q);
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (q(i) == Scalar(0) && p(i) > Scalar(0)) return false;
  }
  return true;
}

template <typename Scalar>
Scalar kl_divergence(const Vec<Scalar>& p, const Vec<Scalar>& q) {
  detail::require_same_shape(p, q);
  Scalar sum(0);
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) == Scalar(0)) continue;
    if (q(i) == Scalar(0)) return Scalar(detail::kInf);
    sum += p(i) * std::log(p(i) / q(i));
  }
  return std::max(sum, Scalar(0));
}

/// D_alpha(P || Q) in nats, +infinity when it diverges.
template <typename Scalar>
Scalar renyi_divergence(const Vec<Scalar>& p, const Vec<Scalar>& q, const Alpha& alpha) {
  detail::require_same_shape(p, q);
  if (alpha.is_one()) return kl_divergence(p, q);
  if (alpha.is_infinity()) {
    Scalar best(0);
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      if (p(i) == Scalar(0)) continue;
      if (q(i) == Scalar(0)) return Scalar(detail::kInf);
      best = std::max(best, p(i) / q(i));
    }
    return std::max(Scalar(std::log(best)), Scalar(0));
  }
  const Scalar a(alpha.value());
  Scalar sum(0);
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) == Scalar(0)) continue;
    if (q(i) == Scalar(0)) {
      if (a > Scalar(1)) return Scalar(detail::kInf);
      continue;
    }
    sum += std::pow(p(i), a) * std::pow(q(i), Scalar(1) - a);
  }
  if (sum == Scalar(0)) return Scalar(detail::kInf);
  return std::max(Scalar(std::log(sum) / (a - Scalar(1))), Scalar(0));
}

template <typename Scalar>
Scalar renyi_divergence(const BasicFiniteDist<Scalar>& p, const BasicFiniteDist<Scalar>& q, const Alpha& alpha) {
  if (p.labels() != q.labels()) throw Error(ErrorCode::LabelMismatch, "divergence needs a common label set");
  return renyi_divergence(p.probs(), q.probs(), alpha);
}

template <typename Scalar>
Scalar renyi_divergence(const BasicJointDist<Scalar>& p, const BasicJointDist<Scalar>& q, const Alpha& alpha) {
  if (p.x_labels() != q.x_labels() || p.y_labels() != q.y_labels()) {
    throw Error(ErrorCode::LabelMismatch, "divergence needs a common label set");
  }
  return renyi_divergence(detail::flatten(p.probs()), detail::flatten(q.probs()), alpha);
}

/// D_f(P || Q) = sum_i q_i f(p_i / q_i) with the usual limiting conventions.
template <typename Scalar>
Scalar f_divergence(const Vec<Scalar>& p, const Vec<Scalar>& q, const FKind& kind) {
  detail::require_same_shape(p, q);
  const Scalar f0 = kind(Scalar(0));
  Scalar sum(0);
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (q(i) == Scalar(0)) {
      if (p(i) == Scalar(0)) continue;
      const double slope = kind.asymptotic_slope();
      if (std::isinf(slope)) return Scalar(detail::kInf);
      sum += p(i) * Scalar(slope);
    } else if (p(i) == Scalar(0)) {
      sum += q(i) * f0;
    } else {
      sum += q(i) * kind(p(i) / q(i));
    }
  }
  return std::max(sum, Scalar(0));
}

template <typename Scalar>
Scalar f_divergence(const BasicFiniteDist<Scalar>& p, const BasicFiniteDist<Scalar>& q, const FKind& kind) {
  if (p.labels() != q.labels()) throw Error(ErrorCode::LabelMismatch, "divergence needs a common label set");
  return f_divergence(p.probs(), q.probs(), kind);
}

template <typename Scalar>
Scalar f_divergence(const BasicJointDist<Scalar>& p, const BasicJointDist<Scalar>& q, const FKind& kind) {
  if (p.x_labels() != q.x_labels() || p.y_labels() != q.y_labels()) {
    throw Error(ErrorCode::LabelMismatch, "divergence needs a common label set");
  }
  return f_divergence(detail::flatten(p.probs()), detail::flatten(q.probs()), kind);
}

/// I_f(X;Y) = D_f(P_XY || P_X P_Y).
template <typename Scalar>
Scalar f_mutual_information(const BasicJointDist<Scalar>& j, const FKind& kind) {
  return f_divergence(j, j.product_of_marginals(), kind);
}

/// Shannon I(X;Y).
template <typename Scalar>
Scalar mutual_information(const BasicJointDist<Scalar>& j) {
  return kl_divergence(detail::flatten(j.probs()), detail::flatten(j.product_of_marginals().probs()));
}

/// L(X -> Y) = log sum_y max_{x in support} P_{Y|X}(y|x).
template <typename Scalar>
Scalar maximal_leakage(const BasicChannel<Scalar>& channel, const std::vector<bool>& support) {
  if (support.size() != channel.nx()) throw Error(ErrorCode::ShapeMismatch, "support size differs from |X|");
  if (std::none_of(support.begin(), support.end(), [](bool b) { return b; })) {
    throw Error(ErrorCode::NoSupport, "input distribution has empty support");
  }
  Scalar sum(0);
  for (Eigen::Index y = 0; y < channel.rows().cols(); ++y) {
    Scalar best(0);
    for (Eigen::Index x = 0; x < channel.rows().rows(); ++x) {
      if (support[static_cast<std::size_t>(x)]) best = std::max(best, channel.rows()(x, y));
    }
    sum += best;
  }
  return std::max(Scalar(std::log(sum)), Scalar(0));
}

/// Leakage of a channel under a full-support input.
template <typename Scalar>
Scalar maximal_leakage(const BasicChannel<Scalar>& channel) {
  return maximal_leakage(channel, std::vector<bool>(channel.nx(), true));
}

template <typename Scalar>
Scalar maximal_leakage(const BasicJointDist<Scalar>& j) {
  return maximal_leakage(j.conditional_of(), j.x_support());
}

/// Sibson's I_alpha(X, Y) through the closed form
/// (alpha/(alpha-1)) log sum_y (sum_x P_X(x) P_{Y|X}(y|x)^alpha)^{1/alpha}.
template <typename Scalar>
Scalar sibson_mi(const BasicJointDist<Scalar>& j, const Alpha& alpha) {
  if (alpha.is_one()) return mutual_information(j);
  if (alpha.is_infinity()) return maximal_leakage(j);
  const Scalar a(alpha.value());
  const Vec<Scalar> px = j.probs().rowwise().sum();
  Scalar outer(0);
  for (Eigen::Index y = 0; y < j.probs().cols(); ++y) {
    Scalar inner(0);
    for (Eigen::Index x = 0; x < j.probs().rows(); ++x) {
      if (px(x) == Scalar(0) || j.probs()(x, y) == Scalar(0)) continue;
      inner += px(x) * std::pow(j.probs()(x, y) / px(x), a);
    }
    outer += std::pow(inner, Scalar(1) / a);
  }
  return std::max(Scalar(a / (a - Scalar(1)) * std::log(outer)), Scalar(0));
}

/// Conditional maximal leakage L(X -> Y | C) from per-c channels
/// slices[c](x, y) = P_{Y|X,C}(y | x, c) and the supports of P_{X|C} and P_C.
template <typename Scalar>
Scalar conditional_maximal_leakage(const std::vector<Mat<Scalar>>& slices,
                                   const std::vector<std::vector<bool>>& support_x_given_c,
                                   const std::vector<bool>& support_c) {
  if (slices.size() != support_c.size() || slices.size() != support_x_given_c.size()) {
    throw Error(ErrorCode::ShapeMismatch, "conditioning alphabet sizes disagree");
  }
  Scalar best(-1);
  for (std::size_t c = 0; c < slices.size(); ++c) {
    if (!support_c[c]) continue;
    const auto& slice = slices[c];
    const auto& sx = support_x_given_c[c];
    if (sx.size() != static_cast<std::size_t>(slice.rows())) {
      throw Error(ErrorCode::ShapeMismatch, "support size differs from slice rows", c);
    }
    if (std::none_of(sx.begin(), sx.end(), [](bool b) { return b; })) {
      throw Error(ErrorCode::EmptySupport, "P_{X|C=c} has empty support", c);
    }
    Scalar sum(0);
    for (Eigen::Index y = 0; y < slice.cols(); ++y) {
      Scalar m(0);
      for (Eigen::Index x = 0; x < slice.rows(); ++x) {
        if (sx[static_cast<std::size_t>(x)]) m = std::max(m, slice(x, y));
      }
      sum += m;
    }
    best = std::max(best, sum);
  }
  if (best < Scalar(0)) throw Error(ErrorCode::EmptySupport, "P_C has empty support");
  return std::max(Scalar(std::log(best)), Scalar(0));
}

/// Joint pmf of three finite variables, indexed (x, y, z).
template <typename Scalar>
class BasicTripleDist {
 public:
  BasicTripleDist(std::size_t nx, std::size_t ny, std::size_t nz, std::vector<Scalar> probs)
      : nx_(nx), ny_(ny), nz_(nz), probs_(std::move(probs)) {
    if (probs_.size() != nx_ * ny_ * nz_) throw Error(ErrorCode::ShapeMismatch, "triple pmf has the wrong size");
    Eigen::Map<Vec<Scalar>> view(probs_.data(), static_cast<Eigen::Index>(probs_.size()));
    validate_and_normalize(view);
  }

  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  std::size_t nz() const { return nz_; }
  Scalar operator()(std::size_t x, std::size_t y, std::size_t z) const { return probs_[(x * ny_ + y) * nz_ + z]; }

  BasicJointDist<Scalar> joint_xy() const {
    Mat<Scalar> m = Mat<Scalar>::Zero(static_cast<Eigen::Index>(nx_), static_cast<Eigen::Index>(ny_));
    for (std::size_t x = 0; x < nx_; ++x)
      for (std::size_t y = 0; y < ny_; ++y)
        for (std::size_t z = 0; z < nz_; ++z) m(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) += (*this)(x, y, z);
    return BasicJointDist<Scalar>(std::move(m));
  }

  /// X against the pair (Y, Z), pair index y * nz + z.
  BasicJointDist<Scalar> joint_x_yz() const {
    Mat<Scalar> m(static_cast<Eigen::Index>(nx_), static_cast<Eigen::Index>(ny_ * nz_));
    for (std::size_t x = 0; x < nx_; ++x)
      for (std::size_t y = 0; y < ny_; ++y)
        for (std::size_t z = 0; z < nz_; ++z)
          m(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y * nz_ + z)) = (*this)(x, y, z);
    return BasicJointDist<Scalar>(std::move(m));
  }

 private:
  std::size_t nx_, ny_, nz_;
  std::vector<Scalar> probs_;
};

/// L(X -> Z | Y) for a triple (X, Y, Z): the conditioning variable is Y.
template <typename Scalar>
Scalar conditional_maximal_leakage(const BasicTripleDist<Scalar>& t) {
  std::vector<Mat<Scalar>> slices;
  std::vector<std::vector<bool>> support_x;
  std::vector<bool> support_y(t.ny(), false);
  for (std::size_t y = 0; y < t.ny(); ++y) {
    Mat<Scalar> slice = Mat<Scalar>::Constant(static_cast<Eigen::Index>(t.nx()), static_cast<Eigen::Index>(t.nz()),
                                              Scalar(1) / Scalar(t.nz()));
    std::vector<bool> sx(t.nx(), false);
    for (std::size_t x = 0; x < t.nx(); ++x) {
      Scalar pxy(0);
      for (std::size_t z = 0; z < t.nz(); ++z) pxy += t(x, y, z);
      if (pxy > Scalar(0)) {
        sx[x] = true;
        support_y[y] = true;
        for (std::size_t z = 0; z < t.nz(); ++z)
          slice(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(z)) = t(x, y, z) / pxy;
      }
    }
    if (!support_y[y]) sx.assign(t.nx(), true);
    slices.push_back(std::move(slice));
    support_x.push_back(std::move(sx));
  }
  return conditional_maximal_leakage(slices, support_x, support_y);
}

/// I_inf^M(X, Y) = D_inf(P_XY || P_X P_Y).
template <typename Scalar>
Scalar max_information(const BasicJointDist<Scalar>& j) {
  return renyi_divergence(j, j.product_of_marginals(), Alpha::infinity());
}

/// beta-approximate max-information by the prefix sweep: atoms sorted by
/// likelihood ratio, every prefix with P > beta evaluated. The winning set is
/// re-summed in atom order. Returns -infinity when no set qualifies.
template <typename Scalar>
Scalar beta_approx_max_information(const BasicJointDist<Scalar>& j, Scalar beta) {
  if (!(beta > Scalar(0) && beta < Scalar(1))) {
    throw Error(ErrorCode::InvalidArgument, "beta must lie in (0, 1)", std::nullopt, static_cast<double>(beta));
  }
  const Vec<Scalar> p = detail::flatten(j.probs());
  const Vec<Scalar> q = detail::flatten(j.product_of_marginals().probs());
  std::vector<Eigen::Index> order(static_cast<std::size_t>(p.size()));
  std::iota(order.begin(), order.end(), Eigen::Index(0));
  // Ratio comparison by cross-multiplication keeps q = 0 atoms first.
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    const Scalar lhs = p(a) * q(b);
    const Scalar rhs = p(b) * q(a);
    if (lhs != rhs) return lhs > rhs;
    return p(a) > p(b);
  });

  Scalar cum_p(0), cum_q(0);
  Scalar best_value(-1);
  std::size_t best_len = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    cum_p += p(order[k]);
    cum_q += q(order[k]);
    if (!(cum_p > beta)) continue;
    const Scalar value = cum_q > Scalar(0) ? (cum_p - beta) / cum_q : Scalar(detail::kInf);
    if (value > best_value) {
      best_value = value;
      best_len = k + 1;
    }
  }
  if (best_len == 0) return -Scalar(detail::kInf);

  std::vector<bool> in_set(order.size(), false);
  for (std::size_t k = 0; k < best_len; ++k) in_set[static_cast<std::size_t>(order[k])] = true;
  Scalar set_p(0), set_q(0);
  for (std::size_t i = 0; i < in_set.size(); ++i) {
    if (!in_set[i]) continue;
    set_p += p(static_cast<Eigen::Index>(i));
    set_q += q(static_cast<Eigen::Index>(i));
  }
  if (set_q == Scalar(0)) return Scalar(detail::kInf);
  return std::log((set_p - beta) / set_q);
}

using TripleDist = BasicTripleDist<double>;

}  // namespace leakage
