#include "leakage/orlicz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "leakage/error.hpp"

namespace leakage {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kOverflow = 1e300;
constexpr double kTiny = 1e-300;
constexpr double kInvPhi = 0.6180339887498949;

// Golden-section minimisation of f(exp(s)) for s in [lo, hi]. Returns (t, f(t)).
template <typename F>
std::pair<double, double> golden_min_log(F&& f, double t_lo, double t_hi) {
  double a = std::log(t_lo), b = std::log(t_hi);
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(std::exp(c)), fd = f(std::exp(d));
  for (int it = 0; it < 200 && (b - a) > 1e-11; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(std::exp(c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(std::exp(d));
    }
  }
  return fc <= fd ? std::make_pair(std::exp(c), fc) : std::make_pair(std::exp(d), fd);
}

double max_abs_on_support(const WeightedValues& u) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (u.weights()(i) > 0.0) m = std::max(m, std::abs(u.values()(i)));
  }
  return m;
}

}  // namespace

OrliczFn::OrliczFn(Unchecked, Curve eval, std::string name, std::optional<double> domain_hint)
    : eval_(std::move(eval)), name_(std::move(name)), domain_hint_(domain_hint) {}

OrliczFn::OrliczFn(Curve eval, std::string name, std::optional<double> domain_hint)
    : OrliczFn(Unchecked{}, std::move(eval), std::move(name), domain_hint) {
  const auto& psi = *this;
  const double at_zero = psi(0.0);
  if (!(std::abs(at_zero) <= 1e-12)) {
    throw Error(ErrorCode::InvalidArgument, "Orlicz function must vanish at 0", std::nullopt, at_zero);
  }
  const double grid[] = {0.0, 0.5, 1.0, 1.5, 2.0};
  double prev = at_zero;
  for (double t : grid) {
    const double v = psi(t);
    if (std::isnan(v) || v < 0.0) throw Error(ErrorCode::InvalidArgument, "Orlicz function must be non-negative", std::nullopt, t);
    if (v < prev - 1e-12 * std::max(1.0, std::abs(prev))) {
      throw Error(ErrorCode::InvalidArgument, "Orlicz function must be non-decreasing", std::nullopt, t);
    }
    prev = v;
  }
  const double l = psi(0.5), m = psi(1.0), r = psi(1.5);
  if (std::isfinite(r) && m > 0.5 * (l + r) + 1e-12 * std::max(1.0, m)) {
    throw Error(ErrorCode::InvalidArgument, "Orlicz function fails the convexity spot check", std::nullopt, m);
  }
  if (!(psi(1.0) > 0.0 || psi(1e3) > 0.0 || psi(1e6) > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "Orlicz function is identically zero");
  }
  if (!(std::isfinite(psi(1e-6)) || std::isfinite(psi(1e-3)) || std::isfinite(psi(1.0)))) {
    throw Error(ErrorCode::InvalidArgument, "Orlicz function is identically infinite");
  }
}

OrliczFn OrliczFn::power(double alpha) {
  if (!(alpha >= 1.0) || !std::isfinite(alpha)) {
    throw Error(ErrorCode::InvalidArgument, "power Orlicz function needs alpha >= 1", std::nullopt, alpha);
  }
  return OrliczFn([alpha](double t) { return std::pow(t, alpha) / alpha; },
                  "power:alpha=" + std::to_string(alpha));
}

OrliczFn OrliczFn::exp_minus_one() {
  return OrliczFn([](double t) { return std::expm1(t); }, "exp-minus-one");
}

OrliczFn OrliczFn::linear() {
  return OrliczFn([](double t) { return t; }, "linear");
}

OrliczFn OrliczFn::parse(std::string_view spec) {
  const std::string s(spec);
  if (s == "exp-minus-one") return exp_minus_one();
  if (s == "linear") return linear();
  const std::string prefix = "power:alpha=";
  if (s.rfind(prefix, 0) == 0) {
    const std::string rest = s.substr(prefix.size());
    std::size_t used = 0;
    double a = 0.0;
    try {
      a = std::stod(rest, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != rest.size()) {
      throw Error(ErrorCode::InvalidArgument, "bad power exponent in '" + s + "'");
    }
    return power(a);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown Orlicz function '" + s + "'");
}

double OrliczFn::operator()(double t) const {
  if (domain_hint_ && t > *domain_hint_) return kInf;
  return eval_(t);
}

double conjugate_value(const OrliczFn& psi, double x) {
  if (std::isnan(x)) throw Error(ErrorCode::InvalidArgument, "conjugate queried at NaN");
  // psi >= 0 and psi(0) = 0 put the supremum at lambda -> 0 for x <= 0.
  if (x <= 0.0) return 0.0;
  auto g = [&](double lambda) {
    const double v = psi(lambda);
    return std::isfinite(v) ? lambda * x - v : -kInf;
  };

  double lambda = 1.0;
  while (!std::isfinite(psi(lambda)) && lambda > kTiny) lambda *= 0.5;
  if (!std::isfinite(psi(lambda))) return 0.0;
  double g_lambda = g(lambda);

  if (g(2.0 * lambda) > g_lambda) {
    for (;;) {
      const double next = g(2.0 * lambda);
      if (!(next > g_lambda)) break;
      const double gain = next - g_lambda;
      lambda *= 2.0;
      g_lambda = next;
      if (lambda > kOverflow || g_lambda > kOverflow) {
        // A supremum approached only at infinity is still finite if the
        // increments have died out.
        if (g_lambda < kOverflow && gain <= 1e-12 * std::max(1.0, std::abs(g_lambda))) return std::max(0.0, g_lambda);
        throw Error(ErrorCode::DivergentConjugate, "conjugate is unbounded", std::nullopt, x);
      }
    }
  } else {
    while (lambda > kTiny) {
      const double prev = g(0.5 * lambda);
      if (!(prev > g_lambda)) break;
      lambda *= 0.5;
      g_lambda = prev;
    }
  }
  const auto [arg, neg] = golden_min_log([&](double l) { return -g(l); }, 0.5 * lambda, 2.0 * lambda);
  (void)arg;
  return std::max({0.0, g_lambda, -neg});
}

OrliczFn legendre_conjugate(const OrliczFn& psi) {
  return OrliczFn(OrliczFn::Unchecked{},
                  [psi](double x) {
                    try {
                      return conjugate_value(psi, x);
                    } catch (const Error& e) {
                      if (e.code() == ErrorCode::DivergentConjugate) return kInf;
                      throw;
                    }
                  },
                  psi.name() + "*", std::nullopt);
}

OrliczFn biconjugate(const OrliczFn& psi) { return legendre_conjugate(legendre_conjugate(psi)); }

double generalized_inverse(const OrliczFn& f, double t) {
  if (std::isnan(t)) throw Error(ErrorCode::InvalidArgument, "inverse queried at NaN");
  if (t < f(0.0)) return 0.0;
  double hi = 1.0;
  while (!(f(hi) > t)) {
    hi *= 2.0;
    if (hi > kOverflow) return kInf;
  }
  double lo = 0.0;
  if (hi > 1.0) lo = 0.5 * hi;
  for (int it = 0; it < 400 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > t) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

WeightedValues::WeightedValues(Vector values, Vector weights) : values_(std::move(values)), weights_(std::move(weights)) {
  if (values_.size() != weights_.size()) throw Error(ErrorCode::ShapeMismatch, "values and weights differ in length");
  validate_and_normalize(weights_);
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_(i))) {
      throw Error(ErrorCode::InvalidArgument, "random variable takes a non-finite value", static_cast<std::size_t>(i));
    }
  }
}

double WeightedValues::expectation(const std::function<double(double)>& f) const {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    if (weights_(i) > 0.0) sum += weights_(i) * f(values_(i));
  }
  return sum;
}

double luxemburg_norm(const WeightedValues& u, const OrliczFn& psi) {
  const double m = max_abs_on_support(u);
  if (m == 0.0) return 0.0;
  auto load = [&](double sigma) { return u.expectation([&](double v) { return psi(std::abs(v) / sigma); }); };

  double hi = m;
  while (!(load(hi) <= 1.0)) {
    hi *= 2.0;
    if (hi > kOverflow) throw Error(ErrorCode::NoFiniteNorm, "Luxemburg norm exceeds the overflow guard");
  }
  double lo = hi;
  while (load(lo) <= 1.0) {
    lo *= 0.5;
    if (lo < kTiny) return lo;
  }
  while (hi / lo > 1.0 + 1e-12) {
    const double mid = std::sqrt(lo * hi);
    if (load(mid) <= 1.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double amemiya_norm(const WeightedValues& u, const OrliczFn& psi) {
  const double m = max_abs_on_support(u);
  if (m == 0.0) return 0.0;
  auto h = [&](double t) {
    const double e = u.expectation([&](double v) { return psi(t * std::abs(v)); });
    return (e + 1.0) / t;
  };

  double t = 1.0 / m;
  double ht = h(t);
  while (!std::isfinite(ht)) {
    t *= 0.5;
    if (t < kTiny) throw Error(ErrorCode::NoFiniteNorm, "Amemiya functional infinite everywhere");
    ht = h(t);
  }
  if (h(2.0 * t) < ht) {
    for (;;) {
      const double next = h(2.0 * t);
      if (!(next < ht)) break;
      t *= 2.0;
      ht = next;
      // Infimum approached only as t -> infinity.
      if (t > kOverflow) return ht;
    }
  } else {
    while (t > kTiny) {
      const double prev = h(0.5 * t);
      if (!(prev < ht)) break;
      t *= 0.5;
      ht = prev;
    }
  }
  const auto [arg, best] = golden_min_log(h, 0.5 * t, 2.0 * t);
  (void)arg;
  return std::min(ht, best);
}

namespace {

struct EventMeasures {
  double p = 0.0;
  double q = 0.0;
  JointDist product;
};

EventMeasures event_measures(const JointDist& j, const Event& e) {
  JointDist product = j.product_of_marginals();
  const double p = event_prob(j, e);
  const double q = event_prob(product, e);
  const Matrix& pm = j.probs();
  const Matrix& qm = product.probs();
  for (Eigen::Index x = 0; x < pm.rows(); ++x) {
    for (Eigen::Index y = 0; y < pm.cols(); ++y) {
      if (pm(x, y) > 0.0 && qm(x, y) == 0.0) {
        throw Error(ErrorCode::AbsoluteContinuityViolated, "joint not dominated by the product of marginals",
                    static_cast<std::size_t>(x * pm.cols() + y));
      }
    }
  }
  return {p, q, std::move(product)};
}

}  // namespace

BoundReport theorem2_bound(const JointDist& j, const Event& e, const OrliczFn& psi, InverseMode mode) {
  const EventMeasures em = event_measures(j, e);
  const Matrix& pm = j.probs();
  const Matrix& qm = em.product.probs();
  Vector ratio(pm.size()), weight(pm.size());
  for (Eigen::Index i = 0; i < pm.size(); ++i) {
    weight(i) = qm.data()[i];
    ratio(i) = qm.data()[i] > 0.0 ? pm.data()[i] / qm.data()[i] : 0.0;
  }
  const double norm = luxemburg_norm(WeightedValues(ratio, weight), psi);
  double inverse = 0.0;
  double bound = 0.0;
  if (em.q > 0.0) {
    inverse = mode == InverseMode::Biconjugate ? generalized_inverse(biconjugate(psi), 1.0 / em.q)
                                               : generalized_inverse(psi, 1.0 / em.q);
    bound = em.q * inverse * norm;
  }
  BoundReport r = make_report("theorem2", bound, em.p, em.q);
  r.extras["luxemburg_norm"] = norm;
  r.extras["inverse_at_inv_q"] = inverse;
  r.notes.push_back("psi=" + psi.name());
  r.notes.push_back(mode == InverseMode::Biconjugate ? "inverse of the biconjugate" : "inverse of psi itself");
  return r;
}

BoundReport theorem1_bound(const JointDist& j, const Event& e, const OrliczFn& phi, const OrliczFn& psi) {
  const EventMeasures em = event_measures(j, e);
  const Matrix& pm = j.probs();
  const Vector px = pm.rowwise().sum();
  const Vector py = pm.colwise().sum().transpose();
  const OrliczFn phi_star = legendre_conjugate(phi);
  const OrliczFn psi_star = legendre_conjugate(psi);

  Vector indicator_norms = Vector::Zero(py.size());
  Vector ratio_norms = Vector::Zero(py.size());
  for (Eigen::Index y = 0; y < py.size(); ++y) {
    if (py(y) == 0.0) continue;
    Vector indicator(px.size()), ratio(px.size());
    for (Eigen::Index x = 0; x < px.size(); ++x) {
      indicator(x) = e.contains(static_cast<std::size_t>(x), static_cast<std::size_t>(y)) ? 1.0 : 0.0;
      ratio(x) = px(x) > 0.0 ? pm(x, y) / (px(x) * py(y)) : 0.0;
    }
    indicator_norms(y) = luxemburg_norm(WeightedValues(indicator, px), phi);
    ratio_norms(y) = amemiya_norm(WeightedValues(ratio, px), phi_star);
  }
  const double a = luxemburg_norm(WeightedValues(indicator_norms, py), psi);
  const double b = amemiya_norm(WeightedValues(ratio_norms, py), psi_star);
  BoundReport r = make_report("theorem1", a * b, em.p, em.q);
  r.extras["indicator_norm"] = a;
  r.extras["ratio_norm"] = b;
  r.notes.push_back("phi=" + phi.name());
  r.notes.push_back("psi=" + psi.name());
  return r;
}

}  // namespace leakage
