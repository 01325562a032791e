#include "leakage/bounds.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "leakage/error.hpp"

namespace leakage {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct EventPair {
  double p;
  double q;
};

EventPair event_pair(const JointDist& j, const Event& e) {
  return {event_prob(j, e), event_prob(j.product_of_marginals(), e)};
}

void require_order_above_one(double value, const char* what) {
  if (!(value > 1.0) || !std::isfinite(value)) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be a finite real above 1", std::nullopt, value);
  }
}

double bisect_inverse(const std::function<double(double)>& phi, double start, double t) {
  if (phi(start) > t) return start;
  double lo = start;
  double hi = std::max(1.0, 2.0 * start);
  while (!(phi(hi) > t)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) return kInf;
  }
  for (int it = 0; it < 400 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (phi(mid) > t) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

void check_monotone(const FdivGenerator& gen) {
  const double start = gen.monotone_from_one ? 1.0 : 0.0;
  double prev = gen.kind(start);
  for (int i = 0; i <= 400; ++i) {
    const double t = start + std::pow(10.0, -4.0 + 8.0 * i / 400.0);
    const double v = gen.kind(t);
    if (v < prev - 1e-12 * std::max(1.0, std::abs(prev))) {
      throw Error(ErrorCode::NonMonotoneGenerator,
                  "generator '" + gen.kind.name() + "' decreases on the inversion range", std::nullopt, t);
    }
    prev = v;
  }
}

}  // namespace

double holder_conjugate(double alpha) {
  if (std::isinf(alpha)) return 1.0;
  return alpha / (alpha - 1.0);
}

void BoundParams::validate() const {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be at least 1");
  if (!(eta > 0.0 && eta < 1.0)) throw Error(ErrorCode::InvalidArgument, "eta must lie in (0, 1)", std::nullopt, eta);
  if (!(delta > 0.0 && delta < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "delta must lie in (0, 1)", std::nullopt, delta);
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::InvalidArgument, "sigma must be positive", std::nullopt, sigma);
  }
}

TailFamily parse_tail_family(std::string_view name) {
  if (name == "sibson") return TailFamily::SibsonAlpha;
  if (name == "ml" || name == "maximal-leakage") return TailFamily::MaximalLeakage;
  if (name == "hellinger-p") return TailFamily::HellingerP;
  if (name == "chi2") return TailFamily::ChiSquared;
  throw Error(ErrorCode::InvalidArgument, "unknown tail family '" + std::string(name) + "'");
}

BoundReport four_param_bound(const JointDist& j, const Event& e, double alpha, double alpha_prime) {
  require_order_above_one(alpha, "alpha");
  require_order_above_one(alpha_prime, "alpha'");
  const double gamma = holder_conjugate(alpha);
  const double gamma_prime = holder_conjugate(alpha_prime);
  const auto [p, q] = event_pair(j, e);
  const Matrix& pm = j.probs();
  const Vector px = pm.rowwise().sum();
  const Vector py = pm.colwise().sum().transpose();
  const Vector fibers = fiber_probs(j.marginal_x(), e);

  double fiber_term = 0.0;
  double ratio_term = 0.0;
  for (Eigen::Index y = 0; y < py.size(); ++y) {
    if (py(y) == 0.0) continue;
    fiber_term += py(y) * std::pow(fibers(y), gamma_prime / gamma);
    double inner = 0.0;
    for (Eigen::Index x = 0; x < px.size(); ++x) {
      if (px(x) == 0.0 || pm(x, y) == 0.0) continue;
      inner += px(x) * std::pow(pm(x, y) / (px(x) * py(y)), alpha);
    }
    ratio_term += py(y) * std::pow(inner, alpha_prime / alpha);
  }
  const double bound = std::pow(fiber_term, 1.0 / gamma_prime) * std::pow(ratio_term, 1.0 / alpha_prime);
  return make_report("four_param", bound, p, q,
                     {{"alpha", alpha}, {"gamma", gamma}, {"alpha_prime", alpha_prime}, {"gamma_prime", gamma_prime}});
}

BoundReport ml_bound(const JointDist& j, const Event& e) {
  const auto [p, q] = event_pair(j, e);
  const double esssup = esssup_fiber_prob(j, e);
  const double leakage = maximal_leakage(j);
  BoundReport r = make_report("ml", esssup * std::exp(leakage), p, q);
  r.extras["esssup_fiber"] = esssup;
  r.extras["maximal_leakage"] = leakage;
  return r;
}

BoundReport sibson_bound(const JointDist& j, const Event& e, const Alpha& alpha) {
  if (alpha.is_infinity()) {
    BoundReport r = ml_bound(j, e);
    r.family = "sibson";
    r.params["alpha"] = kInf;
    r.params["gamma"] = 1.0;
    return r;
  }
  if (!alpha.is_finite() || !(alpha.value() > 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "Sibson bound needs alpha > 1 or infinity", std::nullopt, alpha.value());
  }
  const auto [p, q] = event_pair(j, e);
  const double expo = alpha.exponent();
  const double esssup = esssup_fiber_prob(j, e);
  const double info = sibson_mi(j, alpha);
  BoundReport r = make_report("sibson", std::pow(esssup, expo) * std::exp(expo * info), p, q,
                              {{"alpha", alpha.value()}, {"gamma", holder_conjugate(alpha.value())}});
  r.extras["esssup_fiber"] = esssup;
  r.extras["sibson_mi"] = info;
  return r;
}

BoundReport alpha_div_bound(const JointDist& j, const Event& e, double alpha) {
  require_order_above_one(alpha, "alpha");
  const auto [p, q] = event_pair(j, e);
  const double div = renyi_divergence(j, j.product_of_marginals(), Alpha::finite(alpha));
  if (std::isinf(div)) {
    throw Error(ErrorCode::AbsoluteContinuityViolated, "Renyi divergence is infinite");
  }
  const double expo = (alpha - 1.0) / alpha;
  BoundReport r = make_report("alpha_div", std::pow(q, expo) * std::exp(expo * div), p, q, {{"alpha", alpha}});
  r.extras["renyi_divergence"] = div;
  return r;
}

FdivGenerator FdivGenerator::hellinger_p(double p) {
  require_order_above_one(p, "Hellinger order");
  FdivGenerator g{FKind::hellinger_p(p), nullptr, 1.0 / (p - 1.0), false};
  g.inverse = [p](double y) {
    const double base = (p - 1.0) * y + 1.0;
    return base <= 0.0 ? 0.0 : std::pow(base, 1.0 / p);
  };
  return g;
}

FdivGenerator FdivGenerator::chi_squared() {
  FdivGenerator g{FKind::chi_squared(), nullptr, 0.0, true};
  g.inverse = [](double y) { return y <= 0.0 ? 1.0 : 1.0 + std::sqrt(y); };
  return g;
}

FdivGenerator FdivGenerator::squared_hellinger() {
  FdivGenerator g{FKind::squared_hellinger(), nullptr, 0.0, true};
  g.inverse = [](double y) {
    const double r = 1.0 + std::sqrt(std::max(0.0, y));
    return r * r;
  };
  return g;
}

FdivGenerator FdivGenerator::total_variation() {
  FdivGenerator g{FKind::total_variation(), nullptr, 0.0, true};
  g.inverse = [](double y) { return 1.0 + 2.0 * std::max(0.0, y); };
  return g;
}

FdivGenerator FdivGenerator::kl() {
  FdivGenerator g = numeric(FKind::kl(), true);
  g.conjugate_at_zero = std::exp(-1.0);
  return g;
}

FdivGenerator FdivGenerator::numeric(const FKind& kind, bool monotone_from_one) {
  double lowest = kind(0.0);
  for (int i = 0; i <= 1200; ++i) lowest = std::min(lowest, kind(std::pow(10.0, -6.0 + 12.0 * i / 1200.0)));
  const double start = monotone_from_one ? 1.0 : 0.0;
  FdivGenerator g{kind, nullptr, -lowest, monotone_from_one};
  g.inverse = [kind, start](double y) { return bisect_inverse([&kind](double t) { return kind(t); }, start, y); };
  return g;
}

FdivGenerator FdivGenerator::from_kind(const FKind& kind) {
  switch (kind.family()) {
    case FKind::Family::KL: return kl();
    case FKind::Family::TotalVariation: return total_variation();
    case FKind::Family::SquaredHellinger: return squared_hellinger();
    case FKind::Family::ChiSquared: return chi_squared();
    case FKind::Family::HellingerP:
      if (kind.p() > 1.0) return hellinger_p(kind.p());
      return numeric(kind, false);
    case FKind::Family::Custom: return numeric(kind, false);
  }
  return numeric(kind, false);
}

BoundReport fdiv_bound(const JointDist& j, const Event& e, const FdivGenerator& gen) {
  check_monotone(gen);
  const auto [p, q] = event_pair(j, e);
  const double info = f_mutual_information(j, gen.kind);
  const bool simplified = gen.conjugate_at_zero <= 0.0;
  double bound = 0.0;
  if (q > 0.0) {
    const double arg = simplified ? info / q : (info + (1.0 - q) * gen.conjugate_at_zero) / q;
    bound = q * gen.inverse(arg);
  }
  BoundReport r = make_report("fdiv", bound, p, q, {{"conjugate_at_zero", gen.conjugate_at_zero}});
  r.extras["f_information"] = info;
  r.notes.push_back("phi=" + gen.kind.name());
  r.notes.push_back(simplified ? "simplified form" : "general form");
  if (gen.monotone_from_one) r.notes.push_back("inverse taken on [1, inf)");
  return r;
}

BoundReport hellinger_p_bound(const JointDist& j, const Event& e, double p_order) {
  require_order_above_one(p_order, "Hellinger order");
  const auto [p, q] = event_pair(j, e);
  const double h = f_mutual_information(j, FKind::hellinger_p(p_order));
  if (std::isinf(h)) throw Error(ErrorCode::AbsoluteContinuityViolated, "Hellinger divergence is infinite");
  const double bound = std::pow(q, (p_order - 1.0) / p_order) * std::pow((p_order - 1.0) * h + 1.0, 1.0 / p_order);
  BoundReport r = make_report("hellinger_p", bound, p, q, {{"p", p_order}});
  r.extras["hellinger_p"] = h;
  if (p_order == 2.0) {
    const double leakage = maximal_leakage(j);
    r.extras["relaxed_leakage_form"] = std::sqrt(std::exp(leakage) * q);
    r.extras["maximal_leakage"] = leakage;
  }
  return r;
}

BoundReport hellinger_sq_bound(const JointDist& j, const Event& e) {
  const auto [p, q] = event_pair(j, e);
  if (p < q) {
    throw Error(ErrorCode::AssumptionViolated, "needs P_XY(E) >= P_X P_Y(E)", std::nullopt, p - q);
  }
  const double h2 = f_mutual_information(j, FKind::squared_hellinger());
  const double rhs = h2 + 2.0 * std::sqrt(h2) * std::sqrt(q);
  BoundReport r = make_report("hellinger_sq", q + rhs, p, q);
  r.holds = p - q <= rhs + BoundReport::kTolerance;
  r.extras["squared_hellinger"] = h2;
  r.extras["difference"] = p - q;
  r.extras["rhs"] = rhs;
  return r;
}

double tail_bound(double measure_value, const BoundParams& params, TailFamily family) {
  params.validate();
  if (!(measure_value >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "measure value must be non-negative", std::nullopt, measure_value);
  }
  const double x = static_cast<double>(params.n) * params.eta * params.eta / (2.0 * params.sigma * params.sigma);
  switch (family) {
    case TailFamily::MaximalLeakage: return 2.0 * std::exp(measure_value - x);
    case TailFamily::SibsonAlpha: {
      if (params.alpha.is_infinity()) return 2.0 * std::exp(measure_value - x);
      if (!params.alpha.is_finite() || !(params.alpha.value() > 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "Sibson tail bound needs alpha > 1 or infinity");
      }
      return 2.0 * std::exp(params.alpha.exponent() * (measure_value - x));
    }
    case TailFamily::HellingerP: {
      require_order_above_one(params.p, "Hellinger order");
      const double pp = params.p;
      return std::pow(2.0, (pp - 1.0) / pp) * std::exp((std::log((pp - 1.0) * measure_value + 1.0) - x) / pp);
    }
    case TailFamily::ChiSquared: return std::sqrt(2.0) * std::exp(0.5 * (std::log(measure_value + 1.0) - x));
  }
  return 1.0;
}

std::uint64_t sample_complexity(double measure_value, const BoundParams& params, TailFamily family, SampleRule rule) {
  params.validate();
  if (!(measure_value >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "measure value must be non-negative", std::nullopt, measure_value);
  }
  const double c = 2.0 * params.sigma * params.sigma / (params.eta * params.eta);
  const double log_inv_delta = std::log(1.0 / params.delta);
  double m = 0.0;
  switch (family) {
    case TailFamily::MaximalLeakage: m = c * (measure_value + std::log(2.0 / params.delta)); break;
    case TailFamily::SibsonAlpha: {
      if (params.alpha.is_infinity()) {
        m = c * (measure_value + std::log(2.0 / params.delta));
        break;
      }
      if (!params.alpha.is_finite() || !(params.alpha.value() > 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "Sibson sample complexity needs alpha > 1 or infinity");
      }
      const double gamma = holder_conjugate(params.alpha.value());
      m = rule == SampleRule::ClosedForm ? c * (measure_value + std::log(2.0) + gamma * log_inv_delta)
                                      : c * (measure_value + gamma * std::log(2.0 / params.delta));
      break;
    }
    case TailFamily::HellingerP: {
      require_order_above_one(params.p, "Hellinger order");
      const double pp = params.p;
      m = c * (std::log((pp - 1.0) * measure_value + 1.0) + (pp - 1.0) * std::log(2.0) + pp * log_inv_delta);
      break;
    }
    case TailFamily::ChiSquared: {
      const double lead = std::log(measure_value + 1.0);
      const double tail = 2.0 * std::log(std::sqrt(2.0) / params.delta);
      m = rule == SampleRule::ClosedForm ? c * lead + tail : c * (lead + tail);
      break;
    }
  }
  if (!(m > 1.0)) return 1;
  if (!std::isfinite(m) || m > 1.8e19) throw Error(ErrorCode::InvalidArgument, "sample complexity overflows", std::nullopt, m);
  return static_cast<std::uint64_t>(std::ceil(m));
}

ExpectedGenErr expected_generr_bound(double measure_value, std::uint64_t n, double sigma) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be at least 1");
  if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma must be positive", std::nullopt, sigma);
  if (!(measure_value >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "measure value must be non-negative", std::nullopt, measure_value);
  }
  const double s2 = sigma * sigma;
  const double nn = static_cast<double>(n);
  ExpectedGenErr out;
  out.bound = std::sqrt(8.0 * s2 * (std::log(2.0) + measure_value) / nn);
  out.leakage_form = 3.0 * std::sqrt(2.0 * s2 * measure_value / nn);
  out.mutual_info_form = std::sqrt(2.0 * s2 * measure_value / nn);
  return out;
}

double expectation_from_tail(double a, double b) {
  if (!(a >= 0.0)) throw Error(ErrorCode::InvalidArgument, "a must be non-negative", std::nullopt, a);
  if (!(b >= std::exp(1.0))) throw Error(ErrorCode::InvalidArgument, "b must be at least e", std::nullopt, b);
  return a * std::min(3.0 * std::sqrt(std::log(b)), 2.0 * std::sqrt(std::log(2.0 * b)));
}

double hyp_test_bound(double leakage, double significance) {
  if (!(significance >= 0.0 && significance <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "significance must lie in [0, 1]", std::nullopt, significance);
  }
  if (!(leakage >= 0.0)) throw Error(ErrorCode::InvalidArgument, "leakage must be non-negative", std::nullopt, leakage);
  return std::min(1.0, std::exp(leakage) * significance);
}

double hyp_test_significance(double leakage, double delta) {
  if (!(delta >= 0.0 && delta <= 1.0)) throw Error(ErrorCode::InvalidArgument, "delta must lie in [0, 1]", std::nullopt, delta);
  if (!(leakage >= 0.0)) throw Error(ErrorCode::InvalidArgument, "leakage must be non-negative", std::nullopt, leakage);
  return delta / std::exp(leakage);
}

}  // namespace leakage
