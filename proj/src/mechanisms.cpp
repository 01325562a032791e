#include "leakage/mechanisms.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "leakage/error.hpp"

namespace leakage {

NoiseKind parse_noise(std::string_view name) {
  if (name == "laplace") return NoiseKind::Laplace;
  if (name == "gaussian") return NoiseKind::Gaussian;
  if (name == "exponential") return NoiseKind::Exponential;
  throw Error(ErrorCode::InvalidArgument, "unknown noise '" + std::string(name) + "'");
}

std::string_view to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::Laplace: return "laplace";
    case NoiseKind::Gaussian: return "gaussian";
    case NoiseKind::Exponential: return "exponential";
  }
  return "unknown";
}

void MechanismSpec::validate() const {
  if (!std::isfinite(range_lo) || !std::isfinite(range_hi) || !(range_lo <= range_hi)) {
    throw Error(ErrorCode::InvalidArgument, "range must satisfy a <= c");
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw Error(ErrorCode::InvalidArgument, "noise scale must be positive", std::nullopt, scale);
  }
}

double MechanismSpec::density(double v) const {
  switch (noise) {
    case NoiseKind::Laplace: return std::exp(-std::abs(v) / scale) / (2.0 * scale);
    case NoiseKind::Gaussian:
      return std::exp(-v * v / (2.0 * scale * scale)) / std::sqrt(2.0 * std::numbers::pi * scale * scale);
    case NoiseKind::Exponential: return v < 0.0 ? 0.0 : std::exp(-v / scale) / scale;
  }
  return 0.0;
}

MechanismLeakage additive_noise_leakage(const MechanismSpec& m) {
  m.validate();
  const double width = m.range_hi - m.range_lo;
  MechanismLeakage out;
  switch (m.noise) {
    case NoiseKind::Laplace:
      out.leakage_nats = std::log1p(width / (2.0 * m.scale));
      out.formula = "log(1 + (c - a) / (2 b))";
      out.provenance_note =
          "integral over y of sup_g f(y - g): (c - a) / (2 b) from the plateau plus 1 from the two tails";
      break;
    case NoiseKind::Gaussian:
      out.leakage_nats = std::log1p(width / std::sqrt(2.0 * std::numbers::pi * m.scale * m.scale));
      out.formula = "log(1 + (c - a) / sqrt(2 pi sigma^2))";
      out.provenance_note = "integral of the sup-density";
      break;
    case NoiseKind::Exponential:
      out.leakage_nats = std::log1p(width / m.scale);
      out.formula = "log(1 + (c - a) / b)";
      out.provenance_note = "integral of the sup-density";
      break;
  }
  return out;
}

namespace {

// sup_{g in [a, c]} f(y - g) by golden section; the densities are unimodal.
double sup_density(const MechanismSpec& m, double y) {
  constexpr double kInvPhi = 0.6180339887498949;
  auto f = [&](double g) { return m.density(y - g); };
  double lo = m.range_lo, hi = m.range_hi;
  double best = std::max(f(lo), f(hi));
  double c = hi - kInvPhi * (hi - lo), d = lo + kInvPhi * (hi - lo);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 120 && hi - lo > 1e-14 * (1.0 + std::abs(hi)); ++it) {
    if (fc >= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - kInvPhi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + kInvPhi * (hi - lo);
      fd = f(d);
    }
  }
  return std::max({best, fc, fd});
}

double simpson(const MechanismSpec& m, double lo, double hi, int intervals) {
  if (!(hi > lo)) return 0.0;
  const double h = (hi - lo) / intervals;
  // Endpoints as one-sided limits from inside the segment; the exponential
  // sup-density jumps at range_lo.
  const double nudge = 1e-12 * (hi - lo);
  double sum = sup_density(m, lo + nudge) + sup_density(m, hi - nudge);
  for (int i = 1; i < intervals; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * sup_density(m, lo + i * h);
  return sum * h / 3.0;
}

}  // namespace

double additive_noise_integral(const MechanismSpec& m) {
  m.validate();
  const double tail = 40.0 * m.scale;
  constexpr int kIntervals = 20000;
  // Segments split at the kinks of the sup-density.
  return simpson(m, m.range_lo - tail, m.range_lo, kIntervals) + simpson(m, m.range_lo, m.range_hi, kIntervals) +
         simpson(m, m.range_hi, m.range_hi + tail, kIntervals);
}

double dp_to_leakage(double epsilon, std::uint64_t n) {
  if (!(epsilon >= 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be non-negative", std::nullopt, epsilon);
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be at least 1");
  return epsilon * static_cast<double>(n);
}

double laplace_dp_leakage(double epsilon, std::uint64_t n) {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive", std::nullopt, epsilon);
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be at least 1");
  return std::log1p(epsilon * static_cast<double>(n));
}

double noisy_erm_leakage(const std::vector<double>& noise_means) {
  if (noise_means.empty()) throw Error(ErrorCode::InvalidArgument, "noise schedule is empty");
  double total = 0.0;
  for (std::size_t i = 0; i < noise_means.size(); ++i) {
    const double b = noise_means[i];
    if (!(b > 0.0)) throw Error(ErrorCode::InvalidArgument, "noise means must be positive", i, b);
    total += std::log1p(1.0 / b);
  }
  return total;
}

std::vector<double> noisy_erm_schedule(std::uint64_t n, std::uint64_t k) {
  if (n < 1 || k < 1) throw Error(ErrorCode::InvalidArgument, "schedule needs n, k >= 1");
  const double root = std::cbrt(static_cast<double>(n));
  std::vector<double> b(k);
  for (std::uint64_t i = 0; i < k; ++i) b[i] = std::pow(static_cast<double>(i + 1), 1.1) / root;
  return b;
}

double noisy_erm_schedule_cap(std::uint64_t n) { return 11.0 * std::cbrt(static_cast<double>(n)); }

DpRegimeComparison dp_regime_comparator(double epsilon, std::uint64_t n, double eta, double beta) {
  if (!(epsilon >= 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be non-negative", std::nullopt, epsilon);
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be at least 1");
  if (!(eta > 0.0 && eta < 1.0)) throw Error(ErrorCode::InvalidArgument, "eta must lie in (0, 1)", std::nullopt, eta);
  const double nn = static_cast<double>(n);
  DpRegimeComparison r;
  r.epsilon = epsilon;
  r.n = n;
  r.eta = eta;
  r.decay_exponent = 2.0 * eta * eta - epsilon;
  r.leakage_bound_decays = r.decay_exponent > 0.0;
  r.zero_rate = r.decay_exponent == 0.0;
  r.tighter_threshold = 23.0 / 12.0 * eta * eta;
  r.leakage_tighter = epsilon <= r.tighter_threshold;
  r.small_epsilon_regime = epsilon <= eta / 2.0;
  r.leakage_dp_bound = 2.0 * std::exp(-nn * r.decay_exponent);
  r.stability_bound = 0.25 * std::exp(-nn * eta * eta / 12.0);
  if (beta >= 0.0) {
    if (!(beta > 0.0 && beta < 1.0)) throw Error(ErrorCode::InvalidArgument, "beta must lie in (0, 1)", std::nullopt, beta);
    r.has_beta = true;
    r.beta = beta;
    r.epsilon_threshold = std::log(3.0 / std::sqrt(beta)) / nn;
    r.hoeffding_threshold = std::sqrt(std::log(1.0 / beta) / (2.0 * nn));
    r.leakage_side = std::exp(epsilon * nn) * beta;
    r.max_info_side = 3.0 * std::sqrt(beta);
    r.leakage_side_smaller = r.leakage_side < r.max_info_side;
  }
  return r;
}

}  // namespace leakage
