#include <doctest.h>

#include <cmath>
#include <limits>

#include "leakage/bounds.hpp"
#include "leakage/harness.hpp"
#include "leakage/orlicz.hpp"

using namespace leakage;

namespace {

// Amemiya norm by a dense scan in log t.
double amemiya_scan(const WeightedValues& u, const std::function<double(double)>& psi) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = -40000; i <= 40000; ++i) {
    const double t = std::exp(i * 2e-4);
    double s = 0.0;
    for (Eigen::Index k = 0; k < u.size(); ++k) s += u.weights()(k) * psi(t * std::abs(u.values()(k)));
    best = std::min(best, (s + 1) / t);
  }
  return best;
}

}  // namespace

TEST_CASE("construction rejects invalid curves") {
  CHECK_THROWS_AS(OrliczFn([](double t) { return t + 1; }, "shifted"), Error);
  CHECK_THROWS_AS(OrliczFn([](double t) { return -t; }, "decreasing"), Error);
  CHECK_THROWS_AS(OrliczFn([](double t) { return std::sqrt(t); }, "concave"), Error);
  CHECK_THROWS_AS(OrliczFn::power(0.5), Error);
  CHECK_THROWS_AS(OrliczFn::parse("nonsense"), Error);
  CHECK(OrliczFn::parse("power:alpha=3")(2.0) == doctest::Approx(8.0 / 3.0));
  CHECK(OrliczFn::parse("exp-minus-one")(1.0) == doctest::Approx(std::exp(1.0) - 1));
}

TEST_CASE("conjugate of the power function") {
  for (double a : {1.5, 2.0, 3.0, 5.0}) {
    const double b = a / (a - 1);
    const OrliczFn psi = OrliczFn::power(a);
    for (double x : {0.1, 0.5, 1.0, 2.0, 7.0}) {
      CHECK(conjugate_value(psi, x) == doctest::Approx(std::pow(x, b) / b).epsilon(1e-8));
    }
  }
}

TEST_CASE("conjugate of exp minus one") {
  const OrliczFn psi = OrliczFn::exp_minus_one();
  for (double x : {1.5, 2.0, 5.0}) {
    CHECK(conjugate_value(psi, x) == doctest::Approx(x * std::log(x) - x + 1).epsilon(1e-8));
  }
  CHECK(conjugate_value(psi, 0.5) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("divergent conjugate") {
  try {
    conjugate_value(OrliczFn::linear(), 2.0);
    FAIL("expected divergence");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DivergentConjugate);
  }
  const OrliczFn conj = legendre_conjugate(OrliczFn::linear());
  CHECK(std::isinf(conj(2.0)));
  CHECK(conj(0.5) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("biconjugate recovers convex functions") {
  for (double a : {1.5, 2.0, 4.0}) {
    const OrliczFn psi = OrliczFn::power(a);
    const OrliczFn bi = biconjugate(psi);
    for (double t : {0.2, 1.0, 3.0}) CHECK(bi(t) == doctest::Approx(psi(t)).epsilon(1e-6));
  }
}

TEST_CASE("generalized inverse") {
  const OrliczFn psi = OrliczFn::power(2.0);
  for (double t : {0.1, 1.0, 4.5}) CHECK(generalized_inverse(psi, t) == doctest::Approx(std::sqrt(2 * t)).epsilon(1e-9));
  // Plateau: inf{s : f(s) > 0} for a function zero on [0, 1].
  const OrliczFn hinge([](double s) { return std::max(0.0, s - 1); }, "hinge");
  CHECK(generalized_inverse(hinge, 0.0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("Luxemburg norm of the power function") {
  for (std::uint64_t s = 0; s < 30; ++s) {
    Rng rng(derive_seed(21, s));
    Vector v(4), w(4);
    for (int i = 0; i < 4; ++i) {
      v(i) = rng.exponential(2.0);
      w(i) = rng.standard_exponential();
    }
    w /= w.sum();
    const WeightedValues u(v, w);
    for (double a : {1.5, 2.0, 3.0}) {
      double m = 0;
      for (int i = 0; i < 4; ++i) m += w(i) * std::pow(v(i), a);
      CHECK(luxemburg_norm(u, OrliczFn::power(a)) == doctest::Approx(std::pow(m / a, 1 / a)).epsilon(1e-8));
    }
  }
}

TEST_CASE("Amemiya norm matches a dense scan") {
  Vector v(3), w(3);
  v << 0.5, 2.0, 4.0;
  w << 0.5, 0.3, 0.2;
  const WeightedValues u(v, w);
  for (const auto& psi : {OrliczFn::power(2.0), OrliczFn::power(3.0), OrliczFn::exp_minus_one()}) {
    CHECK(amemiya_norm(u, psi) == doctest::Approx(amemiya_scan(u, [&](double t) { return psi(t); })).epsilon(1e-6));
  }
}

TEST_CASE("Luxemburg and Amemiya norms are equivalent") {
  for (std::uint64_t s = 0; s < 30; ++s) {
    Rng rng(derive_seed(22, s));
    Vector v(5), w(5);
    for (int i = 0; i < 5; ++i) {
      v(i) = rng.exponential(1.0);
      w(i) = rng.standard_exponential();
    }
    w /= w.sum();
    const WeightedValues u(v, w);
    for (const auto& psi : {OrliczFn::power(2.0), OrliczFn::exp_minus_one()}) {
      const double lux = luxemburg_norm(u, psi), am = amemiya_norm(u, psi);
      CHECK(lux <= am * (1 + 1e-8));
      CHECK(am <= 2 * lux * (1 + 1e-8));
    }
  }
}

TEST_CASE("single-function bound agrees with the alpha-divergence bound") {
  for (std::uint64_t s = 0; s < 40; ++s) {
    const JointDist j = random_joint(derive_seed(23, s), 3, 3);
    const Event e = random_event(derive_seed(24, s), 3, 3);
    for (double a : {1.5, 2.0, 3.0}) {
      const BoundReport t2 = theorem2_bound(j, e, OrliczFn::power(a));
      const BoundReport ad = alpha_div_bound(j, e, a);
      CHECK(t2.bound == doctest::Approx(ad.bound).epsilon(1e-6));
      CHECK(t2.holds);
    }
  }
}

TEST_CASE("direct and biconjugate inverse modes coincide for convex psi") {
  const JointDist j = random_joint(31, 3, 4);
  const Event e = random_event(32, 3, 4);
  const double a = theorem2_bound(j, e, OrliczFn::exp_minus_one(), InverseMode::Direct).bound;
  const double b = theorem2_bound(j, e, OrliczFn::exp_minus_one(), InverseMode::Biconjugate).bound;
  CHECK(a == doctest::Approx(b).epsilon(1e-6));
}

TEST_CASE("nested norm bound holds") {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const JointDist j = random_joint(derive_seed(25, s), 3, 3);
    const Event e = random_event(derive_seed(26, s), 3, 3);
    const BoundReport r = theorem1_bound(j, e, OrliczFn::power(2.0), OrliczFn::power(3.0));
    CHECK(r.holds);
    CHECK(r.bound >= r.exact_joint_prob - 1e-9);
  }
}
