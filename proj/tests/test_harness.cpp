#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "leakage/bounds.hpp"
#include "leakage/harness.hpp"
#include "leakage/mechanisms.hpp"

using namespace leakage;

namespace {

// P(argmin_i (L_i + N_i) = h) by Simpson integration of
// f_h(t) prod_{j != h} P(L_j + N_j > L_h + t).
double argmin_oracle(const std::vector<double>& risks, const std::vector<double>& means, std::size_t h) {
  auto integrand = [&](double t) {
    double v = std::exp(-t / means[h]) / means[h];
    const double at = risks[h] + t;
    for (std::size_t j = 0; j < risks.size(); ++j) {
      if (j == h) continue;
      if (at > risks[j]) v *= std::exp(-(at - risks[j]) / means[j]);
    }
    return v;
  };
  // Split at the kinks L_j - L_h.
  std::vector<double> cuts{0.0};
  for (double r : risks)
    if (r > risks[h]) cuts.push_back(r - risks[h]);
  std::sort(cuts.begin(), cuts.end());
  cuts.push_back(cuts.back() + 60 * *std::max_element(means.begin(), means.end()));
  double total = 0.0;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double a = cuts[s], b = cuts[s + 1];
    if (!(b > a)) continue;
    const int steps = 20000;
    const double w = (b - a) / steps;
    double acc = integrand(a) + integrand(b);
    for (int i = 1; i < steps; ++i) acc += (i % 2 ? 4.0 : 2.0) * integrand(a + i * w);
    total += acc * w / 3.0;
  }
  return total;
}

}  // namespace

TEST_CASE("seeds and streams are deterministic") {
  CHECK(derive_seed(7, 3) == derive_seed(7, 3));
  CHECK(derive_seed(7, 3) != derive_seed(7, 4));
  CHECK(derive_seed(7, 3) != derive_seed(8, 3));
  Rng a(123), b(123);
  for (int i = 0; i < 10; ++i) CHECK(a.next() == b.next());
  Rng u(5);
  for (int i = 0; i < 1000; ++i) {
    const double v = u.uniform();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
    CHECK(u.below(7) < 7u);
  }
  // Exponential mean by averaging.
  Rng e(9);
  double sum = 0;
  for (int i = 0; i < 200000; ++i) sum += e.exponential(2.0);
  CHECK(sum / 200000 == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("generators produce valid objects") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const JointDist j = random_joint(s, 3, 5, 0.4);
    CHECK(j.probs().sum() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(j.probs().minCoeff() >= 0.0);
    CHECK((random_joint(s, 3, 5, 0.4).probs() - j.probs()).norm() == 0.0);
    const Channel c = random_channel(s, 4, 2, 0.5);
    for (Eigen::Index r = 0; r < 4; ++r) CHECK(c.rows().row(r).sum() == doctest::Approx(1.0).epsilon(1e-14));
    const Event e = random_event(s, 3, 5);
    CHECK(e.nx() == 3);
    CHECK(brute_force_event_prob(j, e) == doctest::Approx(event_prob(j, e)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(random_joint(0, 0, 3), Error);
}

TEST_CASE("tightness instances meet the leakage bound with equality") {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const Channel c = random_channel(derive_seed(61, s), 2 + s % 5, 2 + (s / 5) % 5);
    const TightnessInstance t = tightness_instance(c);
    const JointDist j = joint_from(t.prior, c);
    const BoundReport r = ml_bound(j, t.event);
    CHECK(std::abs(r.bound - r.exact_joint_prob) < 1e-12);
  }
}

TEST_CASE("subset enumeration limits") {
  CHECK_THROWS_AS(beta_mi_brute_force(random_joint(1, 5, 5), 0.1), Error);
  const JointDist point(Matrix::Constant(1, 1, 1.0));
  CHECK(std::isinf(beta_mi_brute_force(point, 1.0)));
}

TEST_CASE("noisy argmin probabilities") {
  const std::vector<double> risks{0.3, 0.1, 0.25, 0.1};
  const std::vector<double> means{0.5, 0.2, 1.0, 0.05};
  const auto p = noisy_argmin_probs(risks, means);
  double total = 0;
  for (std::size_t h = 0; h < p.size(); ++h) {
    CHECK(p[h] == doctest::Approx(argmin_oracle(risks, means, h)).epsilon(1e-8));
    total += p[h];
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  // Equal risks and means split evenly.
  const auto even = noisy_argmin_probs({0.2, 0.2, 0.2}, {1.0, 1.0, 1.0});
  for (double v : even) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK_THROWS_AS(noisy_argmin_probs({0.1}, {1.0, 2.0}), Error);
}

TEST_CASE("exact Hellinger check on a small noisy ERM system") {
  const JointDist data(Matrix::Constant(2, 2, 0.25));
  const auto hyps = random_labelings(3, 3, 2, 2);
  for (std::uint64_t n : {4u, 8u}) {
    for (double eta : {0.1, 0.25}) {
      const HellingerErmCheck c = hellinger_erm_check(data, hyps, {0.3, 0.6, 1.2}, n, eta);
      CHECK(c.holds);
      CHECK(c.squared_hellinger >= 0.0);
      CHECK(c.exact_tail <= c.bound + 1e-12);
    }
  }
  CHECK_THROWS_AS(hellinger_erm_check(data, hyps, {0.3, 0.6, 1.2}, 20, 0.1), Error);
}

TEST_CASE("noisy ERM experiment is reproducible and thread-count independent") {
  ExperimentConfig cfg;
  cfg.n = 200;
  cfg.k = 10;
  cfg.trials = 400;
  cfg.threads = 1;
  const ExperimentResult a = noisy_erm_experiment(cfg);
  cfg.threads = 3;
  const ExperimentResult b = noisy_erm_experiment(cfg);
  CHECK(a.mean_generalization_error == b.mean_generalization_error);
  REQUIRE(a.per_eta.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(a.per_eta[i].empirical_tail == b.per_eta[i].empirical_tail);
    CHECK(a.per_eta[i].holds);
  }
  CHECK(a.leakage <= a.leakage_cap);
  CHECK(a.leakage == doctest::Approx(noisy_erm_leakage(noisy_erm_schedule(200, 10))));
  cfg.eta_grid = {1.5};
  CHECK_THROWS_AS(noisy_erm_experiment(cfg), Error);
}

TEST_CASE("random labelings") {
  const auto h = random_labelings(11, 6, 8, 3);
  REQUIRE(h.size() == 6);
  std::set<std::size_t> seen;
  for (const auto& row : h) {
    CHECK(row.size() == 8);
    for (std::size_t c : row) {
      CHECK(c < 3);
      seen.insert(c);
    }
  }
  CHECK(seen.size() == 3);
}

TEST_CASE("small verification suite") {
  const VerificationReport r = bound_verification_suite(17, 25);
  CHECK(r.instances == 25);
  CHECK(r.violations() == 0);
  for (const char* fam : {"four_param", "sibson", "ml", "alpha_div", "fdiv", "hellinger_p", "hellinger_sq", "theorem1",
                          "theorem2"}) {
    REQUIRE(r.families.count(fam));
    CHECK(r.families.at(fam).evaluated + r.families.at(fam).skipped > 0);
  }
  CHECK(r.curated_cases > 0);
  CHECK(r.curated_equalities == r.curated_cases);
}
