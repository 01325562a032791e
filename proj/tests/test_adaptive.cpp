#include <doctest.h>

#include <cmath>

#include "leakage/adaptive.hpp"
#include "leakage/harness.hpp"

using namespace leakage;

namespace {

// Leakage of X to the transcript by explicit column enumeration, independent
// of AdaptiveSystem::transcript_joint.
double two_step_leakage_oracle(const Vector& px, const Matrix& k1, const Matrix& k2) {
  const Eigen::Index nx = px.size(), n1 = k1.cols(), n2 = k2.cols();
  double total = 0.0;
  for (Eigen::Index y1 = 0; y1 < n1; ++y1) {
    for (Eigen::Index y2 = 0; y2 < n2; ++y2) {
      double best = 0.0;
      for (Eigen::Index x = 0; x < nx; ++x) {
        if (px(x) <= 0) continue;
        best = std::max(best, k1(x, y1) * k2(x * n1 + y1, y2));
      }
      total += best;
    }
  }
  return std::log(total);
}

Matrix random_kernel(std::uint64_t seed, std::size_t rows, std::size_t cols) {
  return random_channel(seed, rows, cols).rows();
}

}  // namespace

TEST_CASE("ledger composition") {
  const CompositionLedger empty;
  const CompositionLedger a = empty.compose(0.5, "first");
  const CompositionLedger b = compose(a, 1.25, "second", true);
  CHECK(empty.size() == 0);
  CHECK(a.size() == 1);
  CHECK(a.total() == 0.5);
  CHECK(b.total() == 1.75);
  CHECK(b.steps()[1].conditional);
  try {
    a.compose(-0.1, "bad");
    FAIL("expected NegativeLeakage");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NegativeLeakage);
  }
  CHECK(budget_significance(b, 0.05) == doctest::Approx(0.05 * std::exp(-1.75)));
  CHECK(chain_rule_bound(0.3, 0.4) == doctest::Approx(0.7));
}

TEST_CASE("post-processing never increases leakage") {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const JointDist j = random_joint(derive_seed(51, s), 3, 4);
    const Channel post = random_channel(derive_seed(52, s), 4, 3);
    const PostprocessResult r = postprocess_check(j, post);
    CHECK(r.after <= r.before + 1e-12);
    CHECK(r.before == doctest::Approx(maximal_leakage(j)));
  }
  const JointDist id = joint_from(FiniteDist::uniform(3), Channel::identity(3));
  CHECK(postprocess_check(id, Channel::identity(3)).after == doctest::Approx(std::log(3.0)));
}

TEST_CASE("transcript of a two-step system") {
  const FiniteDist prior = FiniteDist::uniform(3);
  for (std::uint64_t s = 0; s < 100; ++s) {
    const Matrix k1 = random_kernel(derive_seed(53, s), 3, 2);
    const Matrix k2 = random_kernel(derive_seed(54, s), 3 * 2, 3);
    const AdaptiveSystem sys(prior, {k1, k2});
    CHECK(sys.histories(0) == 1);
    CHECK(sys.histories(1) == 2);
    const JointDist t = sys.transcript_joint();
    CHECK(t.ny() == 6);
    CHECK(maximal_leakage(t) == doctest::Approx(two_step_leakage_oracle(prior.probs(), k1, k2)).epsilon(1e-12));
    const AuditResult a = audit(sys);
    CHECK(a.holds);
    CHECK(a.realized_leakage <= a.ledger.total() + 1e-12);
    // Chain rule through the conditional leakage of the second step.
    const TripleDist triple = sys.first_two_steps();
    CHECK(a.realized_leakage <=
          chain_rule_bound(maximal_leakage(triple.joint_xy()), conditional_maximal_leakage(triple)) + 1e-12);
    CHECK(conditional_maximal_leakage(triple) <= sys.step_bound(1) + 1e-12);
  }
}

TEST_CASE("step bound of a non-adaptive step equals its leakage") {
  const Matrix k1 = Channel::bsc(0.2).rows();
  Matrix k2(4, 2);
  k2 << Channel::bsc(0.1).rows().row(0), Channel::bsc(0.1).rows().row(0), Channel::bsc(0.1).rows().row(1),
      Channel::bsc(0.1).rows().row(1);
  const AdaptiveSystem sys(FiniteDist::uniform(2), {k1, k2});
  CHECK(sys.step_bound(0) == doctest::Approx(std::log(1.6)));
  CHECK(sys.step_bound(1) == doctest::Approx(std::log(1.8)));
  CHECK(sys.declared_ledger().total() == doctest::Approx(std::log(1.6 * 1.8)));
}

TEST_CASE("invalid systems are rejected") {
  CHECK_THROWS_AS(AdaptiveSystem(FiniteDist::uniform(2), {Matrix::Constant(3, 2, 0.5)}), Error);
  Matrix bad = Matrix::Constant(2, 2, 0.5);
  bad(0, 0) = 0.7;
  CHECK_THROWS_AS(AdaptiveSystem(FiniteDist::uniform(2), {bad}), Error);
}
