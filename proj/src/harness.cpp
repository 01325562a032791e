#include "leakage/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "leakage/bounds.hpp"
#include "leakage/error.hpp"
#include "leakage/measures.hpp"
#include "leakage/mechanisms.hpp"
#include "leakage/orlicz.hpp"

namespace leakage {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "below(0) is empty");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  for (;;) {
    const std::uint64_t v = engine_();
    if (v < limit) return v % n;
  }
}

namespace {

Matrix dirichlet_matrix(Rng& rng, std::size_t rows, std::size_t cols, double sparsity) {
  if (!(sparsity >= 0.0 && sparsity < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "sparsity must lie in [0, 1)", std::nullopt, sparsity);
  }
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  // Row-major fill keeps the stream order independent of Eigen's storage.
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double w = rng.standard_exponential();
      m(r, c) = (sparsity > 0.0 && rng.uniform() < sparsity) ? 0.0 : w;
    }
  return m;
}

}  // namespace

JointDist random_joint(std::uint64_t seed, std::size_t nx, std::size_t ny, double sparsity) {
  if (nx < 1 || ny < 1) throw Error(ErrorCode::InvalidArgument, "alphabets must be non-empty");
  Rng rng(seed);
  Matrix m = dirichlet_matrix(rng, nx, ny, sparsity);
  if (m.sum() == 0.0) m(0, 0) = 1.0;
  m /= m.sum();
  return JointDist(std::move(m));
}

Channel random_channel(std::uint64_t seed, std::size_t nx, std::size_t ny, double sparsity) {
  if (nx < 1 || ny < 1) throw Error(ErrorCode::InvalidArgument, "alphabets must be non-empty");
  Rng rng(seed);
  Matrix m = dirichlet_matrix(rng, nx, ny, sparsity);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (m.row(r).sum() == 0.0) m(r, static_cast<Eigen::Index>(rng.below(ny))) = 1.0;
    m.row(r) /= m.row(r).sum();
  }
  return Channel(std::move(m));
}

Event random_event(std::uint64_t seed, std::size_t nx, std::size_t ny, double density) {
  Rng rng(seed);
  Mask mask(static_cast<Eigen::Index>(nx), static_cast<Eigen::Index>(ny));
  for (Eigen::Index r = 0; r < mask.rows(); ++r)
    for (Eigen::Index c = 0; c < mask.cols(); ++c) mask(r, c) = rng.uniform() < density;
  return Event(std::move(mask));
}

TightnessInstance tightness_instance(const Channel& c) {
  const Matrix& rows = c.rows();
  std::vector<std::size_t> f(c.ny());
  std::vector<bool> image(c.nx(), false);
  for (Eigen::Index y = 0; y < rows.cols(); ++y) {
    Eigen::Index best = 0;
    for (Eigen::Index x = 1; x < rows.rows(); ++x) {
      if (rows(x, y) > rows(best, y)) best = x;
    }
    f[static_cast<std::size_t>(y)] = static_cast<std::size_t>(best);
    image[static_cast<std::size_t>(best)] = true;
  }
  FiniteDist prior(c.x_labels(), FiniteDist::uniform_on(image).probs());
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t y = 0; y < f.size(); ++y) pairs.emplace_back(f[y], y);
  return {std::move(prior), Event::from_pairs(c.nx(), c.ny(), pairs)};
}

double brute_force_event_prob(const JointDist& j, const Event& e) {
  if (j.nx() != e.nx() || j.ny() != e.ny()) throw Error(ErrorCode::ShapeMismatch, "event shape differs from the joint");
  double total = 0.0;
  for (std::size_t x = 0; x < j.nx(); ++x)
    for (std::size_t y = 0; y < j.ny(); ++y)
      if (e.contains(x, y)) total += j(x, y);
  return total;
}

double beta_mi_brute_force(const JointDist& j, double beta) {
  const Matrix& pm = j.probs();
  const auto atoms = static_cast<std::size_t>(pm.size());
  if (atoms > 20) throw Error(ErrorCode::TooManyAtoms, "subset enumeration capped at 20 atoms", atoms);
  // Same atom order and marginals as the library, so equal sets give equal sums.
  const Matrix qm = j.product_of_marginals().probs();
  const double* p = pm.data();
  const double* q = qm.data();
  double best = -1.0;
  bool found = false;
  for (std::uint32_t set = 1; set < (1u << atoms); ++set) {
    double sp = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < atoms; ++i) {
      if (set & (1u << i)) {
        sp += p[i];
        sq += q[i];
      }
    }
    if (!(sp > beta)) continue;
    if (sq == 0.0) return std::numeric_limits<double>::infinity();
    const double v = (sp - beta) / sq;
    if (!found || v > best) {
      best = v;
      found = true;
    }
  }
  if (!found) return -std::numeric_limits<double>::infinity();
  return std::log(best);
}

// ---- noisy ERM -----------------------------------------------------------

void ExperimentConfig::validate() const {
  if (n < 1 || trials < 1 || k < 1) throw Error(ErrorCode::InvalidArgument, "n, trials and k must be at least 1");
  if (!noise_schedule.empty() && noise_schedule.size() != k) {
    throw Error(ErrorCode::ShapeMismatch, "noise schedule length differs from k");
  }
  for (std::size_t i = 0; i < eta_grid.size(); ++i) {
    if (!(eta_grid[i] > 0.0 && eta_grid[i] < 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "eta values must lie in (0, 1)", i, eta_grid[i]);
    }
  }
}

std::vector<std::vector<std::size_t>> random_labelings(std::uint64_t seed, std::size_t k, std::size_t features,
                                                       std::size_t labels) {
  Rng rng(seed);
  std::vector<std::vector<std::size_t>> h(k, std::vector<std::size_t>(features));
  for (auto& labeling : h)
    for (auto& c : labeling) c = static_cast<std::size_t>(rng.below(labels));
  return h;
}

namespace {

// Risk of each hypothesis under a weighting of Z = D x C (row-major atoms).
std::vector<double> risks(const std::vector<std::vector<std::size_t>>& hyps, const std::vector<double>& weights,
                          std::size_t nc) {
  std::vector<double> out(hyps.size(), 0.0);
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    for (std::size_t z = 0; z < weights.size(); ++z) {
      if (hyps[i][z / nc] != z % nc) out[i] += weights[z];
    }
  }
  return out;
}

std::vector<double> row_major_atoms(const JointDist& data) {
  std::vector<double> atoms;
  atoms.reserve(data.nx() * data.ny());
  for (std::size_t d = 0; d < data.nx(); ++d)
    for (std::size_t c = 0; c < data.ny(); ++c) atoms.push_back(data(d, c));
  return atoms;
}

}  // namespace

ExperimentResult noisy_erm_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::vector<double> schedule = cfg.noise_schedule.empty() ? noisy_erm_schedule(cfg.n, cfg.k) : cfg.noise_schedule;
  const std::size_t nc = cfg.data_dist.ny();
  const auto hyps = random_labelings(derive_seed(cfg.master_seed, 0), cfg.k, cfg.data_dist.nx(), nc);
  const std::vector<double> atoms = row_major_atoms(cfg.data_dist);
  const std::vector<double> true_risk = risks(hyps, atoms, nc);
  std::vector<double> cdf(atoms.size());
  std::partial_sum(atoms.begin(), atoms.end(), cdf.begin());

  std::vector<double> generr(cfg.trials);
  auto run_trial = [&](std::uint64_t t) {
    Rng rng(derive_seed(cfg.master_seed, t + 1));
    std::vector<double> freq(atoms.size(), 0.0);
    for (std::uint64_t s = 0; s < cfg.n; ++s) {
      const double u = rng.uniform() * cdf.back();
      auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
      if (it == cdf.end()) --it;
      freq[static_cast<std::size_t>(it - cdf.begin())] += 1.0;
    }
    for (auto& f : freq) f /= static_cast<double>(cfg.n);
    const std::vector<double> empirical = risks(hyps, freq, nc);
    std::size_t chosen = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < empirical.size(); ++i) {
      const double v = empirical[i] + rng.exponential(schedule[i]);
      if (v < best) {
        best = v;
        chosen = i;
      }
    }
    generr[t] = std::abs(true_risk[chosen] - empirical[chosen]);
  };

  unsigned threads = cfg.threads != 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, cfg.trials));
  if (threads <= 1) {
    for (std::uint64_t t = 0; t < cfg.trials; ++t) run_trial(t);
  } else {
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (cfg.trials + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
      const std::uint64_t lo = w * chunk, hi = std::min(cfg.trials, lo + chunk);
      pool.emplace_back([&, lo, hi] {
        for (std::uint64_t t = lo; t < hi; ++t) run_trial(t);
      });
    }
    for (auto& th : pool) th.join();
  }

  ExperimentResult out;
  out.leakage = noisy_erm_leakage(schedule);
  out.leakage_cap = noisy_erm_schedule_cap(cfg.n);
  double sum = 0.0;
  for (double g : generr) sum += g;
  out.mean_generalization_error = sum / static_cast<double>(cfg.trials);
  const double nn = static_cast<double>(cfg.n);
  for (double eta : cfg.eta_grid) {
    EtaResult r;
    r.eta = eta;
    std::uint64_t hits = 0;
    for (double g : generr) hits += g >= eta ? 1 : 0;
    r.empirical_tail = static_cast<double>(hits) / static_cast<double>(cfg.trials);
    r.standard_error = std::sqrt(r.empirical_tail * (1.0 - r.empirical_tail) / static_cast<double>(cfg.trials));
    r.bound_raw = 2.0 * std::exp(-nn * (2.0 * eta * eta - 11.0 / std::pow(nn, 2.0 / 3.0)));
    r.bound = clamp_probability(r.bound_raw);
    r.exact_sum_bound = clamp_probability(2.0 * std::exp(out.leakage - 2.0 * nn * eta * eta));
    r.vacuous = r.bound_raw >= 1.0;
    r.holds = r.empirical_tail <= r.bound + 3.0 * r.standard_error;
    out.per_eta.push_back(r);
  }
  return out;
}

std::vector<double> noisy_argmin_probs(const std::vector<double>& risks_in, const std::vector<double>& means) {
  if (risks_in.size() != means.size() || risks_in.empty()) {
    throw Error(ErrorCode::ShapeMismatch, "risks and noise means must be non-empty and equally long");
  }
  const std::size_t k = risks_in.size();
  std::vector<double> out(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    // Integrate f_{V_i}(v) prod_{j != i} P(V_j > v) over v >= L_i; the
    // integrand is a single exponential between consecutive risks.
    std::vector<double> breaks{risks_in[i]};
    for (std::size_t j = 0; j < k; ++j)
      if (j != i && risks_in[j] > risks_in[i]) breaks.push_back(risks_in[j]);
    std::sort(breaks.begin(), breaks.end());
    breaks.push_back(std::numeric_limits<double>::infinity());
    double total = 0.0;
    for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
      const double t0 = breaks[s], t1 = breaks[s + 1];
      if (!(t1 > t0)) continue;
      double rate = 0.0, log_level = -std::log(means[i]);
      for (std::size_t j = 0; j < k; ++j) {
        if (j == i || risks_in[j] <= t0) {
          rate += 1.0 / means[j];
          log_level -= (t0 - risks_in[j]) / means[j];
        }
      }
      const double span = std::isinf(t1) ? 1.0 : -std::expm1(-rate * (t1 - t0));
      total += std::exp(log_level) * span / rate;
    }
    out[i] = total;
  }
  return out;
}

HellingerErmCheck hellinger_erm_check(const JointDist& data, const std::vector<std::vector<std::size_t>>& hypotheses,
                                      const std::vector<double>& means, std::uint64_t n, double eta, double sigma) {
  const std::vector<double> atoms = row_major_atoms(data);
  const std::size_t nz = atoms.size();
  const std::size_t nc = data.ny();
  double sequences = std::pow(static_cast<double>(nz), static_cast<double>(n));
  if (sequences > 2e6) throw Error(ErrorCode::TooManyAtoms, "sample space too large to enumerate", std::nullopt, sequences);
  const std::vector<double> true_risk = risks(hypotheses, atoms, nc);
  const std::size_t k = hypotheses.size();

  // Accumulate P(S, h) and P(S) per sequence; P_H is their marginal.
  std::vector<std::vector<double>> joint;
  std::vector<double> ps;
  std::vector<std::vector<bool>> bad;
  std::vector<std::size_t> seq(n, 0);
  for (;;) {
    double prob = 1.0;
    std::vector<double> freq(nz, 0.0);
    for (std::size_t z : seq) {
      prob *= atoms[z];
      freq[z] += 1.0 / static_cast<double>(n);
    }
    const std::vector<double> emp = risks(hypotheses, freq, nc);
    const std::vector<double> choose = noisy_argmin_probs(emp, means);
    std::vector<double> row(k);
    std::vector<bool> flags(k);
    for (std::size_t h = 0; h < k; ++h) {
      row[h] = prob * choose[h];
      flags[h] = std::abs(true_risk[h] - emp[h]) >= eta;
    }
    joint.push_back(std::move(row));
    ps.push_back(prob);
    bad.push_back(std::move(flags));
    std::size_t pos = 0;
    while (pos < n && ++seq[pos] == nz) seq[pos++] = 0;
    if (pos == n) break;
  }
  std::vector<double> ph(k, 0.0);
  for (const auto& row : joint)
    for (std::size_t h = 0; h < k; ++h) ph[h] += row[h];

  HellingerErmCheck out;
  for (std::size_t s = 0; s < joint.size(); ++s) {
    for (std::size_t h = 0; h < k; ++h) {
      const double d = std::sqrt(joint[s][h]) - std::sqrt(ps[s] * ph[h]);
      out.squared_hellinger += d * d;
      if (bad[s][h]) out.exact_tail += joint[s][h];
    }
  }
  const double x = static_cast<double>(n) * eta * eta / (sigma * sigma);
  const double hd = std::sqrt(out.squared_hellinger);
  out.bound = 2.0 * std::exp(-x / 2.0) + out.squared_hellinger + std::pow(2.0, 1.5) * hd * std::exp(-x / 4.0);
  out.holds = out.exact_tail <= out.bound + 1e-12;
  return out;
}

// ---- verification suite --------------------------------------------------

std::size_t VerificationReport::violations() const {
  std::size_t v = 0;
  for (const auto& [name, stats] : families) v += stats.violations;
  return v;
}

namespace {

void record(FamilyStats& s, const BoundReport& r) {
  const double slack = r.slack();
  if (s.evaluated == 0) {
    s.max_slack = slack;
    s.min_slack = slack;
  } else {
    s.max_slack = std::max(s.max_slack, slack);
    s.min_slack = std::min(s.min_slack, slack);
  }
  ++s.evaluated;
  if (!r.holds) ++s.violations;
  if (std::abs(slack) <= 1e-12) ++s.equalities;
}

}  // namespace

VerificationReport bound_verification_suite(std::uint64_t master_seed, std::size_t n_instances,
                                            const SuiteOptions& options) {
  if (n_instances < 1) throw Error(ErrorCode::InvalidArgument, "need at least one instance");
  VerificationReport report;
  const double orders[] = {1.5, 2.0, 3.0, 4.0};
  const OrliczFn psi2 = OrliczFn::power(2.0);
  const OrliczFn psi3 = OrliczFn::power(3.0);

  for (std::size_t i = 0; i < n_instances; ++i) {
    Rng rng(derive_seed(master_seed, i));
    const std::size_t nx = 2 + static_cast<std::size_t>(rng.below(7));
    const std::size_t ny = 2 + static_cast<std::size_t>(rng.below(7));
    const double sparsity = rng.uniform() < 0.3 ? 0.3 : 0.0;
    const JointDist j = random_joint(rng.next(), nx, ny, sparsity);
    const Event e = random_event(rng.next(), nx, ny, 0.2 + 0.6 * rng.uniform());
    const double a = orders[rng.below(4)];
    const double a2 = orders[rng.below(4)];

    record(report.families["four_param"], four_param_bound(j, e, a, a2));
    record(report.families["sibson"], sibson_bound(j, e, Alpha::finite(a)));
    record(report.families["sibson"], sibson_bound(j, e, Alpha::infinity()));
    record(report.families["ml"], ml_bound(j, e));
    record(report.families["alpha_div"], alpha_div_bound(j, e, a));
    for (const auto& gen : {FdivGenerator::hellinger_p(a), FdivGenerator::chi_squared(), FdivGenerator::squared_hellinger(),
                            FdivGenerator::total_variation(), FdivGenerator::kl()}) {
      record(report.families["fdiv"], fdiv_bound(j, e, gen));
    }
    record(report.families["hellinger_p"], hellinger_p_bound(j, e, a));
    try {
      record(report.families["hellinger_sq"], hellinger_sq_bound(j, e));
    } catch (const Error& err) {
      if (err.code() != ErrorCode::AssumptionViolated) throw;
      ++report.families["hellinger_sq"].skipped;
    }
    if (options.include_orlicz) {
      record(report.families["theorem2"], theorem2_bound(j, e, a >= 3.0 ? psi3 : psi2));
      record(report.families["theorem1"], theorem1_bound(j, e, psi2, a >= 3.0 ? psi3 : psi2));
    }
    ++report.instances;
  }

  // Equality constructions for the leakage bound.
  auto curated = [&](const JointDist& j, const Event& e) {
    const BoundReport r = ml_bound(j, e);
    record(report.families["ml_curated"], r);
    ++report.curated_cases;
    if (std::abs(r.bound - r.exact_joint_prob) <= 1e-12) ++report.curated_equalities;
  };
  for (std::size_t n = 2; n <= 8; ++n) curated(joint_from(FiniteDist::uniform(n), Channel::identity(n)), Event::diagonal(n, n));
  for (double p : {0.1, 0.25, 0.4}) curated(joint_from(FiniteDist::uniform(2), Channel::bsc(p)), Event::diagonal(2, 2));
  {
    const Matrix indep = FiniteDist::uniform(4).probs() * FiniteDist::uniform(3).probs().transpose();
    Mask mask = Mask::Constant(4, 3, false);
    for (Eigen::Index y = 0; y < 3; ++y) {
      mask(y, y) = true;
      mask((y + 1) % 4, y) = true;
    }
    curated(JointDist(indep), Event(mask));
  }
  for (std::size_t c = 0; c < 20; ++c) {
    Rng rng(derive_seed(master_seed ^ 0x7167687445ULL, c));
    const std::size_t nx = 2 + static_cast<std::size_t>(rng.below(5));
    const std::size_t ny = 2 + static_cast<std::size_t>(rng.below(5));
    const Channel ch = random_channel(rng.next(), nx, ny);
    const TightnessInstance t = tightness_instance(ch);
    curated(joint_from(t.prior, ch), t.event);
  }
  return report;
}

}  // namespace leakage
