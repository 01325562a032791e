// leakage_lab: command-line front end. Writes one JSON document per run.
// Exit codes: 0 success, 1 domain error (JSON on stderr), 2 usage error.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "leakage/adaptive.hpp"
#include "leakage/bounds.hpp"
#include "leakage/harness.hpp"
#include "leakage/json_io.hpp"
#include "leakage/measures.hpp"
#include "leakage/mechanisms.hpp"
#include "leakage/orlicz.hpp"

namespace {

using leakage::Error;
using leakage::ErrorCode;
using leakage::json::json;

struct Options {
  std::string joint;
  std::string event;
  std::string kind;
  std::string alpha = "inf";
  double p = 2.0;
  double beta = 0.1;
  std::string family;
  std::string noise = "laplace";
  std::string range = "0,1";
  double scale = 1.0;
  std::string steps;
  double delta = 0.05;
  std::uint64_t n = 1000;
  std::uint64_t k = 50;
  std::uint64_t trials = 10000;
  std::string eta = "0.05,0.1,0.2";
  std::uint64_t seed = 42;
  std::uint64_t instances = 500;
  unsigned threads = 0;
  bool bits = false;
  std::string out;
};

std::vector<double> parse_list(const std::string& text, const char* flag) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      throw CLI::ValidationError(flag, "'" + item + "' is not a number");
    }
    values.push_back(v);
  }
  if (values.empty()) throw CLI::ValidationError(flag, "expected a comma-separated list");
  return values;
}

double unit(const Options& o, double nats) { return o.bits ? nats / std::log(2.0) : nats; }
const char* unit_name(const Options& o) { return o.bits ? "bits" : "nats"; }

leakage::Event resolve_event(const std::string& spec, const leakage::JointDist& j) {
  if (spec.empty() || spec == "diagonal") return leakage::Event::diagonal(j.nx(), j.ny());
  const std::string prefix = "threshold:";
  if (spec.rfind(prefix, 0) == 0) {
    const double eta = std::stod(spec.substr(prefix.size()));
    auto numeric = [](const std::string& label) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(label, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != label.size()) {
        throw Error(ErrorCode::InvalidArgument, "threshold events need numeric labels, got '" + label + "'");
      }
      return v;
    };
    leakage::Mask mask(static_cast<Eigen::Index>(j.nx()), static_cast<Eigen::Index>(j.ny()));
    for (std::size_t x = 0; x < j.nx(); ++x)
      for (std::size_t y = 0; y < j.ny(); ++y)
        mask(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) =
            std::abs(numeric(j.x_labels()[x]) - numeric(j.y_labels()[y])) > eta;
    return leakage::Event(mask);
  }
  return leakage::json::event_from_json(leakage::json::read_file(spec), j.nx(), j.ny());
}

leakage::FKind parse_fkind(const std::string& name, double p) {
  if (name == "kl") return leakage::FKind::kl();
  if (name == "tv") return leakage::FKind::total_variation();
  if (name == "chi2") return leakage::FKind::chi_squared();
  if (name == "hellinger-sq") return leakage::FKind::squared_hellinger();
  if (name == "hellinger-p") return leakage::FKind::hellinger_p(p);
  throw Error(ErrorCode::InvalidArgument, "unknown f-divergence kind '" + name + "'");
}

json run_measure(const Options& o) {
  const leakage::JointDist j = leakage::json::joint_from_json(leakage::json::read_file(o.joint));
  json out = {{"schema", leakage::json::kSchema}, {"kind", o.kind}, {"units", unit_name(o)}};
  double value = 0.0;
  if (o.kind == "sibson") {
    const leakage::Alpha a = leakage::Alpha::parse(o.alpha);
    value = leakage::sibson_mi(j, a);
    out["alpha"] = a.to_string();
  } else if (o.kind == "renyi") {
    const leakage::Alpha a = leakage::Alpha::parse(o.alpha);
    value = leakage::renyi_divergence(j, j.product_of_marginals(), a);
    out["alpha"] = a.to_string();
  } else if (o.kind == "ml") {
    value = leakage::maximal_leakage(j);
  } else if (o.kind == "mi") {
    value = leakage::mutual_information(j);
  } else if (o.kind == "max-info") {
    value = leakage::max_information(j);
  } else if (o.kind == "beta-max-info") {
    value = leakage::beta_approx_max_information(j, o.beta);
    out["beta"] = o.beta;
  } else {
    value = leakage::f_mutual_information(j, parse_fkind(o.kind, o.p));
    if (o.kind == "hellinger-p") out["p"] = o.p;
  }
  out["value"] = leakage::json::number(unit(o, value));
  return out;
}

json run_bound(const Options& o) {
  const leakage::JointDist j = leakage::json::joint_from_json(leakage::json::read_file(o.joint));
  const leakage::Event e = resolve_event(o.event, j);
  leakage::BoundReport r;
  const std::string& f = o.family;
  if (f == "ml") {
    r = leakage::ml_bound(j, e);
  } else if (f == "sibson") {
    r = leakage::sibson_bound(j, e, leakage::Alpha::parse(o.alpha));
  } else if (f == "alpha-div") {
    r = leakage::alpha_div_bound(j, e, leakage::Alpha::parse(o.alpha).value());
  } else if (f == "four-param") {
    r = leakage::four_param_bound(j, e, leakage::Alpha::parse(o.alpha).value(), o.p);
  } else if (f == "fdiv") {
    r = leakage::fdiv_bound(j, e, leakage::FdivGenerator::from_kind(parse_fkind(o.kind.empty() ? "chi2" : o.kind, o.p)));
  } else if (f == "hellinger-p") {
    r = leakage::hellinger_p_bound(j, e, o.p);
  } else if (f == "hellinger-sq") {
    r = leakage::hellinger_sq_bound(j, e);
  } else if (f == "theorem2") {
    r = leakage::theorem2_bound(j, e, leakage::OrliczFn::parse(o.kind.empty() ? "power:alpha=2" : o.kind));
  } else {
    const std::string spec = o.kind.empty() ? "power:alpha=2;power:alpha=2" : o.kind;
    const auto split = spec.find(';');
    if (split == std::string::npos) {
      throw Error(ErrorCode::InvalidArgument, "theorem1 needs --kind '<phi>;<psi>'");
    }
    r = leakage::theorem1_bound(j, e, leakage::OrliczFn::parse(spec.substr(0, split)),
                                leakage::OrliczFn::parse(spec.substr(split + 1)));
  }
  return leakage::json::to_json(r);
}

json run_mechanism(const Options& o) {
  const std::vector<double> range = parse_list(o.range, "--range");
  if (range.size() != 2) throw CLI::ValidationError("--range", "expected a,c");
  leakage::MechanismSpec spec{range[0], range[1], leakage::parse_noise(o.noise), o.scale};
  const leakage::MechanismLeakage m = leakage::additive_noise_leakage(spec);
  json out = leakage::json::to_json(m);
  out["leakage_nats"] = leakage::json::number(m.leakage_nats);
  if (o.bits) out["leakage_bits"] = m.leakage_nats / std::log(2.0);
  out["noise"] = std::string(leakage::to_string(spec.noise));
  out["range"] = range;
  out["scale"] = o.scale;
  return out;
}

json run_compose(const Options& o) {
  leakage::CompositionLedger ledger;
  const std::vector<double> steps = parse_list(o.steps, "--steps");
  for (std::size_t i = 0; i < steps.size(); ++i) ledger = ledger.compose(steps[i], "step" + std::to_string(i + 1), i > 0);
  json out = leakage::json::to_json(ledger);
  out["adjusted_significance"] = leakage::budget_significance(ledger, o.delta);
  out["delta"] = o.delta;
  if (o.bits) out["total_bits"] = ledger.total() / std::log(2.0);
  return out;
}

json run_verify(const Options& o) {
  return leakage::json::to_json(leakage::bound_verification_suite(o.seed, o.instances));
}

json run_experiment(const Options& o) {
  leakage::ExperimentConfig cfg;
  cfg.n = o.n;
  cfg.k = o.k;
  cfg.trials = o.trials;
  cfg.eta_grid = parse_list(o.eta, "--eta");
  cfg.master_seed = o.seed;
  cfg.threads = o.threads;
  json out = leakage::json::to_json(leakage::noisy_erm_experiment(cfg));
  out["config"] = {{"n", cfg.n}, {"k", cfg.k}, {"trials", cfg.trials}, {"seed", cfg.master_seed}};
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"leakage_lab: information measures, leakage bounds and their verification"};
  app.require_subcommand(1);
  Options o;

  auto* measure = app.add_subcommand("measure", "compute a dependence measure of a joint");
  measure->add_option("--joint", o.joint, "joint distribution JSON")->required();
  measure->add_option("--kind", o.kind, "measure")
      ->required()
      ->check(CLI::IsMember({"sibson", "renyi", "ml", "mi", "max-info", "beta-max-info", "kl", "tv", "chi2",
                             "hellinger-sq", "hellinger-p"}));
  measure->add_option("--alpha", o.alpha, "order: number, 1 or inf");
  measure->add_option("--p", o.p, "Hellinger order");
  measure->add_option("--beta", o.beta, "slack for beta-max-info");
  measure->add_flag("--bits", o.bits, "report bits instead of nats");

  auto* bound = app.add_subcommand("bound", "evaluate an event-probability bound");
  bound->add_option("--joint", o.joint, "joint distribution JSON")->required();
  bound->add_option("--event", o.event, "event JSON, 'diagonal' or 'threshold:<eta>'");
  bound->add_option("--family", o.family, "bound family")
      ->required()
      ->check(CLI::IsMember({"ml", "sibson", "alpha-div", "four-param", "fdiv", "hellinger-p", "hellinger-sq",
                             "theorem1", "theorem2"}));
  bound->add_option("--kind", o.kind, "f-divergence kind or Orlicz spec(s)");
  bound->add_option("--alpha", o.alpha, "order alpha");
  bound->add_option("--p", o.p, "Hellinger order, or alpha' for four-param");
  bound->add_flag("--bits", o.bits, "accepted for symmetry; bounds are probabilities");

  auto* mech = app.add_subcommand("mechanism", "leakage of an additive-noise mechanism");
  mech->add_option("--noise", o.noise, "noise family")->check(CLI::IsMember({"laplace", "gaussian", "exponential"}));
  mech->add_option("--range", o.range, "a,c");
  mech->add_option("--scale", o.scale, "noise scale");
  mech->add_flag("--bits", o.bits, "also report bits");

  auto* comp = app.add_subcommand("compose", "compose per-step leakage bounds");
  comp->add_option("--steps", o.steps, "comma-separated leakages in nats")->required();
  comp->add_option("--delta", o.delta, "target false-positive rate");
  comp->add_flag("--bits", o.bits, "also report bits");

  auto* verify = app.add_subcommand("verify", "run the bound verification suite");
  verify->add_option("--seed", o.seed, "master seed");
  verify->add_option("--instances", o.instances, "random instances");

  auto* exp = app.add_subcommand("experiment", "Monte-Carlo experiments");
  exp->require_subcommand(1);
  auto* erm = exp->add_subcommand("noisy-erm", "noisy ERM generalization experiment");
  erm->add_option("--n", o.n, "samples per trial");
  erm->add_option("--k", o.k, "hypotheses");
  erm->add_option("--trials", o.trials, "Monte-Carlo trials");
  erm->add_option("--eta", o.eta, "comma-separated accuracy grid");
  erm->add_option("--seed", o.seed, "master seed");
  erm->add_option("--threads", o.threads, "worker threads (0 = all cores)");

  for (auto* sub : {measure, bound, mech, comp, verify, erm}) sub->add_option("--out", o.out, "write JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    json out;
    if (*measure) out = run_measure(o);
    else if (*bound) out = run_bound(o);
    else if (*mech) out = run_mechanism(o);
    else if (*comp) out = run_compose(o);
    else if (*verify) out = run_verify(o);
    else out = run_experiment(o);

    const std::string text = out.dump(2);
    if (o.out.empty()) {
      std::cout << text << "\n";
    } else {
      std::ofstream file(o.out);
      if (!file) throw Error(ErrorCode::InvalidArgument, "cannot write '" + o.out + "'");
      file << text << "\n";
    }
    return 0;
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << leakage::json::error_json(e).dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << leakage::json::error_json(Error(ErrorCode::InvalidArgument, e.what())).dump() << "\n";
    return 1;
  }
}
