#include "leakage/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace leakage::json {

json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

namespace {

Labels read_labels(const json& arr, const char* field) {
  if (!arr.is_array()) throw Error(ErrorCode::InvalidArgument, std::string(field) + " must be an array");
  Labels labels;
  for (const auto& v : arr) labels.push_back(v.is_string() ? v.get<std::string>() : v.dump());
  return labels;
}

json labels_json(const Labels& labels) { return json(labels); }

}  // namespace

JointDist joint_from_json(const json& j) {
  if (!j.is_object() || !j.contains("probs")) throw Error(ErrorCode::InvalidArgument, "joint needs a \"probs\" matrix");
  const json& rows = j.at("probs");
  if (!rows.is_array() || rows.empty()) throw Error(ErrorCode::InvalidArgument, "\"probs\" must be a non-empty matrix");
  const std::size_t nx = rows.size();
  const std::size_t ny = rows.at(0).is_array() ? rows.at(0).size() : 0;
  if (ny == 0) throw Error(ErrorCode::InvalidArgument, "\"probs\" rows must be non-empty arrays");
  Matrix m(static_cast<Eigen::Index>(nx), static_cast<Eigen::Index>(ny));
  for (std::size_t x = 0; x < nx; ++x) {
    const json& row = rows.at(x);
    if (!row.is_array() || row.size() != ny) throw Error(ErrorCode::ShapeMismatch, "ragged \"probs\" matrix", x);
    for (std::size_t y = 0; y < ny; ++y) {
      if (!row.at(y).is_number()) throw Error(ErrorCode::InvalidArgument, "probabilities must be numbers", x * ny + y);
      m(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = row.at(y).get<double>();
    }
  }
  Labels xl = j.contains("x_labels") ? read_labels(j.at("x_labels"), "x_labels") : index_labels(nx);
  Labels yl = j.contains("y_labels") ? read_labels(j.at("y_labels"), "y_labels") : index_labels(ny);
  return JointDist(std::move(xl), std::move(yl), std::move(m));
}

json to_json(const JointDist& j) {
  json rows = json::array();
  for (std::size_t x = 0; x < j.nx(); ++x) {
    json row = json::array();
    for (std::size_t y = 0; y < j.ny(); ++y) row.push_back(j(x, y));
    rows.push_back(std::move(row));
  }
  return {{"x_labels", labels_json(j.x_labels())}, {"y_labels", labels_json(j.y_labels())}, {"probs", rows}};
}

Event event_from_json(const json& j, std::size_t nx, std::size_t ny) {
  if (!j.is_object() || !j.contains("pairs") || !j.at("pairs").is_array()) {
    throw Error(ErrorCode::InvalidArgument, "event needs a \"pairs\" array");
  }
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& p : j.at("pairs")) {
    if (!p.is_array() || p.size() != 2 || !p.at(0).is_number_unsigned() || !p.at(1).is_number_unsigned()) {
      throw Error(ErrorCode::InvalidArgument, "event pairs must be [x_index, y_index]", pairs.size());
    }
    pairs.emplace_back(p.at(0).get<std::size_t>(), p.at(1).get<std::size_t>());
  }
  return Event::from_pairs(nx, ny, pairs);
}

json to_json(const Event& e) {
  json pairs = json::array();
  for (const auto& [x, y] : e.pairs()) pairs.push_back({x, y});
  return {{"pairs", pairs}};
}

json to_json(const BoundReport& r) {
  json params = json::object();
  for (const auto& [k, v] : r.params) params[k] = number(v);
  json extras = json::object();
  for (const auto& [k, v] : r.extras) extras[k] = number(v);
  return {{"schema", kSchema},
          {"family", r.family},
          {"bound", number(r.bound)},
          {"display_bound", number(r.display_bound())},
          {"exact_joint_prob", r.exact_joint_prob},
          {"exact_product_prob", r.exact_product_prob},
          {"params", params},
          {"extras", extras},
          {"notes", r.notes},
          {"holds", r.holds}};
}

json to_json(const MechanismLeakage& m) {
  return {{"schema", kSchema},
          {"leakage_nats", number(m.leakage_nats)},
          {"formula", m.formula},
          {"provenance_note", m.provenance_note}};
}

json to_json(const CompositionLedger& l) {
  json steps = json::array();
  for (const auto& s : l.steps()) {
    steps.push_back({{"name", s.name}, {"leakage_bound", number(s.leakage_bound)}, {"conditional", s.conditional}});
  }
  return {{"schema", kSchema}, {"steps", steps}, {"total_nats", number(l.total())}};
}

json to_json(const VerificationReport& r) {
  json fams = json::object();
  for (const auto& [name, s] : r.families) {
    fams[name] = {{"evaluated", s.evaluated},        {"violations", s.violations}, {"skipped", s.skipped},
                  {"equalities", s.equalities},      {"max_slack", number(s.max_slack)},
                  {"min_slack", number(s.min_slack)}};
  }
  return {{"schema", kSchema},
          {"instances", r.instances},
          {"violations", r.violations()},
          {"curated_cases", r.curated_cases},
          {"curated_equalities", r.curated_equalities},
          {"families", fams}};
}

json to_json(const ExperimentResult& r) {
  json rows = json::array();
  for (const auto& e : r.per_eta) {
    rows.push_back({{"eta", e.eta},
                    {"empirical_tail", e.empirical_tail},
                    {"standard_error", e.standard_error},
                    {"bound", e.bound},
                    {"bound_raw", number(e.bound_raw)},
                    {"exact_sum_bound", e.exact_sum_bound},
                    {"vacuous", e.vacuous},
                    {"holds", e.holds}});
  }
  return {{"schema", kSchema},
          {"leakage_nats", r.leakage},
          {"leakage_cap", r.leakage_cap},
          {"mean_generalization_error", r.mean_generalization_error},
          {"per_eta", rows}};
}

json to_json(const DpRegimeComparison& c) {
  json out = {{"schema", kSchema},
              {"epsilon", c.epsilon},
              {"n", c.n},
              {"eta", c.eta},
              {"decay_exponent", c.decay_exponent},
              {"leakage_bound_decays", c.leakage_bound_decays},
              {"zero_rate", c.zero_rate},
              {"tighter_threshold", c.tighter_threshold},
              {"leakage_tighter", c.leakage_tighter},
              {"small_epsilon_regime", c.small_epsilon_regime},
              {"leakage_dp_bound", number(c.leakage_dp_bound)},
              {"stability_bound", c.stability_bound}};
  if (c.has_beta) {
    out["beta"] = {{"beta", c.beta},
                   {"epsilon_threshold", c.epsilon_threshold},
                   {"hoeffding_threshold", c.hoeffding_threshold},
                   {"leakage_side", number(c.leakage_side)},
                   {"max_info_side", c.max_info_side},
                   {"leakage_side_smaller", c.leakage_side_smaller}};
  }
  return out;
}

json error_json(const Error& e) {
  json out = {{"schema", kSchema}, {"error", std::string(to_string(e.code()))}, {"message", e.message()}};
  if (e.index()) out["index"] = *e.index();
  if (e.value()) out["value"] = number(*e.value());
  return out;
}

json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidArgument, "'" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace leakage::json
