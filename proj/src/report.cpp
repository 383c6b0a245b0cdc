#include "curvtest/report.hpp"

#include <fstream>
#include <sstream>

#include "curvtest/version.hpp"

namespace curvtest {

std::uint64_t fnv1a64(const void* bytes, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(bytes);
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < len; ++i) {
    hash ^= p[i];
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  return fnv1a64(text.data(), text.size());
}

std::string to_hex64(std::uint64_t value) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[value & 0xF];
    value >>= 4;
  }
  return out;
}

json input_to_json(const InputInfo& info) {
  return json{{"path", info.path},
              {"fnv1a64", info.fnv1a64},
              {"n", info.n},
              {"q", info.q},
              {"tie_fraction", info.tie_fraction}};
}

namespace {

json bandwidth_block(const std::optional<double>& manual,
                     const std::optional<double>& resolved) {
  json block;
  block["mode"] = manual ? "manual" : "auto";
  block["value"] = manual ? json(*manual) : json(nullptr);
  if (resolved) {
    block["resolved"] = *resolved;
  } else if (manual) {
    block["resolved"] = *manual;
  } else {
    block["resolved"] = nullptr;
  }
  return block;
}

}  // namespace

json config_to_json(const TestConfig& config, const std::optional<double>& resolved_h_x,
                    const std::optional<double>& resolved_h_y,
                    const std::optional<std::vector<double>>& resolved_grid) {
  json doc;
  doc["hypothesis"] = hypothesis_name(config.hypothesis);
  doc["flavor"] = flavor_name(config.flavor);
  doc["kernel"] = {{"family", kernel_family_name(config.kernel.family)},
                   {"truncation_radius", config.kernel.truncation_radius
                                             ? json(*config.kernel.truncation_radius)
                                             : json(nullptr)}};
  doc["bandwidth_x"] = bandwidth_block(config.h_x, resolved_h_x);
  doc["bandwidth_y"] = bandwidth_block(config.h_y, resolved_h_y);
  json grid;
  grid["mode"] = config.grid ? "manual" : "auto";
  grid["points"] = config.grid ? json(*config.grid) : json(nullptr);
  if (resolved_grid) {
    grid["resolved"] = *resolved_grid;
  } else if (config.grid) {
    grid["resolved"] = *config.grid;
  } else {
    grid["resolved"] = nullptr;
  }
  doc["grid"] = grid;
  doc["scheme"] = scheme_name(config.scheme);
  doc["n_bootstrap"] = config.n_bootstrap;
  doc["level"] = config.level;
  doc["seed"] = config.seed;
  doc["estimator"] = {{"kind", estimator_name(config.estimator.kind)},
                      {"intercept", config.estimator.intercept},
                      {"mrc_multistarts", config.estimator.mrc.multistarts},
                      {"mrc_refine_iters", config.estimator.mrc.refine_iters}};
  doc["pruning"] = mode_name(config.pruning);
  if (config.beta_fixed) {
    doc["beta_fixed"] = std::vector<double>(config.beta_fixed->data(),
                                            config.beta_fixed->data() + config.beta_fixed->size());
  } else {
    doc["beta_fixed"] = nullptr;
  }
  return doc;
}

TestConfig config_from_json(const json& doc) {
  TestConfig config;
  const std::string hyp = doc.at("hypothesis").get<std::string>();
  if (hyp == "concavity") config.hypothesis = Hypothesis::Concave;
  else if (hyp == "linearity") config.hypothesis = Hypothesis::Linear;
  else if (hyp == "convexity") config.hypothesis = Hypothesis::Convex;
  else throw UsageError("unknown hypothesis '" + hyp + "'");

  const std::string flavor = doc.at("flavor").get<std::string>();
  if (flavor == "global") config.flavor = TestFlavor::Global;
  else if (flavor == "local") config.flavor = TestFlavor::Local;
  else throw UsageError("unknown flavor '" + flavor + "'");

  const json& kern = doc.at("kernel");
  const std::string family = kern.at("family").get<std::string>();
  if (family == "gaussian") config.kernel.family = KernelFamily::Gaussian;
  else if (family == "epanechnikov") config.kernel.family = KernelFamily::Epanechnikov;
  else if (family == "biweight") config.kernel.family = KernelFamily::Biweight;
  else throw UsageError("unknown kernel family '" + family + "'");
  if (!kern.at("truncation_radius").is_null()) {
    config.kernel.truncation_radius = kern.at("truncation_radius").get<double>();
  }

  const json& bx = doc.at("bandwidth_x");
  if (bx.at("mode").get<std::string>() == "manual") config.h_x = bx.at("value").get<double>();
  const json& by = doc.at("bandwidth_y");
  if (by.at("mode").get<std::string>() == "manual") config.h_y = by.at("value").get<double>();
  const json& grid = doc.at("grid");
  if (grid.at("mode").get<std::string>() == "manual") {
    config.grid = grid.at("points").get<std::vector<double>>();
  }

  const std::string scheme = doc.at("scheme").get<std::string>();
  if (scheme == "wild") config.scheme = BootstrapScheme::WildTwoPoint;
  else if (scheme == "resample") config.scheme = BootstrapScheme::ResampleResiduals;
  else throw UsageError("unknown scheme '" + scheme + "'");

  config.n_bootstrap = doc.at("n_bootstrap").get<int>();
  config.level = doc.at("level").get<double>();
  config.seed = doc.at("seed").get<std::uint64_t>();

  const json& est = doc.at("estimator");
  const std::string kind = est.at("kind").get<std::string>();
  if (kind == "ols") config.estimator.kind = EstimatorKind::OLS;
  else if (kind == "mrc") config.estimator.kind = EstimatorKind::MRC;
  else throw UsageError("unknown estimator '" + kind + "'");
  config.estimator.intercept = est.at("intercept").get<bool>();
  config.estimator.mrc.multistarts = est.at("mrc_multistarts").get<int>();
  config.estimator.mrc.refine_iters = est.at("mrc_refine_iters").get<int>();

  const std::string pruning = doc.at("pruning").get<std::string>();
  if (pruning == "exact") config.pruning = EvalMode::Exact;
  else if (pruning == "prune") config.pruning = EvalMode::CompactSupportPrune;
  else throw UsageError("unknown pruning mode '" + pruning + "'");

  if (!doc.at("beta_fixed").is_null()) {
    const auto vals = doc.at("beta_fixed").get<std::vector<double>>();
    Eigen::VectorXd beta(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i) beta[i] = vals[i];
    config.beta_fixed = beta;
  }
  return config;
}

json test_report_to_json(const TestReport& report, Eigen::Index n) {
  json doc;
  doc["flavor"] = flavor_name(report.flavor);
  doc["hypothesis"] = hypothesis_name(report.hypothesis);
  doc["statistic"] = report.statistic;
  doc["decision"] = decision_name(report.decision);
  doc["critical_value"] = report.critical_value;
  doc["quantile_level"] = report.quantile_level;
  doc["reject_below"] = report.reject_below;
  json quants = json::array();
  for (const auto& [level, value] : report.bootstrap_quantiles) {
    quants.push_back(json::array({level, value}));
  }
  doc["bootstrap_quantiles"] = quants;
  doc["beta_hat"] = std::vector<double>(report.beta_hat.data(),
                                        report.beta_hat.data() + report.beta_hat.size());
  doc["intercept_hat"] = report.intercept_hat;
  doc["h_x_used"] = report.h_x_used;
  doc["h_y_used"] = report.h_y_used ? json(*report.h_y_used) : json(nullptr);
  doc["tie_fraction"] = report.tie_fraction;
  doc["tie_warning"] = report.tie_warning;
  doc["runtime_ms"] = report.runtime_ms;
  if (report.global_stat) {
    doc["global"] = {{"u_n", report.global_stat->u_n},
                     {"s_n", report.global_stat->s_n},
                     {"n_triples_contributing", report.global_stat->n_triples_contributing}};
  }
  if (report.curve) {
    doc["local"] = {{"grid", report.curve->grid},
                    {"values", report.curve->values},
                    {"aggregate_inf", report.curve->aggregate_inf},
                    {"aggregate_sup", report.curve->aggregate_sup},
                    {"aggregate_sup_abs", report.curve->aggregate_sup_abs}};
    // Display convention for small local statistics: the aggregate
    // multiplied by n(n-1)(n-2).
    const double nn = static_cast<double>(n);
    doc["local"]["statistic_scaled_n3"] = report.statistic * nn * (nn - 1.0) * (nn - 2.0);
  }
  return doc;
}

json rejection_row_to_json(const RejectionRow& row) {
  return json{{"design", design_name(row.design.id)},
              {"error_dist", error_dist_name(row.design.error_dist)},
              {"n", row.design.n},
              {"flavor", flavor_name(row.flavor)},
              {"hypothesis", hypothesis_name(row.hypothesis)},
              {"scheme", scheme_name(row.scheme)},
              {"reps", row.reps},
              {"n_bootstrap", row.n_bootstrap},
              {"level", row.level},
              {"seed", row.seed},
              {"rejections", row.rejections},
              {"frequency", row.frequency},
              {"std_error", row.std_error},
              {"wall_ms", row.wall_ms}};
}

json make_document(const std::string& subcommand, json result,
                   std::optional<InputInfo> input, json config) {
  json doc;
  doc["tool"] = kToolName;
  doc["version"] = kVersion;
  doc["subcommand"] = subcommand;
  if (input) doc["input"] = input_to_json(*input);
  doc["config"] = std::move(config);
  doc["result"] = std::move(result);
  return doc;
}

}  // namespace curvtest
