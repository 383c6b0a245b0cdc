#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "curvtest/csv.hpp"
#include "curvtest/mc.hpp"
#include "curvtest/pipeline.hpp"
#include "curvtest/report.hpp"
#include "curvtest/version.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace curvtest;

// ----------------------------------------------------------------------
// Flag parsing helpers.
// ----------------------------------------------------------------------

KernelFamily kernel_from_name(const std::string& name) {
  if (name == "gaussian") return KernelFamily::Gaussian;
  if (name == "epanechnikov") return KernelFamily::Epanechnikov;
  if (name == "biweight") return KernelFamily::Biweight;
  throw UsageError("unknown kernel '" + name + "' (gaussian|epanechnikov|biweight)");
}

Hypothesis hypothesis_from_name(const std::string& name) {
  if (name == "concavity" || name == "concave") return Hypothesis::Concave;
  if (name == "linearity" || name == "linear") return Hypothesis::Linear;
  if (name == "convexity" || name == "convex") return Hypothesis::Convex;
  throw UsageError("unknown hypothesis '" + name + "' (concavity|linearity|convexity)");
}

TestFlavor flavor_from_name(const std::string& name) {
  if (name == "global") return TestFlavor::Global;
  if (name == "local") return TestFlavor::Local;
  throw UsageError("unknown flavor '" + name + "' (global|local)");
}

BootstrapScheme scheme_from_name(const std::string& name) {
  if (name == "wild") return BootstrapScheme::WildTwoPoint;
  if (name == "resample") return BootstrapScheme::ResampleResiduals;
  throw UsageError("unknown scheme '" + name + "' (wild|resample)");
}

EstimatorKind estimator_from_name(const std::string& name) {
  if (name == "ols") return EstimatorKind::OLS;
  if (name == "mrc") return EstimatorKind::MRC;
  throw UsageError("unknown estimator '" + name + "' (ols|mrc)");
}

EvalMode pruning_from_name(const std::string& name) {
  if (name == "exact") return EvalMode::Exact;
  if (name == "prune") return EvalMode::CompactSupportPrune;
  throw UsageError("unknown pruning mode '" + name + "' (exact|prune)");
}

McDesignId design_from_name(const std::string& name) {
  if (name == "D0" || name == "d0") return McDesignId::D0;
  if (name == "D1" || name == "d1") return McDesignId::D1;
  if (name == "D2" || name == "d2") return McDesignId::D2;
  if (name == "D3" || name == "d3") return McDesignId::D3;
  if (name == "D4" || name == "d4") return McDesignId::D4;
  throw UsageError("unknown design '" + name + "' (D0..D4)");
}

ErrorDist error_dist_from_name(const std::string& name) {
  if (name == "normal") return ErrorDist::StdNormal;
  if (name == "gumbel") return ErrorDist::GumbelCentered;
  throw UsageError("unknown error distribution '" + name + "' (normal|gumbel)");
}

std::optional<double> parse_auto_or_value(const std::string& text, const std::string& flag) {
  if (text == "auto") return std::nullopt;
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos == text.size()) return v;
  } catch (...) {
  }
  throw UsageError("--" + flag + " expects 'auto' or a number, got '" + text + "'");
}

// "auto" | "lo:step:hi" | "v1,v2,..."
std::optional<std::vector<double>> parse_grid(const std::string& text) {
  if (text == "auto") return std::nullopt;
  std::vector<double> points;
  auto to_num = [&](const std::string& tok) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(tok, &pos);
      if (pos == tok.size()) return v;
    } catch (...) {
    }
    throw UsageError("bad grid token '" + tok + "'");
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t pos; (pos = text.find(':', start)) != std::string::npos; start = pos + 1) {
      parts.push_back(text.substr(start, pos - start));
    }
    parts.push_back(text.substr(start));
    if (parts.size() != 3) throw UsageError("grid range must be lo:step:hi");
    const double lo = to_num(parts[0]), step = to_num(parts[1]), hi = to_num(parts[2]);
    if (step <= 0.0 || hi < lo) throw UsageError("grid range must have step > 0 and hi >= lo");
    const int count = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
    for (int t = 0; t < count; ++t) points.push_back(lo + t * step);
    return points;
  }
  std::size_t start = 0;
  for (std::size_t pos; (pos = text.find(',', start)) != std::string::npos; start = pos + 1) {
    points.push_back(to_num(text.substr(start, pos - start)));
  }
  points.push_back(to_num(text.substr(start)));
  return points;
}

char parse_delimiter(const std::string& text) {
  if (text == "tab" || text == "\\t") return '\t';
  if (text.size() == 1) return text[0];
  throw UsageError("--delimiter expects a single character or 'tab'");
}

// ----------------------------------------------------------------------
// Shared option bundles.
// ----------------------------------------------------------------------

struct CommonOpts {
  std::string hypothesis = "concavity";
  std::string flavor = "global";
  std::string kernel = "gaussian";
  double truncation = 0.0;
  bool has_truncation = false;
  std::string bandwidth_x = "auto";
  std::string bandwidth_y = "auto";
  std::string grid = "auto";
  std::string scheme;  // empty: wild for global, resample for local
  int bootstrap = 500;
  double level = 0.05;
  std::uint64_t seed = 0;
  std::string estimator = "ols";
  bool intercept = false;
  std::vector<double> beta;
  std::string pruning = "exact";
  int threads = 0;
  std::string out;
};

struct IoOpts {
  std::string input;
  std::string y_column = "y";
  std::vector<std::string> x_columns;
  bool no_header = false;
  std::string delimiter = ",";
  std::vector<std::string> filters;
};

struct McOpts {
  std::string design = "D0";
  int n = 100;
  int reps = 200;
  std::string error_dist = "normal";
  bool full_scale = false;
};

void add_common_options(CLI::App* cmd, CommonOpts& opts, bool with_test_shape) {
  if (with_test_shape) {
    cmd->add_option("--hypothesis", opts.hypothesis, "concavity|linearity|convexity");
    cmd->add_option("--flavor", opts.flavor, "global|local");
    cmd->add_option("--scheme", opts.scheme,
                    "wild|resample (default: wild for global, resample for local)");
    cmd->add_option("--bootstrap", opts.bootstrap, "bootstrap replications");
    cmd->add_option("--level", opts.level, "test level alpha");
    cmd->add_option("--bandwidth-x", opts.bandwidth_x, "'auto' or a value");
    cmd->add_option("--bandwidth-y", opts.bandwidth_y, "'auto' or a value (local)");
    cmd->add_option("--grid", opts.grid, "'auto', lo:step:hi, or v1,v2,... (local)");
    cmd->add_option("--pruning", opts.pruning, "exact|prune");
    cmd->add_option("--beta", opts.beta, "fix beta instead of estimating (diagnostics)")
        ->delimiter(',');
  }
  cmd->add_option("--kernel", opts.kernel, "gaussian|epanechnikov|biweight");
  cmd->add_option("--truncation", opts.truncation, "gaussian truncation radius")
      ->check([&opts](const std::string&) {
        opts.has_truncation = true;
        return std::string();
      });
  cmd->add_option("--estimator", opts.estimator, "ols|mrc");
  cmd->add_flag("--intercept", opts.intercept, "include an intercept (ols)");
  cmd->add_option("--seed", opts.seed, "rng seed");
  cmd->add_option("--threads", opts.threads, "worker threads (0 = library default)");
  cmd->add_option("--out", opts.out, "write the report document to this path");
}

void add_io_options(CLI::App* cmd, IoOpts& opts) {
  cmd->add_option("--input", opts.input, "csv file")->required();
  cmd->add_option("--y-column", opts.y_column, "outcome column (name or 1-based index)");
  cmd->add_option("--x-columns", opts.x_columns, "regressor columns")->delimiter(',');
  cmd->add_flag("--no-header", opts.no_header, "file has no header row");
  cmd->add_option("--delimiter", opts.delimiter, "field delimiter (default ',')");
  cmd->add_option("--filter", opts.filters, "row filter like 'amount>=1000' (repeatable)");
}

TestConfig build_config(const CommonOpts& opts) {
  TestConfig config;
  config.hypothesis = hypothesis_from_name(opts.hypothesis);
  config.flavor = flavor_from_name(opts.flavor);
  config.kernel = make_kernel(kernel_from_name(opts.kernel),
                              opts.has_truncation ? std::optional<double>(opts.truncation)
                                                  : std::nullopt);
  config.h_x = parse_auto_or_value(opts.bandwidth_x, "bandwidth-x");
  config.h_y = parse_auto_or_value(opts.bandwidth_y, "bandwidth-y");
  config.grid = parse_grid(opts.grid);
  if (opts.scheme.empty()) {
    config.scheme = config.flavor == TestFlavor::Global ? BootstrapScheme::WildTwoPoint
                                                        : BootstrapScheme::ResampleResiduals;
  } else {
    config.scheme = scheme_from_name(opts.scheme);
  }
  config.n_bootstrap = opts.bootstrap;
  config.level = opts.level;
  config.seed = opts.seed;
  config.estimator.kind = estimator_from_name(opts.estimator);
  config.estimator.intercept = opts.intercept;
  config.pruning = pruning_from_name(opts.pruning);
  if (!opts.beta.empty()) {
    Eigen::VectorXd beta(opts.beta.size());
    for (std::size_t i = 0; i < opts.beta.size(); ++i) beta[i] = opts.beta[i];
    config.beta_fixed = beta;
  }
  return config;
}

CsvSchema build_schema(const IoOpts& opts) {
  CsvSchema schema;
  schema.y_column = opts.y_column;
  schema.x_columns = opts.x_columns.empty() ? std::vector<std::string>{"x"} : opts.x_columns;
  schema.header = !opts.no_header;
  schema.delimiter = parse_delimiter(opts.delimiter);
  for (const auto& expr : opts.filters) schema.filters.push_back(parse_filter(expr));
  return schema;
}

void apply_threads(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

void emit(const json& doc, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << doc.dump(2) << "\n";
  } else {
    std::ofstream out(out_path);
    if (!out) throw DataError("cannot write to '" + out_path + "'");
    out << doc.dump(2) << "\n";
  }
}

// ----------------------------------------------------------------------
// Subcommand bodies.
// ----------------------------------------------------------------------

int run_test_cmd(const CommonOpts& common, const IoOpts& io) {
  apply_threads(common.threads);
  const CsvSchema schema = build_schema(io);
  const Dataset data = ingest_csv(io.input, schema);
  const TestConfig config = build_config(common);
  const TestReport report = run_test(data, config);

  InputInfo info;
  info.path = io.input;
  info.fnv1a64 = to_hex64(fnv1a64_file(io.input));
  info.n = data.n();
  info.q = data.q();
  info.tie_fraction = data.tie_fraction;

  const json config_json = config_to_json(
      config, report.h_x_used, report.h_y_used,
      report.curve ? std::optional<std::vector<double>>(report.curve->grid) : std::nullopt);
  emit(make_document("test", test_report_to_json(report, data.n()), info, config_json),
       common.out);

  std::cerr << "test " << hypothesis_name(config.hypothesis) << " (" << flavor_name(config.flavor)
            << "): statistic=" << report.statistic << " critical=" << report.critical_value
            << " -> " << decision_name(report.decision) << "\n";
  if (report.tie_warning) {
    std::cerr << "warning: " << report.tie_fraction * 100.0
              << "% tied outcomes; the statistic treats ties as neutral\n";
  }
  return 0;
}

int run_mc_cmd(CommonOpts& common, const McOpts& mc_opts) {
  apply_threads(common.threads);
  McDesign design;
  design.id = design_from_name(mc_opts.design);
  design.error_dist = error_dist_from_name(mc_opts.error_dist);
  design.n = mc_opts.n;

  int reps = mc_opts.reps;
  CommonOpts adjusted = common;
  if (mc_opts.full_scale) {
    reps = 1000;
    adjusted.bootstrap = 500;
    std::cerr << "full-scale profile: 1000 replications x 500 bootstrap draws; "
                 "this can take hours at larger n\n";
  }
  // The fixed simulation grid matches outcomes on a standard-normal scale.
  if (adjusted.grid == "auto" && flavor_from_name(adjusted.flavor) == TestFlavor::Local) {
    adjusted.grid = "-2:0.25:2";
  }
  const TestConfig config = build_config(adjusted);
  if (config.estimator.kind == EstimatorKind::MRC) {
    std::cerr << "note: mrc re-estimation runs inside every bootstrap replicate; expect "
              << reps << " x " << config.n_bootstrap << " fits\n";
  }
  const RejectionRow row = run_mc(design, reps, config);
  emit(make_document("mc", rejection_row_to_json(row), std::nullopt, config_to_json(config)),
       common.out);
  std::cerr << "mc " << design_name(design.id) << " n=" << design.n << " reps=" << row.reps
            << ": rejection frequency " << row.frequency << " (se " << row.std_error << ")\n";
  return 0;
}

int run_kernel_check_cmd(const CommonOpts& common) {
  const KernelSpec spec = make_kernel(kernel_from_name(common.kernel),
                                      common.has_truncation
                                          ? std::optional<double>(common.truncation)
                                          : std::nullopt);
  const KernelConditionResult res = kernel_condition_integral(spec);
  json result = {{"family", kernel_family_name(spec.family)},
                 {"truncation_radius",
                  spec.truncation_radius ? json(*spec.truncation_radius) : json(nullptr)},
                 {"value", res.value},
                 {"positive", res.positive},
                 {"refinement_levels", res.refinement_levels}};
  json config = {{"kernel",
                  {{"family", kernel_family_name(spec.family)},
                   {"truncation_radius",
                    spec.truncation_radius ? json(*spec.truncation_radius) : json(nullptr)}}}};
  emit(make_document("kernel-check", result, std::nullopt, config), common.out);
  std::cerr << "kernel condition (" << kernel_family_name(spec.family) << "): " << res.value
            << (res.positive ? " > 0\n" : " <= 0\n");
  return 0;
}

int run_bandwidth_cmd(const CommonOpts& common, const IoOpts& io) {
  apply_threads(common.threads);
  const Dataset data = ingest_csv(io.input, build_schema(io));
  EstimatorSpec estimator;
  estimator.kind = estimator_from_name(common.estimator);
  estimator.intercept = common.intercept;
  const EstimatedModel model = fit_model(data, estimator);
  const Bandwidth hx = index_diff_bandwidth(model.index);
  const Bandwidth hy =
      bandwidth_rot(std::span<const double>(data.y.data(), data.y.size()));

  InputInfo info;
  info.path = io.input;
  info.fnv1a64 = to_hex64(fnv1a64_file(io.input));
  info.n = data.n();
  info.q = data.q();
  info.tie_fraction = data.tie_fraction;

  json result = {{"h_x", hx.value},
                 {"h_y", hy.value},
                 {"beta_hat", std::vector<double>(model.beta.data(),
                                                  model.beta.data() + model.beta.size())},
                 {"intercept_hat", model.intercept}};
  json config = {{"estimator",
                  {{"kind", estimator_name(estimator.kind)}, {"intercept", estimator.intercept}}}};
  emit(make_document("bandwidth", result, info, config), common.out);
  std::cerr << "rule-of-thumb bandwidths: h_x=" << hx.value << " h_y=" << hy.value << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bootstrap curvature tests for transformation models"};
  app.set_version_flag("--version", std::string(curvtest::kVersion));
  app.require_subcommand(1);

  CommonOpts test_common, mc_common, kernel_common, bw_common;
  IoOpts test_io, bw_io;
  McOpts mc_opts;

  CLI::App* test_cmd = app.add_subcommand("test", "run a curvature test on a csv file");
  add_io_options(test_cmd, test_io);
  add_common_options(test_cmd, test_common, true);

  CLI::App* mc_cmd = app.add_subcommand("mc", "size/power simulation for designs D0..D4");
  mc_cmd->add_option("--design", mc_opts.design, "D0|D1|D2|D3|D4");
  mc_cmd->add_option("--n", mc_opts.n, "sample size per replication");
  mc_cmd->add_option("--reps", mc_opts.reps, "monte carlo replications");
  mc_cmd->add_option("--error", mc_opts.error_dist, "normal|gumbel");
  mc_cmd->add_flag("--full-scale", mc_opts.full_scale, "1000 reps x 500 bootstrap draws");
  add_common_options(mc_cmd, mc_common, true);

  CLI::App* kernel_cmd =
      app.add_subcommand("kernel-check", "evaluate the kernel positivity condition");
  add_common_options(kernel_cmd, kernel_common, false);

  CLI::App* bw_cmd = app.add_subcommand("bandwidth", "report rule-of-thumb bandwidths");
  add_io_options(bw_cmd, bw_io);
  add_common_options(bw_cmd, bw_common, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\nrun with --help for options\n";
    return 1;
  }

  try {
    if (app.got_subcommand(test_cmd)) return run_test_cmd(test_common, test_io);
    if (app.got_subcommand(mc_cmd)) return run_mc_cmd(mc_common, mc_opts);
    if (app.got_subcommand(kernel_cmd)) return run_kernel_check_cmd(kernel_common);
    if (app.got_subcommand(bw_cmd)) return run_bandwidth_cmd(bw_common, bw_io);
    std::cerr << "usage error: no subcommand\n";
    return 1;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
