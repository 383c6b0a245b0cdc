#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "curvtest/csv.hpp"
#include "curvtest/mc.hpp"
#include "curvtest/pipeline.hpp"
#include "curvtest/report.hpp"

using namespace curvtest;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path;
}

CsvSchema yx_schema() {
  CsvSchema schema;
  schema.y_column = "y";
  schema.x_columns = {"x"};
  return schema;
}

}  // namespace

TEST_CASE("csv record parsing handles quoting, CRLF, and blank lines") {
  const auto records = parse_csv_records("a,b\r\n\"1,5\",\"say \"\"hi\"\"\"\n\n2 , 3\n", ',');
  REQUIRE(records.size() == 3);
  CHECK(records[0] == std::vector<std::string>{"a", "b"});
  CHECK(records[1] == std::vector<std::string>{"1,5", "say \"hi\""});
  CHECK(records[2] == std::vector<std::string>{"2", "3"});  // unquoted fields trimmed
  CHECK_THROWS_AS(parse_csv_records("a,\"unterminated\n", ','), DataError);
}

TEST_CASE("csv ingestion selects columns by name") {
  const auto path = write_temp("curvtest_basic.csv", "id,y,x\n1,10,0.5\n2,20,1.5\n3,15,2.5\n");
  const Dataset data = ingest_csv(path.string(), yx_schema());
  CHECK(data.n() == 3);
  CHECK(data.q() == 1);
  CHECK(data.y[1] == doctest::Approx(20.0));
  CHECK(data.x(2, 0) == doctest::Approx(2.5));
  CHECK(data.column_names == std::vector<std::string>{"x"});
}

TEST_CASE("csv ingestion by 1-based index without a header") {
  const auto path = write_temp("curvtest_noheader.csv", "10;0.5\n20;1.5\n15;2.5\n");
  CsvSchema schema;
  schema.y_column = "1";
  schema.x_columns = {"2"};
  schema.header = false;
  schema.delimiter = ';';
  const Dataset data = ingest_csv(path.string(), schema);
  CHECK(data.n() == 3);
  CHECK(data.y[0] == doctest::Approx(10.0));
  CHECK(data.x(1, 0) == doctest::Approx(1.5));
  CHECK(data.column_names == std::vector<std::string>{"col2"});
}

TEST_CASE("csv ingestion error reporting") {
  const auto path = write_temp("curvtest_bad.csv", "y,x\n1,2\n3,oops\n5,6\n");
  try {
    ingest_csv(path.string(), yx_schema());
    FAIL("expected DataError");
  } catch (const DataError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("row 2") != std::string::npos);
    CHECK(msg.find("column 2") != std::string::npos);
    CHECK(msg.find("oops") != std::string::npos);
  }

  const auto missing = write_temp("curvtest_missing.csv", "y,z\n1,2\n3,4\n5,6\n");
  try {
    ingest_csv(missing.string(), yx_schema());
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("'x'") != std::string::npos);
  }

  const auto dup = write_temp("curvtest_dup.csv", "y,x,x\n1,2,3\n4,5,6\n7,8,9\n");
  CHECK_THROWS_AS(ingest_csv(dup.string(), yx_schema()), DataError);  // ambiguous header

  const auto ragged = write_temp("curvtest_ragged.csv", "y,x\n1,2\n3\n5,6\n");
  CHECK_THROWS_AS(ingest_csv(ragged.string(), yx_schema()), DataError);

  const auto empty = write_temp("curvtest_empty.csv", "");
  CHECK_THROWS_AS(ingest_csv(empty.string(), yx_schema()), DataError);
  CHECK_THROWS_AS(ingest_csv("/nonexistent/nope.csv", yx_schema()), DataError);

  CsvSchema overlap = yx_schema();
  overlap.x_columns = {"x", "y"};
  const auto ok = write_temp("curvtest_ok.csv", "y,x\n1,2\n3,4\n5,6\n");
  CHECK_THROWS_AS(ingest_csv(ok.string(), overlap), UsageError);
  CsvSchema twice = yx_schema();
  twice.x_columns = {"x", "x"};
  CHECK_THROWS_AS(ingest_csv(ok.string(), twice), UsageError);
}

TEST_CASE("row filters restrict the ingested sample") {
  const auto path = write_temp("curvtest_filter.csv",
                               "y,x,keep\n1,2,0\n3,4,1\n5,6,1\n2,1,1\n7,8,1\n9,10,0\n");
  CsvSchema schema = yx_schema();
  schema.filters = {parse_filter("keep==1"), parse_filter("y<=5")};
  const Dataset data = ingest_csv(path.string(), schema);
  REQUIRE(data.n() == 3);  // keep==1 drops rows 1 and 6; y<=5 drops y=7
  CHECK(data.y[0] == doctest::Approx(3.0));
  CHECK(data.y[1] == doctest::Approx(5.0));
  CHECK(data.y[2] == doctest::Approx(2.0));

  const RowFilter f = parse_filter(" x >= 4.5 ");
  CHECK(f.column == "x");
  CHECK(f.op == ">=");
  CHECK(f.value == doctest::Approx(4.5));
  CHECK_THROWS_AS(parse_filter("no-operator"), UsageError);
  CHECK_THROWS_AS(parse_filter(">=3"), UsageError);
  CHECK_THROWS_AS(parse_filter("x>=abc"), UsageError);
}

TEST_CASE("fnv1a64 known answers") {
  CHECK(fnv1a64("", 0) == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a", 1) == 0xaf63dc4c8601ec8cULL);
  CHECK(to_hex64(0xcbf29ce484222325ULL) == "cbf29ce484222325");
  CHECK(to_hex64(0x0000000000000001ULL) == "0000000000000001");

  const auto path = write_temp("curvtest_fnv.bin", "a");
  CHECK(fnv1a64_file(path.string()) == 0xaf63dc4c8601ec8cULL);
  CHECK_THROWS_AS(fnv1a64_file("/nonexistent/nope.bin"), DataError);
}

TEST_CASE("config json round-trips and reruns bit-identically") {
  TestConfig config;
  config.hypothesis = Hypothesis::Linear;
  config.flavor = TestFlavor::Local;
  config.kernel = make_kernel(KernelFamily::Epanechnikov);
  config.h_x = 0.6;                       // manual
  config.h_y = std::nullopt;              // auto
  config.grid = std::vector<double>{-1.0, 0.0, 1.0};
  config.scheme = BootstrapScheme::ResampleResiduals;
  config.n_bootstrap = 40;
  config.level = 0.10;
  config.seed = 99;
  config.estimator.kind = EstimatorKind::OLS;
  config.estimator.intercept = true;
  config.pruning = EvalMode::CompactSupportPrune;

  const json doc = config_to_json(config);
  const TestConfig back = config_from_json(doc);
  CHECK(back.hypothesis == config.hypothesis);
  CHECK(back.flavor == config.flavor);
  CHECK(back.kernel.family == config.kernel.family);
  CHECK_FALSE(back.kernel.truncation_radius.has_value());
  REQUIRE(back.h_x.has_value());
  CHECK(*back.h_x == doctest::Approx(0.6));
  CHECK_FALSE(back.h_y.has_value());  // auto mode survives the round trip
  REQUIRE(back.grid.has_value());
  CHECK(back.grid->size() == 3);
  CHECK(back.scheme == config.scheme);
  CHECK(back.n_bootstrap == 40);
  CHECK(back.level == doctest::Approx(0.10));
  CHECK(back.seed == 99);
  CHECK(back.estimator.kind == EstimatorKind::OLS);
  CHECK(back.estimator.intercept);
  CHECK(back.pruning == EvalMode::CompactSupportPrune);
  CHECK_FALSE(back.beta_fixed.has_value());

  // The restored config reproduces the original run exactly.
  McDesign design;
  design.id = McDesignId::D2;
  design.n = 40;
  const Dataset data = generate_design(design, 21);
  const TestReport a = run_test(data, config);
  const TestReport b = run_test(data, back);
  CHECK(a.statistic == b.statistic);
  CHECK(a.critical_value == b.critical_value);
  CHECK(a.decision == b.decision);
  CHECK(rederive_decision(a) == a.decision);
}

TEST_CASE("beta_fixed and truncation survive the config round trip") {
  TestConfig config;
  config.kernel = make_kernel(KernelFamily::Gaussian, 4.0);
  Eigen::VectorXd beta(2);
  beta << -1.5, 2.0;
  config.beta_fixed = beta;
  const TestConfig back = config_from_json(config_to_json(config));
  REQUIRE(back.kernel.truncation_radius.has_value());
  CHECK(*back.kernel.truncation_radius == doctest::Approx(4.0));
  REQUIRE(back.beta_fixed.has_value());
  CHECK((*back.beta_fixed - beta).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("report documents are deterministic up to runtime fields") {
  McDesign design;
  design.id = McDesignId::D1;
  design.n = 35;
  const Dataset data = generate_design(design, 3);
  TestConfig config;
  config.hypothesis = Hypothesis::Concave;
  config.flavor = TestFlavor::Global;
  config.kernel = make_kernel(KernelFamily::Gaussian);
  config.n_bootstrap = 30;
  config.seed = 12;

  auto render = [&]() {
    const TestReport report = run_test(data, config);
    json result = test_report_to_json(report, data.n());
    result.erase("runtime_ms");
    InputInfo info;
    info.path = "mem";
    info.fnv1a64 = "0";
    info.n = data.n();
    info.q = data.q();
    info.tie_fraction = data.tie_fraction;
    return make_document("test", result, info,
                         config_to_json(config, report.h_x_used, std::nullopt, std::nullopt))
        .dump(2);
  };
  CHECK(render() == render());
}

TEST_CASE("report json carries the statistic blocks") {
  McDesign design;
  design.id = McDesignId::D1;
  design.n = 30;
  const Dataset data = generate_design(design, 15);
  TestConfig config;
  config.flavor = TestFlavor::Local;
  config.hypothesis = Hypothesis::Convex;
  config.scheme = BootstrapScheme::ResampleResiduals;
  config.kernel = make_kernel(KernelFamily::Gaussian);
  config.n_bootstrap = 25;
  config.seed = 5;
  const TestReport report = run_test(data, config);
  const json doc = test_report_to_json(report, data.n());
  CHECK(doc.at("flavor") == "local");
  CHECK(doc.at("hypothesis") == "convexity");
  REQUIRE(doc.contains("local"));
  CHECK(doc.at("local").at("grid").size() == 17);
  CHECK(doc.at("local").at("values").size() == 17);
  const double n = static_cast<double>(data.n());
  CHECK(doc.at("local").at("statistic_scaled_n3").get<double>() ==
        doctest::Approx(report.statistic * n * (n - 1.0) * (n - 2.0)).epsilon(1e-12));
  CHECK(doc.at("bootstrap_quantiles").is_array());

  const json row = rejection_row_to_json(RejectionRow{});
  CHECK(row.contains("design"));
  CHECK(row.contains("frequency"));
  CHECK(row.contains("wall_ms"));
}
