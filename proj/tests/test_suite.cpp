#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "etherstar/checks.hpp"
#include "etherstar/quantization.hpp"
#include "etherstar/report.hpp"
#include "etherstar/sampling.hpp"

using namespace etherstar;

TEST_CASE("sampler is reproducible and respects its model") {
  const ModelPtr flat = make_model("flat:2");
  const ModelPtr sphere = make_model("sphere");
  Sampler a(99), b(99);
  for (int i = 0; i < 20; ++i) {
    const Point pa = a.point(*flat, 2.0), pb = b.point(*flat, 2.0);
    CHECK(pa.coords == pb.coords);
    CHECK(pa.coords.size() == 4);
    CHECK(pa.coords.cwiseAbs().maxCoeff() <= 2.0);
    const Point s = a.point(*sphere);
    b.point(*sphere);
    CHECK(std::abs(s.coords.norm() - 1.0) < 1e-14);
    const Point n = a.near(*sphere, s, 0.3);
    b.near(*sphere, s, 0.3);
    CHECK(std::acos(std::clamp(n.coords.dot(s.coords), -1.0, 1.0)) <= 0.3 + 1e-12);
    const Vec v = a.tangent(*sphere, s, 1.0);
    b.tangent(*sphere, s, 1.0);
    CHECK(std::abs(v.dot(s.coords)) < 1e-14);
    CHECK(v.norm() >= 0.1 - 1e-14);
    CHECK(v.norm() <= 1.0 + 1e-14);
  }
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02e23, 0.0}) CHECK(std::stod(format_number(v)) == v);
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(INFINITY) == "inf");
  CHECK(format_number(-INFINITY) == "-inf");
  CHECK(format_number(NAN) == "nan");
}

TEST_CASE("csv quoting follows RFC 4180") {
  Table t;
  t.columns = {"name", "value", "flag"};
  t.add({std::string("plain"), 1.5, true});
  t.add({std::string("with,comma"), 2LL, false});
  t.add({std::string("say \"hi\"\nthere"), NAN, true});
  std::ostringstream os;
  write_csv(os, t);
  CHECK(os.str() ==
        "name,value,flag\r\n"
        "plain,1.5,true\r\n"
        "\"with,comma\",2,false\r\n"
        "\"say \"\"hi\"\"\nthere\",nan,true\r\n");
  CHECK_THROWS_AS(t.add({1.0}), DomainError);
}

TEST_CASE("json report carries the schema version and header") {
  Table t;
  t.columns = {"a", "b"};
  t.add({1.0, std::string("x")});
  const nlohmann::json j = report_json("check", "pass", {{"seed", 7}}, t);
  CHECK(j["schema"] == kReportSchema);
  CHECK(j["command"] == "check");
  CHECK(j["status"] == "pass");
  CHECK(j["seed"] == 7);
  CHECK(j["columns"].size() == 2);
  CHECK(j["rows"].size() == 1);
}

TEST_CASE("check suites pass and are deterministic") {
  CheckConfig cfg;
  cfg.samples = 6;
  for (const char* id : {"flat:1", "flat:2", "sphere"}) {
    CAPTURE(id);
    const ModelPtr m = make_model(id);
    const SuiteReport a = run_checks(*m, cfg);
    const SuiteReport b = run_checks(*m, cfg);
    for (const CheckResult& r : a.checks) {
      CAPTURE(r.name);
      CAPTURE(r.max_residual);
      CHECK(r.passed);
    }
    CHECK(a.passed());
    const auto dump = [](const SuiteReport& r) { return report_json("check", "pass", {}, suite_table(r, false)).dump(); };
    CHECK(dump(a) == dump(b));
  }
  // a different seed draws different samples
  const ModelPtr flat = make_model("flat:1");
  CheckConfig other = cfg;
  other.seed = 8;
  other.only = "ether.zero_curvature";
  cfg.only = other.only;
  const SuiteReport x = run_checks(*flat, cfg), y = run_checks(*flat, other);
  REQUIRE(x.checks.size() == 1);
  CHECK(x.checks[0].max_residual != y.checks[0].max_residual);
}

TEST_CASE("quantization condition on the sphere") {
  const ModelPtr sphere = make_model("sphere");
  double change = 1.0;
  CHECK(std::abs(symplectic_volume(*sphere, 1e-12, &change) - 4 * std::numbers::pi) < 1e-10);
  CHECK(change < 1e-12);
  for (double hbar : {2.0, 1.0, 2.0 / 3.0}) {
    const QuantizationReport q = quantization_check(*sphere, hbar);
    CAPTURE(hbar);
    CHECK(q.passed);
    CHECK(q.distance < 1e-6);
    CHECK(q.chern == 2);
  }
  const QuantizationReport bad = quantization_check(*sphere, 0.8);
  CHECK_FALSE(bad.passed);
  CHECK(std::abs(bad.distance - 0.5) < 1e-9);

  const QuantizationReport flat = quantization_check(*make_model("flat:1"), 0.3);
  CHECK(flat.vacuous);
  CHECK(flat.passed);
  CHECK_THROWS_AS(symplectic_volume(*make_model("flat:1")), DomainError);
}
