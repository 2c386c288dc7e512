#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "fracsko/error.hpp"
#include "fracsko/experiments.hpp"

using namespace fracsko;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no fracsko::Error thrown";
  return ErrorCode::DomainError;
}

double metric(const ExperimentReport& r, const std::string& name) {
  const Metric* m = r.find(name);
  if (!m) {
    ADD_FAILURE() << "missing metric " << name;
    return NAN;
  }
  return m->value;
}

std::string without_wall_clock(const std::string& js) {
  return std::regex_replace(js, std::regex("\"wall_seconds\": *[-0-9.eE+]+"), "\"wall_seconds\": 0");
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(ExactVsChaos, DefaultsPassAndZeroCoefficientIsExact) {
  RunConfig c;
  c.samples = 20;
  EXPECT_TRUE(cmd_exact_vs_chaos(c).passed());
  c.a = 0.0;
  const ExperimentReport r = cmd_exact_vs_chaos(c);
  EXPECT_EQ(metric(r, "sup_abs_error"), 0.0);
}

TEST(ExactVsChaos, FirstOrderTruncationFails) {
  RunConfig c;
  c.samples = 20;
  c.truncation = 1;
  const ExperimentReport r = cmd_exact_vs_chaos(c);
  EXPECT_FALSE(r.passed());
  EXPECT_GT(metric(r, "sup_abs_error"), 1e-3);
}

TEST(ExactVsChaos, RejectsSheetParameters) {
  RunConfig c;
  c.beta = 0.4;
  EXPECT_EQ(code_of([&] { cmd_exact_vs_chaos(c); }), ErrorCode::ConfigError);
}

TEST(EulerStudy, ZeroCoefficientIsExact) {
  const EulerErrors e = euler_errors(0.7, 0.0, 1.0, {8, 16, 32}, 200, 3, 1);
  ASSERT_EQ(e.rms.size(), 3u);
  for (double v : e.rms) EXPECT_EQ(v, 0.0);
}

TEST(EulerStudy, ThresholdVerdictAboveHalf) {
  RunConfig c;
  c.alpha = 0.7;
  c.samples = 2000;
  EXPECT_TRUE(cmd_euler_study(c).passed());
  c.b = 0.5;
  EXPECT_EQ(code_of([&] { cmd_euler_study(c); }), ErrorCode::ConfigError);
}

TEST(Negativity, TinyCoefficientGivesEmptyRegion) {
  NegativityConfig c;
  c.a = 0.01;
  c.T = 1.0;
  c.window = 1.0;
  EXPECT_EQ(code_of([&] { cmd_negativity(c); }), ErrorCode::EmptyRegion);
}

TEST(Negativity, RegionLiesInsideTheInterval) {
  NegativityConfig c;
  const NegativityInterval I = negativity_interval(c.delta);
  const auto region = negativity_region(c, I);
  ASSERT_FALSE(region.empty());
  for (const auto& z : region) {
    EXPECT_GT(-c.a * z.s * z.t, I.lo);
    EXPECT_LT(-c.a * z.s * z.t, I.hi);
    EXPECT_LT(h0(-c.a * z.s * z.t), -c.delta);
  }
}

TEST(Negativity, SmallRunPasses) {
  NegativityConfig c;
  c.replicas = 100;
  const ExperimentReport r = cmd_negativity(c);
  EXPECT_TRUE(r.passed()) << format_summary(r);
  EXPECT_GT(metric(r, "p_hat_lower_95"), 0.0);
}

TEST(Girsanov, HugeEpsilonIsTrivial) {
  RunConfig c;
  c.epsilon = 1e6;
  c.samples = 2000;
  const ExperimentReport r = cmd_girsanov_check(c);
  EXPECT_TRUE(r.passed());
  EXPECT_NEAR(metric(r, "density_mean"), 1.0, 1e-5);
}

TEST(Girsanov, HalfIsRejected) {
  RunConfig c;
  c.alpha = 0.5;
  c.samples = 10;
  EXPECT_EQ(code_of([&] { cmd_girsanov_check(c); }), ErrorCode::RegimeUndefined);
}

TEST(OperatorCheck, PassesAndCorruptedGradingFails) {
  RunConfig c;
  EXPECT_TRUE(cmd_operator_check(c).passed());
  const ExperimentReport bad = cmd_operator_check(c, true);
  EXPECT_FALSE(bad.passed());
  for (const auto& m : bad.metrics)
    if (m.name.rfind("kstar_isometry", 0) == 0) {
      EXPECT_FALSE(*m.pass) << m.name;
    }
}

TEST(Simulate, BrownianAndSheetPass) {
  RunConfig c;
  c.samples = 4000;
  EXPECT_TRUE(cmd_simulate(c).passed());
  c.beta = 0.5;
  EXPECT_TRUE(cmd_simulate(c).passed());
}

TEST(Reproducibility, ThreadsDoNotChangeReports) {
  RunConfig c;
  c.samples = 3000;
  c.threads = 1;
  const std::string one = without_wall_clock(to_json(cmd_girsanov_check(c)));
  c.threads = 3;
  const std::string three = without_wall_clock(to_json(cmd_girsanov_check(c)));
  EXPECT_EQ(one, three);

  NegativityConfig n;
  n.replicas = 40;
  n.threads = 1;
  const ExperimentReport a = cmd_negativity(n);
  n.threads = 3;
  const ExperimentReport b = cmd_negativity(n);
  EXPECT_EQ(metric(a, "p_hat"), metric(b, "p_hat"));
  EXPECT_EQ(metric(a, "sup_mean_minus_limit"), metric(b, "sup_mean_minus_limit"));
}

TEST(Reproducibility, SameSeedSameFiles) {
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / "fracsko_test_repro";
  fs::remove_all(base);
  RunConfig c;
  c.samples = 500;
  c.seed = 99;
  write_report(cmd_simulate(c), (base / "a").string());
  write_report(cmd_simulate(c), (base / "b").string());
  for (const char* f : {"path.csv", "covariance.csv"}) {
    ASSERT_TRUE(fs::exists(base / "a" / f)) << f;
    EXPECT_EQ(slurp(base / "a" / f), slurp(base / "b" / f)) << f;
  }
  EXPECT_EQ(without_wall_clock(slurp(base / "a" / "report.json")), without_wall_clock(slurp(base / "b" / "report.json")));
  EXPECT_EQ(slurp(base / "a" / "path.csv").substr(0, 8), "t,value\n");
  c.seed = 100;
  write_report(cmd_simulate(c), (base / "c").string());
  EXPECT_NE(slurp(base / "a" / "path.csv"), slurp(base / "c" / "path.csv"));
  fs::remove_all(base);
}

TEST(Reports, EveryGateNamesItsTolerance) {
  RunConfig c;
  c.samples = 50;
  for (const ExperimentReport& r : {cmd_exact_vs_chaos(c), cmd_simulate(c)})
    for (const auto& m : r.metrics) EXPECT_FALSE(m.criterion.empty()) << m.name;
}
