#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <cstdlib>

#include "rrg/rrg.hpp"

using namespace rrg;

TEST(StatReport, Verdict) {
  const auto a = make_report("a", 1.0, 0.1, 1.25, 3.0);
  EXPECT_TRUE(a.pass);
  EXPECT_NEAR(a.z, -2.5, 1e-12);
  EXPECT_FALSE(make_report("b", 1.0, 0.1, 1.31, 3.0).pass);
  EXPECT_TRUE(make_report("c", 1.0, 0.0, 1.0, 3.0).pass);
  EXPECT_FALSE(make_report("d", 1.0, 0.0, 1.1, 3.0).pass);
  EXPECT_TRUE(make_report("e", 1.0, 0.0, 1.1, 3.0, 0.05).pass);
  const auto g = make_bound_report("g", 0.02, 0.0, 0.0, 0.0, 0.03);
  EXPECT_TRUE(g.pass);
  EXPECT_FALSE(g.counts_toward_allowance);
}

TEST(StatReport, Allowance) {
  EXPECT_EQ(failure_allowance(0), 0u);
  EXPECT_EQ(failure_allowance(1), 1u);
  EXPECT_EQ(failure_allowance(100), 1u);
  EXPECT_EQ(failure_allowance(101), 2u);
  std::vector<StatReport> r(50, make_report("x", 0, 1, 0));
  EXPECT_TRUE(suite_passes(r));
  r[3] = make_report("y", 10, 1, 0);
  EXPECT_TRUE(suite_passes(r));
  r[4] = make_report("z", 10, 1, 0);
  EXPECT_FALSE(suite_passes(r));
  r[3] = r[4] = make_report("x", 0, 1, 0);
  r.push_back(make_bound_report("gate", 1.0, 0, 0, 0, 0.5));
  EXPECT_FALSE(suite_passes(r));
}

TEST(Moments, MergeMatchesSequential) {
  Rng rng(1);
  Moments all, a, b;
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.uniform() * 3;
    all.add(x);
    (i % 3 ? a : b).add(x);
  }
  a.merge(b);
  EXPECT_NEAR(a.mean, all.mean, 1e-12);
  EXPECT_NEAR(a.variance(), all.variance(), 1e-10);
}

TEST(BatchMeans, IidStandardError) {
  Rng rng(2);
  std::vector<double> x;
  for (int i = 0; i < 100000; ++i) x.push_back(rng.exponential(1.0));
  const auto e = batch_mean(x);
  EXPECT_NEAR(e.se, 1.0 / std::sqrt(100000.0), 0.2 / std::sqrt(100000.0));
  EXPECT_NEAR(e.value, 1.0, 4 * e.se);
}

TEST(BatchMeans, Covariance) {
  Rng rng(3);
  std::vector<double> x, y;
  for (int i = 0; i < 50000; ++i) {
    const double a = rng.exponential(1.0), b = rng.exponential(1.0);
    x.push_back(a + b);
    y.push_back(b);
  }
  const auto c = batch_covariance(x, y);
  EXPECT_NEAR(c.value, 1.0, 4 * c.se);
}

TEST(Ks, NormalAndTwoSample) {
  Rng rng(4);
  std::vector<double> x, y, u;
  std::normal_distribution<double> nd;
  for (int i = 0; i < 20000; ++i) {
    x.push_back(nd(rng));
    y.push_back(nd(rng));
    u.push_back(rng.uniform());
  }
  EXPECT_LT(ks_distance(x, normal_cdf), 0.015);
  EXPECT_GT(ks_distance(u, normal_cdf), 0.3);
  EXPECT_LT(ks_two_sample(x, y), 0.02);
  EXPECT_DOUBLE_EQ(ks_two_sample({1, 2, 3}, {1, 2, 3}), 0.0);
}

TEST(PoissonTv, Folding) {
  std::vector<std::uint64_t> c{0, 1, 1, 2, 25};
  const double tv = poisson_tv(c, 1.0, 20);
  EXPECT_GT(tv, 0.0);
  EXPECT_LE(tv, 1.0);
  Rng rng(5);
  std::vector<std::uint64_t> p;
  for (int i = 0; i < 200000; ++i) p.push_back(rng.poisson(3.0));
  EXPECT_LT(poisson_tv(p, 3.0), 0.01);
}

TEST(Parallel, ResultsIndependentOfWorkers) {
  auto f = [](std::size_t r) {
    Rng rng(9, r);
    return rng.uniform();
  };
  const auto a = parallel_map<double>(257, f, 1);
  const auto b = parallel_map<double>(257, f, 4);
  EXPECT_EQ(a, b);
}

TEST(Parallel, PropagatesExceptions) {
  EXPECT_THROW(parallel_map<int>(10, [](std::size_t r) -> int {
                 if (r == 7) throw std::runtime_error("boom");
                 return 0;
               }, 3),
               std::runtime_error);
}

TEST(Parallel, WorkerCountFromEnvironment) {
  setenv("RRG_THREADS", "3", 1);
  EXPECT_EQ(worker_count(), 3u);
  setenv("RRG_THREADS", "junk", 1);
  EXPECT_GE(worker_count(), 1u);
  unsetenv("RRG_THREADS");
}

TEST(Config, RoundTrip) {
  ExperimentConfig c;
  c.experiment = "cov";
  c.d = 3;
  c.T0 = 0.25;
  c.nt = 4;
  c.ns = 2;
  c.seed = 99;
  const std::string text = c.to_text();
  const auto back = ExperimentConfig::from_text(text);
  EXPECT_EQ(back.to_text(), text);
  EXPECT_EQ(back.nt, 4u);
  EXPECT_EQ(back.d, 3);
  EXPECT_NE(text.find("grid = 4x2\n"), std::string::npos);
  // keys are sorted
  EXPECT_LT(text.find("K = "), text.find("L = "));
  EXPECT_LT(text.find("S0 = "), text.find("T = "));
}

TEST(Config, Errors) {
  EXPECT_THROW(ExperimentConfig::from_text("d = 0\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_text("colour = red\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_text("d = 2x\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_text("grid = 3\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_text("K = 3\nL = 2\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_text("just text\n"), ConfigError);
  const auto ok = ExperimentConfig::from_text("# comment\n  d = 4  # trailing\n\n");
  EXPECT_EQ(ok.d, 4);
  EXPECT_EQ(ok.truncation(), ok.K + 8);
}

TEST(Report, JsonSchema) {
  ExperimentConfig c;
  std::vector<StatReport> r{make_report("m", 1.0, 0.1, 1.0), make_report("inf", 1.0, 0.0, 2.0)};
  const auto j = summary_json("poisson", config_json(c), r);
  EXPECT_EQ(j["experiment"], "poisson");
  EXPECT_TRUE(j["params"].is_object());
  ASSERT_EQ(j["reports"].size(), 2u);
  for (const char* k : {"name", "estimate", "se", "reference", "z", "pass"}) EXPECT_TRUE(j["reports"][0].contains(k));
  EXPECT_TRUE(j["reports"][1]["z"].is_null());
}

TEST(Report, ShortestRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 2.0, 1e-300, 12345.678}) EXPECT_EQ(std::strtod(fmt(v).c_str(), nullptr), v);
  EXPECT_EQ(fmt(0.5), "0.5");
}

TEST(Experiments, PoissonCheckDeterministic) {
  ExperimentConfig c;
  c.d = 2;
  c.n = 300;
  c.K = 3;
  c.replicas = 200;
  c.seed = 5;
  const auto a = run_poisson_check(c), b = run_poisson_check(c);
  ASSERT_EQ(a.reports.size(), b.reports.size());
  for (std::size_t i = 0; i < a.reports.size(); ++i) EXPECT_EQ(a.reports[i].estimate, b.reports[i].estimate);
  c.n = 100;
  EXPECT_THROW(run_poisson_check(c), ConfigError);
}

TEST(Experiments, WordAlgebraSmall) {
  const auto r = run_word_algebra(2, 5);
  EXPECT_TRUE(r.pass());
  EXPECT_EQ(r.reports.size(), 20u);
}

TEST(Experiments, SpectraIdentitySmall) {
  const auto r = run_spectra_identity({{1, 40}, {2, 60}, {3, 50}}, 8, 3);
  EXPECT_TRUE(r.pass());
}

TEST(Experiments, HalvingOracleSmall) {
  ExperimentConfig c;
  c.d = 2;
  c.K = 2;
  c.T = 5.0;
  c.replicas = 40;
  const auto r = run_halving_oracle(c);
  EXPECT_FALSE(r.reports.empty());
  for (const auto& rep : r.reports) EXPECT_GT(rep.reference, 0.0) << rep.name;
}

TEST(Experiments, BdRateSmall) {
  ExperimentConfig c;
  c.d = 2;
  c.n = 1000;
  c.K = 2;
  c.T = 20.0;
  c.replicas = 1;
  const auto r = run_bd_rate_check(c);
  ASSERT_EQ(r.reports.size(), 3u);
  EXPECT_EQ(r.reports[2].estimate, 0.0);  // b = 0 words never change under transpositions
}

TEST(Experiments, AnalyticLimits) { EXPECT_TRUE(run_analytic_limits().pass()); }
