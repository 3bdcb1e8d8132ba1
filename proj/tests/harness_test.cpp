#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hctab/config.hpp"
#include "hctab/harness.hpp"
#include "test_support.hpp"

namespace hctab {
namespace {

TEST(ComputeGap, Examples) {
  EXPECT_NEAR(compute_gap(1034.9, 803.5), 28.80, 0.005);
  EXPECT_NEAR(compute_gap(1034.9, 992.5), 4.27, 0.005);
  EXPECT_EQ(compute_gap(812.25, 812.25), 0.0);
  EXPECT_LT(compute_gap(90.0, 100.0), 0.0);
  EXPECT_THROW(compute_gap(5.0, 0.0), InvalidArgument);
}

TEST(ParseAlgorithm, AcceptsCommonSpellings) {
  EXPECT_EQ(parse_algorithm("LLH"), Algorithm::kLlh);
  EXPECT_EQ(parse_algorithm("llh-nce"), Algorithm::kLlhNce);
  EXPECT_EQ(parse_algorithm("LLH_NHL"), Algorithm::kLlhNhl);
  EXPECT_EQ(parse_algorithm("bra"), Algorithm::kBra);
  EXPECT_THROW(parse_algorithm("greedy"), InvalidArgument);
  for (Algorithm a : kAllAlgorithms) EXPECT_EQ(parse_algorithm(to_string(a)), a);
}

TEST(RepeatSeed, XorsRepeatIndex) {
  EXPECT_EQ(repeat_seed(1, 0), 1u);
  EXPECT_EQ(repeat_seed(1, 1), 0u);
  EXPECT_EQ(repeat_seed(8, 3), 11u);
}

ExperimentConfig tiny_config() {
  ExperimentConfig cfg;
  Scenario s;
  s.id = "tiny";
  s.generator = testing::small_config(5);
  s.generator.task_count = 6;
  cfg.scenarios.push_back(s);
  cfg.algorithms = {Algorithm::kLlh, Algorithm::kLlhNce, Algorithm::kCf, Algorithm::kBra};
  cfg.repeats = 4;
  return cfg;
}

TEST(RunExperiment, SingleRepeatCollapsesAggregates) {
  ExperimentConfig cfg = tiny_config();
  cfg.algorithms = {Algorithm::kLlh};
  cfg.repeats = 1;
  const auto r = run_experiment(cfg);
  ASSERT_EQ(r.metrics.size(), 1u);
  EXPECT_EQ(r.metrics[0].best, r.metrics[0].worst);
  EXPECT_EQ(r.metrics[0].average, r.metrics[0].best);
  EXPECT_EQ(r.metrics[0].gap, 0.0);
}

TEST(RunExperiment, AggregatesMatchRawRuns) {
  const auto r = run_experiment(tiny_config());
  ASSERT_EQ(r.runs.size(), 16u);
  ASSERT_EQ(r.metrics.size(), 4u);
  double ref_avg = 0.0;
  for (const auto& m : r.metrics) {
    double best = -1, worst = 1e300, sum = 0;
    int count = 0;
    for (const auto& run : r.runs) {
      if (run.algorithm != m.algorithm) continue;
      best = std::max(best, run.objective);
      worst = std::min(worst, run.objective);
      sum += run.objective;
      ++count;
      EXPECT_GE(run.cu_rate, 0.0);
      EXPECT_LE(run.cu_rate, 1.0);
    }
    EXPECT_EQ(count, 4);
    EXPECT_EQ(m.best, best);
    EXPECT_EQ(m.worst, worst);
    EXPECT_NEAR(m.average, sum / 4, 1e-9);
    EXPECT_LE(m.worst, m.average);
    EXPECT_LE(m.average, m.best);
    EXPECT_EQ(m.agent_count, 18);
    EXPECT_EQ(m.task_count, 6);
    if (m.algorithm == Algorithm::kLlh) ref_avg = m.average;
  }
  for (const auto& m : r.metrics) {
    ASSERT_TRUE(m.gap.has_value());
    EXPECT_NEAR(*m.gap, compute_gap(ref_avg, m.average), 1e-12);
  }
  // Repeat seeds follow base_seed ^ r.
  for (int k = 0; k < 4; ++k) EXPECT_EQ(r.runs[static_cast<std::size_t>(k)].seed, repeat_seed(1, k));
}

TEST(RunExperiment, DeterministicApartFromTiming) {
  const auto a = run_experiment(tiny_config());
  const auto b = run_experiment(tiny_config());
  ASSERT_EQ(a.runs.size(), b.runs.size());
  for (std::size_t k = 0; k < a.runs.size(); ++k) {
    EXPECT_EQ(a.runs[k].objective, b.runs[k].objective);
    EXPECT_EQ(a.runs[k].iterations, b.runs[k].iterations);
    EXPECT_EQ(a.runs[k].cu_rate, b.runs[k].cu_rate);
  }
}

TEST(RunExperiment, PerRepeatPolicyVariesInstances) {
  ExperimentConfig cfg = tiny_config();
  cfg.algorithms = {Algorithm::kCf};
  cfg.reference.reset();
  const auto fixed = run_experiment(cfg);
  cfg.instance_policy = InstancePolicy::kPerRepeat;
  const auto varied = run_experiment(cfg);
  // CF ignores the seed, so only a changing instance can change the result.
  EXPECT_EQ(fixed.metrics[0].best, fixed.metrics[0].worst);
  EXPECT_NE(varied.metrics[0].best, varied.metrics[0].worst);
}

TEST(RunExperiment, RecordsScenarioFailuresAndContinues) {
  ExperimentConfig cfg = tiny_config();
  Scenario bad = cfg.scenarios[0];
  bad.id = "bad";
  bad.generator.capabilities_per_task = {5, 40};
  cfg.scenarios.insert(cfg.scenarios.begin(), bad);
  const auto r = run_experiment(cfg);
  ASSERT_EQ(r.failures.size(), 1u);
  EXPECT_NE(r.failures[0].find("bad"), std::string::npos);
  EXPECT_EQ(r.metrics.size(), 4u);
}

TEST(ExperimentConfig, Validation) {
  ExperimentConfig cfg = tiny_config();
  EXPECT_NO_THROW(cfg.validate());
  cfg.repeats = 0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg = tiny_config();
  cfg.reference = Algorithm::kBrp;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg.reference.reset();
  EXPECT_NO_THROW(cfg.validate());
}

TEST(Sweep, BudgetRateCardinality) {
  ExperimentConfig cfg = tiny_config();
  cfg.repeats = 1;
  const auto r = sweep(cfg, SweepAxis::kBudgetRate, {1, 5, 13});
  ASSERT_EQ(r.metrics.size(), 3u * cfg.algorithms.size());
  EXPECT_EQ(r.metrics.front().axis_value, 1.0);
  EXPECT_EQ(r.metrics.back().axis_value, 13.0);
  EXPECT_EQ(r.metrics.front().scenario, "tiny/budget_rate=1");
}

TEST(Sweep, HeterogeneityWidth) {
  GeneratorConfig base;
  const GeneratorConfig g = apply_axis(base, SweepAxis::kHeterogeneity, 0.3);
  EXPECT_DOUBLE_EQ(g.cost.hi - g.cost.lo, 6.0);
  EXPECT_DOUBLE_EQ((g.cost.hi + g.cost.lo) / 2.0, 10.5);
}

TEST(Sweep, ZeroHeterogeneityGivesEqualCosts) {
  GeneratorConfig base;
  base.seed = 3;
  const Instance inst = generate_instance(apply_axis(base, SweepAxis::kHeterogeneity, 0.0));
  for (const auto& a : inst.agents)
    for (const auto& f : a.feasible) EXPECT_EQ(f.cost, a.feasible.front().cost);
}

TEST(Sweep, AgentScaleAndErrors) {
  GeneratorConfig base;
  EXPECT_EQ(apply_axis(base, SweepAxis::kAgentScale, 300).task_count, 100);
  EXPECT_THROW(apply_axis(base, SweepAxis::kAgentScale, 301), InvalidArgument);
  EXPECT_THROW(apply_axis(base, SweepAxis::kBudgetRate, -1), InvalidArgument);
  EXPECT_THROW(apply_axis(base, SweepAxis::kHeterogeneity, 1.5), InvalidArgument);
  EXPECT_EQ(parse_sweep_axis("budget-rate"), SweepAxis::kBudgetRate);
  EXPECT_THROW(parse_sweep_axis("speed"), InvalidArgument);
}

TEST(Csv, HeadersAndRows) {
  ExperimentConfig cfg = tiny_config();
  cfg.repeats = 2;
  const auto r = run_experiment(cfg);
  std::ostringstream runs, metrics;
  write_runs_csv(runs, r.runs);
  write_metrics_csv(metrics, r.metrics);
  EXPECT_EQ(runs.str().substr(0, runs.str().find('\n')),
            "scenario,algorithm,seed,objective,cu_rate,iterations,converged,wall_ms");
  EXPECT_EQ(metrics.str().substr(0, metrics.str().find('\n')),
            "scenario,n,m,axis,algorithm,best,worst,average,gap,cu_rate,cpu_time");
  const std::string runs_text = runs.str();
  EXPECT_EQ(std::count(runs_text.begin(), runs_text.end(), '\n'), 9);
  EXPECT_NE(metrics.str().find("\ntiny,18,6,,LLH,"), std::string::npos);
}

TEST(Csv, WritesFilesToDirectory) {
  const auto dir = std::filesystem::temp_directory_path() / "hctab_harness_test";
  std::filesystem::remove_all(dir);
  ExperimentConfig cfg = tiny_config();
  cfg.repeats = 1;
  write_experiment(dir / "nested", run_experiment(cfg));
  EXPECT_TRUE(std::filesystem::exists(dir / "nested" / "runs.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "nested" / "metrics.csv"));
  std::filesystem::remove_all(dir);
}

TEST(Config, ParsesFullDocument) {
  const auto cfg = parse_experiment_config(R"(
base_seed: 7
repeats: 3
reference: LLH
algorithms: [LLH, LLH_NCE, cf]
instance_policy: per_repeat
output: out/dir
learning: {beta0: 2, lambda: 1.5, smooth: 4, t_max: 1000, scheduler: round_robin}
baseline: {chi: 0.2, t_max: 50}
defaults: {task_count: 20, budget_rate: 3}
scenarios:
  - id: a
  - id: b
    task_count: 10
    cost: [2, 8]
    seed: 99
)");
  EXPECT_EQ(cfg.base_seed, 7u);
  EXPECT_EQ(cfg.repeats, 3);
  EXPECT_EQ(cfg.algorithms.size(), 3u);
  EXPECT_EQ(cfg.instance_policy, InstancePolicy::kPerRepeat);
  EXPECT_EQ(cfg.output_dir, "out/dir");
  EXPECT_EQ(cfg.settings.learning.beta0, 2.0);
  EXPECT_EQ(cfg.settings.learning.smooth, 4);
  EXPECT_EQ(cfg.settings.learning.t_max, 1000);
  EXPECT_EQ(cfg.settings.learning.scheduler, Scheduler::kRoundRobin);
  EXPECT_EQ(cfg.settings.baseline.chi, 0.2);
  ASSERT_EQ(cfg.scenarios.size(), 2u);
  EXPECT_EQ(cfg.scenarios[0].generator.task_count, 20);
  EXPECT_EQ(cfg.scenarios[0].generator.seed, 7u);
  EXPECT_EQ(cfg.scenarios[0].generator.budget_rate, 3.0);
  EXPECT_EQ(cfg.scenarios[1].generator.task_count, 10);
  EXPECT_EQ(cfg.scenarios[1].generator.cost.lo, 2.0);
  EXPECT_EQ(cfg.scenarios[1].generator.seed, 99u);
}

TEST(Config, RejectsBadDocuments) {
  EXPECT_THROW(parse_experiment_config("repeats: 3\n"), InvalidArgument);
  EXPECT_THROW(parse_experiment_config("scenarios: [{id: a}]\nrepeats: 0\n"), InvalidArgument);
  EXPECT_THROW(parse_experiment_config("scenarios: [{id: a}]\ncolour: red\n"), InvalidArgument);
  EXPECT_THROW(parse_experiment_config("scenarios: [{id: a, tasks: 3}]\n"), InvalidArgument);
  EXPECT_THROW(parse_experiment_config("scenarios: [{id: a}]\nalgorithms: [CF]\n"), InvalidArgument);
  EXPECT_THROW(parse_experiment_config("scenarios: [\n"), InvalidArgument);
  EXPECT_NO_THROW(parse_experiment_config("scenarios: [{id: a}]\nalgorithms: [CF]\nreference: none\n"));
}

}  // namespace
}  // namespace hctab
