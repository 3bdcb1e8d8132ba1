#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "hctab/learning.hpp"
#include "hctab/oracle.hpp"
#include "test_support.hpp"

namespace hctab {
namespace {

using testing::make_instance;

TEST(CandidateActions, SwapStateOffersOnlyTheSwap) {
  const Instance inst = testing::swap_example_instance();
  const Partition state = testing::swap_example_before(inst);
  const auto full = candidate_actions(inst, state, 6, Variant::kFull);
  ASSERT_EQ(full.size(), 1u);
  EXPECT_EQ(full[0].action, Action::exchange(2, 5));
  EXPECT_EQ(full[0].gain, 5.0);
  EXPECT_EQ(full[0].cost_decrease, 0.0);
  EXPECT_TRUE(candidate_actions(inst, state, 6, Variant::kNoCe).empty());
  EXPECT_EQ(candidate_actions(inst, state, 6, Variant::kNoHll).size(), 1u);
}

TEST(CandidateActions, JoinsSuppressExchanges) {
  const Instance inst = testing::swap_example_instance();
  auto p = Partition::from_assignment(inst, {0, 0, 1, 3, 2, 2, 3});
  // Agent 3 can join task 1 for a gain of 2; no exchange is offered.
  const auto c = candidate_actions(inst, p, 3, Variant::kFull);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].action, Action::join(1));
  EXPECT_EQ(c[0].gain, 2.0);
  EXPECT_EQ(c[0].cost_decrease, -1.0);
}

// Property: every candidate is legal, strictly improving and budget-feasible,
// and the no-exchange set is contained in the full set.
TEST(CandidateActions, AreImprovingAndFeasible) {
  std::mt19937_64 rng(7);
  for (const Instance& inst : random_small_instances(30, 3)) {
    for (int t = 0; t < 20; ++t) {
      const Partition p = random_feasible_partition(inst, rng);
      for (AgentId i = 0; i < inst.agent_count(); ++i) {
        const auto full = candidate_actions(inst, p, i, Variant::kFull);
        const auto nce = candidate_actions(inst, p, i, Variant::kNoCe);
        for (const auto& c : full) {
          EXPECT_GT(c.gain, kGainTolerance);
          EXPECT_NO_THROW(check_action(inst, p, i, c.action));
          const Partition q = apply_action(inst, p, i, c.action);
          EXPECT_TRUE(is_budget_feasible(inst, q));
          EXPECT_NEAR(potential(inst, q) - potential(inst, p), c.gain, 1e-9);
          EXPECT_NEAR(p.total_cost() - q.total_cost(), c.cost_decrease, 1e-9);
        }
        for (const auto& c : nce) {
          EXPECT_EQ(c.action.kind, Action::Kind::kJoin);
          bool found = false;
          for (const auto& f : full) found = found || f.action == c.action;
          EXPECT_TRUE(found);
        }
      }
    }
  }
}

TEST(BetaSchedule, Examples) {
  LearningParams params;
  EXPECT_DOUBLE_EQ(beta_schedule(params, 0, 19.0, 19.0), 1.0);
  EXPECT_DOUBLE_EQ(beta_schedule(params, 1, 0.0, 19.0), 0.69314718055994530942);
  EXPECT_DOUBLE_EQ(beta_schedule(params, 0, 9.5, 19.0), 0.5);
  EXPECT_DOUBLE_EQ(beta_schedule(params, 0, -4.0, 19.0), 0.0);
  EXPECT_DOUBLE_EQ(beta_schedule(params, 0, 40.0, 19.0), 1.0);
  EXPECT_DOUBLE_EQ(beta_schedule(params, 3, 5.0, 0.0), std::log(4.0));
  params.smooth = 2;
  params.lambda = 3.0;
  EXPECT_DOUBLE_EQ(beta_schedule(params, 1, 0.0, 19.0), std::log(4.0) / 2.0);
  params.beta0 = 0.0;
  EXPECT_DOUBLE_EQ(beta_schedule(params, 5, 0.0, 19.0), beta_schedule(params, 5, 19.0, 19.0));
}

TEST(BetaSchedule, NonDecreasingInTime) {
  LearningParams params;
  double prev = -1.0;
  for (std::int64_t t = 0; t < 1000; ++t) {
    const double b = beta_schedule(params, t, 3.0, 19.0);
    EXPECT_GE(b, prev);
    prev = b;
  }
}

TEST(LearningParams, Validation) {
  LearningParams p;
  EXPECT_NO_THROW(p.validate());
  EXPECT_EQ(p.resolved_t_max(150), 75000);
  p.lambda = 0.5;
  EXPECT_THROW(p.validate(), InvalidArgument);
  p = {};
  p.beta0 = -1.0;
  EXPECT_THROW(p.validate(), InvalidArgument);
  p = {};
  p.smooth = 0;
  EXPECT_THROW(p.validate(), InvalidArgument);
  p = {};
  p.t_max = 0;
  EXPECT_THROW(p.validate(), InvalidArgument);
}

TEST(SelectAction, EqualScoresAreUniform) {
  const std::vector<ScoredAction> c = {{Action::join(0), 3.0, 1.0},
                                       {Action::join(1), 3.0, 1.0}};
  LearningParams params;
  std::mt19937_64 rng(1);
  int first = 0;
  for (int d = 0; d < 10000; ++d) first += select_action_index(c, params, 50, 19.0, rng) == 0;
  EXPECT_NEAR(first / 10000.0, 0.5, 0.02);
}

TEST(SelectAction, HighBetaPicksLargestGain) {
  const std::vector<ScoredAction> c = {{Action::join(0), 4.0, 19.0},
                                       {Action::join(1), 5.0, 19.0}};
  LearningParams params;
  params.beta0 = 10.0;
  ASSERT_DOUBLE_EQ(beta_schedule(params, 0, 19.0, 19.0), 10.0);
  std::mt19937_64 rng(2);
  int best = 0;
  for (int d = 0; d < 10000; ++d) best += select_action(c, params, 0, 19.0, rng) == Action::join(1);
  EXPECT_GE(best / 10000.0, 0.999);
}

TEST(SelectAction, SoftmaxMatchesClosedForm) {
  const std::vector<ScoredAction> c = {{Action::join(0), 1.0, 0.0},
                                       {Action::join(1), 2.0, 0.0}};
  LearningParams params;
  std::mt19937_64 rng(3);
  // beta = ln(2) at t = 1, so weights are 2^1 and 2^2.
  int second = 0;
  const int draws = 20000;
  for (int d = 0; d < draws; ++d) second += select_action_index(c, params, 1, 19.0, rng) == 1;
  EXPECT_NEAR(second / static_cast<double>(draws), 4.0 / 6.0, 0.015);
}

TEST(SelectAction, HugeScoresDoNotOverflow) {
  const std::vector<ScoredAction> c = {{Action::join(0), 1e6, 0.0},
                                       {Action::join(1), 1e6 + 1.0, 0.0}};
  LearningParams params;
  std::mt19937_64 rng(4);
  EXPECT_EQ(select_action_index(c, params, 100000, 19.0, rng), 1u);
}

TEST(SelectAction, NoHllIsUniformRegardlessOfGain) {
  const std::vector<ScoredAction> c = {{Action::join(0), 1.0, 0.0},
                                       {Action::join(1), 100.0, 19.0}};
  LearningParams params;
  params.variant = Variant::kNoHll;
  std::mt19937_64 rng(5);
  int first = 0;
  for (int d = 0; d < 10000; ++d) first += select_action_index(c, params, 1000, 19.0, rng) == 0;
  EXPECT_NEAR(first / 10000.0, 0.5, 0.02);
  EXPECT_THROW(select_action_index({}, params, 0, 19.0, rng), InvalidArgument);
}

TEST(LlhStep, SwapExampleReachesAfterState) {
  const Instance inst = testing::swap_example_instance();
  const Partition state = testing::swap_example_before(inst);
  std::mt19937_64 rng(0);
  LearningParams params;
  const LlhStep step = llh_step(inst, state, 6, 10, params, rng);
  EXPECT_TRUE(step.acted);
  EXPECT_EQ(step.partition, testing::swap_example_after(inst));
  EXPECT_EQ(potential(inst, step.partition), 20.0);

  params.variant = Variant::kNoCe;
  const LlhStep stuck = llh_step(inst, state, 6, 10, params, rng);
  EXPECT_FALSE(stuck.acted);
  EXPECT_EQ(stuck.partition, state);
}

TEST(Run, ZeroBudgetStaysUnassigned) {
  GeneratorConfig g = testing::small_config(3, 0.0);
  const Instance inst = generate_instance(g);
  const RunResult r = run(inst, {});
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.objective, 0.0);
  EXPECT_EQ(r.cu_rate, 0.0);
  EXPECT_TRUE(r.steps.empty());
  for (AgentId i = 0; i < inst.agent_count(); ++i) EXPECT_FALSE(r.final_partition.is_assigned(i));
}

TEST(Run, SingleAgentSingleTask) {
  const Instance inst = make_instance(2, 5.0, {{{{0, 3}, {1, 4}}, {{0, 2}}}}, {{0, 1}});
  const RunResult r = run(inst, {});
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.objective, 7.0);
  EXPECT_EQ(r.final_partition.coalition_of(0), 0);
  EXPECT_DOUBLE_EQ(r.cu_rate, 0.4);
  EXPECT_EQ(r.steps.size(), 1u);
}

TEST(Run, SingleAgentOverBudget) {
  const Instance inst = make_instance(1, 1.0, {{{{0, 3}}, {{0, 2}}}}, {{0}});
  const RunResult r = run(inst, {});
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.objective, 0.0);
}

// Property: converged runs end in a Nash-stable partition for the action
// space they search, with a strictly increasing objective trace.
TEST(Run, ConvergesToStablePartitions) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Instance inst = generate_instance(testing::small_config(seed, 1.0 + seed % 7));
    for (Variant v : {Variant::kFull, Variant::kNoCe, Variant::kNoHll}) {
      for (Scheduler s : {Scheduler::kRandomRelay, Scheduler::kRoundRobin}) {
        LearningParams params;
        params.variant = v;
        params.scheduler = s;
        params.seed = seed * 31 + 7;
        const RunResult r = run(inst, params);
        ASSERT_TRUE(r.converged) << "seed " << seed;
        EXPECT_TRUE(is_budget_feasible(inst, r.final_partition));
        EXPECT_TRUE(is_nash_stable(inst, r.final_partition, v != Variant::kNoCe));
        EXPECT_DOUBLE_EQ(r.objective, potential(inst, r.final_partition));
        for (std::size_t k = 1; k < r.objective_trace.size(); ++k) {
          EXPECT_GT(r.objective_trace[k].objective, r.objective_trace[k - 1].objective);
          EXPECT_GT(r.objective_trace[k].iteration, r.objective_trace[k - 1].iteration);
        }
        EXPECT_EQ(r.objective_trace.back().objective, r.objective);
        EXPECT_LE(r.cu_rate, 1.0);
      }
    }
  }
}

TEST(Run, DeterministicInSeed) {
  const Instance inst = generate_instance(GeneratorConfig{.task_count = 20, .seed = 9});
  LearningParams params;
  params.seed = 77;
  const RunResult a = run(inst, params);
  const RunResult b = run(inst, params);
  EXPECT_EQ(a.final_partition, b.final_partition);
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_EQ(a.objective, b.objective);
  std::ostringstream ta, tb;
  write_trace(ta, a);
  write_trace(tb, b);
  EXPECT_EQ(ta.str(), tb.str());
}

TEST(Run, RespectsIterationCap) {
  const Instance inst = generate_instance(testing::small_config(1));
  LearningParams params;
  params.t_max = 3;
  const RunResult r = run(inst, params);
  EXPECT_EQ(r.iterations, 3);
  EXPECT_FALSE(r.converged);
  EXPECT_LE(r.steps.size(), 3u);
}

TEST(WriteTrace, Format) {
  const Instance inst = make_instance(2, 5.0, {{{{0, 3}, {1, 4}}, {{0, 2}}}}, {{0, 1}});
  const RunResult r = run(inst, {});
  std::ostringstream os;
  write_trace(os, r);
  const std::string text = os.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "t,agent,action_kind,target,partner,gain,phi_after");
  EXPECT_NE(text.find(",1,join,1,0,7,7\n"), std::string::npos) << text;
}

TEST(CostUtilization, Examples) {
  const Instance inst = testing::swap_example_instance();
  EXPECT_EQ(cost_utilization(inst, testing::swap_example_before(inst)), 1.0);
  EXPECT_EQ(cost_utilization(inst, Partition(inst)), 0.0);
  EXPECT_DOUBLE_EQ(cost_utilization(inst, Partition::from_assignment(inst, {3, 3, 3, 1, 3, 3, 3})), 0.1);
}

}  // namespace
}  // namespace hctab
