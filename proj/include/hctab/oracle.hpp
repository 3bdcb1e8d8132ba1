#pragma once

// Ground truth for small instances: exhaustive search for the optimal
// allocation, plus a randomized check that utility changes equal potential
// changes under unilateral moves.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "hctab/error.hpp"
#include "hctab/game.hpp"
#include "hctab/instance.hpp"

namespace hctab {

inline constexpr double kDefaultEnumerationCap = 1e7;

struct OracleResult {
  Partition best_partition;
  double best_value = 0.0;
  std::int64_t states_enumerated = 0;  // complete budget-feasible assignments
};

/// Number of assignments respecting per-agent feasibility: prod(|T_i| + 1).
inline double assignment_space_size(const Instance& inst) {
  double size = 1.0;
  for (const auto& a : inst.agents) size *= static_cast<double>(a.feasible.size() + 1);
  return size;
}

namespace detail {

class ExhaustiveSearch {
 public:
  explicit ExhaustiveSearch(const Instance& inst)
      : inst_(inst),
        assignment_(static_cast<std::size_t>(inst.agent_count()), inst.task_count()),
        best_(assignment_),
        members_(static_cast<std::size_t>(inst.task_count())) {}

  OracleResult solve() {
    descend(0, 0.0);
    OracleResult r;
    r.best_partition = Partition::from_assignment(inst_, best_);
    r.best_value = potential(inst_, r.best_partition);
    r.states_enumerated = leaves_;
    return r;
  }

 private:
  // Options are tried in increasing coalition id with the dummy last, and
  // only a strictly better value replaces the incumbent, so the first
  // optimum found is the lexicographically smallest assignment vector.
  void descend(AgentId i, double cost) {
    if (i == inst_.agent_count()) {
      ++leaves_;
      double value = 0.0;
      for (TaskId j = 0; j < inst_.task_count(); ++j)
        value += coalition_reward(inst_, j, members_[static_cast<std::size_t>(j)]);
      if (!have_best_ || value > best_value_) {
        have_best_ = true;
        best_value_ = value;
        best_ = assignment_;
      }
      return;
    }
    for (const auto& ft : inst_.agents[static_cast<std::size_t>(i)].feasible) {
      const double next = cost + ft.cost;
      if (!within_budget(next, inst_.budget)) continue;
      auto& m = members_[static_cast<std::size_t>(ft.task)];
      m.push_back(i);
      assignment_[static_cast<std::size_t>(i)] = ft.task;
      descend(i + 1, next);
      m.pop_back();
    }
    assignment_[static_cast<std::size_t>(i)] = inst_.task_count();
    descend(i + 1, cost);
  }

  const Instance& inst_;
  std::vector<CoalitionId> assignment_;
  std::vector<CoalitionId> best_;
  std::vector<std::vector<AgentId>> members_;
  double best_value_ = 0.0;
  bool have_best_ = false;
  std::int64_t leaves_ = 0;
};

}  // namespace detail

/// Optimal budget-feasible allocation by depth-first enumeration with
/// running-cost pruning. Throws InstanceTooLarge when the feasible
/// assignment space exceeds `cap`.
inline OracleResult brute_force_optimum(const Instance& inst,
                                        double cap = kDefaultEnumerationCap) {
  const double size = assignment_space_size(inst);
  if (size > cap)
    throw InstanceTooLarge("assignment space of " + std::to_string(size) +
                           " states exceeds the enumeration cap of " +
                           std::to_string(cap));
  return detail::ExhaustiveSearch(inst).solve();
}

/// Random budget-feasible partition: agents in random order pick the dummy
/// or a random feasible task, falling back to the dummy if it would
/// overspend.
inline Partition random_feasible_partition(const Instance& inst, std::mt19937_64& rng) {
  std::vector<CoalitionId> assignment(static_cast<std::size_t>(inst.agent_count()),
                                      inst.task_count());
  std::vector<AgentId> order(assignment.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<AgentId>(i);
  std::shuffle(order.begin(), order.end(), rng);
  double cost = 0.0;
  for (AgentId i : order) {
    const auto& feasible = inst.agents[static_cast<std::size_t>(i)].feasible;
    const auto pick = std::uniform_int_distribution<std::size_t>(0, feasible.size())(rng);
    if (pick == feasible.size()) continue;
    if (!within_budget(cost + feasible[pick].cost, inst.budget)) continue;
    cost += feasible[pick].cost;
    assignment[static_cast<std::size_t>(i)] = feasible[pick].task;
  }
  return Partition::from_assignment(inst, std::move(assignment));
}

/// Random instances with at most 30 agents (m in [2, 10], three agents per
/// task), dense feasible sets, budget rate in [1, 13], and competencies
/// jittered off the integers so the identity is exercised in floating point.
inline std::vector<Instance> random_small_instances(int count, std::uint64_t seed) {
  std::mt19937_64 pick(seed);
  std::vector<Instance> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int s = 0; s < count; ++s) {
    GeneratorConfig g;
    g.task_count = std::uniform_int_distribution<int>(2, 10)(pick);
    g.feasible_fraction = {0.5, 1.0};
    g.capabilities_per_task = {1, 10};
    g.budget_rate = std::uniform_real_distribution<double>(1.0, 13.0)(pick);
    g.seed = pick();
    Instance inst = generate_instance(g);
    std::uniform_real_distribution<double> jitter(0.0, 1.0);
    for (auto& a : inst.agents)
      for (auto& c : a.capabilities) c.level += jitter(pick);
    out.push_back(std::move(inst));
  }
  return out;
}

struct PotentialCheckReport {
  double max_abs_error = 0.0;
  std::int64_t trials_run = 0;
};

/// Samples (feasible partition, agent, feasible unilateral move) triples and
/// reports the largest |delta utility - delta potential|, both sides
/// evaluated from scratch. Draws that admit no feasible move are retried,
/// up to 100 attempts per requested trial.
inline PotentialCheckReport check_potential_identity(const Instance& inst,
                                                     std::int64_t trials,
                                                     std::mt19937_64& rng) {
  PotentialCheckReport report;
  std::int64_t attempts = 0;
  std::uniform_int_distribution<AgentId> pick_agent(0, inst.agent_count() - 1);
  while (report.trials_run < trials && attempts < 100 * trials) {
    ++attempts;
    Partition before = random_feasible_partition(inst, rng);
    const AgentId i = pick_agent(rng);
    std::vector<CoalitionId> targets;
    for_each_join_target(inst, before, i, [&](CoalitionId t) {
      Partition moved = before;
      moved.move(inst, i, t);
      if (is_budget_feasible(inst, moved)) targets.push_back(t);
    });
    if (targets.empty()) continue;
    const CoalitionId target =
        targets[std::uniform_int_distribution<std::size_t>(0, targets.size() - 1)(rng)];
    Partition after = before;
    after.move(inst, i, target);
    const double du = agent_utility(inst, after, i) - agent_utility(inst, before, i);
    const double dphi = potential(inst, after) - potential(inst, before);
    report.max_abs_error = std::max(report.max_abs_error, std::abs(du - dphi));
    ++report.trials_run;
  }
  return report;
}

}  // namespace hctab
