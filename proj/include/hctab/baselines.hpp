#pragma once

// Comparison algorithms: a centralized cost-efficiency greedy (CF), the
// better reply process (BRP) and best response (BRA). BRP and BRA share the
// relay driver with LLH; none of them use cooperative exchange.

#include <chrono>
#include <cstdint>
#include <optional>
#include <random>

#include "hctab/error.hpp"
#include "hctab/game.hpp"
#include "hctab/instance.hpp"
#include "hctab/learning.hpp"

namespace hctab {

struct BaselineParams {
  double chi = 0.3;  // BRP probability of keeping the current action
  std::optional<std::int64_t> t_max;
  std::uint64_t seed = 0;
  Scheduler scheduler = Scheduler::kRandomRelay;

  void validate() const {
    if (!(chi >= 0.0 && chi < 1.0)) throw InvalidArgument("chi must lie in [0, 1)");
    if (t_max && *t_max < 1) throw InvalidArgument("t_max must be positive");
  }

  std::int64_t resolved_t_max(int agent_count) const {
    return t_max.value_or(std::int64_t{500} * agent_count);
  }
};

/// Cost-efficiency greedy. Each iteration assigns the (unassigned agent,
/// task) pair with the largest marginal gain per unit of the agent's mean
/// cost, among budget-feasible pairs with positive gain. Agents are never
/// reassigned. Ties go to the lowest agent id, then the lowest task id.
inline RunResult run_cf(const Instance& inst, const BaselineParams& params = {}) {
  params.validate();
  const auto start = std::chrono::steady_clock::now();
  RunResult result;
  result.seed = params.seed;
  Partition p(inst);
  result.objective_trace.push_back({0, 0.0});

  std::vector<double> mean_cost(static_cast<std::size_t>(inst.agent_count()));
  for (AgentId i = 0; i < inst.agent_count(); ++i)
    mean_cost[static_cast<std::size_t>(i)] = inst.agents[static_cast<std::size_t>(i)].mean_cost();

  std::int64_t iteration = 0;
  for (;;) {
    AgentId best_agent = -1;
    TaskId best_task = -1;
    double best_factor = 0.0;
    double best_gain = 0.0;
    for (AgentId i = 0; i < inst.agent_count(); ++i) {
      if (p.is_assigned(i)) continue;
      for (const auto& ft : inst.agents[static_cast<std::size_t>(i)].feasible) {
        Gain g = join_gain(inst, p, i, ft.task);
        if (!is_improvement(g)) continue;
        const double factor = g.value() / mean_cost[static_cast<std::size_t>(i)];
        if (best_agent < 0 || factor > best_factor) {
          best_agent = i;
          best_task = ft.task;
          best_factor = factor;
          best_gain = g.value();
        }
      }
    }
    if (best_agent < 0) break;
    p.move(inst, best_agent, best_task);
    ++iteration;
    const double phi = potential(inst, p);
    result.objective_trace.push_back({iteration, phi});
    result.steps.push_back({iteration, best_agent, Action::join(best_task), best_gain, phi});
  }

  result.iterations = iteration;
  result.converged = true;
  result.objective = potential(inst, p);
  result.cu_rate = cost_utilization(inst, p);
  result.final_partition = std::move(p);
  result.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

/// Better reply process: the holder keeps its action with probability chi,
/// otherwise joins a uniformly drawn improving coalition.
inline RunResult run_brp(const Instance& inst, const BaselineParams& params) {
  params.validate();
  return run_relay(inst, params.scheduler, params.seed,
                   params.resolved_t_max(inst.agent_count()),
                   [&](Partition& p, AgentId i, std::int64_t, std::mt19937_64& rng,
                       bool& quiet) -> std::optional<ScoredAction> {
                     auto better = candidate_actions(inst, p, i, Variant::kNoCe);
                     if (better.empty()) return std::nullopt;
                     if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) < params.chi) {
                       quiet = false;
                       return std::nullopt;
                     }
                     const auto& pick = better[std::uniform_int_distribution<std::size_t>(
                         0, better.size() - 1)(rng)];
                     apply_action_in_place(inst, p, i, pick.action);
                     return pick;
                   });
}

/// Best response: the holder joins the coalition with the largest positive
/// gain, lowest task id on ties.
inline RunResult run_bra(const Instance& inst, const BaselineParams& params) {
  params.validate();
  return run_relay(inst, params.scheduler, params.seed,
                   params.resolved_t_max(inst.agent_count()),
                   [&](Partition& p, AgentId i, std::int64_t, std::mt19937_64&,
                       bool&) -> std::optional<ScoredAction> {
                     auto better = candidate_actions(inst, p, i, Variant::kNoCe);
                     if (better.empty()) return std::nullopt;
                     const ScoredAction* best = &better.front();
                     for (const auto& c : better) {
                       if (c.gain > best->gain ||
                           (c.gain == best->gain && c.action.target < best->action.target))
                         best = &c;
                     }
                     ScoredAction chosen = *best;
                     apply_action_in_place(inst, p, i, chosen.action);
                     return chosen;
                   });
}

}  // namespace hctab
