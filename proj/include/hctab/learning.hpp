#pragma once

// Log-linear learning with heterogeneous costs (LLH), run as a relay: the
// allocation file is handed from agent to agent, and each holder builds its
// improving action set, samples one action from a cost-aware softmax, and
// passes the file on. The run stops once every agent has held the file
// without acting since the last change, or when the handoff budget runs out.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "hctab/error.hpp"
#include "hctab/game.hpp"
#include "hctab/instance.hpp"

namespace hctab {

enum class Variant {
  kFull,   // coalition selection + cooperative exchange + cost-aware softmax
  kNoCe,   // no cooperative exchange
  kNoHll,  // uniform choice among improving actions
};

enum class Scheduler {
  kRandomRelay,  // next holder drawn uniformly at random
  kRoundRobin,   // fixed cyclic order over a seeded shuffle
};

inline const char* to_string(Variant v) {
  switch (v) {
    case Variant::kFull: return "full";
    case Variant::kNoCe: return "no-ce";
    case Variant::kNoHll: return "no-hll";
  }
  return "?";
}

inline const char* to_string(Scheduler s) {
  return s == Scheduler::kRandomRelay ? "random" : "round-robin";
}

struct LearningParams {
  double beta0 = 1.0;
  double lambda = 1.0;
  int smooth = 1;
  std::optional<std::int64_t> t_max;  // handoffs; defaults to 500 n
  Variant variant = Variant::kFull;
  Scheduler scheduler = Scheduler::kRandomRelay;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(beta0 >= 0.0) || !std::isfinite(beta0))
      throw InvalidArgument("beta0 must be finite and >= 0");
    if (!(lambda >= 1.0) || !std::isfinite(lambda))
      throw InvalidArgument("lambda must be finite and >= 1");
    if (smooth < 1) throw InvalidArgument("smooth must be a positive integer");
    if (t_max && *t_max < 1) throw InvalidArgument("t_max must be positive");
  }

  std::int64_t resolved_t_max(int agent_count) const {
    return t_max.value_or(std::int64_t{500} * agent_count);
  }
};

/// A candidate action with its potential gain and the total-cost decrease
/// it causes (negative when the action spends more).
struct ScoredAction {
  Action action;
  double gain = 0.0;
  double cost_decrease = 0.0;
};

struct TracePoint {
  std::int64_t iteration = 0;
  double objective = 0.0;
};

/// One acted relay step.
struct StepRecord {
  std::int64_t iteration = 0;
  AgentId agent = 0;
  Action action;
  double gain = 0.0;
  double phi_after = 0.0;
};

struct RunResult {
  Partition final_partition;
  double objective = 0.0;
  std::int64_t iterations = 0;  // relay handoffs
  bool converged = false;
  double cu_rate = 0.0;  // total cost / budget, 0 when the budget is 0
  double wall_time = 0.0;  // seconds
  std::vector<TracePoint> objective_trace;
  std::vector<StepRecord> steps;
  std::uint64_t seed = 0;
};

// ---------------------------------------------------------------------------
// Action space

/// Improving actions for agent i: budget-feasible joins with positive gain
/// and, only when there are none and the variant allows it, improving
/// exchanges with members of the agent's feasible tasks.
inline std::vector<ScoredAction> candidate_actions(const Instance& inst,
                                                   const Partition& p, AgentId i,
                                                   Variant variant) {
  std::vector<ScoredAction> out;
  const CoalitionId from = p.coalition_of(i);
  const double own_cost = assignment_cost(inst, i, from);
  for_each_join_target(inst, p, i, [&](CoalitionId t) {
    Gain g = join_gain(inst, p, i, t);
    if (is_improvement(g))
      out.push_back({Action::join(t), g.value(), own_cost - assignment_cost(inst, i, t)});
  });
  if (!out.empty() || variant == Variant::kNoCe) return out;
  for_each_exchange(inst, p, i, [&](CoalitionId t, AgentId partner) {
    Gain g = exchange_gain(inst, p, i, partner);
    if (!is_improvement(g)) return;
    const double before = own_cost + assignment_cost(inst, partner, t);
    const double after = assignment_cost(inst, i, t) + assignment_cost(inst, partner, from);
    out.push_back({Action::exchange(t, partner), g.value(), before - after});
  });
  return out;
}

/// Largest possible cost decrease of a single action on this instance.
inline double max_cost_decrease(const Instance& inst) {
  return inst.max_cost() - inst.min_cost();
}

/// Inverse temperature: beta0 * dc / dc_max + ln(lambda t + 1) / smooth.
/// `cost_decrease` is clamped into [0, dc_max]; a zero dc_max drops the
/// cost term.
inline double beta_schedule(const LearningParams& params, std::int64_t t,
                            double cost_decrease, double max_decrease) {
  double cost_term = 0.0;
  if (max_decrease > 0.0) {
    const double dc = std::clamp(cost_decrease, 0.0, max_decrease);
    cost_term = params.beta0 * dc / max_decrease;
  }
  return cost_term +
         std::log(params.lambda * static_cast<double>(t) + 1.0) / params.smooth;
}

/// Index of the chosen candidate. Each candidate is weighted by
/// exp(beta(t, dc_a) * gain_a); the no-HLL variant draws uniformly.
inline std::size_t select_action_index(std::span<const ScoredAction> candidates,
                                       const LearningParams& params, std::int64_t t,
                                       double max_decrease, std::mt19937_64& rng) {
  if (candidates.empty()) throw InvalidArgument("select_action: no candidates");
  if (candidates.size() == 1) return 0;
  if (params.variant == Variant::kNoHll) {
    return std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng);
  }
  std::vector<double> score(candidates.size());
  for (std::size_t a = 0; a < candidates.size(); ++a) {
    score[a] = beta_schedule(params, t, candidates[a].cost_decrease, max_decrease) *
               candidates[a].gain;
  }
  const double top = *std::max_element(score.begin(), score.end());
  double total = 0.0;
  for (double& s : score) {
    s = std::exp(s - top);
    total += s;
  }
  double u = std::uniform_real_distribution<double>(0.0, total)(rng);
  for (std::size_t a = 0; a < score.size(); ++a) {
    if (u < score[a]) return a;
    u -= score[a];
  }
  return score.size() - 1;
}

inline Action select_action(std::span<const ScoredAction> candidates,
                            const LearningParams& params, std::int64_t t,
                            double max_decrease, std::mt19937_64& rng) {
  return candidates[select_action_index(candidates, params, t, max_decrease, rng)].action;
}

// ---------------------------------------------------------------------------
// Relay execution

/// Outcome of one holder's turn: the applied action, or nullopt for Stay.
using StepOutcome = std::optional<ScoredAction>;

/// LLH decision for holder i; mutates `p` when an action is taken.
inline StepOutcome llh_step_in_place(const Instance& inst, Partition& p, AgentId i,
                                     std::int64_t t, const LearningParams& params,
                                     double max_decrease, std::mt19937_64& rng) {
  auto candidates = candidate_actions(inst, p, i, params.variant);
  if (candidates.empty()) return std::nullopt;
  const auto& chosen = candidates[select_action_index(candidates, params, t, max_decrease, rng)];
  apply_action_in_place(inst, p, i, chosen.action);
  return chosen;
}

struct LlhStep {
  Partition partition;
  bool acted = false;
};

inline LlhStep llh_step(const Instance& inst, const Partition& p, AgentId i,
                        std::int64_t t, const LearningParams& params,
                        std::mt19937_64& rng) {
  LlhStep out{p, false};
  out.acted = llh_step_in_place(inst, out.partition, i, t, params,
                                max_cost_decrease(inst), rng)
                  .has_value();
  return out;
}

inline double cost_utilization(const Instance& inst, const Partition& p) {
  if (inst.budget <= 0.0) return 0.0;
  return std::min(1.0, total_cost(inst, p) / inst.budget);
}

/// Runs the relay protocol with an arbitrary per-holder decision rule.
///
/// `decide(partition, holder, t, rng, quiet)` applies at most one action to
/// `partition` and returns it, or nullopt when the holder stays. A holder
/// that stays despite having an improving action must clear `quiet`, so
/// that a full cycle of quiet holders certifies an equilibrium.
template <typename Decide>
RunResult run_relay(const Instance& inst, Scheduler scheduler, std::uint64_t seed,
                    std::int64_t t_max, Decide&& decide) {
  const auto start = std::chrono::steady_clock::now();
  const int n = inst.agent_count();
  std::mt19937_64 rng(seed);
  RunResult result;
  result.seed = seed;
  Partition p(inst);

  std::vector<AgentId> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  if (scheduler == Scheduler::kRoundRobin) std::shuffle(order.begin(), order.end(), rng);
  std::uniform_int_distribution<AgentId> pick(0, n - 1);

  std::vector<char> quiet(static_cast<std::size_t>(n), 0);
  int quiet_count = 0;
  double phi = 0.0;
  result.objective_trace.push_back({0, phi});

  std::int64_t t = 0;
  while (t < t_max) {
    const AgentId holder = scheduler == Scheduler::kRoundRobin
                               ? order[static_cast<std::size_t>(t % n)]
                               : pick(rng);
    bool holder_quiet = true;
    std::optional<ScoredAction> acted = decide(p, holder, t, rng, holder_quiet);
    ++t;
    if (acted) {
      phi = potential(inst, p);
      result.objective_trace.push_back({t, phi});
      result.steps.push_back({t, holder, acted->action, acted->gain, phi});
      std::fill(quiet.begin(), quiet.end(), 0);
      quiet_count = 0;
    } else if (holder_quiet && !quiet[static_cast<std::size_t>(holder)]) {
      quiet[static_cast<std::size_t>(holder)] = 1;
      if (++quiet_count == n) {
        result.converged = true;
        break;
      }
    }
  }

  result.iterations = t;
  result.objective = potential(inst, p);
  result.cu_rate = cost_utilization(inst, p);
  result.final_partition = std::move(p);
  result.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

/// Full LLH run (or one of its ablations) from the all-unassigned state.
inline RunResult run(const Instance& inst, const LearningParams& params) {
  params.validate();
  const double max_decrease = max_cost_decrease(inst);
  return run_relay(inst, params.scheduler, params.seed,
                   params.resolved_t_max(inst.agent_count()),
                   [&](Partition& p, AgentId i, std::int64_t t, std::mt19937_64& rng,
                       bool&) {
                     return llh_step_in_place(inst, p, i, t, params, max_decrease, rng);
                   });
}

/// Writes `t,agent,action_kind,target,partner,gain,phi_after`, one line per
/// acted step. Ids are 1-based; the dummy coalition is m+1 and a missing
/// partner is 0.
inline void write_trace(std::ostream& os, const RunResult& r) {
  os << "t,agent,action_kind,target,partner,gain,phi_after\n";
  for (const auto& s : r.steps) {
    os << s.iteration << ',' << s.agent + 1 << ',' << to_string(s.action.kind) << ','
       << s.action.target + 1 << ',' << s.action.partner + 1 << ','
       << detail::format_real(s.gain) << ',' << detail::format_real(s.phi_after) << '\n';
  }
}

}  // namespace hctab
