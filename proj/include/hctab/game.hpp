#pragma once

// Coalition formation game over an Instance. Each task owns a coalition,
// and the extra coalition at index m (the dummy) holds unassigned agents.
// Coalition value is the task reward while the global budget holds and
// INFEASIBLE otherwise. The potential (sum of coalition values) equals the
// allocation objective, and an agent's marginal-contribution utility
// changes by exactly the potential change under any unilateral move.

#include <algorithm>
#include <compare>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hctab/error.hpp"
#include "hctab/instance.hpp"

namespace hctab {

/// Index of a coalition: a task id in [0, m) or the dummy coalition m.
using CoalitionId = int;

/// Gains at or below this are treated as zero: not an improvement.
inline constexpr double kGainTolerance = 1e-9;

/// Slack on the budget comparison, relative to max(1, B). Absorbs rounding
/// between incremental and from-scratch cost sums.
inline constexpr double kBudgetTolerance = 1e-9;

inline bool within_budget(double total_cost, double budget) {
  return total_cost <= budget + kBudgetTolerance * std::max(1.0, budget);
}

/// A real number or the INFEASIBLE marker, which orders below every value.
class CoalitionValue {
 public:
  constexpr CoalitionValue(double v) : value_(v) {}  // NOLINT: implicit by intent
  static constexpr CoalitionValue infeasible() { return CoalitionValue(); }

  constexpr bool is_infeasible() const { return !value_.has_value(); }
  constexpr bool is_finite() const { return value_.has_value(); }

  double value() const {
    if (!value_) throw InfeasiblePartition("value of an infeasible coalition");
    return *value_;
  }

  friend constexpr bool operator==(const CoalitionValue&,
                                   const CoalitionValue&) = default;
  friend constexpr std::partial_ordering operator<=>(const CoalitionValue& a,
                                                     const CoalitionValue& b) {
    if (!a.value_ && !b.value_) return std::partial_ordering::equivalent;
    if (!a.value_) return std::partial_ordering::less;
    if (!b.value_) return std::partial_ordering::greater;
    return *a.value_ <=> *b.value_;
  }

 private:
  constexpr CoalitionValue() = default;
  std::optional<double> value_;
};

/// Potential change of a move, or INFEASIBLE when the move breaks the budget.
using Gain = CoalitionValue;

inline bool is_improvement(const Gain& g) {
  return g.is_finite() && g.value() > kGainTolerance;
}

/// Coalition structure as a total assignment vector, with member lists and
/// the total cost kept in sync.
class Partition {
 public:
  Partition() = default;

  /// Everyone in the dummy coalition.
  explicit Partition(const Instance& inst)
      : assignment_(static_cast<std::size_t>(inst.agent_count()),
                    inst.task_count()),
        members_(static_cast<std::size_t>(inst.task_count()) + 1) {
    auto& dummy = members_.back();
    dummy.resize(assignment_.size());
    for (std::size_t i = 0; i < dummy.size(); ++i)
      dummy[i] = static_cast<AgentId>(i);
  }

  /// Builds a partition from a 0-based assignment vector where the value m
  /// denotes the dummy coalition. Throws if an agent sits on an infeasible
  /// task or the vector has the wrong length.
  static Partition from_assignment(const Instance& inst,
                                   std::vector<CoalitionId> assignment) {
    if (static_cast<int>(assignment.size()) != inst.agent_count())
      throw InvalidArgument("assignment length differs from agent count");
    Partition p(inst);
    for (AgentId i = 0; i < inst.agent_count(); ++i) {
      CoalitionId c = assignment[static_cast<std::size_t>(i)];
      if (c < 0 || c > inst.task_count())
        throw InvalidArgument("coalition id out of range for agent " +
                              std::to_string(i + 1));
      if (c != p.dummy() && !inst.agents[static_cast<std::size_t>(i)].can_perform(c))
        throw InvalidArgument("agent " + std::to_string(i + 1) +
                              " assigned to an infeasible task");
    }
    for (auto& m : p.members_) m.clear();
    p.assignment_ = std::move(assignment);
    for (AgentId i = 0; i < inst.agent_count(); ++i)
      p.members_[static_cast<std::size_t>(p.assignment_[static_cast<std::size_t>(i)])]
          .push_back(i);
    p.recompute_cost(inst);
    return p;
  }

  int agent_count() const { return static_cast<int>(assignment_.size()); }
  int task_count() const { return static_cast<int>(members_.size()) - 1; }
  CoalitionId dummy() const { return task_count(); }

  CoalitionId coalition_of(AgentId i) const {
    return assignment_[static_cast<std::size_t>(i)];
  }
  bool is_assigned(AgentId i) const { return coalition_of(i) != dummy(); }

  std::span<const AgentId> members(CoalitionId c) const {
    return members_[static_cast<std::size_t>(c)];
  }

  const std::vector<CoalitionId>& assignment() const { return assignment_; }

  /// Sum of c_{i,a_i} over assigned agents, in agent order.
  double total_cost() const { return total_cost_; }

  /// Moves agent i to coalition c. Caller guarantees feasibility of c for i.
  void move(const Instance& inst, AgentId i, CoalitionId c) {
    CoalitionId from = coalition_of(i);
    if (from == c) return;
    auto& src = members_[static_cast<std::size_t>(from)];
    src.erase(std::find(src.begin(), src.end(), i));
    auto& dst = members_[static_cast<std::size_t>(c)];
    dst.insert(std::lower_bound(dst.begin(), dst.end(), i), i);
    assignment_[static_cast<std::size_t>(i)] = c;
    recompute_cost(inst);
  }

  friend bool operator==(const Partition& a, const Partition& b) {
    return a.assignment_ == b.assignment_;
  }

 private:
  void recompute_cost(const Instance& inst) {
    double sum = 0.0;
    for (AgentId i = 0; i < agent_count(); ++i) {
      CoalitionId c = coalition_of(i);
      if (c != dummy()) sum += *inst.agents[static_cast<std::size_t>(i)].cost(c);
    }
    total_cost_ = sum;
  }

  std::vector<CoalitionId> assignment_;
  std::vector<std::vector<AgentId>> members_;  // members_[m] is the dummy
  double total_cost_ = 0.0;
};

// ---------------------------------------------------------------------------
// Rewards and values

/// Reward of task j for the agent set `members`, optionally with one extra
/// agent added and one removed. Each required capability contributes the
/// best competency among the set, or 0 if nobody has it.
inline double coalition_reward(const Instance& inst, TaskId j,
                               std::span<const AgentId> members,
                               std::optional<AgentId> add = std::nullopt,
                               std::optional<AgentId> remove = std::nullopt) {
  double reward = 0.0;
  for (CapabilityId k : inst.tasks[static_cast<std::size_t>(j)].required) {
    double best = 0.0;
    for (AgentId i : members) {
      if (remove && *remove == i) continue;
      best = std::max(best, inst.agents[static_cast<std::size_t>(i)].competency(k));
    }
    if (add) best = std::max(best, inst.agents[static_cast<std::size_t>(*add)].competency(k));
    reward += best;
  }
  return reward;
}

inline double task_reward(const Instance& inst, const Partition& p, TaskId j) {
  return coalition_reward(inst, j, p.members(j));
}

inline double total_cost(const Instance& inst, const Partition& p) {
  double sum = 0.0;
  for (AgentId i = 0; i < p.agent_count(); ++i) {
    if (p.is_assigned(i))
      sum += *inst.agents[static_cast<std::size_t>(i)].cost(p.coalition_of(i));
  }
  return sum;
}

inline bool is_budget_feasible(const Instance& inst, const Partition& p) {
  return within_budget(total_cost(inst, p), inst.budget);
}

inline CoalitionValue coalition_value(const Instance& inst, const Partition& p,
                                      CoalitionId j) {
  if (j == p.dummy()) return 0.0;
  if (!is_budget_feasible(inst, p)) return CoalitionValue::infeasible();
  return task_reward(inst, p, j);
}

/// Marginal contribution of i to its own coalition; 0 in the dummy.
inline double agent_utility(const Instance& inst, const Partition& p, AgentId i) {
  if (!is_budget_feasible(inst, p))
    throw InfeasiblePartition("agent_utility on a budget-violating partition");
  CoalitionId c = p.coalition_of(i);
  if (c == p.dummy()) return 0.0;
  return coalition_reward(inst, c, p.members(c)) -
         coalition_reward(inst, c, p.members(c), std::nullopt, i);
}

/// Sum of all coalition values; equals the allocation objective.
inline double potential(const Instance& inst, const Partition& p) {
  if (!is_budget_feasible(inst, p))
    throw InfeasiblePartition("potential of a budget-violating partition");
  double phi = 0.0;
  for (TaskId j = 0; j < p.task_count(); ++j) phi += task_reward(inst, p, j);
  return phi;
}

/// c_{i,c}, with cost 0 for the dummy coalition.
inline double assignment_cost(const Instance& inst, AgentId i, CoalitionId c) {
  if (c == inst.task_count()) return 0.0;
  return *inst.agents[static_cast<std::size_t>(i)].cost(c);
}

inline bool can_join(const Instance& inst, AgentId i, CoalitionId c) {
  return c == inst.task_count() ||
         (c >= 0 && c < inst.task_count() &&
          inst.agents[static_cast<std::size_t>(i)].can_perform(c));
}

// ---------------------------------------------------------------------------
// Moves

/// Potential change when i leaves its coalition for `target`, computed from
/// the two affected coalitions only.
inline Gain join_gain(const Instance& inst, const Partition& p, AgentId i,
                      CoalitionId target) {
  const CoalitionId from = p.coalition_of(i);
  if (target == from) throw InvalidArgument("join target equals current coalition");
  if (!can_join(inst, i, target))
    throw InvalidArgument("join target is not feasible for agent " +
                          std::to_string(i + 1));
  const double cost_after = p.total_cost() - assignment_cost(inst, i, from) +
                            assignment_cost(inst, i, target);
  if (!within_budget(cost_after, inst.budget)) return Gain::infeasible();
  double gain = 0.0;
  if (target != p.dummy()) {
    gain += coalition_reward(inst, target, p.members(target), i) -
            coalition_reward(inst, target, p.members(target));
  }
  if (from != p.dummy()) {
    gain += coalition_reward(inst, from, p.members(from), std::nullopt, i) -
            coalition_reward(inst, from, p.members(from));
  }
  return gain;
}

/// True when i and `partner` may trade coalitions: they sit in different
/// coalitions and each can perform the other's task.
inline bool can_exchange(const Instance& inst, const Partition& p, AgentId i,
                         AgentId partner) {
  const CoalitionId ci = p.coalition_of(i);
  const CoalitionId cp = p.coalition_of(partner);
  return i != partner && ci != cp && can_join(inst, i, cp) &&
         can_join(inst, partner, ci);
}

/// Potential change when i and `partner` swap coalitions.
inline Gain exchange_gain(const Instance& inst, const Partition& p, AgentId i,
                          AgentId partner) {
  if (!can_exchange(inst, p, i, partner))
    throw InvalidArgument("illegal exchange between agents " +
                          std::to_string(i + 1) + " and " +
                          std::to_string(partner + 1));
  const CoalitionId ci = p.coalition_of(i);
  const CoalitionId cp = p.coalition_of(partner);
  const double cost_after = p.total_cost() - assignment_cost(inst, i, ci) -
                            assignment_cost(inst, partner, cp) +
                            assignment_cost(inst, i, cp) +
                            assignment_cost(inst, partner, ci);
  if (!within_budget(cost_after, inst.budget)) return Gain::infeasible();
  double gain = 0.0;
  if (cp != p.dummy()) {
    gain += coalition_reward(inst, cp, p.members(cp), i, partner) -
            coalition_reward(inst, cp, p.members(cp));
  }
  if (ci != p.dummy()) {
    gain += coalition_reward(inst, ci, p.members(ci), partner, i) -
            coalition_reward(inst, ci, p.members(ci));
  }
  return gain;
}

struct Action {
  enum class Kind { kStay, kJoin, kExchange };

  Kind kind = Kind::kStay;
  CoalitionId target = -1;
  AgentId partner = -1;

  static Action stay() { return {}; }
  static Action join(CoalitionId target) { return {Kind::kJoin, target, -1}; }
  static Action exchange(CoalitionId target, AgentId partner) {
    return {Kind::kExchange, target, partner};
  }

  friend bool operator==(const Action&, const Action&) = default;
};

inline const char* to_string(Action::Kind kind) {
  switch (kind) {
    case Action::Kind::kStay: return "stay";
    case Action::Kind::kJoin: return "join";
    case Action::Kind::kExchange: return "exchange";
  }
  return "?";
}

/// Throws InvalidArgument unless `a` is a legal action for agent i.
inline void check_action(const Instance& inst, const Partition& p, AgentId i,
                         const Action& a) {
  if (i < 0 || i >= p.agent_count()) throw InvalidArgument("agent id out of range");
  switch (a.kind) {
    case Action::Kind::kStay:
      return;
    case Action::Kind::kJoin:
      if (!can_join(inst, i, a.target))
        throw InvalidArgument("join target not feasible for agent");
      return;
    case Action::Kind::kExchange:
      if (a.partner < 0 || a.partner >= p.agent_count() ||
          p.coalition_of(a.partner) != a.target || !can_exchange(inst, p, i, a.partner))
        throw InvalidArgument("illegal exchange action");
      return;
  }
}

inline void apply_action_in_place(const Instance& inst, Partition& p, AgentId i,
                                  const Action& a) {
  check_action(inst, p, i, a);
  switch (a.kind) {
    case Action::Kind::kStay:
      break;
    case Action::Kind::kJoin:
      p.move(inst, i, a.target);
      break;
    case Action::Kind::kExchange: {
      const CoalitionId from = p.coalition_of(i);
      p.move(inst, i, a.target);
      p.move(inst, a.partner, from);
      break;
    }
  }
}

inline Partition apply_action(const Instance& inst, const Partition& p, AgentId i,
                              const Action& a) {
  Partition next = p;
  apply_action_in_place(inst, next, i, a);
  return next;
}

/// Potential change of an action (0 for Stay).
inline Gain action_gain(const Instance& inst, const Partition& p, AgentId i,
                        const Action& a) {
  switch (a.kind) {
    case Action::Kind::kStay: return 0.0;
    case Action::Kind::kJoin: return join_gain(inst, p, i, a.target);
    case Action::Kind::kExchange: return exchange_gain(inst, p, i, a.partner);
  }
  return 0.0;
}

/// Calls f(target) for every coalition i may join other than its own.
template <typename F>
void for_each_join_target(const Instance& inst, const Partition& p, AgentId i, F&& f) {
  const CoalitionId from = p.coalition_of(i);
  for (const auto& ft : inst.agents[static_cast<std::size_t>(i)].feasible)
    if (ft.task != from) f(ft.task);
  if (from != p.dummy()) f(p.dummy());
}

/// Calls f(target, partner) for every legal exchange initiated by i towards
/// a task in its feasible set.
template <typename F>
void for_each_exchange(const Instance& inst, const Partition& p, AgentId i, F&& f) {
  const CoalitionId from = p.coalition_of(i);
  for (const auto& ft : inst.agents[static_cast<std::size_t>(i)].feasible) {
    if (ft.task == from) continue;
    for (AgentId partner : p.members(ft.task)) {
      if (can_join(inst, partner, from)) f(ft.task, partner);
    }
  }
}

/// True when no agent has a strictly improving unilateral move and, if
/// requested, no pair has a strictly improving exchange.
inline bool is_nash_stable(const Instance& inst, const Partition& p,
                           bool with_exchange) {
  if (!is_budget_feasible(inst, p))
    throw InfeasiblePartition("stability check on a budget-violating partition");
  for (AgentId i = 0; i < p.agent_count(); ++i) {
    bool improvable = false;
    for_each_join_target(inst, p, i, [&](CoalitionId t) {
      if (!improvable && is_improvement(join_gain(inst, p, i, t))) improvable = true;
    });
    if (improvable) return false;
  }
  if (!with_exchange) return true;
  // Every swap moves at least one agent onto a task, so scanning exchanges
  // initiated towards feasible tasks covers all pairs.
  for (AgentId i = 0; i < p.agent_count(); ++i) {
    bool improvable = false;
    for_each_exchange(inst, p, i, [&](CoalitionId, AgentId partner) {
      if (!improvable && is_improvement(exchange_gain(inst, p, i, partner)))
        improvable = true;
    });
    if (improvable) return false;
  }
  return true;
}

}  // namespace hctab
