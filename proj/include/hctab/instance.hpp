#pragma once

// Problem data for heterogeneous-cost task allocation under a budget:
// agents with capability competencies and per-task costs, tasks with
// required capabilities, and a global budget. Includes the random scenario
// generator, scenario metrics and the canonical text format.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "hctab/error.hpp"

namespace hctab {

// Agents, tasks and capabilities are 0-based indices in memory. The text
// format and the CLI print them 1-based.
using AgentId = int;
using TaskId = int;
using CapabilityId = int;

struct Competency {
  CapabilityId capability = 0;
  double level = 0.0;

  friend bool operator==(const Competency&, const Competency&) = default;
};

struct FeasibleTask {
  TaskId task = 0;
  double cost = 0.0;

  friend bool operator==(const FeasibleTask&, const FeasibleTask&) = default;
};

struct Agent {
  // Both lists are sorted by id and free of duplicates.
  std::vector<Competency> capabilities;
  std::vector<FeasibleTask> feasible;

  /// h_ik, or 0 when the agent lacks capability k.
  double competency(CapabilityId k) const {
    for (const auto& c : capabilities) {
      if (c.capability == k) return c.level;
    }
    return 0.0;
  }

  std::optional<double> cost(TaskId task) const {
    auto it = std::lower_bound(
        feasible.begin(), feasible.end(), task,
        [](const FeasibleTask& f, TaskId t) { return f.task < t; });
    if (it == feasible.end() || it->task != task) return std::nullopt;
    return it->cost;
  }

  bool can_perform(TaskId task) const { return cost(task).has_value(); }

  double mean_cost() const {
    if (feasible.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& f : feasible) sum += f.cost;
    return sum / static_cast<double>(feasible.size());
  }

  friend bool operator==(const Agent&, const Agent&) = default;
};

struct Task {
  std::vector<CapabilityId> required;  // sorted, nonempty

  friend bool operator==(const Task&, const Task&) = default;
};

struct Instance {
  int universe = 0;  // |W|
  double budget = 0.0;
  std::vector<Agent> agents;
  std::vector<Task> tasks;

  int agent_count() const { return static_cast<int>(agents.size()); }
  int task_count() const { return static_cast<int>(tasks.size()); }

  double min_cost() const {
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& a : agents)
      for (const auto& f : a.feasible) lo = std::min(lo, f.cost);
    return std::isinf(lo) ? 0.0 : lo;
  }

  double max_cost() const {
    double hi = 0.0;
    for (const auto& a : agents)
      for (const auto& f : a.feasible) hi = std::max(hi, f.cost);
    return hi;
  }

  /// Throws InvalidArgument describing the first violated invariant.
  void validate() const;

  friend bool operator==(const Instance&, const Instance&) = default;
};

namespace detail {

inline std::string agent_label(int i) { return "agent " + std::to_string(i + 1); }

template <typename T, typename Key>
bool strictly_increasing(const std::vector<T>& v, Key key) {
  for (std::size_t x = 1; x < v.size(); ++x) {
    if (!(key(v[x - 1]) < key(v[x]))) return false;
  }
  return true;
}

}  // namespace detail

inline void Instance::validate() const {
  if (agents.empty()) throw InvalidArgument("instance has no agents");
  if (tasks.empty()) throw InvalidArgument("instance has no tasks");
  if (universe < 1) throw InvalidArgument("capability universe is empty");
  if (!(budget >= 0.0) || !std::isfinite(budget))
    throw InvalidArgument("budget must be a finite nonnegative number");
  const int m = task_count();
  for (int i = 0; i < agent_count(); ++i) {
    const Agent& a = agents[static_cast<std::size_t>(i)];
    for (const auto& c : a.capabilities) {
      if (c.capability < 0 || c.capability >= universe)
        throw InvalidArgument(detail::agent_label(i) +
                              ": capability id out of range");
      if (!(c.level >= 0.0) || !std::isfinite(c.level))
        throw InvalidArgument(detail::agent_label(i) +
                              ": competency must be finite and >= 0");
    }
    if (!detail::strictly_increasing(a.capabilities,
                                     [](const Competency& c) { return c.capability; }))
      throw InvalidArgument(detail::agent_label(i) +
                            ": capabilities must be sorted and unique");
    for (const auto& f : a.feasible) {
      if (f.task < 0 || f.task >= m)
        throw InvalidArgument(detail::agent_label(i) +
                              ": feasible task id out of range");
      if (!(f.cost > 0.0) || !std::isfinite(f.cost))
        throw InvalidArgument(detail::agent_label(i) +
                              ": cost must be finite and > 0");
    }
    if (!detail::strictly_increasing(a.feasible,
                                     [](const FeasibleTask& f) { return f.task; }))
      throw InvalidArgument(detail::agent_label(i) +
                            ": feasible tasks must be sorted and unique");
  }
  for (int j = 0; j < m; ++j) {
    const Task& t = tasks[static_cast<std::size_t>(j)];
    const std::string label = "task " + std::to_string(j + 1);
    if (t.required.empty())
      throw InvalidArgument(label + ": requires no capability");
    for (CapabilityId k : t.required) {
      if (k < 0 || k >= universe)
        throw InvalidArgument(label + ": capability id out of range");
    }
    if (!detail::strictly_increasing(t.required, [](CapabilityId k) { return k; }))
      throw InvalidArgument(label + ": required capabilities must be sorted and unique");
  }
}

// ---------------------------------------------------------------------------
// Scenario generation

template <typename T>
struct Interval {
  T lo{};
  T hi{};

  bool empty() const { return hi < lo; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct GeneratorConfig {
  int task_count = 50;
  int agents_per_task = 3;
  Interval<double> feasible_fraction{0.1, 0.2};
  Interval<int> capabilities_per_agent{1, 10};
  Interval<int> capabilities_per_task{5, 10};
  Interval<int> competency{1, 10};
  Interval<double> cost{1.0, 20.0};
  double budget_rate = 5.0;  // B / m
  int universe = 10;
  std::uint64_t seed = 0;

  void validate() const;

  /// Inclusive bounds on the number of feasible tasks per agent.
  Interval<int> feasible_count_bounds() const {
    // Guard against products such as 0.2 * 30 = 6.000000000000001.
    constexpr double kSlack = 1e-9;
    const double m = task_count;
    int lo = static_cast<int>(std::floor(feasible_fraction.lo * m + kSlack));
    int hi = static_cast<int>(std::ceil(feasible_fraction.hi * m - kSlack));
    return {lo, std::min(hi, task_count)};
  }
};

inline void GeneratorConfig::validate() const {
  if (task_count < 1) throw InvalidArgument("task_count must be positive");
  if (agents_per_task < 1)
    throw InvalidArgument("agents_per_task must be positive");
  if (universe < 1) throw InvalidArgument("universe must be positive");
  if (feasible_fraction.empty() || feasible_fraction.lo < 0.0 ||
      feasible_fraction.hi > 1.0)
    throw InvalidArgument("feasible_fraction must be a subinterval of [0, 1]");
  if (capabilities_per_agent.empty() || capabilities_per_agent.lo < 0 ||
      capabilities_per_agent.hi > universe)
    throw InvalidArgument("capabilities_per_agent must lie in [0, universe]");
  if (capabilities_per_task.empty() || capabilities_per_task.lo < 1 ||
      capabilities_per_task.hi > universe)
    throw InvalidArgument("capabilities_per_task must lie in [1, universe]");
  if (competency.empty() || competency.lo < 0)
    throw InvalidArgument("competency range must be nonempty and >= 0");
  if (cost.empty() || cost.lo < 0.0 || !(cost.hi > 0.0) ||
      !std::isfinite(cost.hi))
    throw InvalidArgument("cost range must be nonempty, finite and positive");
  if (!(budget_rate >= 0.0) || !std::isfinite(budget_rate))
    throw InvalidArgument("budget_rate must be finite and >= 0");
  if (feasible_count_bounds().lo < 1)
    throw InvalidArgument(
        "degenerate configuration: the feasible-task lower bound rounds to "
        "zero, so some agents could never act");
}

namespace detail {

inline std::vector<int> sample_ids(int universe, int count, std::mt19937_64& rng) {
  std::vector<int> all(static_cast<std::size_t>(universe));
  std::iota(all.begin(), all.end(), 0);
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(count));
  std::sample(all.begin(), all.end(), std::back_inserter(out), count, rng);
  return out;  // std::sample keeps the input order, so this is sorted
}

inline int uniform_int(Interval<int> r, std::mt19937_64& rng) {
  return std::uniform_int_distribution<int>(r.lo, r.hi)(rng);
}

// Uniform on the open interval (lo, hi); a degenerate interval yields lo.
inline double uniform_open(Interval<double> r, std::mt19937_64& rng) {
  if (!(r.lo < r.hi)) return r.lo;
  std::uniform_real_distribution<double> dist(r.lo, r.hi);
  double x = dist(rng);
  while (x <= r.lo) x = dist(rng);
  return x;
}

}  // namespace detail

/// Draws a random scenario. Deterministic in (cfg, cfg.seed).
inline Instance generate_instance(const GeneratorConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  Instance inst;
  inst.universe = cfg.universe;
  inst.budget = cfg.budget_rate * cfg.task_count;

  inst.tasks.resize(static_cast<std::size_t>(cfg.task_count));
  for (auto& t : inst.tasks) {
    t.required = detail::sample_ids(
        cfg.universe, detail::uniform_int(cfg.capabilities_per_task, rng), rng);
  }

  const Interval<int> feasible_count = cfg.feasible_count_bounds();
  inst.agents.resize(static_cast<std::size_t>(cfg.task_count) *
                     static_cast<std::size_t>(cfg.agents_per_task));
  for (auto& a : inst.agents) {
    auto caps = detail::sample_ids(
        cfg.universe, detail::uniform_int(cfg.capabilities_per_agent, rng), rng);
    a.capabilities.reserve(caps.size());
    for (int k : caps) {
      a.capabilities.push_back(
          {k, static_cast<double>(detail::uniform_int(cfg.competency, rng))});
    }
    auto tasks = detail::sample_ids(cfg.task_count,
                                    detail::uniform_int(feasible_count, rng), rng);
    a.feasible.reserve(tasks.size());
    for (int j : tasks) {
      a.feasible.push_back({j, detail::uniform_open(cfg.cost, rng)});
    }
  }
  return inst;
}

/// Normalized spread of an agent's task costs: (max - min) / global max.
inline double heterogeneity_degree(double min_cost, double max_cost,
                                   double global_max_cost) {
  if (!(min_cost > 0.0) || !(min_cost <= max_cost) ||
      !(max_cost <= global_max_cost))
    throw InvalidArgument(
        "heterogeneity_degree requires 0 < min_cost <= max_cost <= "
        "global_max_cost");
  return (max_cost - min_cost) / global_max_cost;
}

/// Cost interval whose width realizes a target heterogeneity degree.
///
/// The interval has width gamma * global_max and is centered on `center`,
/// shifted as needed to stay inside [0, global_max].
inline Interval<double> cost_interval_for_heterogeneity(double gamma,
                                                        double global_max,
                                                        double center) {
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw InvalidArgument("heterogeneity degree must lie in [0, 1]");
  if (!(global_max > 0.0) || !std::isfinite(global_max))
    throw InvalidArgument("global maximum cost must be positive");
  const double width = gamma * global_max;
  double lo = center - width / 2.0;
  double hi = center + width / 2.0;
  if (hi > global_max) {
    hi = global_max;
    lo = global_max - width;
  }
  if (lo < 0.0) {
    lo = 0.0;
    hi = width;
  }
  return {lo, hi};
}

inline double budget_rate(const Instance& inst) {
  if (inst.task_count() < 1) throw InvalidArgument("instance has no tasks");
  return inst.budget / inst.task_count();
}

// ---------------------------------------------------------------------------
// Text format
//
//   hctab-instance 1
//   n <agents>
//   m <tasks>
//   universe <|W|>
//   budget <B>
//   agent <i> capabilities <k>:<h> ... feasible <j>:<c> ...
//   task <j> required <k> ...
//
// Ids are 1-based. Reals use the shortest representation that round-trips.

namespace detail {

inline std::string format_real(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' ||
                                 line[pos] == '\r'))
      ++pos;
    std::size_t start = pos;
    while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t' &&
           line[pos] != '\r')
      ++pos;
    if (pos > start) out.push_back(line.substr(start, pos - start));
  }
  return out;
}

template <typename T>
T parse_number(std::string_view tok, std::size_t line, const std::string& field) {
  T value{};
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size())
    throw ParseError(line, field, "cannot parse '" + std::string(tok) + "'");
  return value;
}

}  // namespace detail

inline std::string serialize_instance(const Instance& inst) {
  std::string out;
  out += "hctab-instance 1\n";
  out += "n " + std::to_string(inst.agent_count()) + "\n";
  out += "m " + std::to_string(inst.task_count()) + "\n";
  out += "universe " + std::to_string(inst.universe) + "\n";
  out += "budget " + detail::format_real(inst.budget) + "\n";
  for (int i = 0; i < inst.agent_count(); ++i) {
    const Agent& a = inst.agents[static_cast<std::size_t>(i)];
    out += "agent " + std::to_string(i + 1) + " capabilities";
    for (const auto& c : a.capabilities)
      out += " " + std::to_string(c.capability + 1) + ":" +
             detail::format_real(c.level);
    out += " feasible";
    for (const auto& f : a.feasible)
      out += " " + std::to_string(f.task + 1) + ":" + detail::format_real(f.cost);
    out += "\n";
  }
  for (int j = 0; j < inst.task_count(); ++j) {
    out += "task " + std::to_string(j + 1) + " required";
    for (CapabilityId k : inst.tasks[static_cast<std::size_t>(j)].required)
      out += " " + std::to_string(k + 1);
    out += "\n";
  }
  return out;
}

/// Parses the canonical text format. Rejects anything that fails
/// Instance::validate, reporting the line where the bad record lives.
inline Instance parse_instance(std::string_view text) {
  Instance inst;
  int n = -1;
  int m = -1;
  bool have_universe = false;
  bool have_budget = false;
  bool have_magic = false;
  std::vector<std::size_t> agent_lines;
  std::vector<std::size_t> task_lines;
  std::vector<bool> agent_seen;
  std::vector<bool> task_seen;

  auto require_header = [&](std::size_t line, const char* field) {
    if (n < 0 || m < 0 || !have_universe || !have_budget)
      throw ParseError(line, field, "record before header fields n, m, universe, budget");
  };

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    auto tok = detail::split_ws(line);
    if (tok.empty() || tok[0].front() == '#') {
      if (eol == text.size()) break;
      continue;
    }
    const std::string key(tok[0]);
    if (!have_magic) {
      if (key != "hctab-instance" || tok.size() != 2 || tok[1] != "1")
        throw ParseError(line_no, "header", "expected 'hctab-instance 1'");
      have_magic = true;
    } else if (key == "n" || key == "m" || key == "universe") {
      if (tok.size() != 2) throw ParseError(line_no, key, "expected one value");
      int v = detail::parse_number<int>(tok[1], line_no, key);
      if (v < 1) throw ParseError(line_no, key, "must be positive");
      if (key == "n") {
        n = v;
        inst.agents.assign(static_cast<std::size_t>(n), {});
        agent_seen.assign(static_cast<std::size_t>(n), false);
        agent_lines.assign(static_cast<std::size_t>(n), 0);
      } else if (key == "m") {
        m = v;
        inst.tasks.assign(static_cast<std::size_t>(m), {});
        task_seen.assign(static_cast<std::size_t>(m), false);
        task_lines.assign(static_cast<std::size_t>(m), 0);
      } else {
        inst.universe = v;
        have_universe = true;
      }
    } else if (key == "budget") {
      if (tok.size() != 2) throw ParseError(line_no, key, "expected one value");
      inst.budget = detail::parse_number<double>(tok[1], line_no, key);
      if (!(inst.budget >= 0.0) || !std::isfinite(inst.budget))
        throw ParseError(line_no, key, "must be finite and >= 0");
      have_budget = true;
    } else if (key == "agent") {
      require_header(line_no, "agent");
      if (tok.size() < 4 || tok[2] != "capabilities")
        throw ParseError(line_no, "agent", "expected 'agent <id> capabilities ... feasible ...'");
      int id = detail::parse_number<int>(tok[1], line_no, "agent.id");
      if (id < 1 || id > n) throw ParseError(line_no, "agent.id", "out of range [1, n]");
      auto idx = static_cast<std::size_t>(id - 1);
      if (agent_seen[idx]) throw ParseError(line_no, "agent.id", "duplicate agent");
      agent_seen[idx] = true;
      agent_lines[idx] = line_no;
      Agent& a = inst.agents[idx];
      std::size_t t = 3;
      for (; t < tok.size() && tok[t] != "feasible"; ++t) {
        auto colon = tok[t].find(':');
        if (colon == std::string_view::npos)
          throw ParseError(line_no, "agent.capabilities", "expected <k>:<h>");
        int k = detail::parse_number<int>(tok[t].substr(0, colon), line_no, "agent.capabilities");
        double h = detail::parse_number<double>(tok[t].substr(colon + 1), line_no, "agent.capabilities");
        if (k < 1 || k > inst.universe)
          throw ParseError(line_no, "agent.capabilities", "capability id out of range [1, universe]");
        if (!(h >= 0.0) || !std::isfinite(h))
          throw ParseError(line_no, "agent.capabilities", "competency must be finite and >= 0");
        a.capabilities.push_back({k - 1, h});
      }
      if (t == tok.size()) throw ParseError(line_no, "agent", "missing 'feasible'");
      for (++t; t < tok.size(); ++t) {
        auto colon = tok[t].find(':');
        if (colon == std::string_view::npos)
          throw ParseError(line_no, "agent.feasible", "expected <j>:<c>");
        int j = detail::parse_number<int>(tok[t].substr(0, colon), line_no, "agent.feasible");
        double c = detail::parse_number<double>(tok[t].substr(colon + 1), line_no, "agent.feasible");
        if (j < 1 || j > m)
          throw ParseError(line_no, "agent.feasible", "task id out of range [1, m]");
        if (!(c > 0.0) || !std::isfinite(c))
          throw ParseError(line_no, "agent.feasible", "cost must be finite and > 0");
        a.feasible.push_back({j - 1, c});
      }
    } else if (key == "task") {
      require_header(line_no, "task");
      if (tok.size() < 3 || tok[2] != "required")
        throw ParseError(line_no, "task", "expected 'task <id> required <k>...'");
      int id = detail::parse_number<int>(tok[1], line_no, "task.id");
      if (id < 1 || id > m) throw ParseError(line_no, "task.id", "out of range [1, m]");
      auto idx = static_cast<std::size_t>(id - 1);
      if (task_seen[idx]) throw ParseError(line_no, "task.id", "duplicate task");
      task_seen[idx] = true;
      task_lines[idx] = line_no;
      for (std::size_t t = 3; t < tok.size(); ++t) {
        int k = detail::parse_number<int>(tok[t], line_no, "task.required");
        if (k < 1 || k > inst.universe)
          throw ParseError(line_no, "task.required", "capability id out of range [1, universe]");
        inst.tasks[idx].required.push_back(k - 1);
      }
    } else {
      throw ParseError(line_no, key, "unknown record");
    }
    if (eol == text.size()) break;
  }

  if (!have_magic) throw ParseError(line_no, "header", "empty input");
  require_header(line_no, "header");
  for (std::size_t i = 0; i < agent_seen.size(); ++i)
    if (!agent_seen[i])
      throw ParseError(line_no, "agent", "missing record for agent " + std::to_string(i + 1));
  for (std::size_t j = 0; j < task_seen.size(); ++j)
    if (!task_seen[j])
      throw ParseError(line_no, "task", "missing record for task " + std::to_string(j + 1));

  // Ordering, uniqueness and nonemptiness are checked record by record so
  // the error names the right line.
  for (std::size_t i = 0; i < inst.agents.size(); ++i) {
    const Agent& a = inst.agents[i];
    if (!detail::strictly_increasing(a.capabilities, [](const Competency& c) { return c.capability; }))
      throw ParseError(agent_lines[i], "agent.capabilities", "ids must be strictly increasing");
    if (!detail::strictly_increasing(a.feasible, [](const FeasibleTask& f) { return f.task; }))
      throw ParseError(agent_lines[i], "agent.feasible", "ids must be strictly increasing");
  }
  for (std::size_t j = 0; j < inst.tasks.size(); ++j) {
    const Task& t = inst.tasks[j];
    if (t.required.empty())
      throw ParseError(task_lines[j], "task.required", "must be nonempty");
    if (!detail::strictly_increasing(t.required, [](CapabilityId k) { return k; }))
      throw ParseError(task_lines[j], "task.required", "ids must be strictly increasing");
  }
  inst.validate();
  return inst;
}

}  // namespace hctab
