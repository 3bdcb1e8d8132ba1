#pragma once

// YAML experiment configuration. Needs yaml-cpp; the rest of the library
// does not.
//
//   base_seed: 7
//   repeats: 10
//   reference: LLH            # or "none"
//   algorithms: [LLH, LLH_NCE, LLH_NHL]
//   instance_policy: fixed    # or per_repeat
//   output: results/          # optional
//   learning: {beta0: 1, lambda: 1, smooth: 1, t_max: 75000, scheduler: random}
//   baseline: {chi: 0.3, t_max: 75000, scheduler: random}
//   defaults: {task_count: 50, budget_rate: 5}   # applied to every scenario
//   scenarios:
//     - {id: n150, task_count: 50}
//     - {id: n300, task_count: 100, seed: 11}

#include <string>

#include <yaml-cpp/yaml.h>

#include "hctab/error.hpp"
#include "hctab/harness.hpp"

namespace hctab {

namespace detail {

template <typename T>
T yaml_get(const YAML::Node& node, const std::string& key) {
  try {
    return node[key].as<T>();
  } catch (const YAML::Exception& e) {
    throw InvalidArgument("config key '" + key + "': " + e.what());
  }
}

template <typename T>
Interval<T> yaml_interval(const YAML::Node& node, const std::string& key) {
  const YAML::Node v = node[key];
  if (!v.IsSequence() || v.size() != 2)
    throw InvalidArgument("config key '" + key + "' must be a two-element list");
  try {
    return {v[0].as<T>(), v[1].as<T>()};
  } catch (const YAML::Exception& e) {
    throw InvalidArgument("config key '" + key + "': " + e.what());
  }
}

inline Scheduler parse_scheduler(const std::string& s) {
  if (s == "random" || s == "random_relay") return Scheduler::kRandomRelay;
  if (s == "round_robin" || s == "round-robin") return Scheduler::kRoundRobin;
  throw InvalidArgument("unknown scheduler '" + s + "'");
}

inline void apply_generator_overrides(const YAML::Node& node, GeneratorConfig& g) {
  if (!node) return;
  if (!node.IsMap()) throw InvalidArgument("generator overrides must be a map");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (key == "id") continue;
    if (key == "task_count") g.task_count = yaml_get<int>(node, key);
    else if (key == "agents_per_task") g.agents_per_task = yaml_get<int>(node, key);
    else if (key == "feasible_fraction") g.feasible_fraction = yaml_interval<double>(node, key);
    else if (key == "capabilities_per_agent") g.capabilities_per_agent = yaml_interval<int>(node, key);
    else if (key == "capabilities_per_task") g.capabilities_per_task = yaml_interval<int>(node, key);
    else if (key == "competency") g.competency = yaml_interval<int>(node, key);
    else if (key == "cost") g.cost = yaml_interval<double>(node, key);
    else if (key == "budget_rate") g.budget_rate = yaml_get<double>(node, key);
    else if (key == "universe") g.universe = yaml_get<int>(node, key);
    else if (key == "seed") g.seed = yaml_get<std::uint64_t>(node, key);
    else throw InvalidArgument("unknown scenario key '" + key + "'");
  }
}

}  // namespace detail

/// Parses a YAML experiment config. Scenarios without an explicit seed use
/// base_seed as their generator seed.
inline ExperimentConfig parse_experiment_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw InvalidArgument(std::string("malformed config: ") + e.what());
  }
  if (!root.IsMap()) throw InvalidArgument("config must be a YAML map");

  ExperimentConfig cfg;
  for (const auto& kv : root) {
    const auto key = kv.first.as<std::string>();
    if (key == "base_seed") cfg.base_seed = detail::yaml_get<std::uint64_t>(root, key);
    else if (key == "repeats") cfg.repeats = detail::yaml_get<int>(root, key);
    else if (key == "output") cfg.output_dir = detail::yaml_get<std::string>(root, key);
    else if (key == "reference") {
      const auto ref = detail::yaml_get<std::string>(root, key);
      if (ref == "none") cfg.reference.reset();
      else cfg.reference = parse_algorithm(ref);
    } else if (key == "algorithms") {
      cfg.algorithms.clear();
      for (const auto& a : kv.second) cfg.algorithms.push_back(parse_algorithm(a.as<std::string>()));
    } else if (key == "instance_policy") {
      const auto p = detail::yaml_get<std::string>(root, key);
      if (p == "fixed") cfg.instance_policy = InstancePolicy::kFixed;
      else if (p == "per_repeat") cfg.instance_policy = InstancePolicy::kPerRepeat;
      else throw InvalidArgument("unknown instance_policy '" + p + "'");
    } else if (key == "learning") {
      const YAML::Node& n = kv.second;
      auto& l = cfg.settings.learning;
      if (n["beta0"]) l.beta0 = detail::yaml_get<double>(n, "beta0");
      if (n["lambda"]) l.lambda = detail::yaml_get<double>(n, "lambda");
      if (n["smooth"]) l.smooth = detail::yaml_get<int>(n, "smooth");
      if (n["t_max"]) l.t_max = detail::yaml_get<std::int64_t>(n, "t_max");
      if (n["scheduler"]) l.scheduler = detail::parse_scheduler(detail::yaml_get<std::string>(n, "scheduler"));
    } else if (key == "baseline") {
      const YAML::Node& n = kv.second;
      auto& b = cfg.settings.baseline;
      if (n["chi"]) b.chi = detail::yaml_get<double>(n, "chi");
      if (n["t_max"]) b.t_max = detail::yaml_get<std::int64_t>(n, "t_max");
      if (n["scheduler"]) b.scheduler = detail::parse_scheduler(detail::yaml_get<std::string>(n, "scheduler"));
    } else if (key != "defaults" && key != "scenarios") {
      throw InvalidArgument("unknown config key '" + key + "'");
    }
  }

  GeneratorConfig defaults;
  defaults.seed = cfg.base_seed;
  detail::apply_generator_overrides(root["defaults"], defaults);

  const YAML::Node scenarios = root["scenarios"];
  if (!scenarios || !scenarios.IsSequence() || scenarios.size() == 0)
    throw InvalidArgument("config needs a nonempty 'scenarios' list");
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    Scenario sc;
    sc.generator = defaults;
    sc.id = scenarios[s]["id"] ? scenarios[s]["id"].as<std::string>()
                               : "s" + std::to_string(s + 1);
    detail::apply_generator_overrides(scenarios[s], sc.generator);
    cfg.scenarios.push_back(std::move(sc));
  }
  cfg.validate();
  return cfg;
}

}  // namespace hctab
