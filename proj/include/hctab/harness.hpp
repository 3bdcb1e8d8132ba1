#pragma once

// Experiment driver: runs algorithms over generated scenarios for several
// seeds, aggregates Best/Worst/Average/Gap/CU-rate/CPU-time rows, sweeps
// one scenario parameter, and emits CSV.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "hctab/baselines.hpp"
#include "hctab/error.hpp"
#include "hctab/instance.hpp"
#include "hctab/learning.hpp"

namespace hctab {

enum class Algorithm { kLlh, kLlhNce, kLlhNhl, kCf, kBrp, kBra };

inline constexpr Algorithm kAllAlgorithms[] = {Algorithm::kLlh, Algorithm::kLlhNce,
                                               Algorithm::kLlhNhl, Algorithm::kCf,
                                               Algorithm::kBrp, Algorithm::kBra};

inline const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kLlh: return "LLH";
    case Algorithm::kLlhNce: return "LLH_NCE";
    case Algorithm::kLlhNhl: return "LLH_NHL";
    case Algorithm::kCf: return "CF";
    case Algorithm::kBrp: return "BRP";
    case Algorithm::kBra: return "BRA";
  }
  return "?";
}

inline Algorithm parse_algorithm(std::string_view name) {
  std::string upper(name);
  for (char& ch : upper) {
    ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (ch == '-') ch = '_';
  }
  for (Algorithm a : kAllAlgorithms)
    if (upper == to_string(a)) return a;
  throw InvalidArgument("unknown algorithm '" + std::string(name) + "'");
}

/// Parameters shared by every run of an experiment. The LLH variant and the
/// seeds are filled in per run.
struct AlgorithmSettings {
  LearningParams learning;
  BaselineParams baseline;
};

inline RunResult run_algorithm(const Instance& inst, Algorithm algo,
                               const AlgorithmSettings& settings, std::uint64_t seed) {
  switch (algo) {
    case Algorithm::kLlh:
    case Algorithm::kLlhNce:
    case Algorithm::kLlhNhl: {
      LearningParams p = settings.learning;
      p.seed = seed;
      p.variant = algo == Algorithm::kLlh      ? Variant::kFull
                  : algo == Algorithm::kLlhNce ? Variant::kNoCe
                                               : Variant::kNoHll;
      return run(inst, p);
    }
    case Algorithm::kCf:
    case Algorithm::kBrp:
    case Algorithm::kBra: {
      BaselineParams p = settings.baseline;
      p.seed = seed;
      if (algo == Algorithm::kCf) return run_cf(inst, p);
      return algo == Algorithm::kBrp ? run_brp(inst, p) : run_bra(inst, p);
    }
  }
  throw InvalidArgument("unknown algorithm");
}

/// Percentage by which the reference average exceeds the algorithm's
/// average, relative to the algorithm's average.
inline double compute_gap(double avg_reference, double avg_algorithm) {
  if (avg_algorithm == 0.0)
    throw InvalidArgument("gap undefined: algorithm average is zero");
  return 100.0 * (avg_reference - avg_algorithm) / avg_algorithm;
}

struct Scenario {
  std::string id;
  GeneratorConfig generator;
  std::optional<double> axis_value;  // set by sweeps
};

enum class InstancePolicy {
  kFixed,      // one instance per scenario, reused by every repeat
  kPerRepeat,  // repeat r uses generator seed ^ r
};

struct ExperimentConfig {
  std::vector<Scenario> scenarios;
  std::vector<Algorithm> algorithms{Algorithm::kLlh};
  int repeats = 10;
  std::optional<Algorithm> reference = Algorithm::kLlh;  // nullopt: no Gap column
  std::uint64_t base_seed = 1;
  InstancePolicy instance_policy = InstancePolicy::kFixed;
  AlgorithmSettings settings;
  std::string output_dir;  // empty: do not write files

  void validate() const {
    if (repeats < 1) throw InvalidArgument("repeats must be >= 1");
    if (algorithms.empty()) throw InvalidArgument("no algorithms selected");
    if (reference &&
        std::find(algorithms.begin(), algorithms.end(), *reference) == algorithms.end())
      throw InvalidArgument(std::string("reference algorithm ") + to_string(*reference) +
                            " is not in the algorithm set");
    settings.learning.validate();
    settings.baseline.validate();
  }
};

/// One algorithm execution.
struct RunRow {
  std::string scenario;
  Algorithm algorithm = Algorithm::kLlh;
  std::uint64_t seed = 0;
  double objective = 0.0;
  double cu_rate = 0.0;
  std::int64_t iterations = 0;
  bool converged = false;
  double wall_ms = 0.0;
};

/// Aggregate over the repeats of one (scenario, algorithm) cell.
struct MetricsRow {
  std::string scenario;
  int agent_count = 0;
  int task_count = 0;
  std::optional<double> axis_value;
  Algorithm algorithm = Algorithm::kLlh;
  double best = 0.0;
  double worst = 0.0;
  double average = 0.0;
  std::optional<double> gap;  // percent, against the reference algorithm
  double cu_rate = 0.0;
  double cpu_time = 0.0;  // mean seconds
};

struct ExperimentResult {
  std::vector<RunRow> runs;
  std::vector<MetricsRow> metrics;
  std::vector<std::string> failures;  // one message per failed scenario
};

inline std::uint64_t repeat_seed(std::uint64_t base_seed, int repeat) {
  return base_seed ^ static_cast<std::uint64_t>(repeat);
}

/// Runs every (scenario, algorithm, repeat) cell in that order. A scenario
/// that fails is recorded in `failures` and skipped; the others still run.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();

  ExperimentResult out;
  for (const Scenario& sc : cfg.scenarios) {
    try {
      std::vector<Instance> instances;
      if (cfg.instance_policy == InstancePolicy::kFixed) {
        instances.push_back(generate_instance(sc.generator));
      } else {
        for (int r = 0; r < cfg.repeats; ++r) {
          GeneratorConfig g = sc.generator;
          g.seed = repeat_seed(g.seed, r);
          instances.push_back(generate_instance(g));
        }
      }
      std::vector<RunRow> runs;
      std::vector<MetricsRow> metrics;
      for (Algorithm algo : cfg.algorithms) {
        MetricsRow m;
        m.scenario = sc.id;
        m.agent_count = instances.front().agent_count();
        m.task_count = instances.front().task_count();
        m.axis_value = sc.axis_value;
        m.algorithm = algo;
        double sum = 0.0, cu = 0.0, cpu = 0.0;
        for (int r = 0; r < cfg.repeats; ++r) {
          const Instance& inst =
              instances[cfg.instance_policy == InstancePolicy::kFixed ? 0 : static_cast<std::size_t>(r)];
          const std::uint64_t seed = repeat_seed(cfg.base_seed, r);
          RunResult res = run_algorithm(inst, algo, cfg.settings, seed);
          runs.push_back({sc.id, algo, seed, res.objective, res.cu_rate, res.iterations,
                          res.converged, res.wall_time * 1000.0});
          if (r == 0 || res.objective > m.best) m.best = res.objective;
          if (r == 0 || res.objective < m.worst) m.worst = res.objective;
          sum += res.objective;
          cu += res.cu_rate;
          cpu += res.wall_time;
        }
        m.average = std::clamp(sum / cfg.repeats, m.worst, m.best);
        m.cu_rate = cu / cfg.repeats;
        m.cpu_time = cpu / cfg.repeats;
        metrics.push_back(std::move(m));
      }
      if (cfg.reference) {
        double ref_avg = 0.0;
        for (const auto& m : metrics)
          if (m.algorithm == *cfg.reference) ref_avg = m.average;
        for (auto& m : metrics) {
          if (m.algorithm == *cfg.reference)
            m.gap = 0.0;
          else if (m.average != 0.0)
            m.gap = compute_gap(ref_avg, m.average);
        }
      }
      out.runs.insert(out.runs.end(), runs.begin(), runs.end());
      out.metrics.insert(out.metrics.end(), metrics.begin(), metrics.end());
    } catch (const Error& e) {
      out.failures.push_back("scenario '" + sc.id + "': " + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sweeps

enum class SweepAxis { kBudgetRate, kHeterogeneity, kAgentScale };

inline SweepAxis parse_sweep_axis(std::string_view name) {
  std::string lower(name);
  for (char& ch : lower) {
    ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (ch == '-') ch = '_';
  }
  if (lower == "budget_rate" || lower == "alpha") return SweepAxis::kBudgetRate;
  if (lower == "heterogeneity" || lower == "gamma") return SweepAxis::kHeterogeneity;
  if (lower == "agent_scale" || lower == "agents") return SweepAxis::kAgentScale;
  throw InvalidArgument("unknown sweep axis '" + std::string(name) + "'");
}

inline const char* to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kBudgetRate: return "budget_rate";
    case SweepAxis::kHeterogeneity: return "heterogeneity";
    case SweepAxis::kAgentScale: return "agent_scale";
  }
  return "?";
}

/// Applies one axis value to a generator config.
///
/// Heterogeneity sets the cost interval to width gamma * base.cost.hi,
/// centered on the midpoint of the base interval. Agent scale sets the task
/// count to value / agents_per_task, which must divide exactly.
inline GeneratorConfig apply_axis(const GeneratorConfig& base, SweepAxis axis, double value) {
  if (!std::isfinite(value)) throw InvalidArgument("sweep value must be finite");
  GeneratorConfig g = base;
  switch (axis) {
    case SweepAxis::kBudgetRate:
      if (value < 0.0) throw InvalidArgument("budget rate must be >= 0");
      g.budget_rate = value;
      break;
    case SweepAxis::kHeterogeneity:
      g.cost = cost_interval_for_heterogeneity(value, base.cost.hi,
                                               (base.cost.lo + base.cost.hi) / 2.0);
      break;
    case SweepAxis::kAgentScale: {
      const double tasks = value / base.agents_per_task;
      if (value < 1.0 || tasks != std::floor(tasks))
        throw InvalidArgument("agent scale must be a positive multiple of agents_per_task");
      g.task_count = static_cast<int>(tasks);
      break;
    }
  }
  g.validate();
  return g;
}

/// Clones every base scenario once per axis value and runs the result.
inline ExperimentConfig expand_sweep(const ExperimentConfig& cfg, SweepAxis axis,
                                     const std::vector<double>& values) {
  ExperimentConfig out = cfg;
  out.scenarios.clear();
  for (const Scenario& base : cfg.scenarios) {
    for (double v : values) {
      Scenario s;
      s.id = base.id + "/" + to_string(axis) + "=" + detail::format_real(v);
      s.generator = apply_axis(base.generator, axis, v);
      s.axis_value = v;
      out.scenarios.push_back(std::move(s));
    }
  }
  return out;
}

inline ExperimentResult sweep(const ExperimentConfig& cfg, SweepAxis axis,
                              const std::vector<double>& values) {
  return run_experiment(expand_sweep(cfg, axis, values));
}

// ---------------------------------------------------------------------------
// CSV

inline constexpr std::string_view kRunsHeader =
    "scenario,algorithm,seed,objective,cu_rate,iterations,converged,wall_ms";
inline constexpr std::string_view kMetricsHeader =
    "scenario,n,m,axis,algorithm,best,worst,average,gap,cu_rate,cpu_time";

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

inline void write_runs_csv(std::ostream& os, const std::vector<RunRow>& rows) {
  os << kRunsHeader << '\n';
  for (const auto& r : rows) {
    os << detail::csv_field(r.scenario) << ',' << to_string(r.algorithm) << ',' << r.seed
       << ',' << detail::format_real(r.objective) << ',' << detail::format_real(r.cu_rate)
       << ',' << r.iterations << ',' << (r.converged ? 1 : 0) << ','
       << detail::format_real(r.wall_ms) << '\n';
  }
}

inline void write_metrics_csv(std::ostream& os, const std::vector<MetricsRow>& rows) {
  os << kMetricsHeader << '\n';
  for (const auto& m : rows) {
    os << detail::csv_field(m.scenario) << ',' << m.agent_count << ',' << m.task_count << ','
       << (m.axis_value ? detail::format_real(*m.axis_value) : std::string()) << ','
       << to_string(m.algorithm) << ',' << detail::format_real(m.best) << ','
       << detail::format_real(m.worst) << ',' << detail::format_real(m.average) << ','
       << (m.gap ? detail::format_real(*m.gap) : std::string()) << ','
       << detail::format_real(m.cu_rate) << ',' << detail::format_real(m.cpu_time) << '\n';
  }
}

/// Writes runs.csv and metrics.csv into `dir`, creating it if needed.
inline void write_experiment(const std::filesystem::path& dir, const ExperimentResult& r) {
  std::filesystem::create_directories(dir);
  std::ofstream runs(dir / "runs.csv");
  std::ofstream metrics(dir / "metrics.csv");
  if (!runs || !metrics) throw Error("cannot write CSV files under " + dir.string());
  write_runs_csv(runs, r.runs);
  write_metrics_csv(metrics, r.metrics);
}

}  // namespace hctab
