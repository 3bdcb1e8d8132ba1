// Command-line front end: instance generation, single runs, experiments,
// sweeps, the exhaustive oracle and the potential-identity check.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hctab/config.hpp"
#include "hctab/hctab.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw hctab::Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

hctab::Instance load_instance(const std::string& path) {
  return hctab::parse_instance(read_file(path));
}

std::string default_output_dir() {
  const char* env = std::getenv("HCTAB_OUTPUT_DIR");
  return env && *env ? env : "hctab-out";
}

void print_assignment(std::ostream& os, const hctab::Partition& p) {
  os << "assignment";
  for (hctab::CoalitionId c : p.assignment()) os << ' ' << c + 1;
  os << '\n';
}

void print_metrics(const hctab::ExperimentResult& r) {
  hctab::write_metrics_csv(std::cout, r.metrics);
  for (const auto& f : r.failures) std::cerr << "error: " << f << '\n';
}

int finish_experiment(const hctab::ExperimentConfig& cfg, const hctab::ExperimentResult& r) {
  const std::string dir = cfg.output_dir.empty() ? default_output_dir() : cfg.output_dir;
  hctab::write_experiment(dir, r);
  print_metrics(r);
  std::cerr << "wrote " << dir << "/runs.csv and " << dir << "/metrics.csv\n";
  return r.failures.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Budget-constrained heterogeneous-cost task allocation by coalition formation"};
  app.require_subcommand(1);

  // generate
  hctab::GeneratorConfig gen;
  std::string gen_out;
  auto* generate = app.add_subcommand("generate", "Write a random instance");
  generate->add_option("--tasks", gen.task_count, "Number of tasks m")->capture_default_str();
  generate->add_option("--ratio", gen.agents_per_task, "Agents per task")->capture_default_str();
  generate->add_option("--budget-rate", gen.budget_rate, "Budget over task count")->capture_default_str();
  generate->add_option("--universe", gen.universe, "Capability universe size")->capture_default_str();
  generate->add_option("--cost-min", gen.cost.lo, "Lower cost bound")->capture_default_str();
  generate->add_option("--cost-max", gen.cost.hi, "Upper cost bound")->capture_default_str();
  generate->add_option("--feasible-min", gen.feasible_fraction.lo, "Lower feasible fraction")->capture_default_str();
  generate->add_option("--feasible-max", gen.feasible_fraction.hi, "Upper feasible fraction")->capture_default_str();
  generate->add_option("--seed", gen.seed, "Generator seed")->capture_default_str();
  generate->add_option("-o,--output", gen_out, "Output file (default stdout)");

  // run
  std::string run_instance, run_algo = "LLH", run_variant, run_scheduler = "random", run_trace;
  hctab::AlgorithmSettings run_settings;
  std::uint64_t run_seed = 0;
  std::int64_t run_tmax = 0;
  auto* run = app.add_subcommand("run", "Run one algorithm on an instance");
  run->add_option("instance", run_instance, "Instance file")->required();
  run->add_option("--algo", run_algo, "LLH, LLH_NCE, LLH_NHL, CF, BRP or BRA")->capture_default_str();
  run->add_option("--variant", run_variant, "LLH variant: full, no-ce or no-hll");
  run->add_option("--seed", run_seed, "Run seed")->capture_default_str();
  run->add_option("--beta0", run_settings.learning.beta0)->capture_default_str();
  run->add_option("--lambda", run_settings.learning.lambda)->capture_default_str();
  run->add_option("--smooth", run_settings.learning.smooth)->capture_default_str();
  run->add_option("--tmax", run_tmax, "Maximum relay handoffs (default 500 n)");
  run->add_option("--chi", run_settings.baseline.chi, "BRP stay probability")->capture_default_str();
  run->add_option("--scheduler", run_scheduler, "random or round-robin")->capture_default_str();
  run->add_option("--trace", run_trace, "Write the per-step trace to this file");

  // experiment / sweep
  std::string exp_config, exp_output;
  auto* experiment = app.add_subcommand("experiment", "Run a YAML-configured experiment");
  experiment->add_option("config", exp_config, "Config file")->required();
  experiment->add_option("-o,--output", exp_output, "Output directory");

  std::string sweep_config, sweep_axis, sweep_output;
  std::vector<double> sweep_values;
  auto* sweep = app.add_subcommand("sweep", "Sweep one scenario parameter");
  sweep->add_option("config", sweep_config, "Config file")->required();
  sweep->add_option("--axis", sweep_axis, "budget_rate, heterogeneity or agent_scale")->required();
  sweep->add_option("--values", sweep_values, "Axis values")->required()->delimiter(',');
  sweep->add_option("-o,--output", sweep_output, "Output directory");

  // oracle
  std::string oracle_instance;
  double oracle_cap = hctab::kDefaultEnumerationCap;
  auto* oracle = app.add_subcommand("oracle", "Exhaustively solve a small instance");
  oracle->add_option("instance", oracle_instance, "Instance file")->required();
  oracle->add_option("--cap", oracle_cap, "Enumeration cap")->capture_default_str();

  // check-epg
  std::string epg_instance;
  std::int64_t epg_trials = 10000;
  int epg_instances = 50;
  std::uint64_t epg_seed = 1;
  auto* check = app.add_subcommand("check-epg", "Check utility change == potential change");
  check->add_option("--instance", epg_instance, "Check this instance only");
  check->add_option("--trials", epg_trials, "Total trials")->capture_default_str();
  check->add_option("--instances", epg_instances, "Random instances (n <= 30) when no file is given")
      ->capture_default_str();
  check->add_option("--seed", epg_seed)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*generate) {
      const std::string text = hctab::serialize_instance(hctab::generate_instance(gen));
      if (gen_out.empty()) {
        std::cout << text;
      } else {
        std::ofstream(gen_out) << text;
      }
      return 0;
    }

    if (*run) {
      const hctab::Instance inst = load_instance(run_instance);
      hctab::Algorithm algo = hctab::parse_algorithm(run_algo);
      if (!run_variant.empty()) {
        if (run_variant == "full") algo = hctab::Algorithm::kLlh;
        else if (run_variant == "no-ce") algo = hctab::Algorithm::kLlhNce;
        else if (run_variant == "no-hll") algo = hctab::Algorithm::kLlhNhl;
        else throw hctab::InvalidArgument("unknown variant '" + run_variant + "'");
      }
      const auto sched = hctab::detail::parse_scheduler(run_scheduler);
      run_settings.learning.scheduler = sched;
      run_settings.baseline.scheduler = sched;
      if (run_tmax > 0) {
        run_settings.learning.t_max = run_tmax;
        run_settings.baseline.t_max = run_tmax;
      }
      const hctab::RunResult r = hctab::run_algorithm(inst, algo, run_settings, run_seed);
      std::cout << "algorithm " << hctab::to_string(algo) << '\n'
                << "seed " << r.seed << '\n'
                << "objective " << hctab::detail::format_real(r.objective) << '\n'
                << "cu_rate " << hctab::detail::format_real(r.cu_rate) << '\n'
                << "iterations " << r.iterations << '\n'
                << "converged " << (r.converged ? "true" : "false") << '\n'
                << "wall_ms " << r.wall_time * 1000.0 << '\n';
      print_assignment(std::cout, r.final_partition);
      if (!run_trace.empty()) {
        std::ofstream out(run_trace);
        hctab::write_trace(out, r);
      }
      return 0;
    }

    if (*experiment) {
      hctab::ExperimentConfig cfg = hctab::parse_experiment_config(read_file(exp_config));
      if (!exp_output.empty()) cfg.output_dir = exp_output;
      return finish_experiment(cfg, hctab::run_experiment(cfg));
    }

    if (*sweep) {
      hctab::ExperimentConfig cfg = hctab::parse_experiment_config(read_file(sweep_config));
      if (!sweep_output.empty()) cfg.output_dir = sweep_output;
      cfg = hctab::expand_sweep(cfg, hctab::parse_sweep_axis(sweep_axis), sweep_values);
      return finish_experiment(cfg, hctab::run_experiment(cfg));
    }

    if (*oracle) {
      const hctab::Instance inst = load_instance(oracle_instance);
      const hctab::OracleResult r = hctab::brute_force_optimum(inst, oracle_cap);
      std::cout << "best_value " << hctab::detail::format_real(r.best_value) << '\n'
                << "states " << r.states_enumerated << '\n';
      print_assignment(std::cout, r.best_partition);
      return 0;
    }

    if (*check) {
      std::vector<hctab::Instance> instances;
      if (!epg_instance.empty()) {
        instances.push_back(load_instance(epg_instance));
      } else {
        instances = hctab::random_small_instances(epg_instances, epg_seed);
      }
      hctab::PotentialCheckReport total;
      std::mt19937_64 rng(epg_seed);
      const auto per = epg_trials / static_cast<std::int64_t>(instances.size());
      for (std::size_t s = 0; s < instances.size(); ++s) {
        const std::int64_t trials =
            per + (static_cast<std::int64_t>(s) < epg_trials % static_cast<std::int64_t>(instances.size()) ? 1 : 0);
        auto rep = hctab::check_potential_identity(instances[s], trials, rng);
        total.max_abs_error = std::max(total.max_abs_error, rep.max_abs_error);
        total.trials_run += rep.trials_run;
      }
      std::cout << "instances " << instances.size() << '\n'
                << "trials_run " << total.trials_run << '\n'
                << "max_abs_error " << total.max_abs_error << '\n';
      return total.max_abs_error <= 1e-9 ? 0 : 1;
    }
  } catch (const hctab::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
