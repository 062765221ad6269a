// maxcon: distributed max-consensus simulator and analysis tool.
//
//   maxcon run     --spec <file|preset:name> [--out DIR] [--replicas K] [--seed S]
//   maxcon sweep   --spec <...> [--param P --values v1,v2,...] [--out DIR] ...
//   maxcon analyze --spec <...> [--out DIR]
//   maxcon preset  [name] [--out FILE]
//
// Spec files are JSON; "preset:fig5" etc. name built-in scenarios. gamma_db
// in function sections is a power ratio in dB, converted as 10^(dB/10).

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "maxcon/experiment.hpp"

namespace {

std::vector<std::string> split_csv(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

maxcon::Overrides make_overrides(int replicas, long long seed) {
  maxcon::Overrides o;
  if (replicas > 0) o.replicas = replicas;
  if (seed >= 0) o.seed = static_cast<std::uint64_t>(seed);
  return o;
}

void print_run_summary(const maxcon::RunResult& result) {
  const auto& s = result.scenario;
  std::printf("graph: n=%d edges=%d lambda2=%.6g\n", s.graph.node_count(),
              s.graph.edge_count(), s.lambda2);
  std::printf("x_max=%.6g", s.x_max);
  if (s.config.algorithm == maxcon::Algorithm::kNonlinear) {
    std::printf("  soft_max=%.6g  beta=%.6g  a=%.6g", s.soft_max_value,
                s.config.beta, s.config.step_constant);
  }
  std::printf("\n");
  for (const auto& r : result.replica_stats) {
    std::printf(
        "replica %3d: theta_star=%.6g est_mean=%.6g err_mean=%+.4g "
        "err_max_abs=%.4g undefined=%d\n",
        r.replica, r.theta_star, r.terminal_estimate_mean, r.terminal_error_mean,
        r.terminal_error_max_abs, r.undefined_estimates);
  }
  for (const auto& f : result.files_written) {
    std::printf("wrote %s\n", f.c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"distributed max-consensus simulator"};
  app.require_subcommand(1);

  std::string spec_path, out_dir, param, values_csv, preset_name, preset_out;
  int replicas = -1;
  long long seed = -1;

  auto add_common = [&](CLI::App* cmd, bool with_replicas) {
    cmd->add_option("--spec", spec_path, "spec file path or preset:<name>")
        ->required();
    cmd->add_option("--out", out_dir, "output directory");
    if (with_replicas) {
      cmd->add_option("--replicas", replicas, "override replica count");
      cmd->add_option("--seed", seed, "override noise seed");
    }
  };

  CLI::App* cmd_run = app.add_subcommand("run", "simulate one scenario");
  add_common(cmd_run, true);

  CLI::App* cmd_sweep =
      app.add_subcommand("sweep", "simulate across parameter values");
  add_common(cmd_sweep, true);
  cmd_sweep->add_option("--param", param,
                        "parameter to sweep (beta|a|sigma_n2|shape|shift)");
  cmd_sweep->add_option("--values", values_csv,
                        "comma separated values; \"ybar\" allowed for shift");

  CLI::App* cmd_analyze =
      app.add_subcommand("analyze", "theoretical quantities for a scenario");
  add_common(cmd_analyze, false);

  CLI::App* cmd_preset =
      app.add_subcommand("preset", "list presets or dump one as a spec file");
  cmd_preset->add_option("name", preset_name, "preset name");
  cmd_preset->add_option("--out", preset_out, "write the spec to this file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_run->parsed()) {
      const auto spec = maxcon::ExperimentSpec::load(spec_path);
      const auto result =
          maxcon::cmd_run(spec, out_dir, make_overrides(replicas, seed));
      print_run_summary(result);
    } else if (cmd_sweep->parsed()) {
      const auto spec = maxcon::ExperimentSpec::load(spec_path);
      const auto result =
          maxcon::cmd_sweep(spec, param, split_csv(values_csv), out_dir,
                            make_overrides(replicas, seed));
      std::printf("sweep rows: %zu\n", result.rows.size());
      for (const auto& f : result.files_written) {
        std::printf("wrote %s\n", f.c_str());
      }
    } else if (cmd_analyze->parsed()) {
      const auto spec = maxcon::ExperimentSpec::load(spec_path);
      const auto report = maxcon::cmd_analyze(spec, out_dir);
      std::cout << maxcon::report_to_json(report);
    } else if (cmd_preset->parsed()) {
      if (preset_name.empty()) {
        for (const auto& name : maxcon::preset_names()) {
          std::printf("%s\n", name.c_str());
        }
      } else {
        const auto spec = maxcon::preset(preset_name);
        if (preset_out.empty()) {
          std::cout << spec.serialize();
        } else {
          std::ofstream out(preset_out);
          if (!out) {
            std::fprintf(stderr, "error: cannot write %s\n", preset_out.c_str());
            return 1;
          }
          out << spec.serialize();
          std::printf("wrote %s\n", preset_out.c_str());
        }
      }
    }
  } catch (const maxcon::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
