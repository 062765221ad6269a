#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "maxcon/analysis.hpp"
#include "maxcon/engine.hpp"
#include "maxcon/graph.hpp"
#include "maxcon/mapping.hpp"

namespace maxcon {

// Experiment spec file: JSON with nested sections (graph, measurements,
// consensus, analysis, sweep). See README for the schema. Specs are fully
// deterministic: graph placement, measurement draw and noise streams carry
// separate seeds.

struct GraphSpec {
  std::string type = "geometric";  // geometric | edge_list | explicit
  int n = 0;
  double radius = 0.0;
  std::uint64_t seed = 0;
  std::string path;                           // edge_list
  std::vector<std::pair<int, int>> edges;     // explicit
};

struct MeasurementSpec {
  std::string source = "uniform";  // uniform | explicit
  std::uint64_t seed = 0;
  std::vector<double> values;      // explicit
};

struct FunctionSpec {
  std::string family = "tanh";
  double gamma = 1.0;   // linear power budget ("gamma_db" accepted in files)
  double shape = 1.0;   // omega | p | q
  double shift = 0.0;
  bool shift_is_ybar = false;  // "shift": "ybar" resolves to the mapped mean
};

struct ConsensusSpecSection {
  std::string algorithm = "nonlinear";
  double beta = 1.0;
  bool auto_step = true;       // "a": "auto" picks the optimal step constant
  double step_constant = 0.0;  // used when auto_step is false
  double sigma_n2 = 1.0;
  int iterations = 100;
  std::uint64_t noise_seed = 0;
  std::optional<FunctionSpec> function;
};

struct SweepSpecSection {
  std::string parameter;            // beta | a | sigma_n2 | shape | shift
  std::vector<std::string> values;  // numbers, or "ybar" for shift
};

struct ExperimentSpec {
  std::string scenario;
  GraphSpec graph;
  MeasurementSpec measurements;
  ConsensusSpecSection consensus;
  int replicas = 1;
  double eps1 = 0.1;
  double eps2 = 0.1;
  int checkpoint_stride = 0;  // 0: pick iterations/100 for sweep output
  std::optional<SweepSpecSection> sweep;

  static ExperimentSpec parse(const std::string& json_text);
  static ExperimentSpec load_file(const std::string& path);
  // Accepts a file path or "preset:<name>".
  static ExperimentSpec load(const std::string& path_or_preset);
  std::string serialize() const;
};

std::vector<std::string> preset_names();
ExperimentSpec preset(const std::string& name);

// A spec made concrete: graph built, spectrum computed, measurements drawn,
// symbolic fields (auto step, ybar shift) resolved.
struct Scenario {
  Graph graph;
  Spectrum spectrum;
  double lambda2 = 0.0;
  Eigen::VectorXd x;
  double x_max = 0.0;
  double soft_max_value = 0.0;  // nonlinear only
  double theta0_proxy = 0.0;    // mapped mean y_bar, nonlinear only
  ConsensusConfig config;
};

Scenario materialize(const ExperimentSpec& spec);

struct Overrides {
  std::optional<int> replicas;
  std::optional<std::uint64_t> seed;  // replaces the noise seed
};

struct ReplicaSummary {
  int replica = 0;
  std::uint64_t noise_seed = 0;
  double theta_star = 0.0;
  double terminal_estimate_mean = 0.0;
  double terminal_estimate_min = 0.0;
  double terminal_estimate_max = 0.0;
  double terminal_error_mean = 0.0;     // mean_i (estimate_i - x_max)
  double terminal_error_max_abs = 0.0;  // max_i |estimate_i - x_max|
  int undefined_estimates = 0;          // nodes with no defined estimate
};

struct RunResult {
  Scenario scenario;
  std::vector<Trace> traces;
  std::vector<ReplicaSummary> replica_stats;
  std::vector<std::string> files_written;
};

// Runs spec.replicas independent noise realizations (replica r uses the
// stream derived from (noise_seed, r)), writes replica_###.csv per replica,
// report.json and summary.json into out_dir. Reruns with the same spec are
// byte-identical. Empty out_dir skips all file output.
RunResult cmd_run(const ExperimentSpec& spec, const std::string& out_dir,
                  const Overrides& overrides = {});

struct SweepRow {
  std::string parameter;
  double value = 0.0;
  int replica = 0;
  int iteration = 0;
  double mean_error = 0.0;
  double max_abs_error = 0.0;
  double spread = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<std::string> files_written;
};

// One run batch per parameter value; long-format sweep.csv with per
// checkpoint estimate error and spread. parameter/values fall back to the
// spec's sweep section when empty.
SweepResult cmd_sweep(const ExperimentSpec& spec, const std::string& parameter,
                      const std::vector<std::string>& values,
                      const std::string& out_dir,
                      const Overrides& overrides = {});

// Theoretical quantities for the spec's scenario. Fields that cannot be
// computed for the given parameters are NaN, with the reason recorded in
// errors (reported as null in the JSON).
struct AnalysisReportData {
  std::string scenario;
  int n = 0;
  double lambda2 = 0.0;
  double beta = 0.0;
  double a = 0.0;
  double sigma_n2 = 0.0;
  double x_max = 0.0;
  double soft_max_value = 0.0;
  double theta0_proxy = 0.0;
  double h_prime = 0.0;
  double shift = 0.0;
  double eps1 = 0.0;
  double eps2 = 0.0;

  double xi_n = 0.0;
  double c_norm = 0.0;
  double a_star = 0.0;
  double c_star_norm = 0.0;
  double t_star_bound = 0.0;
  double p_star = 0.0;
  double q_star = 0.0;
  std::string family_choice;
  double a_star_s = 0.0;
  double c_star_s_norm = 0.0;

  std::map<std::string, std::string> errors;
};

AnalysisReportData cmd_analyze(const ExperimentSpec& spec);
// Also writes report.json when out_dir is nonempty.
AnalysisReportData cmd_analyze(const ExperimentSpec& spec,
                               const std::string& out_dir);
std::string report_to_json(const AnalysisReportData& report);

}  // namespace maxcon
