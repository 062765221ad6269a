#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "maxcon/graph.hpp"
#include "maxcon/nonlin.hpp"

namespace maxcon {

enum class Algorithm { kNonlinear, kNaiveMax };

std::string algorithm_name(Algorithm algorithm);
Algorithm algorithm_from_name(const std::string& name);

// One consensus experiment. For kNonlinear the initial state is the mapped
// measurement vector exp(beta * x); for kNaiveMax the raw measurements.
struct ConsensusConfig {
  double beta = 1.0;
  double step_constant = 1.0;  // a in alpha(t) = a / (t + 1)
  double sigma_n2 = 0.0;       // channel noise variance
  int t_budget = 100;
  std::uint64_t seed = 0;      // noise stream seed
  std::optional<TransmitFunction> function;  // required for kNonlinear
  Algorithm algorithm = Algorithm::kNonlinear;
};

// Decaying step size a / (t + 1), t counted from 0.
double step_size(int t, double a);

// One synchronous update of the noisy nonlinear recursion,
//   y(t+1) = y(t) - alpha_t * (L h(y(t)) + n(t)),
// as the explicit Laplacian product. noise holds one draw per node.
Eigen::VectorXd nonlinear_step(const Eigen::VectorXd& y, const Graph& graph,
                               const TransmitFunction& f, double alpha,
                               const Eigen::VectorXd& noise);

// The same update written per node,
//   y_i(t+1) = y_i(t) - alpha_t * (d_i h(y_i) - sum_{j in N_i} h(y_j) + n_i).
// Accumulation order matches nonlinear_step exactly (ascending j, diagonal
// term in place), so the two routes return bit-identical states.
Eigen::VectorXd nonlinear_step_pernode(const Eigen::VectorXd& y,
                                       const Graph& graph,
                                       const TransmitFunction& f, double alpha,
                                       const Eigen::VectorXd& noise);

// Naive flooding baseline x_i <- max(x_i, max_j (x_j + n_ij)) with one
// independent noise draw per received value. edge_noise is indexed by
// directed link in canonical order: receiver id ascending, then sender
// ascending within the receiver's sorted neighbor list; its length must be
// graph.directed_link_count().
Eigen::VectorXd naive_max_step(const Eigen::VectorXd& x, const Graph& graph,
                               const Eigen::VectorXd& edge_noise);

// Trajectory of one run. states[k] is the state vector at iterations[k];
// estimates[k] the per-node max estimates at that snapshot (for kNonlinear
// via (log N + log y_i)/beta, NaN where y_i <= 0; for kNaiveMax the state
// itself). iterations always starts at 0 and ends at t_budget.
struct Trace {
  std::vector<int> iterations;
  std::vector<Eigen::VectorXd> states;
  std::vector<Eigen::VectorXd> estimates;
  std::uint64_t noise_seed = 0;
  double theta_star_estimate = 0.0;  // mean of the final state vector

  const Eigen::VectorXd& final_states() const { return states.back(); }
  const Eigen::VectorXd& final_estimates() const { return estimates.back(); }
};

// Runs the configured algorithm from the measurement vector x. Snapshots are
// recorded at every record_stride-th iteration plus iteration 0 and the
// final one. Identical inputs produce bit-identical traces.
Trace run(const ConsensusConfig& config, const Graph& graph,
          const Eigen::VectorXd& x, int record_stride = 1);

// CSV with header iteration,node_id,state,estimate; doubles written with
// %.17g so values round-trip and reruns are byte-identical.
void write_trace_csv(const Trace& trace, std::ostream& out);
void save_trace_csv(const Trace& trace, const std::string& path);

}  // namespace maxcon
