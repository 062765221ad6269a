#include "maxcon/engine.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>

#include "maxcon/mapping.hpp"
#include "maxcon/rng.hpp"

namespace maxcon {

std::string algorithm_name(Algorithm algorithm) {
  return algorithm == Algorithm::kNonlinear ? "nonlinear" : "naive_max";
}

Algorithm algorithm_from_name(const std::string& name) {
  if (name == "nonlinear") return Algorithm::kNonlinear;
  if (name == "naive_max") return Algorithm::kNaiveMax;
  throw SpecParse("engine: unknown algorithm \"" + name + "\"");
}

double step_size(int t, double a) {
  if (t < 0) throw InvalidParameter("step_size: t must be >= 0");
  if (!(a > 0.0)) throw InvalidParameter("step_size: a must be > 0");
  return a / static_cast<double>(t + 1);
}

namespace {

void check_shapes(Eigen::Index state_size, const Graph& graph,
                  Eigen::Index noise_size, Eigen::Index noise_expected,
                  const char* op) {
  if (state_size != graph.node_count()) {
    throw InvalidParameter(std::string(op) + ": state size " +
                           std::to_string(state_size) + " != node count " +
                           std::to_string(graph.node_count()));
  }
  if (noise_size != noise_expected) {
    throw InvalidParameter(std::string(op) + ": noise size " +
                           std::to_string(noise_size) + " != expected " +
                           std::to_string(noise_expected));
  }
}

// Shared core of both step routes: writes y - alpha*(L h(y) + n) into out,
// accumulating each row in ascending column order with the diagonal term in
// place. h_buf holds h(y) precomputed in ascending node order.
void nonlinear_step_into(const Eigen::VectorXd& y, const Graph& graph,
                         double alpha, const Eigen::VectorXd& noise,
                         const Eigen::VectorXd& h_buf, Eigen::VectorXd& out) {
  const int n = graph.node_count();
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    bool diagonal_done = false;
    for (int j : graph.neighbors(i)) {
      if (!diagonal_done && j > i) {
        acc += static_cast<double>(graph.degree(i)) * h_buf[i];
        diagonal_done = true;
      }
      acc -= h_buf[j];
    }
    if (!diagonal_done) {
      acc += static_cast<double>(graph.degree(i)) * h_buf[i];
    }
    out[i] = y[i] - alpha * (acc + noise[i]);
  }
}

Eigen::VectorXd apply_h(const Eigen::VectorXd& y, const TransmitFunction& f) {
  Eigen::VectorXd h(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) h[i] = f.value(y[i]);
  return h;
}

}  // namespace

Eigen::VectorXd nonlinear_step(const Eigen::VectorXd& y, const Graph& graph,
                               const TransmitFunction& f, double alpha,
                               const Eigen::VectorXd& noise) {
  check_shapes(y.size(), graph, noise.size(), graph.node_count(),
               "nonlinear_step");
  const int n = graph.node_count();
  const Eigen::VectorXd h = apply_h(y, f);
  const Eigen::MatrixXi l = graph.laplacian();
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      const int lij = l(i, j);
      if (lij != 0) acc += static_cast<double>(lij) * h[j];
    }
    out[i] = y[i] - alpha * (acc + noise[i]);
  }
  return out;
}

Eigen::VectorXd nonlinear_step_pernode(const Eigen::VectorXd& y,
                                       const Graph& graph,
                                       const TransmitFunction& f, double alpha,
                                       const Eigen::VectorXd& noise) {
  check_shapes(y.size(), graph, noise.size(), graph.node_count(),
               "nonlinear_step_pernode");
  const Eigen::VectorXd h = apply_h(y, f);
  Eigen::VectorXd out(y.size());
  nonlinear_step_into(y, graph, alpha, noise, h, out);
  return out;
}

Eigen::VectorXd naive_max_step(const Eigen::VectorXd& x, const Graph& graph,
                               const Eigen::VectorXd& edge_noise) {
  check_shapes(x.size(), graph, edge_noise.size(),
               graph.directed_link_count(), "naive_max_step");
  const int n = graph.node_count();
  Eigen::VectorXd out(n);
  Eigen::Index k = 0;
  for (int i = 0; i < n; ++i) {
    double best = x[i];
    for (int j : graph.neighbors(i)) {
      best = std::max(best, x[j] + edge_noise[k++]);
    }
    out[i] = best;
  }
  return out;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Eigen::VectorXd nonlinear_estimates(const Eigen::VectorXd& y, int n,
                                    double beta) {
  const double log_n = std::log(static_cast<double>(n));
  Eigen::VectorXd est(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    est[i] = y[i] > 0.0 ? (log_n + std::log(y[i])) / beta : kNaN;
  }
  return est;
}

void check_finite(const Eigen::VectorXd& y, int t) {
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (!std::isfinite(y[i])) {
      throw NonFiniteState("run: state of node " + std::to_string(i) +
                           " became non-finite at iteration " +
                           std::to_string(t));
    }
  }
}

}  // namespace

Trace run(const ConsensusConfig& config, const Graph& graph,
          const Eigen::VectorXd& x, int record_stride) {
  if (config.t_budget < 1) {
    throw InvalidParameter("run: t_budget must be >= 1");
  }
  if (record_stride < 1) {
    throw InvalidParameter("run: record_stride must be >= 1");
  }
  if (!(config.sigma_n2 >= 0.0)) {
    throw InvalidParameter("run: sigma_n2 must be >= 0");
  }
  if (config.algorithm == Algorithm::kNonlinear && !config.function) {
    throw InvalidParameter("run: nonlinear algorithm needs a transmit function");
  }

  const int n = graph.node_count();
  if (x.size() != n) {
    throw InvalidParameter("run: measurement size " + std::to_string(x.size()) +
                           " != node count " + std::to_string(n));
  }
  const double sigma = std::sqrt(config.sigma_n2);
  GaussianSampler noise(config.seed);

  Trace trace;
  trace.noise_seed = config.seed;
  const auto record = [&](int t, const Eigen::VectorXd& state) {
    trace.iterations.push_back(t);
    trace.states.push_back(state);
    if (config.algorithm == Algorithm::kNonlinear) {
      trace.estimates.push_back(nonlinear_estimates(state, n, config.beta));
    } else {
      trace.estimates.push_back(state);
    }
  };

  Eigen::VectorXd state;
  if (config.algorithm == Algorithm::kNonlinear) {
    state = map_initial(x, config.beta).y;
  } else {
    state = x;
  }
  record(0, state);

  Eigen::VectorXd next(n);
  Eigen::VectorXd h_buf(n);
  const Eigen::Index noise_count =
      config.algorithm == Algorithm::kNonlinear ? n
                                                : graph.directed_link_count();
  Eigen::VectorXd noise_buf = Eigen::VectorXd::Zero(noise_count);

  for (int t = 0; t < config.t_budget; ++t) {
    if (sigma > 0.0) {
      for (Eigen::Index k = 0; k < noise_count; ++k) {
        noise_buf[k] = sigma * noise();
      }
    }
    if (config.algorithm == Algorithm::kNonlinear) {
      const double alpha = step_size(t, config.step_constant);
      for (int i = 0; i < n; ++i) h_buf[i] = config.function->value(state[i]);
      nonlinear_step_into(state, graph, alpha, noise_buf, h_buf, next);
    } else {
      next = naive_max_step(state, graph, noise_buf);
    }
    state.swap(next);
    check_finite(state, t + 1);
    if ((t + 1) % record_stride == 0 || t + 1 == config.t_budget) {
      record(t + 1, state);
    }
  }

  trace.theta_star_estimate = trace.states.back().mean();
  return trace;
}

void write_trace_csv(const Trace& trace, std::ostream& out) {
  out << "iteration,node_id,state,estimate\n";
  char line[128];
  for (std::size_t k = 0; k < trace.iterations.size(); ++k) {
    const auto& state = trace.states[k];
    const auto& est = trace.estimates[k];
    for (Eigen::Index i = 0; i < state.size(); ++i) {
      std::snprintf(line, sizeof(line), "%d,%d,%.17g,%.17g\n",
                    trace.iterations[k], static_cast<int>(i), state[i], est[i]);
      out << line;
    }
  }
}

void save_trace_csv(const Trace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw SpecParse("trace: cannot open " + path + " for writing");
  write_trace_csv(trace, out);
}

}  // namespace maxcon
