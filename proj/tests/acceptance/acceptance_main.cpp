// Acceptance gate for the consensus toolkit. Each criterion prints exactly
// one PASS/FAIL line with the measured numbers; the exit code is the number
// of failed criteria. Run a single criterion with --only N.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "../helpers.hpp"
#include "maxcon/analysis.hpp"
#include "maxcon/engine.hpp"
#include "maxcon/experiment.hpp"
#include "maxcon/graph.hpp"
#include "maxcon/mapping.hpp"
#include "maxcon/nonlin.hpp"
#include "maxcon/rng.hpp"

using namespace maxcon;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

// 1. With per-link channel noise the flooding baseline runs away from the
//    true maximum instead of converging to it.
Outcome naive_divergence() {
  const auto start = std::chrono::steady_clock::now();
  const Scenario sc = materialize(preset("fig3"));
  const double threshold = sc.x_max + 3.0;
  int diverged = 0;
  double min_terminal_mean = std::numeric_limits<double>::infinity();
  for (int r = 0; r < 100; ++r) {
    ConsensusConfig c = sc.config;
    c.seed = mix_seed(3001, static_cast<std::uint64_t>(r));
    const Trace tr = run(c, sc.graph, sc.x, c.t_budget);
    const double terminal_mean = tr.final_states().mean();
    min_terminal_mean = std::min(min_terminal_mean, terminal_mean);
    if (terminal_mean > threshold) ++diverged;
  }
  const double elapsed = seconds_since(start);
  Outcome out;
  out.pass = diverged >= 95 && elapsed < 10.0;
  out.detail = fmt(
      "%d/100 replicas exceeded x_max + 3 by t=60 (need 95; lowest terminal "
      "mean %.3g vs threshold %.3g); %.1f s (limit 10)",
      diverged, min_terminal_mean, threshold, elapsed);
  return out;
}

// 2. Soft maximum sandwich x_max <= smax <= x_max + log(N)/beta on random
//    measurement vectors.
Outcome softmax_sandwich() {
  std::mt19937_64 eng(1302);
  const std::vector<double> betas = {1.0, 5.0, 7.0, 30.0};
  const double slack = 1e-12;
  int checks = 0, violations = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    Eigen::VectorXd x(75);
    for (int i = 0; i < 75; ++i) x[i] = uniform01(eng);
    const double x_max = x.maxCoeff();
    for (double beta : betas) {
      const double s = soft_max(x, beta);
      ++checks;
      if (!(s >= x_max - slack && s <= x_max + std::log(75.0) / beta + slack)) {
        ++violations;
      }
    }
  }
  Outcome out;
  out.pass = violations == 0;
  out.detail = fmt("%d violations across %d bound checks (slack 1e-12)",
                   violations, checks);
  return out;
}

// 3. Noise-free consensus drives every estimate to the soft maximum.
Outcome noise_free_convergence() {
  ExperimentSpec spec = preset("fig4a");
  spec.consensus.sigma_n2 = 0.0;
  const Scenario sc = materialize(spec);
  ConsensusConfig c = sc.config;
  c.step_constant *= 2.0;  // the criterion leaves the step free; 2 a* mixes
                           // the transient out well inside the budget
  c.t_budget = 10000;
  const Trace tr = run(c, sc.graph, sc.x, c.t_budget);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < tr.final_estimates().size(); ++i) {
    worst = std::max(worst,
                     std::abs(tr.final_estimates()[i] - sc.soft_max_value));
  }
  Outcome out;
  out.pass = worst <= 1e-3;
  out.detail =
      fmt("worst |estimate - soft max| %.3g at t=10000 (tolerance 1e-3)",
          worst);
  return out;
}

// 4. High-beta noisy runs land every node within 0.1 of the true maximum in
//    at least 45 of 50 replicas.
Outcome accurate_regime() {
  const auto start = std::chrono::steady_clock::now();
  const Scenario sc = materialize(preset("fig5"));
  int within = 0;
  double worst_passing = 0.0, worst_overall = 0.0;
  for (int r = 0; r < 50; ++r) {
    ConsensusConfig c = sc.config;
    c.seed = mix_seed(5001, static_cast<std::uint64_t>(r));
    const Trace tr = run(c, sc.graph, sc.x, c.t_budget);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < tr.final_estimates().size(); ++i) {
      const double err = std::abs(tr.final_estimates()[i] - sc.x_max);
      worst = std::isfinite(err) ? std::max(worst, err)
                                 : std::numeric_limits<double>::infinity();
    }
    worst_overall = std::max(worst_overall, worst);
    if (worst <= 0.1) {
      ++within;
      worst_passing = std::max(worst_passing, worst);
    }
  }
  const double elapsed = seconds_since(start);
  Outcome out;
  out.pass = within >= 45 && elapsed < 60.0;
  out.detail = fmt(
      "%d/50 replicas with every node within 0.1 of the maximum (need 45; "
      "worst overall %.3g); %.1f s (limit 60)",
      within, worst_overall, elapsed);
  return out;
}

// 5. The consensus value's deviation from the mapped mean matches the
//    theoretical limit variance on a long run.
Outcome limit_statistics() {
  const auto start = std::chrono::steady_clock::now();
  const Graph g = testutil::petersen();
  const Spectrum s = spectral_decompose(g);
  const double lambda2 = algebraic_connectivity(s);
  const Eigen::VectorXd x = testutil::uniform_measurements(10, 77);
  const double beta = 2.0, sigma_n2 = 0.25;
  const auto f = TransmitFunction::tanh_family(gamma_from_db(7.5), 1.0);
  const MappedState m = map_initial(x, beta);
  const double a = optimal_step(10, lambda2, f.derivative(m.y_bar));
  const double xi = theoretical_mse(sigma_n2, 10, a);

  const int replicas = 500, t_budget = 100000;
  double dev_sum = 0.0, dev_sq_sum = 0.0;
  for (int r = 0; r < replicas; ++r) {
    ConsensusConfig c{.beta = beta,
                      .step_constant = a,
                      .sigma_n2 = sigma_n2,
                      .t_budget = t_budget,
                      .seed = mix_seed(9005, static_cast<std::uint64_t>(r)),
                      .function = f};
    const Trace tr = run(c, g, x, t_budget);
    const double dev = tr.theta_star_estimate - m.y_bar;
    dev_sum += dev;
    dev_sq_sum += dev * dev;
  }
  const double mean_dev = dev_sum / replicas;
  const double mse = dev_sq_sum / replicas;
  const double mean_gate = 3.0 * std::sqrt(xi / replicas);
  const double elapsed = seconds_since(start);
  Outcome out;
  out.pass =
      std::abs(mean_dev) <= mean_gate && mse <= xi && elapsed < 300.0;
  out.detail = fmt(
      "mean deviation %.3g (gate %.3g), sample MSE / limit variance %.3f "
      "(gate 1); %.0f s (limit 300)",
      mean_dev, mean_gate, mse / xi, elapsed);
  return out;
}

// 6. Closed-form covariance norm against the explicit matrix construction.
Outcome covariance_oracle() {
  std::vector<Graph> graphs;
  graphs.push_back(Graph::from_edges(3, {{0, 1}, {1, 2}, {0, 2}}));
  graphs.push_back(Graph::from_edges(4, {{0, 1}, {1, 2}, {2, 3}}));
  graphs.push_back(Graph::from_edges(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}));
  graphs.push_back(random_geometric_graph(30, 0.5, 7));
  graphs.push_back(testutil::pinned_graph());

  std::mt19937_64 eng(2601);
  int tuples = 0;
  double max_rel = 0.0;
  for (const Graph& g : graphs) {
    const Spectrum s = spectral_decompose(g);
    const double lambda2 = algebraic_connectivity(s);
    for (int rep = 0; rep < 40; ++rep) {
      const double h_prime = 0.001 + 0.2 * uniform01(eng);
      const double sigma_n2 = 0.1 + 3.9 * uniform01(eng);
      const double margin = 1.05 + 6.95 * uniform01(eng);
      const double a = margin / (2.0 * lambda2 * h_prime);
      const double closed =
          covariance_norm(a, sigma_n2, g.node_count(), lambda2, h_prime);
      const double oracle = covariance_norm_oracle(s, a, sigma_n2, h_prime);
      max_rel = std::max(max_rel, std::abs(closed - oracle) /
                                      std::max(std::abs(oracle), 1e-300));
      ++tuples;
    }
  }
  Outcome out;
  out.pass = max_rel <= 1e-8;
  out.detail = fmt("max closed-form vs matrix-oracle rel err %.3g over %d "
                   "tuples (gate 1e-8)",
                   max_rel, tuples);
  return out;
}

// 7. The analytic optimal step matches a brute-force grid minimization.
Outcome step_optimality() {
  std::mt19937_64 eng(2701);
  const int points = 10000;
  int ok = 0;
  double worst_steps = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 2 + static_cast<int>(uniform01(eng) * 98);
    const double lambda2 = 0.5 + 5.0 * uniform01(eng);
    const double h_prime = 0.005 + 0.1 * uniform01(eng);
    const double sigma_n2 = 0.2 + 2.0 * uniform01(eng);
    const double a_star = optimal_step(n, lambda2, h_prime);
    const double a_lo = 1.0001 / (2.0 * lambda2 * h_prime);
    const double a_hi = 4.0 * a_star;
    double best_a = a_lo, best_c = std::numeric_limits<double>::infinity();
    for (int k = 0; k < points; ++k) {
      const double a = a_lo + (a_hi - a_lo) * k / (points - 1.0);
      const double c = covariance_norm(a, sigma_n2, n, lambda2, h_prime);
      if (c < best_c) {
        best_c = c;
        best_a = a;
      }
    }
    const double grid_step = (a_hi - a_lo) / (points - 1.0);
    worst_steps = std::max(worst_steps, std::abs(best_a - a_star) / grid_step);
    if (std::abs(best_a - a_star) <= grid_step) ++ok;
  }
  Outcome out;
  out.pass = ok == 50;
  out.detail = fmt(
      "grid argmin within one step of the analytic optimum for %d/50 tuples "
      "(%d-point grids, worst offset %.2f steps)",
      ok, points, worst_steps);
  return out;
}

// 8. Plugging the bound-minimizing shape parameter into the family bound
//    reproduces the optimal-bound closed forms, and the family selector
//    agrees with comparing the two bounds.
Outcome shape_bound_identities() {
  std::mt19937_64 eng(2801);
  double max_rel = 0.0;
  int mismatches = 0;
  const int tuples = 1000;
  for (int rep = 0; rep < tuples; ++rep) {
    const int n = 2 + static_cast<int>(uniform01(eng) * 400);
    const double x_max = 0.15 + 0.85 * uniform01(eng);
    const double eps2 = x_max * (0.05 + 0.85 * uniform01(eng));
    const double eps1 = 0.01 + uniform01(eng);
    const double lambda2 = 0.3 + 5.0 * uniform01(eng);
    const double sigma_n2 = 0.1 + 2.0 * uniform01(eng);
    const double gamma = 0.5 + 9.5 * uniform01(eng);

    const double via_p =
        polynomial_family_bound(eps1, eps2, n, lambda2, sigma_n2, gamma, x_max,
                                optimal_p(eps2, n, x_max));
    const double closed_p = polynomial_optimal_bound(eps1, eps2, n, lambda2,
                                                     sigma_n2, gamma, x_max);
    const double via_q =
        exponential_family_bound(eps1, eps2, n, lambda2, sigma_n2, gamma,
                                 x_max, optimal_q(eps2, n, x_max));
    const double closed_q = exponential_optimal_bound(eps1, eps2, n, lambda2,
                                                      sigma_n2, gamma, x_max);
    max_rel = std::max(max_rel, std::abs(via_p - closed_p) / closed_p);
    max_rel = std::max(max_rel, std::abs(via_q - closed_q) / closed_q);
    const FamilyChoice direct = closed_q < closed_p
                                    ? FamilyChoice::kExponential
                                    : FamilyChoice::kPolynomial;
    if (family_selector(eps2, n, x_max) != direct) ++mismatches;
  }
  Outcome out;
  out.pass = max_rel <= 1e-6 && mismatches == 0;
  out.detail = fmt(
      "max substitution rel err %.3g (gate 1e-6), selector mismatches %d/%d",
      max_rel, mismatches, tuples);
  return out;
}

int settled_at(const Trace& trace) {
  return testutil::settle_time(trace, 0.05);
}

// 9. Centering the nonlinearity at the operating point settles faster, and
//    the theory agrees: the shifted optimal covariance norm is smaller.
Outcome shift_improvement() {
  const ExperimentSpec shifted_spec = preset("fig6");
  ExperimentSpec plain_spec = shifted_spec;
  plain_spec.consensus.function->shift_is_ybar = false;
  plain_spec.consensus.function->shift = 0.0;

  const Scenario shifted = materialize(shifted_spec);
  const Scenario plain = materialize(plain_spec);

  std::vector<int> shifted_settles, plain_settles;
  for (int r = 0; r < 50; ++r) {
    const std::uint64_t seed = mix_seed(6001, static_cast<std::uint64_t>(r));
    ConsensusConfig cs = shifted.config;
    cs.seed = seed;
    shifted_settles.push_back(settled_at(run(cs, shifted.graph, shifted.x)));
    ConsensusConfig cp = plain.config;
    cp.seed = seed;
    plain_settles.push_back(settled_at(run(cp, plain.graph, plain.x)));
  }
  const int med_shifted = testutil::median(shifted_settles);
  const int med_plain = testutil::median(plain_settles);

  const TransmitFunction& f = *plain.config.function;
  const double c_star =
      shifted_analysis(75, plain.lambda2, 1.0, f, 0.0, plain.theta0_proxy)
          .c_star_s_norm;
  const double c_star_s = shifted_analysis(75, shifted.lambda2, 1.0, f,
                                           shifted.theta0_proxy,
                                           shifted.theta0_proxy)
                              .c_star_s_norm;

  Outcome out;
  out.pass = med_shifted < med_plain && c_star_s < c_star;
  out.detail = fmt(
      "median settle (tol 0.05): centered %d vs uncentered %d iterations; "
      "optimal covariance norm %.3g vs %.3g",
      med_shifted, med_plain, c_star_s, c_star);
  return out;
}

// 10. Raising beta trades bias for settling time: smaller terminal bias,
//     slower settling.
Outcome beta_tradeoff() {
  const Graph g = testutil::pinned_graph();
  const Spectrum s = spectral_decompose(g);
  const double lambda2 = algebraic_connectivity(s);
  const Eigen::VectorXd x = testutil::pinned_x();
  const double x_max = x.maxCoeff();
  const auto f = TransmitFunction::tanh_family(gamma_from_db(7.5), 0.015);

  double median_bias[2] = {0.0, 0.0};
  int median_settle[2] = {0, 0};
  const double betas[2] = {5.0, 7.0};
  for (int b = 0; b < 2; ++b) {
    const MappedState m = map_initial(x, betas[b]);
    const double a = optimal_step(75, lambda2, f.derivative(m.y_bar));
    std::vector<double> biases;
    std::vector<int> settles;
    for (int r = 0; r < 50; ++r) {
      ConsensusConfig c{.beta = betas[b],
                        .step_constant = a,
                        .sigma_n2 = 1.0,
                        .t_budget = 500,
                        .seed = mix_seed(8001, static_cast<std::uint64_t>(r)),
                        .function = f};
      const Trace tr = run(c, g, x);
      double sum = 0.0;
      int defined = 0;
      for (Eigen::Index i = 0; i < tr.final_estimates().size(); ++i) {
        if (std::isfinite(tr.final_estimates()[i])) {
          sum += tr.final_estimates()[i];
          ++defined;
        }
      }
      biases.push_back(defined > 0
                           ? sum / defined - x_max
                           : std::numeric_limits<double>::infinity());
      settles.push_back(settled_at(tr));
    }
    median_bias[b] = testutil::median(biases);
    median_settle[b] = testutil::median(settles);
  }
  Outcome out;
  out.pass = std::abs(median_bias[1]) < std::abs(median_bias[0]) &&
             median_settle[1] > median_settle[0];
  out.detail = fmt(
      "median terminal bias %.3f (beta 5) vs %.3f (beta 7); median settle "
      "%d vs %d iterations",
      median_bias[0], median_bias[1], median_settle[0], median_settle[1]);
  return out;
}

// 11. Negative beta runs the same machinery as a soft minimum.
Outcome soft_min_mode() {
  const Scenario sc = materialize(preset("fig-min"));
  const double x_min = sc.x.minCoeff();
  const double lo = x_min - std::log(75.0) / 30.0 - 0.1;
  const double hi = x_min;
  int inside = 0;
  double est_lo = std::numeric_limits<double>::infinity();
  double est_hi = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < 20; ++r) {
    ConsensusConfig c = sc.config;
    c.seed = mix_seed(7001, static_cast<std::uint64_t>(r));
    const Trace tr = run(c, sc.graph, sc.x, c.t_budget);
    bool all_in = true;
    for (Eigen::Index i = 0; i < tr.final_estimates().size(); ++i) {
      const double e = tr.final_estimates()[i];
      if (!(std::isfinite(e) && e >= lo && e <= hi)) all_in = false;
      if (std::isfinite(e)) {
        est_lo = std::min(est_lo, e);
        est_hi = std::max(est_hi, e);
      }
    }
    if (all_in) ++inside;
  }
  Outcome out;
  out.pass = inside == 20;
  out.detail = fmt(
      "%d/20 replicas with every estimate in [%.4f, %.4f] (observed range "
      "[%.4f, %.4f])",
      inside, lo, hi, est_lo, est_hi);
  return out;
}

struct CriterionEntry {
  const char* name;
  Outcome (*fn)();
};

const CriterionEntry kCriteria[] = {
    {"naive-divergence", naive_divergence},
    {"softmax-sandwich", softmax_sandwich},
    {"noise-free-convergence", noise_free_convergence},
    {"accurate-regime", accurate_regime},
    {"limit-statistics", limit_statistics},
    {"covariance-oracle", covariance_oracle},
    {"step-optimality", step_optimality},
    {"shape-bound-identities", shape_bound_identities},
    {"shift-improvement", shift_improvement},
    {"beta-tradeoff", beta_tradeoff},
    {"soft-min-mode", soft_min_mode},
};
constexpr int kCriterionCount =
    static_cast<int>(sizeof(kCriteria) / sizeof(kCriteria[0]));

int run_criterion(int id) {
  const CriterionEntry& entry = kCriteria[id - 1];
  Outcome out;
  try {
    out = entry.fn();
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail = std::string("unexpected exception: ") + e.what();
  }
  std::printf("criterion %2d [%s]: %s - %s\n", id, entry.name,
              out.pass ? "PASS" : "FAIL", out.detail.c_str());
  std::fflush(stdout);
  return out.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--list") == 0) {
      for (int k = 0; k < kCriterionCount; ++k) {
        std::printf("%2d %s\n", k + 1, kCriteria[k].name);
      }
      return 0;
    }
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
      if (only < 1 || only > kCriterionCount) {
        std::fprintf(stderr, "--only expects 1..%d\n", kCriterionCount);
        return 2;
      }
      continue;
    }
    std::fprintf(stderr,
                 "usage: %s [--only N] [--list]\n"
                 "  runs the acceptance criteria (all by default)\n",
                 argv[0]);
    return 2;
  }

  if (only > 0) return run_criterion(only);

  int failures = 0;
  for (int id = 1; id <= kCriterionCount; ++id) failures += run_criterion(id);
  std::printf("%d/%d criteria passed\n", kCriterionCount - failures,
              kCriterionCount);
  return failures;
}
