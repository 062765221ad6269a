#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "maxcon/engine.hpp"
#include "maxcon/graph.hpp"
#include "maxcon/rng.hpp"

namespace testutil {

// 3-regular, vertex-transitive, Laplacian spectrum exactly {0, 2x5, 5x4}.
inline maxcon::Graph petersen() {
  return maxcon::Graph::from_edges(10, {{0, 1},
                                        {1, 2},
                                        {2, 3},
                                        {3, 4},
                                        {4, 0},
                                        {5, 7},
                                        {7, 9},
                                        {9, 6},
                                        {6, 8},
                                        {8, 5},
                                        {0, 5},
                                        {1, 6},
                                        {2, 7},
                                        {3, 8},
                                        {4, 9}});
}

// The pinned 75-node instance every preset uses.
inline maxcon::Graph pinned_graph() {
  return maxcon::random_geometric_graph(75, 0.35, 42);
}

inline Eigen::VectorXd uniform_measurements(int n, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = maxcon::uniform01(eng);
  return x;
}

inline Eigen::VectorXd pinned_x() { return uniform_measurements(75, 310); }

// Direct long-double evaluation, no pivot shift. Safe for |beta * x| well
// inside the long double exp() range, which covers every test input.
inline double softmax_oracle(const Eigen::VectorXd& x, double beta) {
  long double sum = 0.0L;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    sum += expl(static_cast<long double>(beta) * x[i]);
  }
  return static_cast<double>(logl(sum) / static_cast<long double>(beta));
}

// First recorded iteration from which every node's estimate stays within tol
// of its own terminal estimate. NaN snapshots count as not settled.
inline int settle_time(const maxcon::Trace& trace, double tol) {
  const Eigen::VectorXd& terminal = trace.estimates.back();
  int settled = trace.iterations.back();
  for (int k = static_cast<int>(trace.estimates.size()) - 1; k >= 0; --k) {
    bool within = true;
    for (Eigen::Index i = 0; i < terminal.size() && within; ++i) {
      if (!(std::abs(trace.estimates[k][i] - terminal[i]) <= tol)) {
        within = false;
      }
    }
    if (!within) break;
    settled = trace.iterations[k];
  }
  return settled;
}

template <typename T>
T median(std::vector<T> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

inline double central_difference(const std::function<double(double)>& f,
                                 double x) {
  const double h = 1e-6 * std::max(1.0, std::abs(x));
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline bool close_rel(double actual, double expected, double rel_tol) {
  const double scale = std::max(std::abs(actual), std::abs(expected));
  return std::abs(actual - expected) <= rel_tol * std::max(scale, 1e-300);
}

}  // namespace testutil
