#include "maxcon/mapping.hpp"

#include <cmath>
#include <string>

namespace maxcon {

namespace {

constexpr double kExpGuard = 700.0;  // exp overflows just above 709

void check_nonempty(const Eigen::VectorXd& x, const char* op) {
  if (x.size() == 0) {
    throw EmptyVector(std::string(op) + ": measurement vector is empty");
  }
}

void check_beta(double beta, const char* op) {
  if (beta == 0.0 || !std::isfinite(beta)) {
    throw InvalidParameter(std::string(op) + ": beta must be finite and nonzero");
  }
}

}  // namespace

double soft_max(const Eigen::VectorXd& x, double beta) {
  check_nonempty(x, "soft_max");
  check_beta(beta, "soft_max");

  // Shift by the maximizer of beta*x_i so every exponent is <= 0.
  const double pivot = beta > 0.0 ? x.maxCoeff() : x.minCoeff();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    sum += std::exp(beta * (x[i] - pivot));
  }
  return pivot + std::log(sum) / beta;
}

MappedState map_initial(const Eigen::VectorXd& x, double beta) {
  check_nonempty(x, "map_initial");
  check_beta(beta, "map_initial");

  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (beta * x[i] >= kExpGuard) {
      throw OverflowRisk("map_initial: beta * x[" + std::to_string(i) + "] = " +
                         std::to_string(beta * x[i]) +
                         " exceeds the exp() guard of 700");
    }
  }
  MappedState state;
  state.y.resize(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    state.y[i] = std::exp(beta * x[i]);
  }
  state.y_bar = state.y.mean();
  return state;
}

double unmap_estimate(double y_value, int n, double beta) {
  if (n < 1) throw InvalidParameter("unmap_estimate: n must be >= 1");
  check_beta(beta, "unmap_estimate");
  if (!(y_value > 0.0)) {
    throw NonpositiveState("unmap_estimate: state " + std::to_string(y_value) +
                           " is not positive, estimate undefined");
  }
  return (std::log(static_cast<double>(n)) + std::log(y_value)) / beta;
}

std::pair<double, double> softmax_error_bounds(const Eigen::VectorXd& x,
                                               double beta) {
  check_nonempty(x, "softmax_error_bounds");
  if (!(beta > 0.0)) {
    throw InvalidParameter("softmax_error_bounds: beta must be > 0");
  }
  const double x_max = x.maxCoeff();
  const double n = static_cast<double>(x.size());
  return {x_max, x_max + std::log(n) / beta};
}

}  // namespace maxcon
