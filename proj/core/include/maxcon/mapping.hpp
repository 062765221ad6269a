#pragma once

#include <Eigen/Dense>
#include <utility>

#include "maxcon/errors.hpp"

namespace maxcon {

// Soft maximum (1/beta) * log(sum_i exp(beta * x_i)), evaluated with the
// usual max-shift so large beta*x does not overflow. beta < 0 yields the
// soft minimum; beta = 0 is rejected.
double soft_max(const Eigen::VectorXd& x, double beta);

// Initial consensus state: y_i = exp(beta * x_i), stored raw (the recursion
// needs the actual exponentials, not a normalized form), plus their mean.
struct MappedState {
  Eigen::VectorXd y;
  double y_bar;
};

// Throws OverflowRisk when any beta * x_i reaches the double exp() range
// (|exponent| guard at 700).
MappedState map_initial(const Eigen::VectorXd& x, double beta);

// Estimate recovery: (1/beta) * (log n + log y_value). y_value must be
// strictly positive (NonpositiveState otherwise); the engine records NaN
// instead of calling this on nonpositive iterates.
double unmap_estimate(double y_value, int n, double beta);

// Sandwich bounds for the soft maximum with beta > 0:
// [x_max, x_max + log(n)/beta].
std::pair<double, double> softmax_error_bounds(const Eigen::VectorXd& x,
                                               double beta);

}  // namespace maxcon
