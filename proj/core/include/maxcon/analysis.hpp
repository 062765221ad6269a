#pragma once

#include <Eigen/Dense>
#include <string>

#include "maxcon/graph.hpp"
#include "maxcon/nonlin.hpp"

namespace maxcon {

// Theoretical quantities for the noisy nonlinear consensus recursion with
// step size alpha(t) = a/(t+1) on a connected graph with algebraic
// connectivity lambda2. h_prime arguments are the transmit nonlinearity's
// slope at the consensus operating point theta_0 (approximated by the mean
// of the mapped measurements).

// Variance of the consensus limit around the mapped mean:
// xi_N = (sigma_n^2 / N) * a^2 * pi^2 / 6.
double theoretical_mse(double sigma_n2, int n, double a);

// Norm of the asymptotic covariance of sqrt(t) * (y(t) - theta_0 * 1):
// max{ a^2 sigma^2, (1/N) * a^2 sigma^2 / (2 a h' lambda2 - 1) }.
// Requires the stability condition 2 a lambda2 h' > 1 (StabilityViolated).
double covariance_norm(double a, double sigma_n2, int n, double lambda2,
                       double h_prime);

// Same quantity from the explicit matrix construction
//   C = (a^2 sigma^2 / N) * ones + (1/N) * Phi * S * Phi^T,
//   S_ii = a^2 sigma^2 / (2 a h' lambda_{i+1} - 1),
// with the largest eigenvalue taken numerically. Kept as an independent
// route for cross-checking the closed form.
double covariance_norm_oracle(const Spectrum& spectrum, double a,
                              double sigma_n2, double h_prime);

// Minimizer of covariance_norm over a: a* = (N+1) / (2 N lambda2 h').
// Throws DegenerateDerivative when h' has underflowed (<= 1e-300).
double optimal_step(int n, double lambda2, double h_prime);

// Covariance norm at a*: ((N+1)/(2N))^2 * (sigma^2/lambda2^2) * (1/h')^2.
double optimal_covariance_norm(int n, double lambda2, double sigma_n2,
                               double h_prime);

// Iteration lower bound t* >= ||C*|| / eps1 with the slope evaluated at the
// operating point induced by the smallest beta that meets the soft-max bias
// target: beta_min = log(N)/eps2, theta_0 ~ (1/N) sum exp(beta_min x_i).
double min_iterations(double eps1, double eps2, int n, double lambda2,
                      double sigma_n2, const TransmitFunction& f,
                      const Eigen::VectorXd& x);

// Bound calculus for the two analytic tail families, with the slope at the
// operating point replaced by its large-argument approximation. x_max is
// the true maximum measurement; eps2 < x_max is the bias target.
double polynomial_family_bound(double eps1, double eps2, int n, double lambda2,
                               double sigma_n2, double gamma, double x_max,
                               double p);
// Minimizer of the polynomial bound: p* = 1/(log(N) * (x_max/eps2 - 1)).
double optimal_p(double eps2, int n, double x_max);
// Bound at p*: prefactor * eps2^4 e^2 (x_max/eps2 - 1)^2 / (gamma x_max^2).
double polynomial_optimal_bound(double eps1, double eps2, int n,
                                double lambda2, double sigma_n2, double gamma,
                                double x_max);

double exponential_family_bound(double eps1, double eps2, int n,
                                double lambda2, double sigma_n2, double gamma,
                                double x_max, double q);
// Minimizer of the exponential bound: q* = N^(1 - x_max/eps2).
double optimal_q(double eps2, int n, double x_max);
// Bound at q*: prefactor * eps2^4 e^2 / (gamma x_max^2 log^2 N).
double exponential_optimal_bound(double eps1, double eps2, int n,
                                 double lambda2, double sigma_n2, double gamma,
                                 double x_max);

// Which family gives the smaller optimal bound. Exponential wins strictly
// when (x_max/eps2 - 1)^2 > 1/log^2(N); ties go to polynomial.
enum class FamilyChoice { kPolynomial, kExponential };
std::string family_choice_name(FamilyChoice choice);
FamilyChoice family_selector(double eps2, int n, double x_max);

// Optimal step and covariance norm when transmitting h(x - shift): the slope
// is taken at theta0_proxy - shift. base's own shift is replaced.
struct ShiftedAnalysis {
  double a_star_s = 0.0;
  double c_star_s_norm = 0.0;
};
ShiftedAnalysis shifted_analysis(int n, double lambda2, double sigma_n2,
                                 const TransmitFunction& base, double shift,
                                 double theta0_proxy);

}  // namespace maxcon
