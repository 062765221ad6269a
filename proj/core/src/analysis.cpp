#include "maxcon/analysis.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

#include "maxcon/mapping.hpp"

namespace maxcon {

namespace {

constexpr double kDerivativeFloor = 1e-300;

void check_basics(int n, double sigma_n2, const char* op) {
  if (n < 2) throw InvalidParameter(std::string(op) + ": n must be >= 2");
  if (!(sigma_n2 >= 0.0)) {
    throw InvalidParameter(std::string(op) + ": sigma_n2 must be >= 0");
  }
}

void check_lambda2(double lambda2, const char* op) {
  if (!(lambda2 > 0.0)) {
    throw InvalidParameter(std::string(op) + ": lambda2 must be > 0");
  }
}

void check_derivative(double h_prime, const char* op) {
  if (!std::isfinite(h_prime) || h_prime <= kDerivativeFloor) {
    throw DegenerateDerivative(std::string(op) + ": slope " +
                               std::to_string(h_prime) +
                               " at the operating point is degenerate");
  }
}

void check_error_targets(double eps1, double eps2, const char* op) {
  if (!(eps1 > 0.0)) {
    throw InvalidErrorTarget(std::string(op) + ": eps1 must be > 0");
  }
  if (!(eps2 > 0.0)) {
    throw InvalidErrorTarget(std::string(op) + ": eps2 must be > 0");
  }
}

// ((N+1)/(2N))^2 * sigma^2 / lambda2^2, the graph-and-noise part every
// convergence-time bound shares.
double bound_prefactor(int n, double lambda2, double sigma_n2) {
  const double ratio = (static_cast<double>(n) + 1.0) / (2.0 * n);
  return ratio * ratio * sigma_n2 / (lambda2 * lambda2);
}

double max_ratio(double x_max, double eps2, const char* op) {
  if (!(x_max > 0.0)) {
    throw InvalidParameter(std::string(op) + ": x_max must be > 0");
  }
  if (eps2 >= x_max) {
    throw InvalidErrorTarget(std::string(op) + ": eps2 = " +
                             std::to_string(eps2) +
                             " must be below x_max = " + std::to_string(x_max));
  }
  return x_max / eps2;
}

}  // namespace

double theoretical_mse(double sigma_n2, int n, double a) {
  if (n < 1) throw InvalidParameter("theoretical_mse: n must be >= 1");
  if (!(sigma_n2 >= 0.0)) {
    throw InvalidParameter("theoretical_mse: sigma_n2 must be >= 0");
  }
  if (!(a > 0.0)) throw InvalidParameter("theoretical_mse: a must be > 0");
  constexpr double pi2_over_6 = std::numbers::pi * std::numbers::pi / 6.0;
  return sigma_n2 / static_cast<double>(n) * a * a * pi2_over_6;
}

double covariance_norm(double a, double sigma_n2, int n, double lambda2,
                       double h_prime) {
  check_basics(n, sigma_n2, "covariance_norm");
  check_lambda2(lambda2, "covariance_norm");
  if (!(a > 0.0)) throw InvalidParameter("covariance_norm: a must be > 0");
  const double margin = 2.0 * a * lambda2 * h_prime - 1.0;
  if (!(margin > 0.0)) {
    throw StabilityViolated(
        "covariance_norm: 2*a*lambda2*h' = " +
        std::to_string(2.0 * a * lambda2 * h_prime) + " must exceed 1");
  }
  const double mean_mode = a * a * sigma_n2;
  const double consensus_mode = mean_mode / (static_cast<double>(n) * margin);
  return std::max(mean_mode, consensus_mode);
}

double covariance_norm_oracle(const Spectrum& spectrum, double a,
                              double sigma_n2, double h_prime) {
  const int n = static_cast<int>(spectrum.eigenvalues.size());
  check_basics(n, sigma_n2, "covariance_norm_oracle");
  if (!(a > 0.0)) {
    throw InvalidParameter("covariance_norm_oracle: a must be > 0");
  }
  for (int i = 1; i < n; ++i) {
    const double margin = 2.0 * a * h_prime * spectrum.eigenvalues[i] - 1.0;
    if (!(margin > 0.0)) {
      throw StabilityViolated(
          "covariance_norm_oracle: 2*a*h'*lambda_" + std::to_string(i + 1) +
          " = " + std::to_string(2.0 * a * h_prime * spectrum.eigenvalues[i]) +
          " must exceed 1");
    }
  }

  Eigen::VectorXd s(n - 1);
  for (int i = 1; i < n; ++i) {
    s[i - 1] =
        a * a * sigma_n2 / (2.0 * a * h_prime * spectrum.eigenvalues[i] - 1.0);
  }
  const Eigen::MatrixXd phi = spectrum.phi();
  const double nd = static_cast<double>(n);
  const Eigen::MatrixXd c =
      (a * a * sigma_n2 / nd) * Eigen::MatrixXd::Ones(n, n) +
      (phi * s.asDiagonal() * phi.transpose()) / nd;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(c);
  if (solver.info() != Eigen::Success) {
    throw EigensolverFailure("covariance_norm_oracle: eigensolver failed");
  }
  return solver.eigenvalues().maxCoeff();
}

double optimal_step(int n, double lambda2, double h_prime) {
  if (n < 2) throw InvalidParameter("optimal_step: n must be >= 2");
  check_lambda2(lambda2, "optimal_step");
  check_derivative(h_prime, "optimal_step");
  return (static_cast<double>(n) + 1.0) /
         (2.0 * static_cast<double>(n) * lambda2 * h_prime);
}

double optimal_covariance_norm(int n, double lambda2, double sigma_n2,
                               double h_prime) {
  check_basics(n, sigma_n2, "optimal_covariance_norm");
  check_lambda2(lambda2, "optimal_covariance_norm");
  check_derivative(h_prime, "optimal_covariance_norm");
  return bound_prefactor(n, lambda2, sigma_n2) / (h_prime * h_prime);
}

double min_iterations(double eps1, double eps2, int n, double lambda2,
                      double sigma_n2, const TransmitFunction& f,
                      const Eigen::VectorXd& x) {
  check_basics(n, sigma_n2, "min_iterations");
  check_lambda2(lambda2, "min_iterations");
  check_error_targets(eps1, eps2, "min_iterations");
  if (x.size() != n) {
    throw InvalidParameter("min_iterations: measurement size != n");
  }

  const double beta_min = std::log(static_cast<double>(n)) / eps2;
  // theta_0 = (1/N) sum exp(beta_min x_i), assembled in log space so an
  // out-of-range operating point degrades to +inf (and a degenerate slope)
  // rather than trapping on intermediate overflow.
  const double log_theta =
      beta_min * soft_max(x, beta_min) - std::log(static_cast<double>(n));
  const double theta0 = std::exp(log_theta);
  const double h_prime = f.derivative(theta0);
  check_derivative(h_prime, "min_iterations");
  return optimal_covariance_norm(n, lambda2, sigma_n2, h_prime) / eps1;
}

double polynomial_family_bound(double eps1, double eps2, int n, double lambda2,
                               double sigma_n2, double gamma, double x_max,
                               double p) {
  check_basics(n, sigma_n2, "polynomial_family_bound");
  check_lambda2(lambda2, "polynomial_family_bound");
  check_error_targets(eps1, eps2, "polynomial_family_bound");
  if (!(gamma > 0.0)) {
    throw InvalidShapeParameter("polynomial_family_bound: gamma must be > 0");
  }
  if (!(p > 0.0)) {
    throw InvalidShapeParameter("polynomial_family_bound: p must be > 0");
  }
  const double c = max_ratio(x_max, eps2, "polynomial_family_bound") - 1.0;
  const double log_n = std::log(static_cast<double>(n));
  // Slope magnitude of the polynomial tail at the operating point:
  // p sqrt(gamma) log(N) x_max / (eps2^2 N^(p c)).
  const double d = p * std::sqrt(gamma) * log_n * x_max / (eps2 * eps2) *
                   std::exp(-p * c * log_n);
  check_derivative(d, "polynomial_family_bound");
  return bound_prefactor(n, lambda2, sigma_n2) / (eps1 * d * d);
}

double optimal_p(double eps2, int n, double x_max) {
  if (n < 2) throw InvalidParameter("optimal_p: n must be >= 2");
  if (!(eps2 > 0.0)) throw InvalidErrorTarget("optimal_p: eps2 must be > 0");
  const double c = max_ratio(x_max, eps2, "optimal_p") - 1.0;
  return 1.0 / (std::log(static_cast<double>(n)) * c);
}

double polynomial_optimal_bound(double eps1, double eps2, int n,
                                double lambda2, double sigma_n2, double gamma,
                                double x_max) {
  check_basics(n, sigma_n2, "polynomial_optimal_bound");
  check_lambda2(lambda2, "polynomial_optimal_bound");
  check_error_targets(eps1, eps2, "polynomial_optimal_bound");
  if (!(gamma > 0.0)) {
    throw InvalidShapeParameter("polynomial_optimal_bound: gamma must be > 0");
  }
  const double c = max_ratio(x_max, eps2, "polynomial_optimal_bound") - 1.0;
  const double e2 = std::numbers::e * std::numbers::e;
  const double factor =
      std::pow(eps2, 4) * e2 * c * c / (gamma * x_max * x_max);
  return bound_prefactor(n, lambda2, sigma_n2) / eps1 * factor;
}

double exponential_family_bound(double eps1, double eps2, int n,
                                double lambda2, double sigma_n2, double gamma,
                                double x_max, double q) {
  check_basics(n, sigma_n2, "exponential_family_bound");
  check_lambda2(lambda2, "exponential_family_bound");
  check_error_targets(eps1, eps2, "exponential_family_bound");
  if (!(gamma > 0.0)) {
    throw InvalidShapeParameter("exponential_family_bound: gamma must be > 0");
  }
  if (!(q > 0.0)) {
    throw InvalidShapeParameter("exponential_family_bound: q must be > 0");
  }
  const double c = max_ratio(x_max, eps2, "exponential_family_bound") - 1.0;
  const double log_n = std::log(static_cast<double>(n));
  const double m = std::exp(c * log_n);  // N^(x_max/eps2 - 1)
  // Slope magnitude of the exponential tail:
  // q sqrt(gamma) log(N) x_max N^c exp(-q N^c) / eps2^2, grouped as q*m to
  // keep the huge and tiny factors together.
  const double qm = q * m;
  const double d = std::sqrt(gamma) * log_n * x_max / (eps2 * eps2) * qm *
                   std::exp(-qm);
  check_derivative(d, "exponential_family_bound");
  return bound_prefactor(n, lambda2, sigma_n2) / (eps1 * d * d);
}

double optimal_q(double eps2, int n, double x_max) {
  if (n < 2) throw InvalidParameter("optimal_q: n must be >= 2");
  if (!(eps2 > 0.0)) throw InvalidErrorTarget("optimal_q: eps2 must be > 0");
  if (!(x_max > 0.0)) {
    throw InvalidParameter("optimal_q: x_max must be > 0");
  }
  // Unlike the polynomial minimizer (pole at eps2 = x_max), q* is defined at
  // the boundary: the exponent vanishes and q* = 1.
  if (eps2 > x_max) {
    throw InvalidErrorTarget("optimal_q: eps2 = " + std::to_string(eps2) +
                             " must not exceed x_max = " +
                             std::to_string(x_max));
  }
  const double ratio = x_max / eps2;
  return std::exp((1.0 - ratio) * std::log(static_cast<double>(n)));
}

double exponential_optimal_bound(double eps1, double eps2, int n,
                                 double lambda2, double sigma_n2, double gamma,
                                 double x_max) {
  check_basics(n, sigma_n2, "exponential_optimal_bound");
  check_lambda2(lambda2, "exponential_optimal_bound");
  check_error_targets(eps1, eps2, "exponential_optimal_bound");
  if (!(gamma > 0.0)) {
    throw InvalidShapeParameter("exponential_optimal_bound: gamma must be > 0");
  }
  max_ratio(x_max, eps2, "exponential_optimal_bound");
  const double log_n = std::log(static_cast<double>(n));
  const double e2 = std::numbers::e * std::numbers::e;
  const double factor =
      std::pow(eps2, 4) * e2 / (gamma * x_max * x_max * log_n * log_n);
  return bound_prefactor(n, lambda2, sigma_n2) / eps1 * factor;
}

std::string family_choice_name(FamilyChoice choice) {
  return choice == FamilyChoice::kExponential ? "exponential" : "polynomial";
}

FamilyChoice family_selector(double eps2, int n, double x_max) {
  if (n < 2) throw InvalidParameter("family_selector: n must be >= 2");
  if (!(eps2 > 0.0)) {
    throw InvalidErrorTarget("family_selector: eps2 must be > 0");
  }
  const double c = max_ratio(x_max, eps2, "family_selector") - 1.0;
  const double log_n = std::log(static_cast<double>(n));
  return c * c > 1.0 / (log_n * log_n) ? FamilyChoice::kExponential
                                       : FamilyChoice::kPolynomial;
}

ShiftedAnalysis shifted_analysis(int n, double lambda2, double sigma_n2,
                                 const TransmitFunction& base, double shift,
                                 double theta0_proxy) {
  check_basics(n, sigma_n2, "shifted_analysis");
  check_lambda2(lambda2, "shifted_analysis");
  const double h_prime = base.with_shift(shift).derivative(theta0_proxy);
  check_derivative(h_prime, "shifted_analysis");
  ShiftedAnalysis out;
  out.a_star_s = optimal_step(n, lambda2, h_prime);
  out.c_star_s_norm = optimal_covariance_norm(n, lambda2, sigma_n2, h_prime);
  return out;
}

}  // namespace maxcon
