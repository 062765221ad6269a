#pragma once

#include <functional>
#include <string>

#include "maxcon/errors.hpp"

namespace maxcon {

// Bounded odd transmit nonlinearities h(x) = sqrt(gamma) * u(omega * (x - T)).
//
// Families (shape is the family parameter):
//   tanh         u(z) = tanh(z),                          shape = omega
//   polynomial   u(z) = sign(z) * (1 - 1/(|z|^p + 1)),    shape = p, omega = 1
//   exponential  u(z) = sign(z) * (1 - exp(-q|z|)),       shape = q, omega = 1
//
// The polynomial/exponential families exist for the convergence-time bound
// calculus; only tanh is used to drive simulations. gamma is the linear RF
// power budget, so |h| <= sqrt(gamma) everywhere. T shifts the operating
// point (h evaluates at x - T).
enum class Family { kTanh, kPolynomial, kExponential };

std::string family_name(Family family);
Family family_from_name(const std::string& name);

// dB -> linear power: 10^(db/10).
double gamma_from_db(double db);

class TransmitFunction {
 public:
  static TransmitFunction make(Family family, double gamma, double shape,
                               double shift = 0.0);
  static TransmitFunction tanh_family(double gamma, double omega,
                                      double shift = 0.0) {
    return make(Family::kTanh, gamma, omega, shift);
  }
  static TransmitFunction polynomial_family(double gamma, double p,
                                            double shift = 0.0) {
    return make(Family::kPolynomial, gamma, p, shift);
  }
  static TransmitFunction exponential_family(double gamma, double q,
                                             double shift = 0.0) {
    return make(Family::kExponential, gamma, q, shift);
  }

  // h(x) and h'(x), shift included.
  double value(double x) const;
  double derivative(double x) const;
  double operator()(double x) const { return value(x); }

  // The underlying normalized u(z) and u'(z) (no gamma, omega or shift).
  double normalized(double z) const;
  double normalized_derivative(double z) const;

  Family family() const { return family_; }
  double gamma() const { return gamma_; }
  double amplitude() const { return amplitude_; }  // sqrt(gamma)
  // omega for tanh, p for polynomial, q for exponential.
  double shape() const { return shape_; }
  double omega() const { return family_ == Family::kTanh ? shape_ : 1.0; }
  double shift() const { return shift_; }

  TransmitFunction with_shift(double shift) const {
    return make(family_, gamma_, shape_, shift);
  }

 private:
  TransmitFunction(Family family, double gamma, double shape, double shift);

  Family family_;
  double gamma_;
  double amplitude_;
  double shape_;
  double shift_;
};

// Per-axiom results of the grid check:
//   a1_odd          u(-z) = -u(z) and u(0) = 0
//   a2_bounded      |u| <= 1 with sup approaching 1
//   a3_monotone     0 < u'(z) <= 1 on the grid
//   a3_unit_slope   u'(0) = 1 (finite-difference slope at the origin)
struct AxiomReport {
  bool a1_odd = false;
  bool a2_bounded = false;
  bool a3_monotone = false;
  bool a3_unit_slope = false;
  bool all_pass() const {
    return a1_odd && a2_bounded && a3_monotone && a3_unit_slope;
  }
};

// Checks an arbitrary candidate u on a sampled grid. du may be empty, in
// which case slopes come from central differences.
AxiomReport validate_axioms(const std::function<double(double)>& u,
                            const std::function<double(double)>& du = {});

// Convenience overload for a function object's normalized u; requires an
// unshifted function.
AxiomReport validate_axioms(const TransmitFunction& f);

}  // namespace maxcon
