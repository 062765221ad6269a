#include "maxcon/nonlin.hpp"

#include <cmath>
#include <vector>

namespace maxcon {

std::string family_name(Family family) {
  switch (family) {
    case Family::kTanh: return "tanh";
    case Family::kPolynomial: return "polynomial";
    case Family::kExponential: return "exponential";
  }
  return "unknown";
}

Family family_from_name(const std::string& name) {
  if (name == "tanh") return Family::kTanh;
  if (name == "polynomial") return Family::kPolynomial;
  if (name == "exponential") return Family::kExponential;
  throw SpecParse("nonlin: unknown family \"" + name + "\"");
}

double gamma_from_db(double db) { return std::pow(10.0, db / 10.0); }

TransmitFunction::TransmitFunction(Family family, double gamma, double shape,
                                   double shift)
    : family_(family),
      gamma_(gamma),
      amplitude_(std::sqrt(gamma)),
      shape_(shape),
      shift_(shift) {}

TransmitFunction TransmitFunction::make(Family family, double gamma,
                                        double shape, double shift) {
  if (!(gamma > 0.0)) {
    throw InvalidShapeParameter("nonlin: gamma must be > 0, got " +
                                std::to_string(gamma));
  }
  if (!(shape > 0.0)) {
    throw InvalidShapeParameter("nonlin: shape parameter for " +
                                family_name(family) + " must be > 0, got " +
                                std::to_string(shape));
  }
  return TransmitFunction(family, gamma, shape, shift);
}

double TransmitFunction::normalized(double z) const {
  switch (family_) {
    case Family::kTanh:
      return std::tanh(z);
    case Family::kPolynomial: {
      const double az = std::abs(z);
      return std::copysign(1.0 - 1.0 / (std::pow(az, shape_) + 1.0), z);
    }
    case Family::kExponential:
      return std::copysign(1.0 - std::exp(-shape_ * std::abs(z)), z);
  }
  return 0.0;
}

double TransmitFunction::normalized_derivative(double z) const {
  switch (family_) {
    case Family::kTanh: {
      const double t = std::tanh(z);
      return 1.0 - t * t;
    }
    case Family::kPolynomial: {
      const double az = std::abs(z);
      const double d = std::pow(az, shape_) + 1.0;
      return shape_ * std::pow(az, shape_ - 1.0) / (d * d);
    }
    case Family::kExponential:
      return shape_ * std::exp(-shape_ * std::abs(z));
  }
  return 0.0;
}

double TransmitFunction::value(double x) const {
  return amplitude_ * normalized(omega() * (x - shift_));
}

double TransmitFunction::derivative(double x) const {
  return amplitude_ * omega() * normalized_derivative(omega() * (x - shift_));
}

namespace {

std::vector<double> axiom_grid() {
  std::vector<double> grid;
  for (int k = -6; k <= 12; ++k) {
    const double x = std::pow(10.0, k);
    grid.push_back(x);
    grid.push_back(2.5 * x);
    grid.push_back(5.0 * x);
  }
  return grid;
}

}  // namespace

AxiomReport validate_axioms(const std::function<double(double)>& u,
                            const std::function<double(double)>& du) {
  constexpr double kOddTol = 1e-9;
  constexpr double kBoundTol = 1e-9;
  constexpr double kSlopeTol = 1e-6;

  const std::vector<double> grid = axiom_grid();
  AxiomReport report;

  report.a1_odd = std::abs(u(0.0)) <= kOddTol;
  for (double x : grid) {
    if (std::abs(u(-x) + u(x)) > kOddTol) {
      report.a1_odd = false;
      break;
    }
  }

  report.a2_bounded = true;
  for (double x : grid) {
    if (std::abs(u(x)) > 1.0 + kBoundTol || std::abs(u(-x)) > 1.0 + kBoundTol) {
      report.a2_bounded = false;
      break;
    }
  }
  // the bound must be attained in the limit, not just respected
  if (report.a2_bounded && std::abs(u(1e12)) < 1.0 - 1e-3) {
    report.a2_bounded = false;
  }

  const auto slope = [&](double x) {
    if (du) return du(x);
    const double step = 1e-7 * std::max(1.0, std::abs(x));
    return (u(x + step) - u(x - step)) / (2.0 * step);
  };

  // Strict positivity is only checkable where the slope has not underflowed
  // (tanh' is exactly 0 in double arithmetic beyond |x| ~ 19).
  report.a3_monotone = true;
  for (double x : grid) {
    const double s = slope(x);
    const bool positive = x <= 15.0 ? s > 0.0 : s >= 0.0;
    if (!positive || s > 1.0 + kSlopeTol) {
      report.a3_monotone = false;
      break;
    }
  }

  const double s0 = du ? du(0.0) : (u(1e-7) - u(-1e-7)) / 2e-7;
  report.a3_unit_slope = std::abs(s0 - 1.0) <= kSlopeTol;

  return report;
}

AxiomReport validate_axioms(const TransmitFunction& f) {
  if (f.shift() != 0.0) {
    throw InvalidParameter(
        "validate_axioms: axioms apply to the unshifted function");
  }
  return validate_axioms([&](double z) { return f.normalized(z); },
                         [&](double z) { return f.normalized_derivative(z); });
}

}  // namespace maxcon
