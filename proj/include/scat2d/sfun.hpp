#pragma once

#include <complex>

namespace scat2d::sfun {

/// Euler-Mascheroni constant, 20 significant digits.
inline constexpr double kEulerGamma = 0.57721566490153286061;

enum class BesselKind { J0, Y0, K0, H0plus };

/// Value plus the underflow flag raised when K0 drops below the double range.
struct BesselResult {
  std::complex<double> value;
  bool underflow = false;
};

// Switchover points between the ascending series and the large-argument
// evaluations. J0/Y0/J1/Y1 use the Hankel asymptotic expansion above
// kJYSwitch; K0/K1 switch to a trapezoidal evaluation of the integral
// representation K_n(x) = int_0^inf exp(-x cosh t) cosh(n t) dt.
inline constexpr double kJYSwitch = 12.0;
inline constexpr double kKSwitch = 2.0;

/// Cylinder function of order zero at real x > 0 (J0 also at x = 0).
/// Throws Error{NonPositiveArgument} outside the domain.
std::complex<double> cyl_bessel(BesselKind kind, double x);
BesselResult cyl_bessel_checked(BesselKind kind, double x);

// Order-zero and order-one kernels used by the resolvent assembly.
double j0(double x);
double y0(double x);
double j1(double x);
double y1(double x);
double k0(double x);
double k1(double x);
std::complex<double> h0plus(double x);
/// Modified Bessel I0 by its ascending series (used for arguments of order 10 or less).
double i0(double x);
/// Y1(x) + 2/(pi x) and K1(x) - 1/x, free of the cancellation near x = 0.
double y1_regular(double x);
double k1_regular(double x);
std::complex<double> h1plus(double x);

struct SelfTestReport {
  double max_rel_deviation = 0.0;
  double worst_x = 0.0;
  int n_points = 0;
};

/// Wronskian J0'(x)Y0(x) - J0(x)Y0'(x) = -2/(pi x) on a log grid over [1e-3, 1e3].
SelfTestReport sfun_selftest();

/// Relative Wronskian deviation at a single point.
double wronskian_deviation(double x);

}  // namespace scat2d::sfun
