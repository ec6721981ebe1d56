#include "scat2d/sfun.hpp"

#include <cfloat>
#include <cmath>
#include <numbers>
#include <sstream>

#include "scat2d/errors.hpp"

namespace scat2d::sfun {
namespace {

constexpr double kPi = std::numbers::pi;

void require_positive(double x, const char* what) {
  if (!(x > 0.0)) {
    std::ostringstream os;
    os << what << " requires x > 0, got " << x;
    throw Error(ErrorKind::NonPositiveArgument, os.str());
  }
}

// Ascending series in q = x^2/4. Terms are summed until they stop
// contributing at double precision.
struct SeriesJ {
  double j0, j1;      // J0, J1
  double s0, s1;      // harmonic-weighted sums entering Y0, Y1
};

SeriesJ ascending_j(double x) {
  const double q = 0.25 * x * x;
  double t0 = 1.0;        // (-q)^k / (k!)^2
  double t1 = 1.0;        // (-q)^k / (k!(k+1)!)
  double hk = 0.0;        // H_k
  SeriesJ r{1.0, 1.0, 0.0, 0.0};
  r.s1 = (0.0 + 1.0);     // H_0 + H_1 for k = 0
  for (int k = 1; k < 200; ++k) {
    t0 *= -q / (double(k) * k);
    t1 *= -q / (double(k) * (k + 1));
    hk += 1.0 / k;
    const double hk1 = hk + 1.0 / (k + 1);
    r.j0 += t0;
    r.j1 += t1;
    r.s0 += hk * t0;
    r.s1 += (hk + hk1) * t1;
    if (std::abs(t0) < 1e-18 * std::abs(r.j0) && std::abs(t1) < 1e-18 * std::abs(r.j1) &&
        std::abs(hk * t0) < 1e-18 * (std::abs(r.s0) + 1e-300))
      break;
  }
  r.j1 *= 0.5 * x;
  return r;
}

struct SeriesI {
  double i0, i1, s0, s1;
};

SeriesI ascending_i(double x) {
  const double q = 0.25 * x * x;
  double t0 = 1.0, t1 = 1.0, hk = 0.0;
  SeriesI r{1.0, 1.0, 0.0, 1.0};
  for (int k = 1; k < 200; ++k) {
    t0 *= q / (double(k) * k);
    t1 *= q / (double(k) * (k + 1));
    hk += 1.0 / k;
    const double hk1 = hk + 1.0 / (k + 1);
    r.i0 += t0;
    r.i1 += t1;
    r.s0 += hk * t0;
    r.s1 += (hk + hk1) * t1;
    if (t0 < 1e-18 * r.i0 && t1 < 1e-18 * r.i1) break;
  }
  r.i1 *= 0.5 * x;
  return r;
}

// Hankel asymptotic expansion: returns (P, Q) for order nu in {0, 1}.
void hankel_pq(int nu, double x, double& p, double& q) {
  const double mu = 4.0 * nu * nu;
  p = 1.0;
  q = 0.0;
  double a = 1.0;  // a_k / x^k with alternating bookkeeping
  double prev = 1e300;
  for (int k = 1; k < 80; ++k) {
    const double odd = 2.0 * k - 1.0;
    a *= (mu - odd * odd) / (k * 8.0 * x);
    const double mag = std::abs(a);
    if (mag > prev) break;  // asymptotic series started diverging
    prev = mag;
    // k odd contributes to Q, k even to P, with sign (-1)^{floor(k/2)}
    const double sign = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 1)
      q += sign * a;
    else
      p += sign * a;
    if (mag < 1e-17) break;
  }
}

void asymptotic_jy(int nu, double x, double& j, double& y) {
  double p, q;
  hankel_pq(nu, x, p, q);
  const double chi = x - (0.5 * nu + 0.25) * kPi;
  const double amp = std::sqrt(2.0 / (kPi * x));
  const double c = std::cos(chi), s = std::sin(chi);
  j = amp * (p * c - q * s);
  y = amp * (p * s + q * c);
}

// e^x K_n(x) by the trapezoidal rule on int_0^inf exp(-x(cosh t - 1)) cosh(n t) dt.
double scaled_k_quadrature(int n, double x) {
  const double h = std::min(0.25, 0.6 / std::sqrt(x));
  const double tmax = std::acosh(1.0 + 45.0 / x);
  double sum = 0.5;  // t = 0 endpoint, cosh(0) = 1
  for (double t = h; t <= tmax + h; t += h) {
    sum += std::exp(-x * (std::cosh(t) - 1.0)) * std::cosh(n * t);
  }
  return h * sum;
}

}  // namespace

double j0(double x) {
  if (x == 0.0) return 1.0;
  x = std::abs(x);
  if (x < kJYSwitch) return ascending_j(x).j0;
  double j, y;
  asymptotic_jy(0, x, j, y);
  return j;
}

double j1(double x) {
  if (x == 0.0) return 0.0;
  const double sgn = x < 0 ? -1.0 : 1.0;
  x = std::abs(x);
  if (x < kJYSwitch) return sgn * ascending_j(x).j1;
  double j, y;
  asymptotic_jy(1, x, j, y);
  return sgn * j;
}

double y0(double x) {
  require_positive(x, "Y0");
  if (x < kJYSwitch) {
    const SeriesJ s = ascending_j(x);
    return (2.0 / kPi) * ((std::log(0.5 * x) + kEulerGamma) * s.j0 - s.s0);
  }
  double j, y;
  asymptotic_jy(0, x, j, y);
  return y;
}

double y1_regular(double x) {
  require_positive(x, "Y1");
  if (x < kJYSwitch) {
    const SeriesJ s = ascending_j(x);
    // Y1 + 2/(pi x) = (2/pi) ln(x/2) J1 - (x/(2 pi)) sum (H_k + H_{k+1} - 2 gamma) (-q)^k/(k!(k+1)!)
    const double sum_plain = s.j1 / (0.5 * x);
    return (2.0 / kPi) * std::log(0.5 * x) * s.j1 - (x / (2.0 * kPi)) * (s.s1 - 2.0 * kEulerGamma * sum_plain);
  }
  double j, y;
  asymptotic_jy(1, x, j, y);
  return y + 2.0 / (kPi * x);
}

double y1(double x) {
  require_positive(x, "Y1");
  if (x < kJYSwitch) return -2.0 / (kPi * x) + y1_regular(x);
  double j, y;
  asymptotic_jy(1, x, j, y);
  return y;
}

double k0(double x) {
  require_positive(x, "K0");
  if (x <= kKSwitch) {
    const SeriesI s = ascending_i(x);
    return -(std::log(0.5 * x) + kEulerGamma) * s.i0 + s.s0;
  }
  return std::exp(-x) * scaled_k_quadrature(0, x);
}

double k1_regular(double x) {
  require_positive(x, "K1");
  if (x <= kKSwitch) {
    const SeriesI s = ascending_i(x);
    const double sum_plain = s.i1 / (0.5 * x);
    // K1 - 1/x = ln(x/2) I1 - (x/4) sum (psi(k+1)+psi(k+2)) q^k/(k!(k+1)!)
    return std::log(0.5 * x) * s.i1 - 0.25 * x * (s.s1 - 2.0 * kEulerGamma * sum_plain);
  }
  return std::exp(-x) * scaled_k_quadrature(1, x) - 1.0 / x;
}

double k1(double x) {
  require_positive(x, "K1");
  if (x <= kKSwitch) return 1.0 / x + k1_regular(x);
  return std::exp(-x) * scaled_k_quadrature(1, x);
}

double i0(double x) { return x == 0.0 ? 1.0 : ascending_i(std::abs(x)).i0; }

std::complex<double> h0plus(double x) { return {j0(x), y0(x)}; }
std::complex<double> h1plus(double x) { return {j1(x), y1(x)}; }

BesselResult cyl_bessel_checked(BesselKind kind, double x) {
  switch (kind) {
    case BesselKind::J0:
      if (x < 0.0) require_positive(x, "J0");
      return {j0(x), false};
    case BesselKind::Y0:
      return {y0(x), false};
    case BesselKind::H0plus:
      return {h0plus(x), false};
    case BesselKind::K0: {
      const double v = k0(x);
      const bool under = v < DBL_MIN;
      return {under ? 0.0 : v, under};
    }
  }
  return {};
}

std::complex<double> cyl_bessel(BesselKind kind, double x) { return cyl_bessel_checked(kind, x).value; }

double wronskian_deviation(double x) {
  require_positive(x, "Wronskian");
  // J0' = -J1, Y0' = -Y1
  const double lhs = -j1(x) * y0(x) + j0(x) * y1(x);
  const double rhs = -2.0 / (kPi * x);
  return std::abs(lhs - rhs) / std::abs(rhs);
}

SelfTestReport sfun_selftest() {
  SelfTestReport rep;
  const int n = 241;
  for (int i = 0; i < n; ++i) {
    const double x = std::pow(10.0, -3.0 + 6.0 * i / (n - 1));
    const double d = wronskian_deviation(x);
    if (d > rep.max_rel_deviation) {
      rep.max_rel_deviation = d;
      rep.worst_x = x;
    }
  }
  rep.n_points = n;
  return rep;
}

}  // namespace scat2d::sfun
