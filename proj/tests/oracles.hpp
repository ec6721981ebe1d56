#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls into the library.

#include <boost/math/special_functions/bessel.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

using Profile = std::function<double(double)>;

// Zero-energy radial equation in t = ln r: psi_tt = (l^2 + r^2 V) psi.
// Returns the number of zeros of the regular solution on (0, inf), the
// exterior one included via the explicit solution outside the support. By
// Sturm oscillation this is the number of negative eigenvalues in channel l.
struct ChannelShot {
  int zeros = 0;
  double psi = 0.0, dpsi = 0.0;  // at the outer radius, d/dt
};

inline ChannelShot shoot_channel(const Profile& V, int l, double outer, const std::vector<double>& breaks,
                                 int steps_per_piece = 4000) {
  std::vector<double> edges{std::log(outer) - 12.0};
  for (double b : breaks)
    if (b > 0.0 && b < outer) edges.push_back(std::log(b));
  edges.push_back(std::log(outer));
  double psi = 1.0, dpsi = static_cast<double>(l);
  int zeros = 0;
  const double l2 = static_cast<double>(l) * l;
  auto rhs = [&](double t, double y0, double y1, double& d0, double& d1) {
    const double r = std::exp(t);
    d0 = y1;
    d1 = (l2 + r * r * V(r)) * y0;
  };
  for (std::size_t piece = 0; piece + 1 < edges.size(); ++piece) {
    const double a = edges[piece], b = edges[piece + 1];
    const double h = (b - a) / steps_per_piece;
    for (int s = 0; s < steps_per_piece; ++s) {
      // keep evaluations inside the piece so jumps of V sit on edges
      const double t = a + s * h, tl = t + 1e-12 * h, tr = t + h - 1e-12 * h;
      double k1a, k1b, k2a, k2b, k3a, k3b, k4a, k4b;
      rhs(tl, psi, dpsi, k1a, k1b);
      rhs(t + 0.5 * h, psi + 0.5 * h * k1a, dpsi + 0.5 * h * k1b, k2a, k2b);
      rhs(t + 0.5 * h, psi + 0.5 * h * k2a, dpsi + 0.5 * h * k2b, k3a, k3b);
      rhs(tr, psi + h * k3a, dpsi + h * k3b, k4a, k4b);
      const double np = psi + h / 6.0 * (k1a + 2 * k2a + 2 * k3a + k4a);
      const double nd = dpsi + h / 6.0 * (k1b + 2 * k2b + 2 * k3b + k4b);
      if ((np < 0.0) != (psi < 0.0)) ++zeros;
      psi = np;
      dpsi = nd;
      const double scale = std::max(std::abs(psi), std::abs(dpsi));
      if (scale > 1e200) {
        psi /= scale;
        dpsi /= scale;
      }
    }
  }
  // exterior: A + B t for l = 0, a e^{lt} + b e^{-lt} otherwise
  if (l == 0) {
    if (psi * dpsi < 0.0) ++zeros;
  } else {
    const double grow = 0.5 * (psi + dpsi / l), decay = 0.5 * (psi - dpsi / l);
    if (grow != 0.0 && -decay / grow > 1.0) ++zeros;
  }
  return {zeros, psi, dpsi};
}

/// Number of bound states of -Delta + V for radial V vanishing beyond `outer`,
/// channels l and -l counted separately.
inline int radial_bound_count(const Profile& V, double outer, const std::vector<double>& breaks = {}) {
  int total = 0;
  for (int l = 0; l < 200; ++l) {
    const int n = shoot_channel(V, l, outer, breaks).zeros;
    if (n == 0) break;
    total += l == 0 ? n : 2 * n;
  }
  return total;
}

/// Coupling in [lo, hi] where the channel-l count steps up, by bisection.
inline double channel_critical_coupling(const std::function<Profile(double)>& family, int l, double outer,
                                        const std::vector<double>& breaks, double lo, double hi) {
  const int n_lo = shoot_channel(family(lo), l, outer, breaks).zeros;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (shoot_channel(family(mid), l, outer, breaks).zeros == n_lo)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

/// PV int_0^inf F(b) / (a - b) db by singularity subtraction on [0, B].
inline double pv_hilbert(const std::function<double(double)>& F, double a, double B = 60.0, int panels = 600) {
  static const double xg[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
                               0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
  static const double wg[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
                               0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};
  const double Fa = F(a);
  double s = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = B * p / panels, hi = B * (p + 1) / panels;
    for (int q = 0; q < 8; ++q) {
      const double b = 0.5 * (lo + hi) + 0.5 * (hi - lo) * xg[q];
      const double d = a - b;
      if (std::abs(d) > 1e-13) s += 0.5 * (hi - lo) * wg[q] * (F(b) - Fa) / d;
    }
  }
  return s + Fa * std::log(a / (B - a));
}

/// K0 by its ascending series in 50-digit arithmetic (40 terms).
inline double k0_series(double x) {
  using R = boost::multiprecision::cpp_bin_float_50;
  const R xx = x;
  const R q = xx * xx / 4;
  const R euler = boost::math::constants::euler<R>();
  R term = 1, i0 = 1, harmonic = 0, tail = 0;
  for (int k = 1; k <= 40; ++k) {
    term *= q / (R(k) * k);
    harmonic += R(1) / k;
    i0 += term;
    tail += term * harmonic;
  }
  const R v = -(log(xx / 2) + euler) * i0 + tail;
  return static_cast<double>(v);
}

inline double bessel_j(int n, double x) { return boost::math::cyl_bessel_j(n, x); }
inline double bessel_y(int n, double x) { return boost::math::cyl_neumann(n, x); }
inline double bessel_k(int n, double x) { return boost::math::cyl_bessel_k(n, x); }
inline double bessel_i(int n, double x) { return boost::math::cyl_bessel_i(n, x); }
inline double bessel_j_zero(int n, int k) { return boost::math::cyl_bessel_j_zero(static_cast<double>(n), k); }

}  // namespace oracle
