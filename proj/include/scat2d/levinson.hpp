#pragma once

#include <vector>

#include "scat2d/bs.hpp"

namespace scat2d {

struct WindingResult {
  /// Index of lambda -> det S(lambda): minus (1/2pi) int tr(i (1-S)^n S* S') dlambda.
  double winding = 0.0;
  int n_regularization = 0;
  /// Sweep part of (1/2pi) int tr(...), Richardson-extrapolated over step halving
  /// when the sweep has an odd number of energies.
  double integral = 0.0;
  double step_error = 0.0;    // step-halving error estimate of `integral`
  double tail_low = 0.0;      // [0, lambda_min]
  double tail_high = 0.0;     // [lambda_max, inf)
  double tail_estimate = 0.0; // tail_low + tail_high
  std::vector<double> lambdas;
  /// (1/2pi) Re tr(i (1-S)^n S* dS/dlambda) at each sweep energy.
  std::vector<double> integrand;
  /// Continuous eigenphase curves, one column per branch.
  Eigen::MatrixXd eigenphase_branches;
};

inline constexpr double kMaxPhaseStep = 0.7853981633974483;  // pi / 4

/// n in {0, 1, 2}. Throws PhaseAliasing when consecutive eigenphases move by
/// pi/4 or more, BadOrder for other n, and rethrows the first failed sample.
WindingResult winding_number(const std::vector<SweepEntry>& sweep, int n);

/// Negative eigenvalues of the 5-point Dirichlet discretisation of -Delta + V
/// on [-L, L]^2 with n_grid and 2 n_grid interior points per side, counted by
/// LDL^T inertia. UnconvergedCount if the two resolutions disagree.
int count_bound_states(const FactorizedPotential& pot, double box_radius, int n_grid);

struct SweepSpec {
  double lambda_min = 1e-6;
  double lambda_max = 25.0;
  int points = 150;
  int m_angles = 32;
  double box_radius = 0.0;  // 0: 4 x (support or grid radius)
  int n_fd = 80;
};

struct LevinsonReport {
  double winding[3] = {0.0, 0.0, 0.0};
  double tails[3] = {0.0, 0.0, 0.0};
  int n_bound = 0;
  double discrepancy = 0.0;       // |winding(n=0) + n_bound|
  double n_spread = 0.0;          // max_n |winding(n) - winding(0)|
  WindingResult detail[3];
};

/// Requires T3 = 0 (PResonancePresent otherwise).
LevinsonReport levinson_check(const FactorizedPotential& pot, const SweepSpec& spec);

}  // namespace scat2d
