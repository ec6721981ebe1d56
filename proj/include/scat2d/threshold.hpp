#pragma once

#include <string>
#include <vector>

#include "scat2d/bs.hpp"

namespace scat2d {

/// M00 = u + v G0 v with G0(x, y) = -(1/2pi)(ln(|x - y|/2) + gamma_E).
RealOperator assemble_M00(const FactorizedPotential& pot, SingularRule rule = SingularRule::ProductIntegration);

/// Rank decision of one stage of the chain, with its spectral-gap report.
struct StageReport {
  std::string label;
  Index rank = 0;
  GapReport gap;
};

struct ProjectionSet {
  RealOperator P, Q, S1, S2, S3, T2, T3;
  RealOperator M00;
  // Weighted-orthonormal bases (columns) of Ran S1, Ran T2, Ran T3, Ran S3;
  // Ran S1 = Ran T2 + Ran T3 + Ran S3 orthogonally.
  Eigen::MatrixXd basis_S1, basis_T2, basis_T3, basis_S3;
  StageReport stage_S1, stage_S2, stage_S3;
  double tol = kDefaultNullTol;

  Index rank_S1() const { return basis_S1.cols(); }
  Index rank_S2() const { return basis_T3.cols() + basis_S3.cols(); }
  Index rank_S3() const { return basis_S3.cols(); }
  Index rank_T2() const { return basis_T2.cols(); }
  Index rank_T3() const { return basis_T3.cols(); }
};

/// S1: kernel of Q M00 Q on Q H. S2: subspace of Ran S1 annihilated by
/// f -> <v, M00 f>. S3: subspace of Ran S2 annihilated by f -> <v x_1, f>,
/// <v x_2, f>, <v, M00 f>. Each stage is gap-certified (IllConditionedSplit
/// carries the stage label).
ProjectionSet compute_projection_set(const FactorizedPotential& pot, double tol = kDefaultNullTol);

enum class Stage { T2, T3, S3 };
std::string_view stage_name(Stage s);

struct DecayFit {
  double exponent = 0.0;
  double residual = 0.0;          // RMS of the log-log fit residuals
  Eigen::VectorXd radii, amplitude;  // angular RMS of psi on each circle
};

inline constexpr double kMaxDecayResidual = 0.2;

/// psi = c - G0 v f, c = <v, M00 f> / ||v||^2, evaluated at arbitrary points
/// outside the potential support (f is a grid function).
Eigen::VectorXd zero_energy_solution(const FactorizedPotential& pot, const RealOperator& M00,
                                     const Eigen::VectorXd& f, const Eigen::VectorXd& px,
                                     const Eigen::VectorXd& py);

/// Fitted far-field decay exponent of the zero-energy solution generated by
/// the index-th basis vector of the stage, sampled on circles with radii
/// log-spaced over [r_min, r_max]. NoObstruction if the stage is empty,
/// DecayFitUnstable if the fit residual exceeds kMaxDecayResidual.
DecayFit zero_energy_profile(const ProjectionSet& pset, Stage stage, int index, const FactorizedPotential& pot,
                             double r_min, double r_max, int n_radii = 24);

struct ThresholdReport {
  int n_s = 0, n_p = 0, n_zero_bound = 0;
  double tol = 0.0;
  std::vector<double> exponents_T2, exponents_T3, exponents_S3;
  double gap_S1 = 0.0, gap_S2 = 0.0, gap_S3 = 0.0;
  bool decay_consistent = true;

  /// Flat `key = value` block.
  std::string to_text() const;
  static std::string csv_header();
  std::string csv_row(double g) const;
};

/// Counts from the ranks plus decay fits over [3 R, 30 R] (R: support or grid radius).
ThresholdReport classify_threshold(const ProjectionSet& pset, const FactorizedPotential& pot);

enum class Target { SResonance, PResonance, ZeroBound };

/// Number of non-negative eigenvalues of Q M00 Q on Q H. Non-decreasing in g
/// for potentials of fixed profile, jumps where S1 becomes non-trivial.
int threshold_inertia(const FactorizedPotential& pot);

struct TuneOptions {
  double radius = 1.0;
  int n_radial = 8;
  int n_angular = 16;
  double g_tol = 1e-11;  // relative width of the final bracket
  double null_tol = kDefaultNullTol;
};

/// Bisection on the inertia count; verifies that the target stage is non-trivial
/// at the returned coupling. NoSignChange if the count does not change across
/// the bracket or the crossing is of another type.
double tune_critical_coupling(const PotentialSpec& spec, Target target, double g_lo, double g_hi,
                              const TuneOptions& opt = {});

}  // namespace scat2d
