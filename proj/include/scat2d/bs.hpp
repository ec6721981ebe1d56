#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scat2d/opcore.hpp"

namespace scat2d {

// ---------------------------------------------------------------------------
// Potentials. V = g * V0 with V0 one of the radial presets below, sampled on a
// disk grid and factorised as V = u v^2, v = |V|^{1/2}, u = sign(V).
// ---------------------------------------------------------------------------
enum class PotentialKind { Gaussian, SquareWell, Ring };

struct PotentialSpec {
  PotentialKind kind = PotentialKind::Gaussian;
  double width = 1.0;   // gaussian: V0 = -exp(-r^2 / width^2)
  double radius = 1.0;  // square well: V0 = sign on r < radius
  double sign = -1.0;
  double inner = 0.5;   // ring: V0 = +height on r <= inner, -1 on inner < r < outer
  double outer = 1.0;
  double height = 1.0;

  static PotentialSpec gaussian(double w) { PotentialSpec s; s.kind = PotentialKind::Gaussian; s.width = w; return s; }
  static PotentialSpec square_well(double a, double sign = -1.0) {
    PotentialSpec s;
    s.kind = PotentialKind::SquareWell;
    s.radius = a;
    s.sign = sign;
    return s;
  }
  static PotentialSpec ring(double a, double b, double h) {
    PotentialSpec s;
    s.kind = PotentialKind::Ring;
    s.inner = a;
    s.outer = b;
    s.height = h;
    return s;
  }
};

/// Throws BadPotentialSpec on invalid parameters.
void validate(const PotentialSpec& spec);
/// Unscaled profile V0(r).
double profile(const PotentialSpec& spec, double r);
/// Radius outside of which V0 vanishes (infinity for the gaussian).
double support_radius(const PotentialSpec& spec);
/// Radii where V0 jumps; used as panel edges so quadrature stays spectral.
std::vector<double> breakpoints(const PotentialSpec& spec, double grid_radius);
/// Disk grid adapted to the preset (jumps on panel edges).
QuadGrid2D build_grid_for(const PotentialSpec& spec, double radius, int n_radial, int n_angular);

struct FactorizedPotential {
  QuadGrid2D grid;
  PotentialSpec spec;
  double g = 0.0;
  Eigen::VectorXd V, v, u;
};

FactorizedPotential factorize_potential(const PotentialSpec& spec, double g, const QuadGrid2D& grid);

// ---------------------------------------------------------------------------
// Free resolvent kernels and the Birman-Schwinger operator.
// ---------------------------------------------------------------------------
enum class SingularRule {
  /// Polar product integration of the logarithmic part (default).
  ProductIntegration,
  /// Point values off the diagonal, kernel averaged over an equal-area disk on it.
  DiskAverage,
};

struct EnergyPoint {
  enum class Kind { RealKappa, BoundaryLambda, Zero };
  Kind kind = Kind::Zero;
  double value = 0.0;

  static EnergyPoint real_kappa(double kappa) { return {Kind::RealKappa, kappa}; }
  static EnergyPoint boundary_lambda(double lambda) { return {Kind::BoundaryLambda, lambda}; }
  static EnergyPoint zero() { return {Kind::Zero, 0.0}; }
};

/// Discretised free resolvent as a grid-to-grid operator, quadrature weights
/// included: (1/2pi) K0(kappa d) for real kappa, (i/4) H0+(sqrt(lambda) d)
/// at lambda + i0, -(1/2pi)(ln(d/2) + gamma_E) at zero energy.
/// Symmetrised so that the kernel is exactly weighted-symmetric.
ComplexOperator free_resolvent(const QuadGrid2D& grid, EnergyPoint point,
                               SingularRule rule = SingularRule::ProductIntegration);

/// M = u + v R0 v. Throws SingularEnergy for lambda <= 0 on the boundary branch.
ComplexOperator assemble_M(const FactorizedPotential& pot, EnergyPoint point,
                           SingularRule rule = SingularRule::ProductIntegration);

/// 1 / (reciprocal condition estimate) of a dense LU factorisation.
double condition_estimate(const Eigen::MatrixXcd& m);

// ---------------------------------------------------------------------------
// Scattering matrix S(lambda) = 1 - 2 pi i F0 v M^{-1} v F0*.
// ---------------------------------------------------------------------------
inline constexpr double kNearSingularCond = 1e13;

struct SMatrixSample {
  double lambda = 0.0;
  Eigen::MatrixXcd S;
  double unitarity_defect = 0.0;  // ||S* S - 1||
  double s_minus_1_norm = 0.0;    // ||S - 1||
  double cond_M = 0.0;
};

SMatrixSample smatrix(const FactorizedPotential& pot, double lambda, const AngularGrid& ang,
                      SingularRule rule = SingularRule::ProductIntegration);

struct SweepEntry {
  double lambda = 0.0;
  std::optional<SMatrixSample> sample;
  std::string error;  // non-empty when the sample failed
  ErrorKind error_kind = ErrorKind::NearSingularM;
};

/// Independent samples at every lambda (ascending, > 0); failures are recorded per entry.
std::vector<SweepEntry> sweep_smatrix(const FactorizedPotential& pot, const std::vector<double>& lambdas,
                                      const AngularGrid& ang,
                                      SingularRule rule = SingularRule::ProductIntegration);

/// Log-spaced energies on [lo, hi].
std::vector<double> log_spaced(double lo, double hi, int n);

/// I1 = (M(-i sqrt(lambda)) + S1)^{-1}.
ComplexOperator assemble_I1(const FactorizedPotential& pot, double lambda, const RealOperator& S1);

/// Spectral norm of a plain matrix (largest singular value).
double spectral_norm(const Eigen::MatrixXcd& m);

}  // namespace scat2d
