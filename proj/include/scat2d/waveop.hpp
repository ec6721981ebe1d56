#pragma once

#include <functional>
#include <string>
#include <vector>

#include "scat2d/threshold.hpp"

namespace scat2d {

// ---------------------------------------------------------------------------
// Spectral representation L^2(R+; L^2(S)) sampled on a uniform grid in
// s = ln(lambda). Norm: sum |phi|^2 lambda ds (2 pi / m).
// ---------------------------------------------------------------------------
struct LogGrid {
  double s_min = 0.0;
  double ds = 0.0;
  int n = 0;

  double s(int k) const { return s_min + ds * k; }
  double lambda(int k) const;
  double s_max() const { return s(n - 1); }
  /// Grid with spacing close to `ds` whose end points are ln(lo) and ln(hi).
  static LogGrid spanning(double lambda_lo, double lambda_hi, double ds);
  bool same_as(const LogGrid& o) const;
};

struct SpectralField {
  LogGrid grid;
  int m = 0;                 // angular nodes; columns of `values`
  Eigen::MatrixXcd values;   // grid.n x m

  double norm() const;
};

// Dilation-generator multipliers phi(A+), A+ = -i d/ds after the unitary map
// (U phi)(s) = e^{s/2} phi(e^s); the Fourier variable is dual to s with
// forward kernel e^{-i xi s}.
struct MellinMultiplier {
  enum class Tag { Theta, ThetaTilde, TanhHalf, Custom };
  Tag tag = Tag::Theta;
  std::function<Complex(double)> custom;

  Complex symbol(double xi) const;
  std::string name() const;

  static MellinMultiplier theta() { return {Tag::Theta, {}}; }
  static MellinMultiplier theta_tilde() { return {Tag::ThetaTilde, {}}; }
  /// 1/2 (1 + tanh(pi A / 2)) with A the dilation generator on R^2, which acts as -2 A+.
  static MellinMultiplier tanh_half() { return {Tag::TanhHalf, {}}; }
  static MellinMultiplier from_function(std::function<Complex(double)> f) { return {Tag::Custom, std::move(f)}; }
};

/// Applies the multiplier to every column (one function of lambda each).
/// The s-direction is zero-padded to suppress wrap-around of the kernel tails.
Eigen::MatrixXcd apply_multiplier_columns(const MellinMultiplier& mult, const LogGrid& grid,
                                          const Eigen::MatrixXcd& values);
/// GridMismatch when the values do not match the grid.
SpectralField dilation_multiplier_apply(const MellinMultiplier& mult, const SpectralField& field);

// ---------------------------------------------------------------------------
// Wave packets on a uniform periodic square [-L/2, L/2)^2.
// ---------------------------------------------------------------------------
struct WavePacket {
  int n = 0;
  double L = 0.0;
  Eigen::MatrixXcd values;  // values(i, j) at (x_i, y_j)
  double lambda_lo = 0.0, lambda_hi = 0.0;  // declared energy window

  double dx() const { return L / n; }
  double coord(int i) const { return -0.5 * L + i * dx(); }
  double norm() const;
};

WavePacket gaussian_packet(int n, double L, double k0x, double k0y, double sigma, double cx, double cy,
                           double lambda_lo, double lambda_hi);
WavePacket radial_packet(int n, double L, const std::function<double(double)>& f);

/// Fraction of |psi-hat|^2 with |k|^2 inside the declared window (discrete Fourier transform).
double window_mass_fraction(const WavePacket& psi);

/// Snapshot file: 4 text lines (dims, spacing, time, endianness) then n*n
/// little-endian (re, im) double pairs, x index slowest.
void write_snapshot(const std::string& path, const WavePacket& psi, double time);
WavePacket read_snapshot(const std::string& path, double* time = nullptr);

/// (F0 psi)(lambda, omega) = 2^{-1/2} (F psi)(sqrt(lambda) omega) evaluated by an
/// exact separable non-uniform DFT of the sampled packet. UnderResolved if the
/// packet window reaches above half the grid Nyquist wavenumber.
SpectralField spectral_transform(const WavePacket& psi, const LogGrid& grid, const AngularGrid& ang);
/// Adjoint transform back to an n x n packet of side L.
WavePacket from_spectral(const SpectralField& field, int n, double L);

// ---------------------------------------------------------------------------
// The stationary formula
//   F0 (W- - 1) F0* = -2 pi i { N (theta(A+) x 1) B + Ntilde (theta~(A+) x 1) Btilde }.
// ---------------------------------------------------------------------------
struct NBFactors {
  Eigen::MatrixXcd N, Ntilde;  // m x grid
  Eigen::MatrixXcd B, Btilde;  // grid x m
};

/// PResonancePresent if rank T3 > 0.
NBFactors assemble_NB(const FactorizedPotential& pot, const ProjectionSet& pset, double lambda, const AngularGrid& ang);
/// ||N B + Ntilde Btilde + (1/2 pi i)(S - 1)|| with S from smatrix().
double nb_identity_defect(const FactorizedPotential& pot, const ProjectionSet& pset, double lambda,
                          const AngularGrid& ang);

struct FormulaOptions {
  /// B(lambda) is only assembled where |phi(lambda)| exceeds this fraction of its maximum.
  double amplitude_cut = 1e-9;
};

/// F0 W- F0* applied to a field (adds the identity).
SpectralField waveop_apply_formula(const FactorizedPotential& pot, const ProjectionSet& pset, const SpectralField& field,
                                   const FormulaOptions& opt = {});

struct TimeDomainResult {
  WavePacket psi;          // e^{-iTH} e^{iTH0} psi
  double norm_drift = 0.0; // | ||out|| - ||in|| | / ||in||
  double leaked = 0.0;     // largest mass fraction seen in the boundary strip
};

/// W(T) psi = e^{-iTH} e^{iTH0} psi (the wave operator W- at horizon T > 0) by
/// Strang splitting with exact free flow in Fourier space.
/// BoundaryContamination if more than 1e-3 of the mass reaches the boundary strip.
TimeDomainResult waveop_timedomain(const PotentialSpec& spec, double g, const WavePacket& psi, double T, double dt);

struct WaveopSpec {
  double lambda_lo = 0.02, lambda_hi = 30.0, ds = 0.04;
  int m = 64;
  double T0 = 6.0, dt = 0.01;
  int probes = 10;  // probe fields for the simplified-formula diagnostic
};

struct WaveopReport {
  double rel_error = 0.0;         // ||formula - timedomain(2 T0)|| / ||psi||
  double isometry_defect = 0.0;   // | ||F0 W- psi|| - ||psi|| | / ||psi|| from the formula
  double identity_defect = 0.0;   // max over sampled lambda of the N B identity defect
  double cauchy = 0.0;            // ||W(2 T0) psi - W(T0) psi|| / ||psi||
  double scattered = 0.0;         // ||(W- - 1) psi|| / ||psi|| from the formula
  double norm_drift = 0.0;
  double simplified_residual = 0.0;       // || formula - (1 + theta(A+)(S - 1)) || / ||psi||
  Eigen::VectorXd simplified_singular_values;  // residual on probe fields, descending
};

WaveopReport compare_waveops(const FactorizedPotential& pot, const WavePacket& psi, const WaveopSpec& spec);

}  // namespace scat2d
