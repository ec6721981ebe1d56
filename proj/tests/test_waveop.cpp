#include <doctest.h>

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>

#include "oracles.hpp"
#include "scat2d/waveop.hpp"

using namespace scat2d;

namespace {
constexpr double kPi = std::numbers::pi;

FactorizedPotential gaussian_well(double g) {
  const auto spec = PotentialSpec::gaussian(1.0);
  return factorize_potential(spec, g, build_grid_for(spec, 4.5, 12, 24));
}

WavePacket small_packet() { return gaussian_packet(128, 64.0, 1.35, 0.3, 3.0, 0.0, 0.0, 0.5, 4.0); }

// -Delta by FFT, written independently of the library's split-step code
WavePacket laplacian(const WavePacket& p) {
  Eigen::FFT<double> fft;
  const int n = p.n;
  Eigen::MatrixXcd a = p.values;
  Eigen::VectorXcd buf(n);
  auto pass = [&](Eigen::MatrixXcd& m, bool inv) {
    for (int c = 0; c < n; ++c) {
      Eigen::VectorXcd col = m.col(c);
      inv ? fft.inv(buf, col) : fft.fwd(buf, col);
      m.col(c) = buf;
    }
  };
  pass(a, false);
  a.transposeInPlace();
  pass(a, false);
  a.transposeInPlace();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double ki = 2 * kPi * (i < n / 2 ? i : i - n) / p.L, kj = 2 * kPi * (j < n / 2 ? j : j - n) / p.L;
      a(i, j) *= ki * ki + kj * kj;
    }
  pass(a, true);
  a.transposeInPlace();
  pass(a, true);
  a.transposeInPlace();
  WavePacket out = p;
  out.values = a;
  return out;
}
}  // namespace

TEST_CASE("log grid") {
  const LogGrid g = LogGrid::spanning(0.02, 30.0, 0.04);
  CHECK(g.lambda(0) == doctest::Approx(0.02).epsilon(1e-12));
  CHECK(g.lambda(g.n - 1) == doctest::Approx(30.0).epsilon(1e-12));
  CHECK(g.ds <= 0.04);
  CHECK_THROWS_AS(LogGrid::spanning(0.0, 1.0, 0.1), Error);
}

TEST_CASE("spectral transform: Parseval, gaussian closed form, H0 diagonalisation") {
  const WavePacket p = small_packet();
  CHECK(window_mass_fraction(p) > 0.99);
  const LogGrid grid = LogGrid::spanning(0.02, 30.0, 0.04);
  const AngularGrid ang(64);
  const SpectralField phi = spectral_transform(p, grid, ang);
  CHECK(std::abs(phi.norm() - p.norm()) <= 1e-3 * p.norm());

  const SpectralField lap = spectral_transform(laplacian(p), grid, ang);
  Eigen::MatrixXcd d = lap.values;
  for (int k = 0; k < grid.n; ++k) d.row(k) -= grid.lambda(k) * phi.values.row(k);
  SpectralField diff = phi;
  diff.values = d;
  CHECK(diff.norm() <= 1e-3 * lap.norm());

  // from_spectral is the exact adjoint of the sampled transform
  SpectralField probe = phi;
  probe.values = Eigen::MatrixXcd::Random(grid.n, 64);
  const WavePacket back = from_spectral(probe, p.n, p.L);
  const double w = grid.ds * 2.0 * kPi / 64;
  Complex lhs = 0.0;
  for (int k = 0; k < grid.n; ++k) lhs += grid.lambda(k) * w * phi.values.row(k).dot(probe.values.row(k));
  const Complex rhs = p.values.cwiseProduct(back.values.conjugate()).sum() * p.dx() * p.dx();
  CHECK(std::abs(lhs - std::conj(rhs)) <= 1e-10 * std::abs(lhs));

  WavePacket g = radial_packet(96, 16.0, [](double r) { return std::exp(-0.5 * r * r); });
  const SpectralField gf = spectral_transform(g, LogGrid::spanning(0.01, 10.0, 0.1), AngularGrid(16));
  for (int k = 0; k < gf.grid.n; ++k)
    for (int a = 0; a < 16; ++a)
      CHECK(std::abs(gf.values(k, a) - std::exp(-0.5 * gf.grid.lambda(k)) / std::sqrt(2.0)) <= 1e-4);
}

TEST_CASE("under-resolved packets are refused") {
  const WavePacket p = gaussian_packet(64, 64.0, 1.0, 0.0, 4.0, 0.0, 0.0, 0.5, 4.0);  // dx = 1
  try {
    spectral_transform(p, LogGrid::spanning(0.1, 10.0, 0.1), AngularGrid(16));
    FAIL("expected UnderResolved");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnderResolved);
  }
}

TEST_CASE("multipliers") {
  CHECK(MellinMultiplier::theta().symbol(0.0) == Complex(0.5, 0.0));
  CHECK(MellinMultiplier::theta_tilde().symbol(0.0) == Complex(0.5, -0.5));
  CHECK(std::abs(MellinMultiplier::tanh_half().symbol(0.3) - MellinMultiplier::theta().symbol(0.3)) <= 1e-15);
  CHECK(MellinMultiplier::theta().name() == "theta");

  const LogGrid grid = LogGrid::spanning(1e-3, 100.0, 0.05);
  SpectralField f{grid, 4, Eigen::MatrixXcd::Random(grid.n, 4)};
  const SpectralField same =
      dilation_multiplier_apply(MellinMultiplier::from_function([](double) { return Complex(1.0); }), f);
  CHECK((same.values - f.values).cwiseAbs().maxCoeff() <= 1e-12);

  SpectralField bad = f;
  bad.values.resize(grid.n + 1, 4);
  CHECK_THROWS_AS(dilation_multiplier_apply(MellinMultiplier::theta(), bad), Error);
}

TEST_CASE("1 - tanh(pi A+) is the half-line Hilbert transform") {
  // -i pi tanh(pi xi) is the symbol of F -> PV int F(b) / (a - b) db
  const LogGrid g = LogGrid::spanning(std::exp(-12.0), std::exp(5.0), 0.04);
  Eigen::MatrixXcd v(g.n, 1);
  for (int k = 0; k < g.n; ++k) v(k, 0) = std::exp(-g.lambda(k));
  const auto hilbert = MellinMultiplier::from_function([](double x) { return Complex(0.0, -kPi) * std::tanh(kPi * x); });
  const Eigen::MatrixXcd out = apply_multiplier_columns(hilbert, g, v);
  for (double a : {0.1, 0.5, 1.0, 3.0}) {
    const int k = static_cast<int>(std::lround((std::log(a) - g.s_min) / g.ds));
    const double ref = oracle::pv_hilbert([](double b) { return std::exp(-b); }, g.lambda(k));
    CHECK(std::abs(out(k, 0) - ref) <= 1e-3);
  }
}

TEST_CASE("commutator with a bounded function of lambda converges under log-grid refinement") {
  auto commutator = [](double ds) {
    const LogGrid g = LogGrid::spanning(1e-4, 1e3, ds);
    Eigen::MatrixXcd f(g.n, 1), bf(g.n, 1);
    for (int k = 0; k < g.n; ++k) {
      const double s = g.s(k), b = 1.0 / (1.0 + g.lambda(k));
      f(k, 0) = std::exp(-0.5 * s * s) * std::exp(-0.5 * s);
      bf(k, 0) = b * f(k, 0);
    }
    Eigen::MatrixXcd c = apply_multiplier_columns(MellinMultiplier::theta(), g, bf);
    const Eigen::MatrixXcd tf = apply_multiplier_columns(MellinMultiplier::theta(), g, f);
    for (int k = 0; k < g.n; ++k) c(k, 0) -= tf(k, 0) / (1.0 + g.lambda(k));
    SpectralField cf{g, 1, c};
    return cf.norm();
  };
  const double c1 = commutator(0.2), c2 = commutator(0.1), c3 = commutator(0.05);
  CHECK(c3 > 0.0);
  CHECK(std::abs(c3 - c2) < std::abs(c2 - c1));
}

TEST_CASE("N B identity and the generic case") {
  const auto pot = gaussian_well(1.0);
  const ProjectionSet ps = compute_projection_set(pot);
  REQUIRE(ps.rank_S3() == 0);
  const AngularGrid ang(16);
  for (double lambda : {1e-3, 0.5, 2.0, 8.0}) {
    const NBFactors f = assemble_NB(pot, ps, lambda, ang);
    CHECK(f.Ntilde.cwiseAbs().maxCoeff() == 0.0);
    CHECK(f.Btilde.cwiseAbs().maxCoeff() == 0.0);
    CHECK(nb_identity_defect(pot, ps, lambda, ang) <= 1e-10);
  }
}

TEST_CASE("Ntilde vanishes at zero energy on the zero-bound fixture") {
  const auto spec = PotentialSpec::square_well(1.0);
  const double g = tune_critical_coupling(spec, Target::SResonance, 10.0, 20.0);
  const auto pot = factorize_potential(spec, g, build_grid_for(spec, 1.0, 8, 16));
  const ProjectionSet ps = compute_projection_set(pot);
  REQUIRE(ps.rank_S3() == 2);
  const AngularGrid ang(16);
  double prev = INFINITY;
  for (double lambda : {1e-2, 1e-3, 1e-4, 1e-5}) {
    const NBFactors f = assemble_NB(pot, ps, lambda, ang);
    const double n = spectral_norm(f.Ntilde);
    CHECK(n < prev);
    prev = n;
    CHECK(nb_identity_defect(pot, ps, lambda, ang) <= 1e-10);
  }
}

TEST_CASE("p-resonances are refused by the formula") {
  const auto spec = PotentialSpec::square_well(1.0);
  const double g = tune_critical_coupling(spec, Target::PResonance, 3.0, 9.0);
  const auto pot = factorize_potential(spec, g, build_grid_for(spec, 1.0, 8, 16));
  const ProjectionSet ps = compute_projection_set(pot);
  try {
    assemble_NB(pot, ps, 1.0, AngularGrid(8));
    FAIL("expected PResonancePresent");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::PResonancePresent);
  }
}

TEST_CASE("zero coupling leaves packets unchanged") {
  const WavePacket p = small_packet();
  const auto zero = gaussian_well(0.0);
  const ProjectionSet ps = compute_projection_set(zero);
  const SpectralField phi = spectral_transform(p, LogGrid::spanning(0.1, 10.0, 0.1), AngularGrid(16));
  const SpectralField w = waveop_apply_formula(zero, ps, phi);
  CHECK((w.values - phi.values).cwiseAbs().maxCoeff() <= 1e-14);

  const TimeDomainResult t = waveop_timedomain(zero.spec, 0.0, p, 3.0, 0.05);
  CHECK((t.psi.values - p.values).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("split-step conserves the norm and stays inside the box") {
  const WavePacket p = small_packet();
  const TimeDomainResult t = waveop_timedomain(PotentialSpec::gaussian(1.0), 1.0, p, 4.0, 0.02);
  CHECK(t.norm_drift <= 1e-8);
  CHECK(t.leaked <= 1e-3);
  try {
    waveop_timedomain(PotentialSpec::gaussian(1.0), 1.0, p, 40.0, 0.05);
    FAIL("expected BoundaryContamination");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BoundaryContamination);
  }
}

TEST_CASE("snapshot round trip") {
  const WavePacket p = gaussian_packet(16, 8.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.5, 4.0);
  const auto path = (std::filesystem::temp_directory_path() / "scat2d_snapshot_test.bin").string();
  write_snapshot(path, p, 2.5);
  double t = 0.0;
  const WavePacket q = read_snapshot(path, &t);
  std::remove(path.c_str());
  CHECK(t == 2.5);
  CHECK(q.n == 16);
  CHECK(q.L == doctest::Approx(8.0));
  CHECK((q.values - p.values).cwiseAbs().maxCoeff() == 0.0);
}
