#include "scat2d/waveop.hpp"

#include <unsupported/Eigen/FFT>

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>

#include "scat2d/parallel.hpp"

namespace scat2d {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr Complex kI(0.0, 1.0);
const double kF0Prefactor = 1.0 / (std::sqrt(2.0) * kTwoPi);

// In-place 2D DFT (forward e^{-i k x}; inverse scaled by 1/n^2).
void fft2(Eigen::MatrixXcd& a, bool inverse) {
  Eigen::FFT<double> fft;
  const Index n = a.rows();
  Eigen::VectorXcd buf(n);
  auto pass = [&](Eigen::MatrixXcd& m) {
    for (Index c = 0; c < m.cols(); ++c) {
      if (inverse)
        fft.inv(buf.data(), m.col(c).data(), n);
      else
        fft.fwd(buf.data(), m.col(c).data(), n);
      m.col(c) = buf;
    }
  };
  pass(a);
  a.transposeInPlace();
  pass(a);
  a.transposeInPlace();
}

Eigen::VectorXd wavenumbers(int n, double L) {
  Eigen::VectorXd k(n);
  for (int i = 0; i < n; ++i) k[i] = kTwoPi * (i < n / 2 ? i : i - n) / L;
  return k;
}

double boundary_fraction(const Eigen::MatrixXcd& v, double total) {
  const Index n = v.rows();
  const Index strip = std::max<Index>(1, n / 20);
  double s = 0.0;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (i < strip || j < strip || i >= n - strip || j >= n - strip) s += std::norm(v(i, j));
  return total > 0.0 ? s / total : 0.0;
}

void require_same_grid(const SpectralField& a, const SpectralField& b) {
  if (!a.grid.same_as(b.grid) || a.m != b.m) throw Error(ErrorKind::GridMismatch, "spectral fields live on different grids");
}

}  // namespace

double LogGrid::lambda(int k) const { return std::exp(s(k)); }

LogGrid LogGrid::spanning(double lambda_lo, double lambda_hi, double ds) {
  if (!(lambda_lo > 0.0) || !(lambda_hi > lambda_lo) || !(ds > 0.0))
    throw Error(ErrorKind::BadGridSpec, "log grid needs 0 < lambda_lo < lambda_hi and ds > 0");
  const double a = std::log(lambda_lo), b = std::log(lambda_hi);
  const int n = static_cast<int>(std::ceil((b - a) / ds)) + 1;
  return {a, (b - a) / (n - 1), n};
}

bool LogGrid::same_as(const LogGrid& o) const {
  return n == o.n && std::abs(s_min - o.s_min) <= 1e-12 * (1.0 + std::abs(s_min)) && std::abs(ds - o.ds) <= 1e-12 * ds;
}

double SpectralField::norm() const {
  if (m == 0) return 0.0;
  double s = 0.0;
  for (int k = 0; k < grid.n; ++k) s += values.row(k).squaredNorm() * grid.lambda(k);
  return std::sqrt(s * grid.ds * kTwoPi / m);
}

Complex MellinMultiplier::symbol(double xi) const {
  switch (tag) {
    case Tag::Theta: return 0.5 * (1.0 - std::tanh(kPi * xi));
    case Tag::ThetaTilde: {
      const double x = 2.0 * kPi * xi;
      return 0.5 * Complex(1.0 - std::tanh(x), -1.0 / std::cosh(x));
    }
    case Tag::TanhHalf: {
      const double a = -2.0 * xi;
      return 0.5 * (1.0 + std::tanh(0.5 * kPi * a));
    }
    case Tag::Custom: return custom ? custom(xi) : Complex(1.0, 0.0);
  }
  return 1.0;
}

std::string MellinMultiplier::name() const {
  switch (tag) {
    case Tag::Theta: return "theta";
    case Tag::ThetaTilde: return "theta_tilde";
    case Tag::TanhHalf: return "tanh_half";
    case Tag::Custom: return "custom";
  }
  return "?";
}

Eigen::MatrixXcd apply_multiplier_columns(const MellinMultiplier& mult, const LogGrid& grid, const Eigen::MatrixXcd& values) {
  if (values.rows() != grid.n || grid.n < 2 || !(grid.ds > 0.0))
    throw Error(ErrorKind::GridMismatch, "field rows do not match the log grid");
  const Index n = grid.n;
  const Index npad = static_cast<Index>(std::bit_ceil(static_cast<std::uint64_t>(4 * n)));
  Eigen::VectorXcd sym(npad);
  for (Index j = 0; j < npad; ++j) {
    const double jj = j < npad / 2 ? static_cast<double>(j) : static_cast<double>(j - npad);
    sym[j] = mult.symbol(kTwoPi * jj / (npad * grid.ds));
  }
  Eigen::VectorXd up(n), down(n);
  for (Index k = 0; k < n; ++k) {
    up[k] = std::exp(0.5 * grid.s(static_cast<int>(k)));
    down[k] = 1.0 / up[k];
  }
  Eigen::MatrixXcd out(n, values.cols());
  parallel_for(static_cast<int>(values.cols()), [&](int c) {
    Eigen::FFT<double> fft;
    Eigen::VectorXcd buf = Eigen::VectorXcd::Zero(npad), spec(npad);
    buf.head(n) = values.col(c).cwiseProduct(up.cast<Complex>());
    fft.fwd(spec.data(), buf.data(), npad);
    spec = spec.cwiseProduct(sym);
    fft.inv(buf.data(), spec.data(), npad);
    out.col(c) = buf.head(n).cwiseProduct(down.cast<Complex>());
  });
  return out;
}

SpectralField dilation_multiplier_apply(const MellinMultiplier& mult, const SpectralField& field) {
  if (field.values.cols() != field.m) throw Error(ErrorKind::GridMismatch, "field columns do not match the angular grid");
  SpectralField out = field;
  out.values = apply_multiplier_columns(mult, field.grid, field.values);
  return out;
}

double WavePacket::norm() const { return values.norm() * dx(); }

WavePacket gaussian_packet(int n, double L, double k0x, double k0y, double sigma, double cx, double cy,
                           double lambda_lo, double lambda_hi) {
  if (n < 8 || !(L > 0.0) || !(sigma > 0.0)) throw Error(ErrorKind::BadGridSpec, "packet needs n >= 8, L > 0, sigma > 0");
  WavePacket p;
  p.n = n;
  p.L = L;
  p.lambda_lo = lambda_lo;
  p.lambda_hi = lambda_hi;
  p.values.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double x = p.coord(i), y = p.coord(j);
      const double r2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
      p.values(i, j) = std::exp(-0.5 * r2 / (sigma * sigma)) * std::exp(kI * (k0x * x + k0y * y));
    }
  p.values /= p.norm();
  return p;
}

WavePacket radial_packet(int n, double L, const std::function<double(double)>& f) {
  if (n < 8 || !(L > 0.0)) throw Error(ErrorKind::BadGridSpec, "packet needs n >= 8 and L > 0");
  WavePacket p;
  p.n = n;
  p.L = L;
  p.values.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) p.values(i, j) = f(std::hypot(p.coord(i), p.coord(j)));
  return p;
}

double window_mass_fraction(const WavePacket& psi) {
  Eigen::MatrixXcd a = psi.values;
  fft2(a, false);
  const Eigen::VectorXd k = wavenumbers(psi.n, psi.L);
  double in = 0.0, total = 0.0;
  for (int i = 0; i < psi.n; ++i)
    for (int j = 0; j < psi.n; ++j) {
      const double e = std::norm(a(i, j));
      const double l = k[i] * k[i] + k[j] * k[j];
      total += e;
      if (l >= psi.lambda_lo && l <= psi.lambda_hi) in += e;
    }
  return total > 0.0 ? in / total : 0.0;
}

void write_snapshot(const std::string& path, const WavePacket& psi, double time) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::ConfigParse, "cannot open snapshot file " + path);
  os.precision(17);
  os << "dims " << psi.n << " " << psi.n << "\n"
     << "spacing " << psi.dx() << "\n"
     << "time " << time << "\n"
     << "endianness little\n";
  static_assert(std::endian::native == std::endian::little, "snapshot writer assumes a little-endian host");
  for (int i = 0; i < psi.n; ++i)
    for (int j = 0; j < psi.n; ++j) {
      const double re = psi.values(i, j).real(), im = psi.values(i, j).imag();
      os.write(reinterpret_cast<const char*>(&re), sizeof re);
      os.write(reinterpret_cast<const char*>(&im), sizeof im);
    }
}

WavePacket read_snapshot(const std::string& path, double* time) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::ConfigParse, "cannot open snapshot file " + path);
  std::string tag, endian;
  int n1 = 0, n2 = 0;
  double dx = 0.0, t = 0.0;
  is >> tag >> n1 >> n2 >> tag >> dx >> tag >> t >> tag >> endian;
  is.get();
  if (n1 <= 0 || n1 != n2 || endian != "little") throw Error(ErrorKind::ConfigParse, "bad snapshot header in " + path);
  WavePacket p;
  p.n = n1;
  p.L = dx * n1;
  p.values.resize(n1, n1);
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n1; ++j) {
      double re = 0.0, im = 0.0;
      is.read(reinterpret_cast<char*>(&re), sizeof re);
      is.read(reinterpret_cast<char*>(&im), sizeof im);
      p.values(i, j) = {re, im};
    }
  if (!is) throw Error(ErrorKind::ConfigParse, "truncated snapshot " + path);
  if (time) *time = t;
  return p;
}

SpectralField spectral_transform(const WavePacket& psi, const LogGrid& grid, const AngularGrid& ang) {
  const double nyquist = kPi / psi.dx();
  if (psi.lambda_hi > 0.0 && std::sqrt(psi.lambda_hi) > 0.5 * nyquist) {
    std::ostringstream os;
    os << "window top sqrt(" << psi.lambda_hi << ") exceeds half the grid Nyquist wavenumber " << nyquist;
    throw Error(ErrorKind::UnderResolved, os.str());
  }
  const int m = ang.size(), n = psi.n;
  SpectralField out;
  out.grid = grid;
  out.m = m;
  out.values.resize(grid.n, m);
  Eigen::VectorXd xs(n);
  for (int i = 0; i < n; ++i) xs[i] = psi.coord(i);
  const double scale = kF0Prefactor * psi.dx() * psi.dx();
  parallel_for(grid.n, [&](int k) {
    const double kk = std::sqrt(grid.lambda(k));
    Eigen::MatrixXcd e1(m, n), e2(m, n);
    for (int a = 0; a < m; ++a) {
      const double c = std::cos(ang.angle(a)) * kk, s = std::sin(ang.angle(a)) * kk;
      for (int i = 0; i < n; ++i) {
        e1(a, i) = std::polar(1.0, -c * xs[i]);
        e2(a, i) = std::polar(1.0, -s * xs[i]);
      }
    }
    const Eigen::MatrixXcd t = e1 * psi.values;
    out.values.row(k) = (scale * t.cwiseProduct(e2).rowwise().sum()).transpose();
  });
  return out;
}

WavePacket from_spectral(const SpectralField& field, int n, double L) {
  WavePacket p;
  p.n = n;
  p.L = L;
  p.values = Eigen::MatrixXcd::Zero(n, n);
  const int m = field.m;
  const AngularGrid ang(m);
  Eigen::VectorXd xs(n);
  for (int i = 0; i < n; ++i) xs[i] = p.coord(i);
  const int workers = std::max(1, std::min(worker_count(), field.grid.n));
  std::vector<Eigen::MatrixXcd> partial(workers, Eigen::MatrixXcd::Zero(n, n));
  parallel_for(workers, [&](int w) {
    for (int k = w; k < field.grid.n; k += workers) {
      const double kk = std::sqrt(field.grid.lambda(k));
      const double wk = field.grid.lambda(k) * field.grid.ds * kTwoPi / m * kF0Prefactor;
      Eigen::MatrixXcd e1(m, n), e2(m, n);
      for (int a = 0; a < m; ++a) {
        const double c = std::cos(ang.angle(a)) * kk, s = std::sin(ang.angle(a)) * kk;
        for (int i = 0; i < n; ++i) {
          e1(a, i) = std::polar(1.0, c * xs[i]);
          e2(a, i) = std::polar(1.0, s * xs[i]) * (wk * field.values(k, a));
        }
      }
      partial[w].noalias() += e1.transpose() * e2;
    }
  });
  for (const auto& part : partial) p.values += part;
  return p;
}

NBFactors assemble_NB(const FactorizedPotential& pot, const ProjectionSet& pset, double lambda, const AngularGrid& ang) {
  if (pset.rank_T3() > 0) {
    std::ostringstream os;
    os << "T3 has rank " << pset.rank_T3() << "; the formula needs T3 = 0";
    throw Error(ErrorKind::PResonancePresent, os.str());
  }
  const ComplexOperator M = assemble_M(pot, EnergyPoint::boundary_lambda(lambda));
  const ComplexOperator F = assemble_F0(lambda, pot.grid, ang);
  const Eigen::MatrixXcd fs = weighted_adjoint(F).matrix();
  const Eigen::VectorXcd vc = pot.v.cast<Complex>();
  const Eigen::MatrixXcd x = M.matrix().partialPivLu().solve(vc.asDiagonal() * fs);
  const Index n = pot.grid.size();
  const Eigen::MatrixXcd s3 = pset.S3.matrix().cast<Complex>();
  const Eigen::MatrixXcd s3p = Eigen::MatrixXcd::Identity(n, n) - s3;
  const Eigen::MatrixXcd fv = F.matrix() * vc.asDiagonal();
  NBFactors out;
  out.N = fv * s3p;
  out.Ntilde = std::pow(lambda, -0.25) * (fv * s3);
  out.B = s3p * x;
  out.Btilde = std::pow(lambda, 0.25) * (s3 * x);
  return out;
}

double nb_identity_defect(const FactorizedPotential& pot, const ProjectionSet& pset, double lambda, const AngularGrid& ang) {
  const NBFactors f = assemble_NB(pot, pset, lambda, ang);
  const SMatrixSample s = smatrix(pot, lambda, ang);
  const int m = ang.size();
  const Eigen::MatrixXcd lhs = f.N * f.B + f.Ntilde * f.Btilde;
  const Eigen::MatrixXcd rhs = -(s.S - Eigen::MatrixXcd::Identity(m, m)) / Complex(0.0, kTwoPi);
  return spectral_norm(lhs - rhs);
}

namespace {

struct FormulaBatch {
  std::vector<SpectralField> formula;     // F0 W- F0* phi
  std::vector<SpectralField> simplified;  // phi + theta(A+) (S - 1) phi
};

FormulaBatch formula_batch(const FactorizedPotential& pot, const ProjectionSet& pset,
                           const std::vector<SpectralField>& fields, const FormulaOptions& opt) {
  if (pset.rank_T3() > 0) {
    std::ostringstream os;
    os << "T3 has rank " << pset.rank_T3() << "; the formula needs T3 = 0";
    throw Error(ErrorKind::PResonancePresent, os.str());
  }
  const SpectralField& f0 = fields.front();
  for (const auto& f : fields) require_same_grid(f0, f);
  const LogGrid& grid = f0.grid;
  const int m = f0.m, nf = static_cast<int>(fields.size());
  const AngularGrid ang(m);
  const Index n = pot.grid.size();
  const bool has_s3 = pset.rank_S3() > 0;
  const Eigen::MatrixXd s3 = pset.S3.matrix();
  const Eigen::MatrixXd s3p = Eigen::MatrixXd::Identity(n, n) - s3;
  const Eigen::VectorXcd vc = pot.v.cast<Complex>();

  std::vector<bool> active(grid.n, false);
  for (const auto& f : fields) {
    const Eigen::VectorXd rn = f.values.rowwise().norm();
    const double mx = rn.maxCoeff();
    for (int k = 0; k < grid.n; ++k) active[k] = active[k] || (mx > 0.0 && rn[k] > opt.amplitude_cut * mx);
  }

  std::vector<Eigen::MatrixXcd> y(nf, Eigen::MatrixXcd::Zero(grid.n, n));
  std::vector<Eigen::MatrixXcd> yt(nf, Eigen::MatrixXcd::Zero(grid.n, has_s3 ? n : 0));
  std::vector<Eigen::MatrixXcd> smin1(nf, Eigen::MatrixXcd::Zero(grid.n, m));
  parallel_for(grid.n, [&](int k) {
    if (!active[k]) return;
    const double lam = grid.lambda(k);
    const ComplexOperator M = assemble_M(pot, EnergyPoint::boundary_lambda(lam));
    const ComplexOperator F = assemble_F0(lam, pot.grid, ang);
    const Eigen::MatrixXcd fs = weighted_adjoint(F).matrix();
    Eigen::MatrixXcd rhs(n, nf);
    for (int q = 0; q < nf; ++q) rhs.col(q) = vc.cwiseProduct(fs * fields[q].values.row(k).transpose());
    const Eigen::MatrixXcd x = M.matrix().partialPivLu().solve(rhs);
    const Eigen::MatrixXcd fv = F.matrix() * vc.asDiagonal();
    for (int q = 0; q < nf; ++q) {
      if (has_s3) {
        y[q].row(k) = (s3p.cast<Complex>() * x.col(q)).transpose();
        yt[q].row(k) = (std::pow(lam, 0.25) * (s3.cast<Complex>() * x.col(q))).transpose();
      } else {
        y[q].row(k) = x.col(q).transpose();
      }
      smin1[q].row(k) = (Complex(0.0, -kTwoPi) * (fv * x.col(q))).transpose();
    }
  });

  FormulaBatch out;
  for (int q = 0; q < nf; ++q) {
    const Eigen::MatrixXcd z = apply_multiplier_columns(MellinMultiplier::theta(), grid, y[q]);
    Eigen::MatrixXcd zt;
    if (has_s3) zt = apply_multiplier_columns(MellinMultiplier::theta_tilde(), grid, yt[q]);
    SpectralField res = fields[q];
    parallel_for(grid.n, [&](int k) {
      const double mu = grid.lambda(k);
      const ComplexOperator F = assemble_F0(mu, pot.grid, ang);
      Eigen::VectorXcd src;
      if (has_s3) {
        src = s3p.cast<Complex>() * z.row(k).transpose() +
              std::pow(mu, -0.25) * (s3.cast<Complex>() * zt.row(k).transpose());
      } else {
        src = z.row(k).transpose();
      }
      res.values.row(k) += (Complex(0.0, -kTwoPi) * (F.matrix() * vc.cwiseProduct(src))).transpose();
    });
    out.formula.push_back(std::move(res));
    SpectralField simp = fields[q];
    simp.values += apply_multiplier_columns(MellinMultiplier::theta(), grid, smin1[q]);
    out.simplified.push_back(std::move(simp));
  }
  return out;
}

}  // namespace

SpectralField waveop_apply_formula(const FactorizedPotential& pot, const ProjectionSet& pset, const SpectralField& field,
                                   const FormulaOptions& opt) {
  return formula_batch(pot, pset, {field}, opt).formula.front();
}

TimeDomainResult waveop_timedomain(const PotentialSpec& spec, double g, const WavePacket& psi, double T, double dt) {
  if (!(T >= 0.0) || !(dt > 0.0)) throw Error(ErrorKind::BadGridSpec, "time horizon must be >= 0 and dt > 0");
  validate(spec);
  const int n = psi.n;
  const Eigen::VectorXd k = wavenumbers(n, psi.L);
  const double norm_in = psi.norm();
  const double total = psi.values.squaredNorm();
  TimeDomainResult out;
  out.psi = psi;
  Eigen::MatrixXcd& state = out.psi.values;
  if (g == 0.0 || T == 0.0) return out;  // the two flows cancel exactly

  auto check_leak = [&] {
    const double f = boundary_fraction(state, total);
    out.leaked = std::max(out.leaked, f);
    if (f > 1e-3) {
      std::ostringstream os;
      os << "mass fraction " << f << " reached the boundary strip";
      throw Error(ErrorKind::BoundaryContamination, os.str());
    }
  };

  // free flow backwards: e^{i T H0}
  fft2(state, false);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) state(i, j) *= std::polar(1.0, T * (k[i] * k[i] + k[j] * k[j]));
  fft2(state, true);
  check_leak();

  const int steps = static_cast<int>(std::ceil(T / dt - 1e-9));
  const double h = T / steps;
  Eigen::MatrixXcd half_v(n, n), kin(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double V = g * profile(spec, std::hypot(psi.coord(i), psi.coord(j)));
      half_v(i, j) = std::polar(1.0, -0.5 * h * V);
      kin(i, j) = std::polar(1.0, -h * (k[i] * k[i] + k[j] * k[j]));
    }
  for (int s = 0; s < steps; ++s) {
    state = state.cwiseProduct(half_v);
    fft2(state, false);
    state = state.cwiseProduct(kin);
    fft2(state, true);
    state = state.cwiseProduct(half_v);
    if ((s + 1) % 50 == 0 || s + 1 == steps) check_leak();
  }
  out.norm_drift = std::abs(out.psi.norm() - norm_in) / norm_in;
  return out;
}

WaveopReport compare_waveops(const FactorizedPotential& pot, const WavePacket& psi, const WaveopSpec& spec) {
  const ProjectionSet pset = compute_projection_set(pot);
  const AngularGrid ang(spec.m);
  const LogGrid grid = LogGrid::spanning(spec.lambda_lo, spec.lambda_hi, spec.ds);
  const SpectralField phi = spectral_transform(psi, grid, ang);
  const double phin = phi.norm();

  // probes: bumps in s spread over the packet window, constant in omega
  std::vector<SpectralField> fields{phi};
  if (spec.probes > 0 && psi.lambda_hi > psi.lambda_lo) {
    const double a = std::log(psi.lambda_lo), b = std::log(psi.lambda_hi);
    for (int p = 0; p < spec.probes; ++p) {
      const double c = a + (b - a) * (p + 0.5) / spec.probes;
      SpectralField f = phi;
      for (int k = 0; k < grid.n; ++k) {
        const double t = (grid.s(k) - c) / (0.5 * (b - a) / spec.probes);
        f.values.row(k).setConstant(std::exp(-0.5 * t * t));
      }
      f.values /= f.norm();
      fields.push_back(std::move(f));
    }
  }
  const FormulaBatch batch = formula_batch(pot, pset, fields, {});

  WaveopReport rep;
  const SpectralField& w = batch.formula.front();
  rep.isometry_defect = std::abs(w.norm() - phin) / phin;
  {
    SpectralField d = w;
    d.values -= batch.simplified.front().values;
    rep.simplified_residual = d.norm() / phin;
    d.values = w.values - phi.values;
    rep.scattered = d.norm() / phin;
  }
  if (fields.size() > 1) {
    Eigen::MatrixXcd cols(static_cast<Index>(grid.n) * spec.m, static_cast<Index>(fields.size() - 1));
    for (std::size_t q = 1; q < fields.size(); ++q) {
      Eigen::MatrixXcd d = batch.formula[q].values - batch.simplified[q].values;
      for (int k = 0; k < grid.n; ++k) d.row(k) *= std::sqrt(grid.lambda(k) * grid.ds * kTwoPi / spec.m);
      cols.col(static_cast<Index>(q - 1)) = Eigen::Map<Eigen::VectorXcd>(d.data(), d.size());
    }
    rep.simplified_singular_values = Eigen::JacobiSVD<Eigen::MatrixXcd>(cols).singularValues();
  }

  const TimeDomainResult t1 = waveop_timedomain(pot.spec, pot.g, psi, spec.T0, spec.dt);
  const TimeDomainResult t2 = waveop_timedomain(pot.spec, pot.g, psi, 2.0 * spec.T0, spec.dt);
  rep.cauchy = (t2.psi.values - t1.psi.values).norm() * psi.dx() / psi.norm();
  rep.norm_drift = std::max(t1.norm_drift, t2.norm_drift);
  const SpectralField wt = spectral_transform(t2.psi, grid, ang);
  SpectralField diff = w;
  diff.values -= wt.values;
  rep.rel_error = diff.norm() / phin;

  const int n_id = 6;
  for (int i = 0; i < n_id; ++i) {
    const double lam = psi.lambda_lo * std::pow(psi.lambda_hi / psi.lambda_lo, static_cast<double>(i) / (n_id - 1));
    rep.identity_defect = std::max(rep.identity_defect, nb_identity_defect(pot, pset, lam, ang));
  }
  return rep;
}

}  // namespace scat2d
