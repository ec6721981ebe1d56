#include "scat2d/bs.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "scat2d/parallel.hpp"
#include "scat2d/sfun.hpp"

namespace scat2d {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
using sfun::kEulerGamma;

void bad_spec(const std::string& what) { throw Error(ErrorKind::BadPotentialSpec, what); }

// Kernel on ring pairs: value(i, j, delta) with delta = target angle index minus
// source angle index, weight of the source node included.
struct KernelTable {
  int nr = 0, na = 0;
  std::vector<Complex> data;
  Complex& at(int i, int j, int d) { return data[(static_cast<std::size_t>(i) * nr + j) * na + d]; }
  const Complex& at(int i, int j, int d) const { return data[(static_cast<std::size_t>(i) * nr + j) * na + d]; }
};

KernelTable kernel_table(const QuadGrid2D& grid, EnergyPoint point, SingularRule rule) {
  const int nr = grid.n_radial(), na = grid.n_angular();
  const Eigen::VectorXd& r = grid.ring_radii();
  const double dth = kTwoPi / na;
  // node weight per ring
  Eigen::VectorXd wring(nr);
  for (int i = 0; i < nr; ++i) wring[i] = grid.weights()[static_cast<Index>(i) * na];

  const double k = point.kind == EnergyPoint::Kind::BoundaryLambda ? std::sqrt(point.value) : point.value;
  const double inv2pi = 1.0 / kTwoPi;

  // Decomposition kernel(d) = -(1/2pi) ln(d) f(d) + smooth(d).
  auto f_of = [&](double d) -> double {
    switch (point.kind) {
      case EnergyPoint::Kind::RealKappa: return sfun::i0(k * d);
      case EnergyPoint::Kind::BoundaryLambda: return sfun::j0(k * d);
      case EnergyPoint::Kind::Zero: return 1.0;
    }
    return 1.0;
  };
  auto kernel = [&](double d) -> Complex {
    switch (point.kind) {
      case EnergyPoint::Kind::RealKappa: return inv2pi * sfun::k0(k * d);
      case EnergyPoint::Kind::BoundaryLambda: {
        const double x = k * d;
        return {-0.25 * sfun::y0(x), 0.25 * sfun::j0(x)};
      }
      case EnergyPoint::Kind::Zero: return -inv2pi * (std::log(0.5 * d) + kEulerGamma);
    }
    return 0.0;
  };
  // lim_{d->0} kernel(d) + (1/2pi) ln(d) f(d)
  Complex smooth0;
  switch (point.kind) {
    case EnergyPoint::Kind::RealKappa: smooth0 = -inv2pi * (std::log(0.5 * k) + kEulerGamma); break;
    case EnergyPoint::Kind::BoundaryLambda: smooth0 = Complex(-inv2pi * (std::log(0.5 * k) + kEulerGamma), 0.25); break;
    case EnergyPoint::Kind::Zero: smooth0 = inv2pi * (std::log(2.0) - kEulerGamma); break;
  }
  // kernel averaged over the disk of radius rho
  auto disk_average = [&](double rho) -> Complex {
    switch (point.kind) {
      case EnergyPoint::Kind::RealKappa: {
        const double x = k * rho;
        return -sfun::k1_regular(x) / (kPi * x);
      }
      case EnergyPoint::Kind::BoundaryLambda: {
        const double x = k * rho;
        return {-sfun::y1_regular(x) / (2.0 * x), 0.25};
      }
      case EnergyPoint::Kind::Zero: return -inv2pi * (std::log(0.5 * rho) + kEulerGamma - 0.5);
    }
    return 0.0;
  };

  KernelTable raw{nr, na, std::vector<Complex>(static_cast<std::size_t>(nr) * nr * na)};
  parallel_for(nr, [&](int i) {
    for (int j = 0; j < nr; ++j) {
      const double wj = wring[j];
      for (int d = 0; d < na; ++d) {
        const bool diag = (i == j && d == 0);
        Complex val;
        if (rule == SingularRule::ProductIntegration) {
          const double lw = grid.log_weight(i, j, d);
          if (diag) {
            val = -inv2pi * lw + wj * smooth0;
          } else {
            const double dist = std::sqrt(std::max(0.0, r[i] * r[i] + r[j] * r[j] - 2.0 * r[i] * r[j] * std::cos(d * dth)));
            if (point.kind == EnergyPoint::Kind::Zero) {
              val = -inv2pi * lw + wj * smooth0;
            } else {
              val = wj * kernel(dist) - inv2pi * (lw - wj * std::log(dist)) * f_of(dist);
            }
          }
        } else {
          if (diag) {
            val = wj * disk_average(std::sqrt(wj / kPi));
          } else {
            const double dist = std::sqrt(std::max(0.0, r[i] * r[i] + r[j] * r[j] - 2.0 * r[i] * r[j] * std::cos(d * dth)));
            val = wj * kernel(dist);
          }
        }
        raw.at(i, j, d) = val;
      }
    }
  });
  // exact weighted symmetry: kernel(i, j, d) = kernel(j, i, -d)
  KernelTable sym = raw;
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nr; ++j)
      for (int d = 0; d < na; ++d) {
        const int md = (na - d) % na;
        sym.at(i, j, d) = 0.5 * (raw.at(i, j, d) / wring[j] + raw.at(j, i, md) / wring[i]) * wring[j];
      }
  return sym;
}

}  // namespace

void validate(const PotentialSpec& s) {
  auto finite_pos = [](double x) { return std::isfinite(x) && x > 0.0; };
  switch (s.kind) {
    case PotentialKind::Gaussian:
      if (!finite_pos(s.width)) bad_spec("gaussian width must be > 0");
      break;
    case PotentialKind::SquareWell:
      if (!finite_pos(s.radius)) bad_spec("square well radius must be > 0");
      if (s.sign != 1.0 && s.sign != -1.0) bad_spec("square well sign must be +1 or -1");
      break;
    case PotentialKind::Ring:
      if (!finite_pos(s.inner) || !finite_pos(s.outer) || !(s.outer > s.inner))
        bad_spec("ring needs 0 < inner < outer");
      if (!std::isfinite(s.height)) bad_spec("ring height must be finite");
      break;
  }
}

double profile(const PotentialSpec& s, double r) {
  switch (s.kind) {
    case PotentialKind::Gaussian: return -std::exp(-(r * r) / (s.width * s.width));
    case PotentialKind::SquareWell: return r < s.radius ? s.sign : 0.0;
    case PotentialKind::Ring:
      if (r <= s.inner) return s.height;
      return r < s.outer ? -1.0 : 0.0;
  }
  return 0.0;
}

double support_radius(const PotentialSpec& s) {
  switch (s.kind) {
    case PotentialKind::Gaussian: return std::numeric_limits<double>::infinity();
    case PotentialKind::SquareWell: return s.radius;
    case PotentialKind::Ring: return s.outer;
  }
  return 0.0;
}

std::vector<double> breakpoints(const PotentialSpec& s, double grid_radius) {
  std::vector<double> out;
  auto add = [&](double b) {
    if (b < grid_radius * (1.0 - 1e-12)) out.push_back(b);
  };
  switch (s.kind) {
    case PotentialKind::Gaussian: break;
    case PotentialKind::SquareWell: add(s.radius); break;
    case PotentialKind::Ring:
      add(s.inner);
      add(s.outer);
      break;
  }
  return out;
}

QuadGrid2D build_grid_for(const PotentialSpec& spec, double radius, int n_radial, int n_angular) {
  validate(spec);
  const std::vector<double> bp = breakpoints(spec, radius);
  return build_disk_grid(radius, n_radial, n_angular, bp);
}

FactorizedPotential factorize_potential(const PotentialSpec& spec, double g, const QuadGrid2D& grid) {
  validate(spec);
  if (!std::isfinite(g)) bad_spec("coupling must be finite");
  const double support = support_radius(spec);
  if (std::isfinite(support) && support > grid.radius() * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "potential support " << support_radius(spec) << " exceeds grid radius " << grid.radius();
    bad_spec(os.str());
  }
  FactorizedPotential p;
  p.grid = grid;
  p.spec = spec;
  p.g = g;
  const Index n = grid.size();
  p.V.resize(n);
  p.v.resize(n);
  p.u.resize(n);
  for (Index i = 0; i < n; ++i) {
    const double V = g * profile(spec, std::hypot(grid.x()[i], grid.y()[i]));
    p.V[i] = V;
    p.v[i] = std::sqrt(std::abs(V));
    p.u[i] = V >= 0.0 ? 1.0 : -1.0;
  }
  return p;
}

ComplexOperator free_resolvent(const QuadGrid2D& grid, EnergyPoint point, SingularRule rule) {
  if (point.kind == EnergyPoint::Kind::BoundaryLambda && !(point.value > 0.0)) {
    std::ostringstream os;
    os << "boundary value R0(lambda + i0) needs lambda > 0, got " << point.value;
    throw Error(ErrorKind::SingularEnergy, os.str());
  }
  if (point.kind == EnergyPoint::Kind::RealKappa && !(point.value > 0.0)) {
    std::ostringstream os;
    os << "R0(-kappa^2) needs kappa > 0, got " << point.value;
    throw Error(ErrorKind::NonPositiveEnergy, os.str());
  }
  const KernelTable t = kernel_table(grid, point, rule);
  const int nr = grid.n_radial(), na = grid.n_angular();
  const Index n = grid.size();
  Eigen::MatrixXcd g(n, n);
  for (int i = 0; i < nr; ++i)
    for (int a = 0; a < na; ++a)
      for (int j = 0; j < nr; ++j)
        for (int b = 0; b < na; ++b) {
          const int d = ((a - b) % na + na) % na;
          g(static_cast<Index>(i) * na + a, static_cast<Index>(j) * na + b) = t.at(i, j, d);
        }
  return {std::move(g), grid.weights(), grid.weights()};
}

ComplexOperator assemble_M(const FactorizedPotential& pot, EnergyPoint point, SingularRule rule) {
  ComplexOperator g = free_resolvent(pot.grid, point, rule);
  Eigen::MatrixXcd m = pot.v.cast<Complex>().asDiagonal() * g.matrix() * pot.v.cast<Complex>().asDiagonal();
  m.diagonal() += pot.u.cast<Complex>();
  return {std::move(m), pot.grid.weights(), pot.grid.weights()};
}

double condition_estimate(const Eigen::MatrixXcd& m) {
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
  const double rc = lu.rcond();
  return rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
}

double spectral_norm(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  const double scale = m.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  const Eigen::MatrixXcd a = m / scale;
  const Eigen::MatrixXcd gram = a.rows() <= a.cols() ? Eigen::MatrixXcd(a * a.adjoint()) : Eigen::MatrixXcd(a.adjoint() * a);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram, Eigen::EigenvaluesOnly);
  return scale * std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

SMatrixSample smatrix(const FactorizedPotential& pot, double lambda, const AngularGrid& ang, SingularRule rule) {
  if (!(lambda > 0.0)) {
    std::ostringstream os;
    os << "S(lambda) needs lambda > 0, got " << lambda;
    throw Error(ErrorKind::NonPositiveEnergy, os.str());
  }
  const ComplexOperator M = assemble_M(pot, EnergyPoint::boundary_lambda(lambda), rule);
  const ComplexOperator F = assemble_F0(lambda, pot.grid, ang);
  const ComplexOperator Fs = weighted_adjoint(F);

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(M.matrix());
  const double rc = lu.rcond();
  SMatrixSample out;
  out.lambda = lambda;
  out.cond_M = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
  if (!(out.cond_M < kNearSingularCond)) {
    std::ostringstream os;
    os << "M(lambda + i0) near singular at lambda = " << lambda << ", condition " << out.cond_M;
    throw Error(ErrorKind::NearSingularM, os.str());
  }
  const Eigen::VectorXcd vc = pot.v.cast<Complex>();
  const Eigen::MatrixXcd rhs = vc.asDiagonal() * Fs.matrix();
  const Eigen::MatrixXcd x = lu.solve(rhs);
  const int m = ang.size();
  out.S = Eigen::MatrixXcd::Identity(m, m) - Complex(0.0, kTwoPi) * (F.matrix() * (vc.asDiagonal() * x));
  out.unitarity_defect = spectral_norm(out.S.adjoint() * out.S - Eigen::MatrixXcd::Identity(m, m));
  out.s_minus_1_norm = spectral_norm(out.S - Eigen::MatrixXcd::Identity(m, m));
  return out;
}

std::vector<SweepEntry> sweep_smatrix(const FactorizedPotential& pot, const std::vector<double>& lambdas,
                                      const AngularGrid& ang, SingularRule rule) {
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0)) throw Error(ErrorKind::NonPositiveEnergy, "sweep energies must be positive");
    if (i > 0 && !(lambdas[i] > lambdas[i - 1])) throw Error(ErrorKind::BadGridSpec, "sweep energies must ascend");
  }
  std::vector<SweepEntry> out(lambdas.size());
  parallel_for(static_cast<int>(lambdas.size()), [&](int i) {
    out[i].lambda = lambdas[i];
    try {
      out[i].sample = smatrix(pot, lambdas[i], ang, rule);
    } catch (const Error& e) {
      out[i].error = e.what();
      out[i].error_kind = e.kind();
    }
  });
  return out;
}

std::vector<double> log_spaced(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) throw Error(ErrorKind::BadGridSpec, "log grid needs 0 < lo < hi and n >= 2");
  std::vector<double> out(n);
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < n; ++i) out[i] = std::exp(a + (b - a) * i / (n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

ComplexOperator assemble_I1(const FactorizedPotential& pot, double lambda, const RealOperator& S1) {
  ComplexOperator M = assemble_M(pot, EnergyPoint::boundary_lambda(lambda));
  if (S1.rows() != M.rows() || S1.cols() != M.cols()) throw Error(ErrorKind::GridMismatch, "S1 does not live on the potential grid");
  const Eigen::MatrixXcd a = M.matrix() + S1.matrix().cast<Complex>();
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
  const double rc = lu.rcond();
  if (!(rc > 1.0 / kNearSingularCond)) {
    std::ostringstream os;
    os << "M + S1 near singular at lambda = " << lambda << ", condition " << (rc > 0 ? 1.0 / rc : INFINITY);
    throw Error(ErrorKind::NearSingularM, os.str());
  }
  return {lu.inverse(), M.row_weights(), M.col_weights()};
}

}  // namespace scat2d
