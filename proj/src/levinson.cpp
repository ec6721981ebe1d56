#include "scat2d/levinson.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "scat2d/threshold.hpp"

namespace scat2d {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr Complex kI(0.0, 1.0);

// int_0^theta (1 - e^{i phi})^n dphi
Complex phase_antiderivative(int n, double th) {
  const Complex e1 = std::exp(kI * th);
  switch (n) {
    case 0: return th;
    case 1: return th + kI * (e1 - 1.0);
    default: return th + 2.0 * kI * (e1 - 1.0) - 0.5 * kI * (e1 * e1 - 1.0);
  }
}

// Derivative weights at t of the quadratic through x0, x1, x2.
std::array<double, 3> d1_weights(double t, double x0, double x1, double x2) {
  return {((t - x1) + (t - x2)) / ((x0 - x1) * (x0 - x2)), ((t - x0) + (t - x2)) / ((x1 - x0) * (x1 - x2)),
          ((t - x0) + (t - x1)) / ((x2 - x0) * (x2 - x1))};
}

Eigen::VectorXd principal_phases(const Eigen::MatrixXcd& s) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(s, false);
  return es.eigenvalues().unaryExpr([](const Complex& z) { return std::arg(z); }).real();
}

}  // namespace

WindingResult winding_number(const std::vector<SweepEntry>& sweep, int n) {
  if (n < 0 || n > 2) {
    std::ostringstream os;
    os << "regularisation order n must be 0, 1 or 2, got " << n;
    throw Error(ErrorKind::BadOrder, os.str());
  }
  for (const SweepEntry& e : sweep) {
    if (!e.sample) {
      std::string detail = e.error;
      const std::string prefix = std::string(error_name(e.error_kind)) + ": ";
      if (detail.rfind(prefix, 0) == 0) detail = detail.substr(prefix.size());
      throw Error(e.error_kind, detail);
    }
  }
  const int np = static_cast<int>(sweep.size());
  if (np < 3) throw Error(ErrorKind::BadGridSpec, "winding number needs at least 3 sweep energies");
  const int m = static_cast<int>(sweep.front().sample->S.rows());

  WindingResult out;
  out.n_regularization = n;
  out.lambdas.resize(np);
  out.integrand.resize(np);
  out.eigenphase_branches.resize(np, m);
  std::vector<double> s(np);
  for (int i = 0; i < np; ++i) {
    out.lambdas[i] = sweep[i].lambda;
    s[i] = std::log(sweep[i].lambda);
  }

  // eigenphase tracking by nearest match on the unit circle
  Eigen::VectorXd prev = principal_phases(sweep[0].sample->S);
  out.eigenphase_branches.row(0) = prev.transpose();
  for (int i = 1; i < np; ++i) {
    const Eigen::VectorXd cur = principal_phases(sweep[i].sample->S);
    std::vector<bool> used(m, false);
    Eigen::VectorXd next(m);
    double worst = 0.0;
    for (int b = 0; b < m; ++b) {
      int best = -1;
      double best_d = 1e300;
      for (int c = 0; c < m; ++c) {
        if (used[c]) continue;
        const double d = std::abs(std::remainder(cur[c] - prev[b], 2.0 * kPi));
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      used[best] = true;
      next[b] = prev[b] + std::remainder(cur[best] - prev[b], 2.0 * kPi);
      worst = std::max(worst, best_d);
    }
    if (worst >= kMaxPhaseStep) {
      std::ostringstream os;
      os << "eigenphase moved by " << worst << " between lambda = " << sweep[i - 1].lambda << " and " << sweep[i].lambda;
      throw Error(ErrorKind::PhaseAliasing, os.str());
    }
    out.eigenphase_branches.row(i) = next.transpose();
    prev = next;
  }

  // integrand tr(i (1-S)^n S* dS/ds) on the log grid (or a subsampled copy)
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(m, m);
  auto trapezoid = [&](const std::vector<int>& idx, std::vector<double>* density) {
    const int k = static_cast<int>(idx.size());
    std::vector<double> f(k);
    for (int q = 0; q < k; ++q) {
      const int c = q == 0 ? 1 : (q == k - 1 ? k - 2 : q);
      const auto w = d1_weights(s[idx[q]], s[idx[c - 1]], s[idx[c]], s[idx[c + 1]]);
      const Eigen::MatrixXcd ds =
          w[0] * sweep[idx[c - 1]].sample->S + w[1] * sweep[idx[c]].sample->S + w[2] * sweep[idx[c + 1]].sample->S;
      const Eigen::MatrixXcd& S = sweep[idx[q]].sample->S;
      Eigen::MatrixXcd a = id;
      for (int r = 0; r < n; ++r) a = a * (id - S);
      f[q] = (kI * a * S.adjoint() * ds).trace().real();
      if (density) (*density)[idx[q]] = f[q] / (2.0 * kPi * sweep[idx[q]].lambda);
    }
    double sum = 0.0;
    for (int q = 0; q + 1 < k; ++q) sum += 0.5 * (f[q] + f[q + 1]) * (s[idx[q + 1]] - s[idx[q]]);
    return sum / (2.0 * kPi);
  };
  std::vector<int> all(np), half;
  for (int i = 0; i < np; ++i) all[i] = i;
  for (int i = 0; i < np; i += 2) half.push_back(i);
  if (half.back() != np - 1) half.push_back(np - 1);
  const double fine = trapezoid(all, &out.integrand);
  if (half.size() >= 3 && np % 2 == 1) {
    // step halving on a grid with an odd point count: second-order error cancels
    const double coarse = trapezoid(half, nullptr);
    out.integral = fine + (fine - coarse) / 3.0;
    out.step_error = std::abs(fine - coarse) / 3.0;
  } else if (half.size() >= 3) {
    const double coarse = trapezoid(half, nullptr);
    out.integral = fine;
    out.step_error = std::abs(fine - coarse);
  } else {
    out.integral = fine;
  }

  // Closed-form tails: eigenphases relax to 0 at both ends of the spectrum.
  Complex lo = 0.0, hi = 0.0;
  const Eigen::VectorXd ph_lo = principal_phases(sweep.front().sample->S);
  const Eigen::VectorXd ph_hi = principal_phases(sweep.back().sample->S);
  for (int b = 0; b < m; ++b) {
    lo -= phase_antiderivative(n, ph_lo[b]);
    hi += phase_antiderivative(n, ph_hi[b]);
  }
  out.tail_low = lo.real() / (2.0 * kPi);
  out.tail_high = hi.real() / (2.0 * kPi);
  out.tail_estimate = out.tail_low + out.tail_high;
  out.winding = -(out.integral + out.tail_estimate);
  return out;
}

int count_bound_states(const FactorizedPotential& pot, double box_radius, int n_grid) {
  const double support = support_radius(pot.spec);
  const double r_pot = std::isfinite(support) ? support : pot.spec.width;
  if (!(box_radius >= 3.0 * r_pot) || n_grid < 8) {
    std::ostringstream os;
    os << "bound-state box radius " << box_radius << " must be >= 3 x potential radius " << r_pot
       << " with at least 8 points per side";
    throw Error(ErrorKind::BadGridSpec, os.str());
  }
  auto count = [&](int n) {
    const double h = 2.0 * box_radius / (n + 1);
    const double ih2 = 1.0 / (h * h);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(5) * n * n);
    auto id = [n](int i, int j) { return i * n + j; };
    for (int i = 0; i < n; ++i) {
      const double x = -box_radius + (i + 1) * h;
      for (int j = 0; j < n; ++j) {
        const double y = -box_radius + (j + 1) * h;
        const double V = pot.g * profile(pot.spec, std::hypot(x, y));
        trip.emplace_back(id(i, j), id(i, j), 4.0 * ih2 + V);
        if (i > 0) trip.emplace_back(id(i, j), id(i - 1, j), -ih2);
        if (i + 1 < n) trip.emplace_back(id(i, j), id(i + 1, j), -ih2);
        if (j > 0) trip.emplace_back(id(i, j), id(i, j - 1), -ih2);
        if (j + 1 < n) trip.emplace_back(id(i, j), id(i, j + 1), -ih2);
      }
    }
    Eigen::SparseMatrix<double> a(n * n, n * n);
    a.setFromTriplets(trip.begin(), trip.end());
    // Sylvester: inertia of A equals that of D in P A P^T = L D L^T.
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(a);
    if (ldlt.info() != Eigen::Success) throw Error(ErrorKind::UnconvergedCount, "LDL^T factorisation failed");
    return static_cast<int>((ldlt.vectorD().array() < 0.0).count());
  };
  const int c1 = count(n_grid), c2 = count(2 * n_grid);
  if (c1 != c2) {
    std::ostringstream os;
    os << "bound-state counts disagree: " << c1 << " at n = " << n_grid << ", " << c2 << " at n = " << 2 * n_grid;
    throw Error(ErrorKind::UnconvergedCount, os.str());
  }
  return c2;
}

LevinsonReport levinson_check(const FactorizedPotential& pot, const SweepSpec& spec) {
  const ProjectionSet ps = compute_projection_set(pot);
  if (ps.rank_T3() > 0) {
    std::ostringstream os;
    os << "T3 has rank " << ps.rank_T3() << "; the Levinson identity is stated without p-resonances";
    throw Error(ErrorKind::PResonancePresent, os.str());
  }
  const AngularGrid ang(spec.m_angles);
  const std::vector<SweepEntry> sweep = sweep_smatrix(pot, log_spaced(spec.lambda_min, spec.lambda_max, spec.points), ang);
  LevinsonReport rep;
  for (int n = 0; n < 3; ++n) {
    rep.detail[n] = winding_number(sweep, n);
    rep.winding[n] = rep.detail[n].winding;
    rep.tails[n] = rep.detail[n].tail_estimate;
  }
  double box = spec.box_radius;
  if (!(box > 0.0)) {
    const double support = support_radius(pot.spec);
    box = 4.0 * (std::isfinite(support) ? support : 1.5 * pot.spec.width);
  }
  rep.n_bound = count_bound_states(pot, box, spec.n_fd);
  rep.discrepancy = std::abs(rep.winding[0] + rep.n_bound);
  rep.n_spread = std::max(std::abs(rep.winding[1] - rep.winding[0]), std::abs(rep.winding[2] - rep.winding[0]));
  return rep;
}

}  // namespace scat2d
