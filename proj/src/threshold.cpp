#include "scat2d/threshold.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "scat2d/sfun.hpp"

namespace scat2d {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

[[noreturn]] void relabel(const Error& e, const std::string& stage) {
  std::string detail = e.what();
  const std::string prefix = std::string(e.name()) + ": ";
  if (detail.rfind(prefix, 0) == 0) detail = detail.substr(prefix.size());
  throw Error(e.kind(), "stage " + stage + ": " + detail);
}

double weighted_norm_vec(const Eigen::VectorXd& f, const Eigen::VectorXd& w) {
  return std::sqrt(f.cwiseAbs2().dot(w));
}

// Orthonormal basis (columns, orthonormal coordinates) of the complement of p.
Eigen::MatrixXd complement_basis(const Eigen::VectorXd& p) {
  const Index n = p.size();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(p);
  Eigen::MatrixXd h = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  return h.rightCols(n - 1);
}

struct Reduced {
  Eigen::MatrixXd basis;  // orthonormal coordinates, columns span Q H
  Eigen::MatrixXd a;      // B^T (orthonormal M00) B
};

Reduced reduce_to_QH(const FactorizedPotential& pot, const Eigen::MatrixXd& m00) {
  const Eigen::VectorXd& w = pot.grid.weights();
  const Eigen::VectorXd sw = w.cwiseSqrt();
  const Eigen::MatrixXd ahat = sw.asDiagonal() * m00 * sw.cwiseInverse().asDiagonal();
  Reduced r;
  const double vn = weighted_norm_vec(pot.v, w);
  if (vn > 0.0) {
    r.basis = complement_basis(sw.cwiseProduct(pot.v) / vn);
  } else {
    r.basis = Eigen::MatrixXd::Identity(w.size(), w.size());
  }
  r.a = r.basis.transpose() * ahat * r.basis;
  r.a = 0.5 * (r.a + r.a.transpose()).eval();
  return r;
}

// Kernel of a family of normalised functionals restricted to span(basis).
// Splits the basis into kept (functionals non-degenerate) and kernel parts.
struct FunctionalSplit {
  Eigen::MatrixXd kernel, complement;
  GapReport gap;
};

FunctionalSplit functional_kernel(const Eigen::MatrixXd& funcs, const Eigen::MatrixXd& basis,
                                  const Eigen::VectorXd& w, double tol, const std::string& label) {
  FunctionalSplit out;
  const Index r = basis.cols();
  if (r == 0) {
    out.kernel = basis;
    out.complement = basis;
    out.gap.smallest_kept = std::numeric_limits<double>::infinity();
    out.gap.gap_ratio = std::numeric_limits<double>::infinity();
    out.gap.threshold = tol;
    return out;
  }
  const Eigen::MatrixXd c = funcs.transpose() * w.asDiagonal() * basis;  // k x r
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(c, Eigen::ComputeFullV);
  const Eigen::VectorXd s = svd.singularValues();
  const Eigen::MatrixXd& v = svd.matrixV();
  std::vector<Index> keep, drop;
  GapReport& gap = out.gap;
  gap.threshold = tol;
  gap.sigma_max = s.size() ? s.maxCoeff() : 0.0;
  gap.smallest_kept = std::numeric_limits<double>::infinity();
  Eigen::VectorXd all = Eigen::VectorXd::Zero(r);
  for (Index j = 0; j < r; ++j) {
    const double sj = j < s.size() ? s[j] : 0.0;
    all[j] = sj;
    if (sj >= tol) {
      keep.push_back(j);
      gap.smallest_kept = std::min(gap.smallest_kept, sj);
    } else {
      drop.push_back(j);
      gap.largest_discarded = std::max(gap.largest_discarded, sj);
    }
  }
  std::sort(all.data(), all.data() + all.size());
  gap.singular_values = all;
  gap.rank = static_cast<Index>(drop.size());
  gap.gap_ratio = keep.empty() ? std::numeric_limits<double>::infinity()
                               : gap.smallest_kept / std::max(gap.largest_discarded, tol);
  if (gap.gap_ratio < kRequiredGap) {
    std::ostringstream os;
    os << "stage " << label << ": no spectral gap >= " << kRequiredGap << " (smallest kept " << gap.smallest_kept
       << ", largest discarded " << gap.largest_discarded << ", tol " << tol << ")";
    throw Error(ErrorKind::IllConditionedSplit, os.str());
  }
  out.kernel.resize(basis.rows(), static_cast<Index>(drop.size()));
  out.complement.resize(basis.rows(), static_cast<Index>(keep.size()));
  for (std::size_t k = 0; k < drop.size(); ++k) out.kernel.col(static_cast<Index>(k)) = basis * v.col(drop[k]);
  for (std::size_t k = 0; k < keep.size(); ++k) out.complement.col(static_cast<Index>(k)) = basis * v.col(keep[k]);
  return out;
}

Eigen::VectorXd normalised(const Eigen::VectorXd& h, const Eigen::VectorXd& w) {
  const double n = weighted_norm_vec(h, w);
  return n > 0.0 ? Eigen::VectorXd(h / n) : Eigen::VectorXd::Zero(h.size());
}

}  // namespace

RealOperator assemble_M00(const FactorizedPotential& pot, SingularRule rule) {
  const ComplexOperator g = free_resolvent(pot.grid, EnergyPoint::zero(), rule);
  Eigen::MatrixXd m = pot.v.asDiagonal() * g.matrix().real() * pot.v.asDiagonal();
  m.diagonal() += pot.u;
  return {std::move(m), pot.grid.weights(), pot.grid.weights()};
}

ProjectionSet compute_projection_set(const FactorizedPotential& pot, double tol) {
  const Eigen::VectorXd& w = pot.grid.weights();
  const Index n = w.size();
  const Eigen::VectorXd isw = w.cwiseSqrt().cwiseInverse();
  ProjectionSet ps;
  ps.tol = tol;
  ps.M00 = assemble_M00(pot);

  const double vn2 = pot.v.cwiseAbs2().dot(w);
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  if (vn2 > 0.0) p = pot.v * (pot.v.cwiseProduct(w)).transpose() / vn2;
  ps.P = RealOperator(p, w, w);
  ps.Q = RealOperator(Eigen::MatrixXd::Identity(n, n) - p, w, w);

  // S1
  const Reduced red = reduce_to_QH(pot, ps.M00.matrix());
  NullspaceResult<double> ns;
  try {
    ns = nullspace_projection(RealOperator(red.a, Eigen::VectorXd::Ones(red.a.rows()), Eigen::VectorXd::Ones(red.a.rows())), tol);
  } catch (const Error& e) {
    relabel(e, "S1");
  }
  ps.stage_S1 = {"S1", ns.gap.rank, ns.gap};
  ps.basis_S1 = isw.asDiagonal() * (red.basis * ns.basis);

  // S2: f in Ran S1 with <v, M00 f> = 0
  const Eigen::VectorXd m00v = ps.M00.matrix() * pot.v;  // M00 is weighted self-adjoint
  Eigen::MatrixXd f2(n, 1);
  f2.col(0) = normalised(m00v, w);
  const FunctionalSplit s2 = functional_kernel(f2, ps.basis_S1, w, tol, "S2");
  ps.stage_S2 = {"S2", s2.gap.rank, s2.gap};
  ps.basis_T2 = s2.complement;

  // S3: additionally <v x_1, f> = <v x_2, f> = 0
  Eigen::MatrixXd f3(n, 3);
  f3.col(0) = normalised(pot.v.cwiseProduct(pot.grid.x()), w);
  f3.col(1) = normalised(pot.v.cwiseProduct(pot.grid.y()), w);
  f3.col(2) = f2.col(0);
  const FunctionalSplit s3 = functional_kernel(f3, s2.kernel, w, tol, "S3");
  ps.stage_S3 = {"S3", s3.gap.rank, s3.gap};
  ps.basis_T3 = s3.complement;
  ps.basis_S3 = s3.kernel;

  ps.S1 = projector_from_basis<double>(ps.basis_S1, w);
  ps.S2 = projector_from_basis<double>(s2.kernel, w);
  ps.S3 = projector_from_basis<double>(ps.basis_S3, w);
  ps.T2 = ps.S1 - ps.S2;
  ps.T3 = ps.S2 - ps.S3;
  return ps;
}

std::string_view stage_name(Stage s) {
  switch (s) {
    case Stage::T2: return "T2";
    case Stage::T3: return "T3";
    case Stage::S3: return "S3";
  }
  return "?";
}

Eigen::VectorXd zero_energy_solution(const FactorizedPotential& pot, const RealOperator& M00, const Eigen::VectorXd& f,
                                     const Eigen::VectorXd& px, const Eigen::VectorXd& py) {
  const Eigen::VectorXd& w = pot.grid.weights();
  const double vn2 = pot.v.cwiseAbs2().dot(w);
  const double c = vn2 > 0.0 ? (M00.matrix() * f).cwiseProduct(w).dot(pot.v) / vn2 : 0.0;
  const Eigen::VectorXd src = pot.v.cwiseProduct(f).cwiseProduct(w);
  const Eigen::VectorXd& gx = pot.grid.x();
  const Eigen::VectorXd& gy = pot.grid.y();
  Eigen::VectorXd psi(px.size());
  for (Index i = 0; i < px.size(); ++i) {
    double s = 0.0;
    for (Index j = 0; j < src.size(); ++j) {
      const double d = std::hypot(px[i] - gx[j], py[i] - gy[j]);
      s += -(std::log(0.5 * d) + sfun::kEulerGamma) / kTwoPi * src[j];
    }
    psi[i] = c - s;
  }
  return psi;
}

DecayFit zero_energy_profile(const ProjectionSet& pset, Stage stage, int index, const FactorizedPotential& pot,
                             double r_min, double r_max, int n_radii) {
  const Eigen::MatrixXd& b = stage == Stage::T2 ? pset.basis_T2 : (stage == Stage::T3 ? pset.basis_T3 : pset.basis_S3);
  if (b.cols() == 0) throw Error(ErrorKind::NoObstruction, std::string("stage ") + std::string(stage_name(stage)) + " is empty");
  if (index < 0 || index >= b.cols()) {
    std::ostringstream os;
    os << "stage " << stage_name(stage) << " has " << b.cols() << " vectors, index " << index << " requested";
    throw Error(ErrorKind::NoObstruction, os.str());
  }
  if (!(r_min > pot.grid.radius()) || !(r_max > r_min) || n_radii < 3)
    throw Error(ErrorKind::BadGridSpec, "decay fit radii must lie outside the grid and increase");
  constexpr int kRayCount = 32;
  DecayFit fit;
  fit.radii.resize(n_radii);
  fit.amplitude.resize(n_radii);
  Eigen::VectorXd px(kRayCount), py(kRayCount);
  for (int k = 0; k < n_radii; ++k) {
    const double r = r_min * std::pow(r_max / r_min, static_cast<double>(k) / (n_radii - 1));
    for (int a = 0; a < kRayCount; ++a) {
      const double th = kTwoPi * (a + 0.5) / kRayCount;
      px[a] = r * std::cos(th);
      py[a] = r * std::sin(th);
    }
    const Eigen::VectorXd psi = zero_energy_solution(pot, pset.M00, b.col(index), px, py);
    fit.radii[k] = r;
    fit.amplitude[k] = std::sqrt(psi.squaredNorm() / kRayCount);
  }
  if (!(fit.amplitude.minCoeff() > 0.0)) throw Error(ErrorKind::DecayFitUnstable, "zero amplitude on a sampling circle");
  Eigen::MatrixXd a(n_radii, 2);
  a.col(0) = fit.radii.array().log().matrix();
  a.col(1).setOnes();
  const Eigen::VectorXd y = fit.amplitude.array().log().matrix();
  const Eigen::Vector2d coef = a.colPivHouseholderQr().solve(y);
  fit.exponent = coef[0];
  fit.residual = std::sqrt((a * coef - y).squaredNorm() / n_radii);
  if (!(fit.residual <= kMaxDecayResidual)) {
    std::ostringstream os;
    os << "log-log fit residual " << fit.residual << " exceeds " << kMaxDecayResidual;
    throw Error(ErrorKind::DecayFitUnstable, os.str());
  }
  return fit;
}

ThresholdReport classify_threshold(const ProjectionSet& pset, const FactorizedPotential& pot) {
  ThresholdReport rep;
  rep.n_s = static_cast<int>(pset.rank_T2());
  rep.n_p = static_cast<int>(pset.rank_T3());
  rep.n_zero_bound = static_cast<int>(pset.rank_S3());
  rep.tol = pset.tol;
  rep.gap_S1 = pset.stage_S1.gap.gap_ratio;
  rep.gap_S2 = pset.stage_S2.gap.gap_ratio;
  rep.gap_S3 = pset.stage_S3.gap.gap_ratio;
  const double support = support_radius(pot.spec);
  const double base = std::isfinite(support) ? std::max(support, pot.grid.radius()) : pot.grid.radius();
  auto fits = [&](Stage st, Index count, std::vector<double>& out) {
    for (Index i = 0; i < count; ++i)
      out.push_back(zero_energy_profile(pset, st, static_cast<int>(i), pot, 3.0 * base, 30.0 * base).exponent);
  };
  fits(Stage::T2, pset.rank_T2(), rep.exponents_T2);
  fits(Stage::T3, pset.rank_T3(), rep.exponents_T3);
  fits(Stage::S3, pset.rank_S3(), rep.exponents_S3);
  for (double e : rep.exponents_T2) rep.decay_consistent &= std::abs(e) <= 0.1;
  for (double e : rep.exponents_T3) rep.decay_consistent &= std::abs(e + 1.0) <= 0.1;
  for (double e : rep.exponents_S3) rep.decay_consistent &= e <= -1.85;
  return rep;
}

std::string ThresholdReport::to_text() const {
  std::ostringstream os;
  os.precision(10);
  auto list = [&](const std::vector<double>& v) {
    std::ostringstream s;
    s.precision(6);
    for (std::size_t i = 0; i < v.size(); ++i) s << (i ? " " : "") << v[i];
    return s.str();
  };
  os << "n_s = " << n_s << "\n"
     << "n_p = " << n_p << "\n"
     << "n_zero_bound = " << n_zero_bound << "\n"
     << "tol = " << tol << "\n"
     << "gap_S1 = " << gap_S1 << "\n"
     << "gap_S2 = " << gap_S2 << "\n"
     << "gap_S3 = " << gap_S3 << "\n"
     << "decay_T2 = " << list(exponents_T2) << "\n"
     << "decay_T3 = " << list(exponents_T3) << "\n"
     << "decay_S3 = " << list(exponents_S3) << "\n"
     << "decay_consistent = " << (decay_consistent ? "true" : "false") << "\n";
  return os.str();
}

std::string ThresholdReport::csv_header() { return "g,n_s,n_p,n_zero_bound,gap_S1,gap_S2,gap_S3"; }

std::string ThresholdReport::csv_row(double g) const {
  std::ostringstream os;
  os.precision(12);
  os << g << "," << n_s << "," << n_p << "," << n_zero_bound << "," << gap_S1 << "," << gap_S2 << "," << gap_S3;
  return os.str();
}

int threshold_inertia(const FactorizedPotential& pot) {
  const RealOperator m00 = assemble_M00(pot);
  const Reduced red = reduce_to_QH(pot, m00.matrix());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(red.a, Eigen::EigenvaluesOnly);
  int count = 0;
  for (Index i = 0; i < es.eigenvalues().size(); ++i) count += es.eigenvalues()[i] > 0.0;
  return count;
}

double tune_critical_coupling(const PotentialSpec& spec, Target target, double g_lo, double g_hi, const TuneOptions& opt) {
  if (!(g_lo < g_hi)) throw Error(ErrorKind::NoSignChange, "bracket must satisfy g_lo < g_hi");
  const QuadGrid2D grid = build_grid_for(spec, opt.radius, opt.n_radial, opt.n_angular);
  auto count = [&](double g) { return threshold_inertia(factorize_potential(spec, g, grid)); };
  const int c_lo = count(g_lo), c_hi = count(g_hi);
  if (c_lo == c_hi) {
    std::ostringstream os;
    os << "inertia of Q M00 Q is " << c_lo << " at both ends of [" << g_lo << ", " << g_hi << "]";
    throw Error(ErrorKind::NoSignChange, os.str());
  }
  double lo = g_lo, hi = g_hi;
  while (hi - lo > opt.g_tol * std::abs(hi)) {
    const double mid = 0.5 * (lo + hi);
    if (count(mid) == c_lo)
      lo = mid;
    else
      hi = mid;
  }
  const double g_star = 0.5 * (lo + hi);
  const ProjectionSet ps = compute_projection_set(factorize_potential(spec, g_star, grid), opt.null_tol);
  const bool hit = (target == Target::SResonance && ps.rank_T2() > 0) ||
                   (target == Target::PResonance && ps.rank_T3() > 0) ||
                   (target == Target::ZeroBound && ps.rank_S3() > 0);
  if (!hit) {
    std::ostringstream os;
    os << "criticality at g = " << g_star << " has ranks (T2, T3, S3) = (" << ps.rank_T2() << ", " << ps.rank_T3()
       << ", " << ps.rank_S3() << "), not the requested obstruction";
    throw Error(ErrorKind::NoSignChange, os.str());
  }
  return g_star;
}

}  // namespace scat2d
