#include "scat2d/opcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace scat2d {
namespace {

constexpr double kPi = std::numbers::pi;

// Barycentric Lagrange basis on `nodes` evaluated at `x`.
void lagrange_row(const Eigen::VectorXd& nodes, const Eigen::VectorXd& bary, double x, Eigen::Ref<Eigen::RowVectorXd> out) {
  const Index n = nodes.size();
  for (Index j = 0; j < n; ++j) {
    if (x == nodes[j]) {
      out.setZero();
      out[j] = 1.0;
      return;
    }
  }
  double denom = 0.0;
  for (Index j = 0; j < n; ++j) {
    out[j] = bary[j] / (x - nodes[j]);
    denom += out[j];
  }
  out /= denom;
}

Eigen::VectorXd barycentric_weights(const Eigen::VectorXd& nodes) {
  const Index n = nodes.size();
  Eigen::VectorXd b = Eigen::VectorXd::Ones(n);
  for (Index j = 0; j < n; ++j)
    for (Index k = 0; k < n; ++k)
      if (k != j) b[j] /= (nodes[j] - nodes[k]);
  return b;
}

}  // namespace

void gauss_legendre(int n, double a, double b, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = z;
        p0 = 1.0;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // ascending order in [a, b]
    const int idx = n - 1 - i;
    nodes[idx] = 0.5 * (b - a) * z + 0.5 * (b + a);
    weights[idx] = (b - a) / ((1.0 - z * z) * dp * dp);
  }
}

QuadGrid2D build_disk_grid(double radius, int n_radial, int n_angular, std::span<const double> breakpoints) {
  if (!(radius > 0.0) || n_radial < 4 || n_angular < 8) {
    std::ostringstream os;
    os << "radius=" << radius << " n_radial=" << n_radial << " n_angular=" << n_angular;
    throw Error(ErrorKind::BadGridSpec, os.str());
  }
  std::vector<double> edges{0.0};
  for (double b : breakpoints) {
    if (!(b > edges.back()) || !(b < radius)) throw Error(ErrorKind::BadGridSpec, "breakpoints must increase inside (0, radius)");
    edges.push_back(b);
  }
  edges.push_back(radius);
  const int n_panels = static_cast<int>(edges.size()) - 1;
  if (n_radial < 4 * n_panels) throw Error(ErrorKind::BadGridSpec, "need at least 4 radial nodes per panel");

  // distribute radial nodes proportionally to panel length
  std::vector<int> per_panel(n_panels, 4);
  int assigned = 4 * n_panels;
  while (assigned < n_radial) {
    int best = 0;
    double best_len = -1.0;
    for (int p = 0; p < n_panels; ++p) {
      const double len = (edges[p + 1] - edges[p]) / per_panel[p];
      if (len > best_len) {
        best_len = len;
        best = p;
      }
    }
    ++per_panel[best];
    ++assigned;
  }

  QuadGrid2D g;
  g.radius_ = radius;
  g.n_angular_ = n_angular;
  g.panel_edges_ = edges;
  Eigen::VectorXd r(n_radial), wr(n_radial);
  std::vector<int> panel_of(n_radial);
  std::vector<int> panel_start(n_panels + 1, 0);
  {
    int k = 0;
    for (int p = 0; p < n_panels; ++p) {
      Eigen::VectorXd nodes, weights;
      gauss_legendre(per_panel[p], edges[p], edges[p + 1], nodes, weights);
      panel_start[p] = k;
      for (int q = 0; q < per_panel[p]; ++q, ++k) {
        r[k] = nodes[q];
        wr[k] = weights[q];
        panel_of[k] = p;
      }
    }
    panel_start[n_panels] = k;
  }
  g.ring_radii_ = r;

  const Index n = static_cast<Index>(n_radial) * n_angular;
  g.x_.resize(n);
  g.y_.resize(n);
  g.weights_.resize(n);
  const double dth = 2.0 * kPi / n_angular;
  for (int i = 0; i < n_radial; ++i) {
    for (int a = 0; a < n_angular; ++a) {
      const Index idx = static_cast<Index>(i) * n_angular + a;
      g.x_[idx] = r[i] * std::cos(a * dth);
      g.y_[idx] = r[i] * std::sin(a * dth);
      g.weights_[idx] = wr[i] * r[i] * dth;
    }
  }

  // Product-integration weights for ln|x - y|. For target ring r_i and a source
  // function interpolated trigonometrically in angle and polynomially (per
  // panel) in radius, the angular integral of ln|x-y| e^{in theta'} is
  // e^{in theta} L_n(r_i, r') with L_0 = 2 pi ln max(r_i, r') and
  // L_n = -(pi/|n|) (min/max)^{|n|}. The radial integral is split at r_i.
  const int n_modes = n_angular / 2;
  const int n_quad = *std::max_element(per_panel.begin(), per_panel.end()) + 20;
  Eigen::VectorXd qg, qw;
  gauss_legendre(n_quad, 0.0, 1.0, qg, qw);
  // radial_moment[(i * (n_modes+1) + mode) * n_radial + j]
  std::vector<double> radial(static_cast<std::size_t>(n_radial) * (n_modes + 1) * n_radial, 0.0);
  std::vector<Eigen::VectorXd> panel_nodes(n_panels), panel_bary(n_panels);
  for (int p = 0; p < n_panels; ++p) {
    panel_nodes[p] = r.segment(panel_start[p], per_panel[p]);
    panel_bary[p] = barycentric_weights(panel_nodes[p]);
  }
  Eigen::RowVectorXd basis;
  for (int i = 0; i < n_radial; ++i) {
    const double ri = r[i];
    for (int p = 0; p < n_panels; ++p) {
      std::vector<std::pair<double, double>> pieces;
      if (ri > edges[p] && ri < edges[p + 1]) {
        pieces = {{edges[p], ri}, {ri, edges[p + 1]}};
      } else {
        pieces = {{edges[p], edges[p + 1]}};
      }
      basis.resize(per_panel[p]);
      for (auto [lo, hi] : pieces) {
        for (int q = 0; q < n_quad; ++q) {
          const double rp = lo + (hi - lo) * qg[q];
          const double wq = (hi - lo) * qw[q] * rp;
          lagrange_row(panel_nodes[p], panel_bary[p], rp, basis);
          const double rmin = std::min(ri, rp), rmax = std::max(ri, rp);
          const double ratio = rmin / rmax;
          double pw = 1.0;
          for (int mode = 0; mode <= n_modes; ++mode) {
            double ker;
            if (mode == 0) {
              ker = 2.0 * kPi * std::log(rmax);
            } else {
              pw *= ratio;
              ker = -(kPi / mode) * pw;
            }
            double* dst = &radial[(static_cast<std::size_t>(i) * (n_modes + 1) + mode) * n_radial + panel_start[p]];
            const double c = wq * ker;
            for (int jj = 0; jj < per_panel[p]; ++jj) dst[jj] += c * basis[jj];
          }
        }
      }
    }
  }
  g.log_weights_.assign(static_cast<std::size_t>(n_radial) * n_radial * n_angular, 0.0);
  std::vector<double> cosines(static_cast<std::size_t>(n_modes + 1) * n_angular);
  for (int mode = 0; mode <= n_modes; ++mode)
    for (int d = 0; d < n_angular; ++d) {
      double mult = (mode == 0 || (2 * mode == n_angular)) ? 1.0 : 2.0;
      cosines[static_cast<std::size_t>(mode) * n_angular + d] = mult * std::cos(mode * d * dth) / n_angular;
    }
  for (int i = 0; i < n_radial; ++i)
    for (int j = 0; j < n_radial; ++j)
      for (int d = 0; d < n_angular; ++d) {
        double s = 0.0;
        for (int mode = 0; mode <= n_modes; ++mode)
          s += cosines[static_cast<std::size_t>(mode) * n_angular + d] *
               radial[(static_cast<std::size_t>(i) * (n_modes + 1) + mode) * n_radial + j];
        g.log_weights_[(static_cast<std::size_t>(i) * n_radial + j) * n_angular + d] = s;
      }
  return g;
}

AngularGrid::AngularGrid(int m) : m_(m), weight_(0.0) {
  if (m < 4 || m % 2 != 0) {
    std::ostringstream os;
    os << "angular grid needs even m >= 4, got " << m;
    throw Error(ErrorKind::BadGridSpec, os.str());
  }
  weight_ = 2.0 * kPi / m;
  angles_.resize(m);
  for (int k = 0; k < m; ++k) angles_[k] = 2.0 * kPi * k / m;
}

template <typename Scalar>
NullspaceResult<Scalar> nullspace_projection(const WeightedOperator<Scalar>& op, double tol) {
  using Matrix = typename WeightedOperator<Scalar>::Matrix;
  if (op.rows() != op.cols()) throw Error(ErrorKind::GridMismatch, "nullspace_projection needs a square operator");
  if (!(tol > 0.0)) throw Error(ErrorKind::IllConditionedSplit, "tol must be positive");
  const Eigen::VectorXd& w = op.row_weights();
  detail::check_weights(w, op.col_weights());

  const Matrix a = orthonormal_matrix(op);
  const double scale = std::max(a.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  const double asym = (a - a.adjoint()).cwiseAbs().maxCoeff() / scale;
  if (asym > 1e-8) {
    std::ostringstream os;
    os << "operator is not weighted self-adjoint (relative defect " << asym << ")";
    throw Error(ErrorKind::IllConditionedSplit, os.str());
  }
  const Matrix h = 0.5 * (a + a.adjoint());
  // For a self-adjoint operator the singular values are |eigenvalues| and the
  // eigenvectors are singular vectors, so the Hermitian eigensolver suffices.
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const Eigen::VectorXd ev = es.eigenvalues();
  const Eigen::VectorXd sv = ev.cwiseAbs();

  NullspaceResult<Scalar> res;
  GapReport& gap = res.gap;
  gap.sigma_max = sv.size() ? sv.maxCoeff() : 0.0;
  gap.threshold = tol * gap.sigma_max;
  gap.smallest_kept = std::numeric_limits<double>::infinity();
  std::vector<Index> kernel;
  for (Index k = 0; k < sv.size(); ++k) {
    if (gap.sigma_max == 0.0 || sv[k] < gap.threshold) {
      kernel.push_back(k);
      gap.largest_discarded = std::max(gap.largest_discarded, sv[k]);
    } else {
      gap.smallest_kept = std::min(gap.smallest_kept, sv[k]);
    }
  }
  Eigen::VectorXd sorted = sv;
  std::sort(sorted.data(), sorted.data() + sorted.size());
  gap.singular_values = sorted;
  gap.rank = static_cast<Index>(kernel.size());
  const double lower = std::max(gap.largest_discarded, gap.threshold);
  gap.gap_ratio = std::isinf(gap.smallest_kept) ? std::numeric_limits<double>::infinity()
                                                : (lower > 0.0 ? gap.smallest_kept / lower
                                                               : std::numeric_limits<double>::infinity());
  if (gap.gap_ratio < kRequiredGap && gap.sigma_max > 0.0) {
    std::ostringstream os;
    os << "no spectral gap >= " << kRequiredGap << " across threshold " << gap.threshold
       << " (smallest kept " << gap.smallest_kept << ", largest discarded " << gap.largest_discarded << ")";
    throw Error(ErrorKind::IllConditionedSplit, os.str());
  }

  // orthonormal eigenvectors -> weighted-orthonormal basis
  Matrix basis(a.rows(), static_cast<Index>(kernel.size()));
  const Eigen::VectorXd inv_sqrt_w = w.cwiseSqrt().cwiseInverse();
  for (std::size_t c = 0; c < kernel.size(); ++c)
    basis.col(static_cast<Index>(c)) = inv_sqrt_w.template cast<Scalar>().asDiagonal() * es.eigenvectors().col(kernel[c]);
  res.projector = projector_from_basis<Scalar>(basis, w);
  res.basis = std::move(basis);
  return res;
}

template NullspaceResult<double> nullspace_projection(const WeightedOperator<double>&, double);
template NullspaceResult<Complex> nullspace_projection(const WeightedOperator<Complex>&, double);

ComplexOperator assemble_F0(double lambda, const QuadGrid2D& grid, const AngularGrid& ang) {
  if (!(lambda > 0.0)) {
    std::ostringstream os;
    os << "F0(lambda) needs lambda > 0, got " << lambda;
    throw Error(ErrorKind::NonPositiveEnergy, os.str());
  }
  const double k = std::sqrt(lambda);
  const double c = 1.0 / (std::sqrt(2.0) * 2.0 * kPi);
  const int m = ang.size();
  const Index n = grid.size();
  ComplexOperator::Matrix f(m, n);
  for (int j = 0; j < m; ++j) {
    const double ox = std::cos(ang.angle(j)), oy = std::sin(ang.angle(j));
    for (Index i = 0; i < n; ++i) {
      const double phase = -k * (ox * grid.x()[i] + oy * grid.y()[i]);
      f(j, i) = c * grid.weights()[i] * Complex(std::cos(phase), std::sin(phase));
    }
  }
  return {std::move(f), ang.weights(), grid.weights()};
}

ComplexOperator assemble_gamma(int j, const QuadGrid2D& grid, const AngularGrid& ang) {
  if (j < 0 || j > 2) {
    std::ostringstream os;
    os << "gamma_j defined for j in {0,1,2}, got " << j;
    throw Error(ErrorKind::BadOrder, os.str());
  }
  const Complex minus_i_pow = j == 0 ? Complex(1, 0) : (j == 1 ? Complex(0, -1) : Complex(-1, 0));
  const double fact = j == 2 ? 2.0 : 1.0;
  const Complex pref = minus_i_pow / (std::pow(2.0, 1.5) * kPi * fact);
  const int m = ang.size();
  const Index n = grid.size();
  ComplexOperator::Matrix g(m, n);
  for (int a = 0; a < m; ++a) {
    const double ox = std::cos(ang.angle(a)), oy = std::sin(ang.angle(a));
    for (Index i = 0; i < n; ++i) {
      const double dot = ox * grid.x()[i] + oy * grid.y()[i];
      g(a, i) = pref * std::pow(dot, j) * grid.weights()[i];
    }
  }
  return {std::move(g), ang.weights(), grid.weights()};
}

}  // namespace scat2d
