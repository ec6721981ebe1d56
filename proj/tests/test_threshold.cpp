#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "scat2d/threshold.hpp"

using namespace scat2d;

namespace {
const PotentialSpec kWell = PotentialSpec::square_well(1.0);

FactorizedPotential well_at(double g, int k = 1) {
  return factorize_potential(kWell, g, build_grid_for(kWell, 1.0, 8 * k, 16 * k));
}

struct Fixture {
  double g;
  FactorizedPotential pot;
  ProjectionSet pset;
};

const Fixture& p_fixture() {
  static const Fixture f = [] {
    const double g = tune_critical_coupling(kWell, Target::PResonance, 3.0, 9.0);
    auto pot = well_at(g);
    auto ps = compute_projection_set(pot);
    return Fixture{g, std::move(pot), std::move(ps)};
  }();
  return f;
}

const Fixture& s_fixture() {
  static const Fixture f = [] {
    const double g = tune_critical_coupling(kWell, Target::SResonance, 10.0, 20.0);
    auto pot = well_at(g);
    auto ps = compute_projection_set(pot);
    return Fixture{g, std::move(pot), std::move(ps)};
  }();
  return f;
}

template <typename Op>
ComplexOperator times_v(const ComplexOperator& left, const FactorizedPotential& pot, const Op& right) {
  return left * multiplication_operator<Complex>(pot.v, pot.grid.weights()) * right.template cast<Complex>();
}
}  // namespace

TEST_CASE("oracle couplings agree with the Bessel zeros") {
  const double j01 = oracle::bessel_j_zero(0, 1), j11 = oracle::bessel_j_zero(1, 1);
  auto family = [](double g) { return oracle::Profile([g](double r) { return r < 1.0 ? -g : 0.0; }); };
  CHECK(oracle::channel_critical_coupling(family, 1, 1.0, {1.0}, 3.0, 9.0) == doctest::Approx(j01 * j01).epsilon(1e-8));
  CHECK(oracle::channel_critical_coupling(family, 0, 1.0, {1.0}, 10.0, 20.0) ==
        doctest::Approx(j11 * j11).epsilon(1e-8));
  CHECK(oracle::channel_critical_coupling(family, 2, 1.0, {1.0}, 10.0, 20.0) ==
        doctest::Approx(j11 * j11).epsilon(1e-8));
}

TEST_CASE("M00 basics") {
  const auto zero = well_at(0.0);
  CHECK((assemble_M00(zero).matrix() - Eigen::MatrixXd::Identity(zero.grid.size(), zero.grid.size())).norm() == 0.0);
  const auto pot = well_at(3.0);
  const RealOperator M00 = assemble_M00(pot);
  CHECK(self_adjoint_defect(M00) <= 1e-10);
}

TEST_CASE("M(kappa) + (ln kappa / 2pi)|v><v| approaches M00 like kappa^2 ln kappa") {
  const auto pot = well_at(3.0);
  const RealOperator M00 = assemble_M00(pot);
  const Eigen::MatrixXd vv = pot.v * pot.v.transpose() * pot.grid.weights().asDiagonal();
  auto defect = [&](double kappa) {
    const Eigen::MatrixXd m = assemble_M(pot, EnergyPoint::real_kappa(kappa)).matrix().real();
    return weighted_norm(RealOperator(m + std::log(kappa) / (2.0 * std::numbers::pi) * vv - M00.matrix(),
                                      pot.grid.weights(), pot.grid.weights()));
  };
  const double d2 = defect(1e-2), d4 = defect(1e-4);
  const double trend = (1e-8 * std::abs(std::log(1e-4))) / (1e-4 * std::abs(std::log(1e-2)));
  CHECK(d4 <= 10.0 * d2 * trend);
  CHECK(d4 < d2);
}

TEST_CASE("generic gaussian well has no obstruction") {
  const auto spec = PotentialSpec::gaussian(1.0);
  for (int nr : {8, 16}) {
    const auto pot = factorize_potential(spec, 0.5, build_grid_for(spec, 4.5, nr, 2 * nr));
    const ProjectionSet ps = compute_projection_set(pot);
    CHECK(ps.rank_S1() == 0);
    CHECK(ps.rank_S2() == 0);
    CHECK(ps.rank_S3() == 0);
    const ThresholdReport rep = classify_threshold(ps, pot);
    CHECK(rep.n_s == 0);
    CHECK(rep.n_p == 0);
    CHECK(rep.n_zero_bound == 0);
    CHECK_THROWS_AS(zero_energy_profile(ps, Stage::T2, 0, pot, 3.0, 30.0), Error);
  }
}

TEST_CASE("tuned couplings match the oracle") {
  const double j01 = oracle::bessel_j_zero(0, 1), j11 = oracle::bessel_j_zero(1, 1);
  CHECK(std::abs(p_fixture().g - j01 * j01) <= 1e-2);
  CHECK(std::abs(s_fixture().g - j11 * j11) <= 1e-2);
  // the product-integration rule does much better than the stated tolerance
  CHECK(std::abs(p_fixture().g - j01 * j01) <= 1e-6);
  CHECK(std::abs(s_fixture().g - j11 * j11) <= 1e-6);
  try {
    tune_critical_coupling(kWell, Target::SResonance, 0.1, 0.2);
    FAIL("expected NoSignChange");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoSignChange);
  }
  CHECK_THROWS_AS(tune_critical_coupling(kWell, Target::SResonance, 3.0, 9.0), Error);
}

TEST_CASE("p-resonance fixture") {
  const auto& f = p_fixture();
  CHECK(f.pset.rank_T3() == 2);
  CHECK(f.pset.rank_T2() == 0);
  CHECK(f.pset.rank_S3() == 0);
  const ThresholdReport rep = classify_threshold(f.pset, f.pot);
  CHECK(rep.n_p == 2);
  CHECK(rep.to_text().find("n_p = 2\n") != std::string::npos);
  REQUIRE(rep.exponents_T3.size() == 2);
  for (double e : rep.exponents_T3) CHECK(std::abs(e + 1.0) <= 0.1);
  const DecayFit fit = zero_energy_profile(f.pset, Stage::T3, 1, f.pot, 3.0, 30.0);
  CHECK(std::abs(fit.exponent + 1.0) <= 0.1);
  CHECK(fit.residual <= kMaxDecayResidual);
}

TEST_CASE("s-resonance and zero-energy bound states share a coupling") {
  const auto& f = s_fixture();
  const ThresholdReport rep = classify_threshold(f.pset, f.pot);
  CHECK(rep.n_s == 1);
  CHECK(rep.n_zero_bound == 2);
  CHECK(rep.n_p == 0);
  for (double e : rep.exponents_T2) CHECK(std::abs(e) <= 0.1);
  for (double e : rep.exponents_S3) CHECK(std::abs(e + 2.0) <= 0.15);
  CHECK(zero_energy_profile(f.pset, Stage::S3, 0, f.pot, 3.0, 30.0).exponent <= -1.85);
  CHECK(rep.decay_consistent);
  CHECK(ThresholdReport::csv_header() == "g,n_s,n_p,n_zero_bound,gap_S1,gap_S2,gap_S3");
}

TEST_CASE("discrete threshold projection identities") {
  for (const Fixture* f : {&p_fixture(), &s_fixture()}) {
    const auto& ps = f->pset;
    const AngularGrid ang(16);
    const ComplexOperator g0 = assemble_gamma(0, f->pot.grid, ang), g1 = assemble_gamma(1, f->pot.grid, ang);
    CHECK(weighted_norm(times_v(g0, f->pot, ps.Q)) <= 1e-10);
    for (const RealOperator* S : {&ps.S1, &ps.S2, &ps.S3}) {
      CHECK(weighted_norm(times_v(g0, f->pot, *S)) <= 1e-8);
      CHECK(weighted_norm(ps.P * *S) <= 1e-10);
      CHECK(weighted_norm(*S * ps.P) <= 1e-10);
    }
    CHECK(weighted_norm(times_v(g1, f->pot, ps.S3)) <= 1e-8);
    CHECK(weighted_norm(times_v(g0, f->pot, ps.M00 * ps.S3)) <= 1e-8);
    // projections are orthogonal and nested
    for (const RealOperator* S : {&ps.P, &ps.Q, &ps.S1, &ps.S2, &ps.S3, &ps.T2, &ps.T3}) {
      CHECK(weighted_norm(*S * *S - *S) <= 1e-10);
      CHECK(weighted_norm(weighted_adjoint(*S) - *S) <= 1e-10);
    }
    CHECK(weighted_norm(ps.S1 * ps.S2 - ps.S2) <= 1e-10);
    CHECK(weighted_norm(ps.S2 * ps.S3 - ps.S3) <= 1e-10);
  }
}

TEST_CASE("rank decisions are stable under refinement and tolerance changes") {
  for (const Fixture* f : {&p_fixture(), &s_fixture()}) {
    for (int k : {1, 2})
      for (double tol : {1e-5, 1e-6, 1e-7}) {
        const ProjectionSet ps = compute_projection_set(well_at(f->g, k), tol);
        CHECK(ps.rank_S1() == f->pset.rank_S1());
        CHECK(ps.rank_T2() == f->pset.rank_T2());
        CHECK(ps.rank_T3() == f->pset.rank_T3());
        CHECK(ps.rank_S3() == f->pset.rank_S3());
      }
  }
}

TEST_CASE("inertia count is monotone in the coupling") {
  int prev = -1;
  for (double g = 1.0; g < 20.0; g += 1.5) {
    const int n = threshold_inertia(well_at(g));
    CHECK(n >= prev);
    prev = n;
  }
}
