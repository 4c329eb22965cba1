#include <doctest.h>

#include <cmath>
#include <random>

#include "forcetrack/errors.hpp"
#include "forcetrack/simkit.hpp"
#include "forcetrack/umvfilter.hpp"
#include "oracles.hpp"

using namespace forcetrack;
using P = oracle::ReferenceParams;

namespace {

DiscreteModel scalar_model(double q = 0.3, double r = 0.7) {
  DiscreteModel dm;
  dm.a = Matrix::Constant(1, 1, 1.0);
  dm.b = Matrix::Constant(1, 1, 1.0);
  dm.h = Matrix::Constant(1, 1, 1.0);
  dm.q = Matrix::Constant(1, 1, q);
  dm.r = Matrix::Constant(1, 1, r);
  dm.dt = 1.0;
  return dm;
}

DiscreteModel opto_dm() {
  return discretize(build_optomechanical({P::mass, P::omega, P::noise}), P::dt);
}

// Stable, minimum-phase 3-state system with two outputs and one input; its
// covariance recursion converges.
DiscreteModel damped_model() {
  ContinuousModel cm;
  cm.a0.resize(3, 3);
  cm.a0 << -1.0, 0.5, 0.0, -0.5, -1.0, 0.2, 0.0, 0.1, -2.0;
  cm.b0 = Matrix(Eigen::Vector3d(1.0, 0.0, 0.5));
  cm.h0.resize(2, 3);
  cm.h0 << 1.0, 0.0, 0.0, 0.0, 1.0, 1.0;
  cm.q0 = 0.1 * Matrix::Identity(3, 3);
  cm.r0 = 0.01 * Matrix::Identity(2, 2);
  return discretize(cm, 0.05);
}

}  // namespace

TEST_CASE("init") {
  const FilterState a = init_state(Vector::Zero(2), Matrix::Identity(2, 2));
  CHECK(a.k == 0);
  CHECK(a.p == Matrix::Identity(2, 2));

  const FilterState exact = init_state(Vector::Zero(2), Matrix::Zero(2, 2));
  CHECK(exact.p.isZero(0.0));

  const FilterState opto = init_state(Vector::Constant(2, 1e-6), 1e-10 * Matrix::Identity(2, 2));
  CHECK(opto.x_hat(0) == 1e-6);
  CHECK(opto.p(1, 1) == 1e-10);

  Matrix neg = Matrix::Identity(2, 2);
  neg(1, 1) = -1.0;
  CHECK_THROWS_AS(init_state(Vector::Zero(2), neg), DefinitenessError);
  Matrix asym = Matrix::Identity(2, 2);
  asym(0, 1) = 0.5;
  CHECK_THROWS_AS(init_state(Vector::Zero(2), asym), DefinitenessError);
  CHECK_THROWS_AS(init_state(Vector::Zero(3), Matrix::Identity(2, 2)), DimensionError);
}

TEST_CASE("predict_covariance") {
  DiscreteModel dm = scalar_model(0.0);
  CHECK(predict_covariance(init_state(Vector::Zero(1), Matrix::Zero(1, 1)), dm).isZero(0.0));

  dm.a = Matrix::Identity(2, 2);
  dm.q = Matrix::Identity(2, 2);
  const Matrix pp = predict_covariance(init_state(Vector::Zero(2), Matrix::Identity(2, 2)), dm);
  CHECK(pp == 2.0 * Matrix::Identity(2, 2));
}

TEST_CASE("predict_covariance matches a sampled covariance on the optomechanical model") {
  const DiscreteModel dm = opto_dm();
  const Matrix p0 = Vector(Eigen::Vector2d(4e-10, 2.5e-5)).asDiagonal();
  const Matrix want = predict_covariance(init_state(Vector::Zero(2), p0), dm);

  // e_pred = A e + w with e ~ N(0, P0), w ~ N(0, Q), 1e6 draws.
  const GaussianSampler prior(p0);
  const GaussianSampler noise(dm.q);
  RandomStream s1(123, 0, Channel::kProcessNoise);
  RandomStream s2(123, 0, Channel::kMeasurementNoise);
  constexpr long draws = 1000000;
  Matrix acc = Matrix::Zero(2, 2);
  for (long i = 0; i < draws; ++i) {
    const Vector e = dm.a * prior.draw(s1) + noise.draw(s2);
    acc += e * e.transpose();
  }
  acc /= static_cast<double>(draws);
  // Sample covariance standard error is ~ sqrt(2/N) ~ 1.4e-3 relative on the
  // diagonal; 4 sigma on each diagonal, correlation-normalized off-diagonal.
  for (int i = 0; i < 2; ++i) {
    CHECK(std::abs(acc(i, i) - want(i, i)) <= 4.0 * std::sqrt(2.0 / draws) * want(i, i));
  }
  const double scale = std::sqrt(want(0, 0) * want(1, 1));
  CHECK(std::abs(acc(0, 1) - want(0, 1)) <= 4.0 * std::sqrt(2.0 / draws) * scale);
}

TEST_CASE("scalar system: constraint forces L = 1 and M = 1") {
  for (double pp : {1e-6, 0.5, 3.0, 1e4}) {
    for (double r : {1e-3, 0.7, 50.0}) {
      const StepGains g = gain(Matrix::Constant(1, 1, pp), scalar_model(0.3, r));
      CHECK(std::abs(g.l(0, 0) - 1.0) <= 1e-14);
      CHECK(std::abs(g.m(0, 0) - 1.0) <= 1e-14);
      CHECK(g.c(0, 0) == doctest::Approx(pp + r));
      CHECK(g.p_pred(0, 0) == pp);
    }
  }
}

TEST_CASE("update examples") {
  const DiscreteModel opto = opto_dm();
  const FilterState s = init_state(Vector(Eigen::Vector2d(1e-6, 2e-6)), 1e-10 * Matrix::Identity(2, 2));

  // Zero innovation keeps the propagated estimate.
  const Vector y = opto.h * opto.a * s.x_hat;
  const UpdateResult z = update(s, y, opto);
  CHECK((z.state.x_hat - opto.a * s.x_hat).norm() <= 1e-15 * (opto.a * s.x_hat).norm());
  CHECK(z.state.k == 1);

  const UpdateResult zero = update(init_state(Vector::Zero(2), Matrix::Identity(2, 2)),
                                   Vector::Zero(1), opto);
  CHECK(zero.state.x_hat.isZero(0.0));

  // Scalar system pins the state to the measurement.
  const DiscreteModel sc = scalar_model();
  const UpdateResult pinned = update(init_state(Vector::Constant(1, 0.25), Matrix::Constant(1, 1, 2.0)),
                                     Vector::Constant(1, 1.75), sc);
  CHECK(pinned.state.x_hat(0) == doctest::Approx(1.75).epsilon(1e-15));

  CHECK_THROWS_AS(update(s, Vector::Zero(2), opto), DimensionError);
}

TEST_CASE("covariance update equals the Joseph form of the constrained gain") {
  // P+ = (I - L H) P- (I - L H)^T + L R L^T holds for any gain; the three-term
  // expression must reproduce it for the constrained L.
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0.0, 1.0);
  const DiscreteModel dm = damped_model();
  for (int trial = 0; trial < 20; ++trial) {
    Matrix g(3, 3);
    for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = n(rng);
    const FilterState s = init_state(Vector::Zero(3), g * g.transpose());
    const UpdateResult u = update(s, Vector::Zero(2), dm);
    const Matrix ilh = Matrix::Identity(3, 3) - u.gains.l * dm.h;
    const Matrix joseph =
        ilh * u.gains.p_pred * ilh.transpose() + u.gains.l * dm.r * u.gains.l.transpose();
    CHECK((u.state.p - joseph).norm() <= 1e-10 * joseph.norm());
  }
}

TEST_CASE("unbiasedness constraint and PSD on the optomechanical model over 1000 steps") {
  const DiscreteModel dm = opto_dm();
  FilterState s = init_state(Vector::Constant(2, 1e-6), 1e-10 * Matrix::Identity(2, 2));
  const Matrix hb = dm.h * dm.b;
  RandomStream ys(5, 0, Channel::kMeasurementNoise);
  for (int k = 0; k < 1000; ++k) {
    const Vector y = Vector::Constant(1, 1e-5 * ys.standard_normal());
    const UpdateResult u = update(s, y, dm);
    CHECK((u.gains.l * hb - dm.b).norm() <= 1e-9 * dm.b.norm());
    CHECK((u.gains.m * hb - Matrix::Identity(1, 1)).norm() <= 1e-9);
    const PsdReport psd = psd_check(u.state.p, 1e-12);
    CHECK(psd.ok);
    CHECK(is_symmetric(u.state.p, 1e-15));
    s = u.state;
  }
}

TEST_CASE("optomechanical model: sampled invariant zero at -1 makes P grow linearly") {
  // With p = m = 1 the gain is L = B / (HB), independent of P, and the error
  // transition (I - L H) A has eigenvalues {0, -1}.
  const DiscreteModel dm = opto_dm();
  const Matrix hb = dm.h * dm.b;
  const Matrix l = dm.b / hb(0, 0);
  const Matrix closed = (Matrix::Identity(2, 2) - l * dm.h) * dm.a;
  const Eigen::EigenSolver<Matrix> es(closed);
  Vector mags(2);
  mags << std::abs(es.eigenvalues()(0)), std::abs(es.eigenvalues()(1));
  CHECK(mags.maxCoeff() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(mags.minCoeff() < 1e-9);

  FilterState s = init_state(Vector::Zero(2), 1e-10 * Matrix::Identity(2, 2));
  std::vector<double> p22;
  for (int k = 0; k < 400; ++k) {
    s = update(s, Vector::Zero(1), dm).state;
    p22.push_back(s.p(1, 1));
  }
  // Per-step increments of the momentum variance settle to a constant.
  const double inc_early = p22[101] - p22[99];
  const double inc_late = p22[399] - p22[397];
  CHECK(inc_late > 0.0);
  CHECK(inc_late == doctest::Approx(inc_early).epsilon(1e-6));
}

TEST_CASE("covariance converges on a minimum-phase system") {
  const DiscreteModel dm = damped_model();
  FilterState s = init_state(Vector::Zero(3), Matrix::Identity(3, 3));
  double last_diff = 1.0;
  for (int k = 0; k < 400; ++k) {
    const UpdateResult u = update(s, Vector::Zero(2), dm);
    last_diff = (u.state.p - s.p).cwiseAbs().maxCoeff();
    CHECK((u.gains.l * dm.h * dm.b - dm.b).norm() <= 1e-9 * dm.b.norm());
    s = u.state;
  }
  CHECK(last_diff < 1e-12);
}

TEST_CASE("gain reports infeasibility when HB loses rank") {
  DiscreteModel dm = scalar_model();
  dm.a = Matrix::Identity(2, 2);
  dm.b = Matrix(Eigen::Vector2d(1.0, 0.0));
  dm.h = Matrix(Eigen::RowVector2d(0.0, 1.0));
  dm.q = Matrix::Identity(2, 2);
  CHECK_THROWS_WITH_AS(gain(Matrix::Identity(2, 2), dm),
                       "unbiased input estimation infeasible (rank HB deficient)",
                       InfeasibleError);
}
