#include "doctest.h"

#include "l1h/dantzig.hpp"
#include "l1h/oracle.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace l1h;

TEST_CASE("ds: large tau gives zero primal and dual") {
  Rng rng(1);
  const Matrix a = l1h::testing::randn(5, 8, rng);
  const Vector y = l1h::testing::randn(5, rng);
  const double tau0 = (a.transpose() * y).cwiseAbs().maxCoeff();
  const DsState st = solve_ds(a, y, tau0 * 1.01);
  CHECK(st.x.cwiseAbs().maxCoeff() == 0.0);
  CHECK(st.lambda.cwiseAbs().maxCoeff() == 0.0);
  CHECK(ds_kkt(a, y, tau0, Vector::Zero(8), Vector::Zero(8)).pass);
}

TEST_CASE("ds: identity matrix soft-thresholds with lambda = -sign(x)") {
  const Index n = 6;
  Vector y(n);
  y << 2.0, -0.3, 0.9, -1.7, 0.05, 1.2;
  const double tau = 0.5;
  const DsState st = solve_ds(Matrix::Identity(n, n), y, tau);
  for (Index j = 0; j < n; ++j) {
    const double expected = sign_of(y(j)) * std::max(0.0, std::abs(y(j)) - tau);
    CHECK(st.x(j) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(st.lambda(j) == doctest::Approx(-sign_of(expected)).epsilon(1e-12));
  }
  CHECK(ds_kkt(Matrix::Identity(n, n), y, tau, st.x, st.lambda).pass);
}

TEST_CASE("ds: cold homotopy agrees with brute-force enumeration") {
  Rng rng(2);
  int compared = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const Matrix a = l1h::testing::randn(5, 6, rng);
    const Vector y = l1h::testing::randn(5, rng);
    const double tau = rng.uniform(0.05, 0.9) * (a.transpose() * y).cwiseAbs().maxCoeff();
    const DsState st = solve_ds(a, y, tau);
    CHECK(ds_kkt(a, y, tau, st.x, st.lambda).pass);
    CHECK(st.gx.size() == st.gl.size());
    const oracle::DsSolution ref = oracle::ds_brute(a, y, tau);
    CHECK((st.x - ref.x).cwiseAbs().maxCoeff() < 1e-7);
    CHECK((st.lambda - ref.lambda).cwiseAbs().maxCoeff() < 1e-7);
    ++compared;
  }
  CHECK(compared == 30);
}

TEST_CASE("ds_kkt catches an off-support dual perturbation") {
  Rng rng(3);
  const Matrix a = l1h::testing::randn(12, 20, rng, 1.0 / std::sqrt(12.0));
  const Vector y = l1h::testing::randn(12, rng);
  const double tau = 0.3 * (a.transpose() * y).cwiseAbs().maxCoeff();
  const DsState st = solve_ds(a, y, tau);
  REQUIRE(ds_kkt(a, y, tau, st.x, st.lambda).pass);
  Index off = 0;
  while (st.lambda(off) != 0.0) ++off;
  const double gnorm = (a.transpose() * a).operatorNorm();
  Vector bad = st.lambda;
  bad(off) = 2.0 / gnorm;
  const KktReport r = ds_kkt(a, y, tau, st.x, bad);
  CHECK_FALSE(r.pass);
}

TEST_CASE("ds: supports stay balanced along a longer path") {
  Rng rng(4);
  const Matrix a = l1h::testing::randn(30, 60, rng, 1.0 / std::sqrt(30.0));
  const Vector y = l1h::testing::randn(30, rng);
  const double tau = 0.02 * (a.transpose() * y).cwiseAbs().maxCoeff();
  MatrixOperator op(a);
  HomotopyTrace tr;
  const DsState st = solve_ds(op, y, tau, &tr);
  CHECK(st.gx.size() == st.gl.size());
  CHECK(ds_kkt(a, y, tau, st.x, st.lambda).pass);
  CHECK(support_of(st.x).size() == st.gx.size());
  CHECK(support_of(st.lambda).size() == st.gl.size());
}
