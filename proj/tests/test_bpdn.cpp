#include "doctest.h"

#include "l1h/bpdn.hpp"
#include "l1h/error.hpp"
#include "l1h/oracle.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace l1h;

namespace {

Vector soft_threshold(const Vector& v, double t) {
  Vector out(v.size());
  for (Index i = 0; i < v.size(); ++i) out(i) = sign_of(v(i)) * std::max(0.0, std::abs(v(i)) - t);
  return out;
}

}  // namespace

TEST_CASE("large tau gives the zero vector") {
  Rng rng(1);
  const Matrix a = l1h::testing::randn(6, 10, rng);
  const Vector y = l1h::testing::randn(6, rng);
  const double tau0 = (a.transpose() * y).cwiseAbs().maxCoeff();
  const BpdnState st = solve_bpdn(a, y, tau0);
  CHECK(st.x.cwiseAbs().maxCoeff() == 0.0);
  CHECK(bpdn_kkt(a, y, tau0, Vector::Zero(10)).pass);
}

TEST_CASE("scalar soft threshold") {
  Matrix a(1, 1);
  a << 1;
  Vector y(1);
  y << 2;
  const BpdnState st = solve_bpdn(a, y, 0.5);
  CHECK(st.x(0) == doctest::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("orthonormal columns separate into soft thresholds") {
  Rng rng(2);
  const Matrix q = l1h::testing::randn(12, 6, rng).householderQr().householderQ() * Matrix::Identity(12, 6);
  const Vector y = l1h::testing::randn(12, rng);
  const double tau = 0.3;
  const BpdnState st = solve_bpdn(q, y, tau);
  CHECK((st.x - soft_threshold(q.transpose() * y, tau)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("bpdn_kkt detects a scaled solution") {
  Rng rng(3);
  const Matrix a = l1h::testing::randn(10, 20, rng, 1.0 / std::sqrt(10.0));
  const Vector y = l1h::testing::randn(10, rng);
  const double tau = 0.2 * (a.transpose() * y).cwiseAbs().maxCoeff();
  const BpdnState st = solve_bpdn(a, y, tau);
  CHECK(bpdn_kkt(a, y, tau, st.x).pass);
  REQUIRE(st.x.cwiseAbs().maxCoeff() > 0.0);
  const KktReport bad = bpdn_kkt(a, y, tau, 2.0 * st.x);
  CHECK_FALSE(bad.pass);
  CHECK(bad.support_violation > 1e-8 * tau);
}

TEST_CASE("zero columns are rejected") {
  Matrix a = Matrix::Identity(3, 3);
  a.col(1).setZero();
  CHECK_THROWS_AS(solve_bpdn(a, Vector::Ones(3), 0.1), Error);
}

TEST_CASE("cold homotopy agrees with brute-force enumeration") {
  Rng rng(4);
  for (int trial = 0; trial < 40; ++trial) {
    const Matrix a = l1h::testing::randn(6, 8, rng);
    const Vector y = l1h::testing::randn(6, rng);
    const double tau = rng.uniform(0.05, 0.9) * (a.transpose() * y).cwiseAbs().maxCoeff();
    const BpdnState st = solve_bpdn(a, y, tau);
    const Vector ref = oracle::bpdn_brute(a, y, tau);
    CHECK((st.x - ref).cwiseAbs().maxCoeff() < 1e-7);
  }
}

TEST_CASE("homotopy path: tau decreases and one index changes per step") {
  Rng rng(5);
  const Matrix a = l1h::testing::randn(20, 40, rng, 1.0 / std::sqrt(20.0));
  const Vector y = l1h::testing::randn(20, rng);
  const double tau = 0.01 * (a.transpose() * y).cwiseAbs().maxCoeff();
  MatrixOperator op(a);
  HomotopyTrace tr;
  const BpdnState st = solve_bpdn(op, y, tau, &tr);
  REQUIRE(tr.iterations() > 3);
  for (std::size_t k = 1; k < tr.params.size(); ++k) CHECK(tr.params[k] < tr.params[k - 1]);
  CHECK(tr.params.back() == tau);
  CHECK(tr.steps.back().terminal());
  for (std::size_t k = 0; k + 1 < tr.steps.size(); ++k) CHECK(tr.steps[k].gamma >= 0);

  // Closed-form solution on the final support.
  const IndexList gamma = support_of(st.x);
  const Matrix ag = select_columns(a, gamma);
  Vector z(static_cast<Index>(gamma.size()));
  for (std::size_t i = 0; i < gamma.size(); ++i) z(static_cast<Index>(i)) = sign_of(st.x(gamma[i]));
  const Vector closed = (ag.transpose() * ag).ldlt().solve(ag.transpose() * y - tau * z);
  CHECK((gather(st.x, gamma) - closed).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(bpdn_kkt(a, y, tau, st.x).pass);
}
