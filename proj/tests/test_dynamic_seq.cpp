#include "doctest.h"

#include "l1h/dynamic_seq.hpp"
#include "l1h/error.hpp"
#include "l1h/oracle.hpp"
#include "test_support.hpp"

using namespace l1h;
using l1h::testing::max_abs;
using l1h::testing::randn;

namespace {

Matrix stack(const Matrix& a, const RowVector& b) {
  Matrix out(a.rows() + 1, a.cols());
  out << a, b;
  return out;
}

Vector stack(const Vector& y, double w) {
  Vector out(y.size() + 1);
  out << y, w;
  return out;
}

double scale_of(const Vector& v) { return std::max(1.0, v.cwiseAbs().maxCoeff()); }

}  // namespace

TEST_CASE("consistent measurement leaves the solution unchanged") {
  Rng rng(2);
  const Matrix a = randn(10, 16, rng);
  const Vector y = randn(10, rng);
  MatrixOperator op(a);
  const BpdnState st = solve_bpdn(op, y, 0.2 * (a.transpose() * y).cwiseAbs().maxCoeff());
  const RowVector b = randn(16, rng).transpose();
  const double w = b.dot(st.x.transpose());
  HomotopyTrace tr;
  const BpdnState out = bpdn_add_measurement(st, op, y, b, w, &tr);
  CHECK(tr.iterations() == 0);
  CHECK(max_abs(out.x - st.x) == 0.0);

  // The factor now describes the stacked Gram, so a follow-up update works.
  const Matrix a2 = stack(a, b);
  const Vector y2 = stack(y, w);
  MatrixOperator op2(a2);
  const RowVector b2 = randn(16, rng).transpose();
  const BpdnState next = bpdn_add_measurement(out, op2, y2, b2, 0.7);
  CHECK(bpdn_kkt(stack(a2, b2), stack(y2, 0.7), st.tau, next.x).pass);
}

TEST_CASE("zero row leaves the solution unchanged") {
  Rng rng(4);
  const Matrix a = randn(8, 12, rng);
  const Vector y = randn(8, rng);
  MatrixOperator op(a);
  const BpdnState st = solve_bpdn(op, y, 0.3 * (a.transpose() * y).cwiseAbs().maxCoeff());
  HomotopyTrace tr;
  const BpdnState out = bpdn_add_measurement(st, op, y, RowVector::Zero(12), 3.0, &tr);
  CHECK(tr.iterations() == 0);
  CHECK(max_abs(out.x - st.x) == 0.0);
}

TEST_CASE("adding a measurement matches the stacked cold solve") {
  Rng rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    const Index m = 5 + static_cast<Index>(rng.below(6));
    const Index n = 6 + static_cast<Index>(rng.below(6));
    const Matrix a = randn(m, n, rng);
    const Vector y = randn(m, rng);
    const RowVector b = randn(n, rng).transpose();
    const double w = 2.0 * rng.normal();
    MatrixOperator op(a);
    const double tau = (0.05 + 0.5 * rng.uniform()) * (a.transpose() * y).cwiseAbs().maxCoeff();
    const BpdnState st = solve_bpdn(op, y, tau);
    HomotopyTrace tr;
    const BpdnState out = bpdn_add_measurement(st, op, y, b, w, &tr);
    const Vector ref = oracle::bpdn_brute(stack(a, b), stack(y, w), tau);
    CHECK(max_abs(out.x - ref) <= 1e-8 * scale_of(ref));
    CHECK(bpdn_kkt(stack(a, b), stack(y, w), tau, out.x).pass);

    REQUIRE(tr.u.size() == tr.steps.size());
    double eps = 0.0;
    for (std::size_t k = 0; k < tr.steps.size(); ++k) {
      CHECK(tr.u[k] >= 0.0);
      CHECK(tr.params[k] > eps);
      eps = advance_epsilon(eps, tr.steps[k].theta, tr.u[k]);
      CHECK(std::abs(eps - tr.params[k]) <= 1e-12);
    }
    CHECK(tr.params.back() == 1.0);
  }
}

TEST_CASE("add then remove returns to the original solution") {
  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const Index m = 20, n = 32;
    const Matrix a = randn(m, n, rng);
    const Vector y = randn(m, rng);
    const RowVector b = randn(n, rng).transpose();
    const double w = rng.normal();
    MatrixOperator op(a);
    const double tau = 0.1 * (a.transpose() * y).cwiseAbs().maxCoeff();
    const BpdnState st = solve_bpdn(op, y, tau);
    const BpdnState added = bpdn_add_measurement(st, op, y, b, w);
    HomotopyTrace tr;
    const BpdnState back = bpdn_remove_measurement(added, stack(a, b), stack(y, w), m, &tr);
    CHECK(max_abs(back.x - st.x) <= 1e-8 * scale_of(st.x));
    for (std::size_t k = 1; k < tr.params.size(); ++k) CHECK(tr.params[k] < tr.params[k - 1]);
    if (!tr.params.empty()) CHECK(tr.params.back() == 0.0);
  }
}

TEST_CASE("removing an interior row matches the reduced cold solve") {
  Rng rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    const Index m = 24, n = 32;
    const Matrix a = randn(m, n, rng);
    const Vector y = randn(m, rng);
    MatrixOperator op(a);
    const double tau = 0.15 * (a.transpose() * y).cwiseAbs().maxCoeff();
    const BpdnState st = solve_bpdn(op, y, tau);
    const Index row = static_cast<Index>(rng.below(static_cast<std::uint64_t>(m)));
    const BpdnState out = bpdn_remove_measurement(st, a, y, row);
    Matrix ar(m - 1, n);
    Vector yr(m - 1);
    ar << a.topRows(row), a.bottomRows(m - 1 - row);
    yr << y.head(row), y.tail(m - 1 - row);
    const BpdnState cold = solve_bpdn(ar, yr, tau);
    CHECK(max_abs(out.x - cold.x) <= 1e-7 * scale_of(cold.x));
  }
}

TEST_CASE("removing a zero row is a no-op") {
  Rng rng(31);
  Matrix a = randn(9, 12, rng);
  a.row(4).setZero();
  const Vector y = randn(9, rng);
  MatrixOperator op(a);
  const BpdnState st = solve_bpdn(op, y, 0.2 * (a.transpose() * y).cwiseAbs().maxCoeff());
  HomotopyTrace tr;
  const BpdnState out = bpdn_remove_measurement(st, a, y, 4, &tr);
  CHECK(tr.iterations() == 0);
  CHECK(max_abs(out.x - st.x) == 0.0);
}

TEST_CASE("block of rows equals stacked solve") {
  Rng rng(37);
  const Matrix a = randn(12, 20, rng);
  const Vector y = randn(12, rng);
  const Matrix b = randn(5, 20, rng);
  const Vector w = randn(5, rng);
  MatrixOperator op(a);
  const double tau = 0.1 * (a.transpose() * y).cwiseAbs().maxCoeff();
  const BpdnState st = solve_bpdn(op, y, tau);
  const BpdnState out = bpdn_add_measurements(st, a, y, b, w);
  Matrix full(17, 20);
  full << a, b;
  Vector yf(17);
  yf << y, w;
  const BpdnState cold = solve_bpdn(full, yf, tau);
  CHECK(max_abs(out.x - cold.x) <= 1e-7 * scale_of(cold.x));
}

TEST_CASE("DS measurement update matches brute force on the stacked system") {
  Rng rng(41);
  for (int trial = 0; trial < 40; ++trial) {
    const Index m = 4 + static_cast<Index>(rng.below(4));
    const Index n = 4 + static_cast<Index>(rng.below(3));
    const Matrix a = randn(m, n, rng);
    const Vector y = randn(m, rng);
    const RowVector b = randn(n, rng).transpose();
    const double w = 2.0 * rng.normal();
    MatrixOperator op(a);
    const double tau = (0.05 + 0.5 * rng.uniform()) * (a.transpose() * y).cwiseAbs().maxCoeff();
    const DsState st = solve_ds(op, y, tau);
    HomotopyTrace tr;
    const DsState out = ds_add_measurement(st, op, y, b, w, &tr);
    const oracle::DsSolution ref = oracle::ds_brute(stack(a, b), stack(y, w), tau);
    CHECK(max_abs(out.x - ref.x) <= 1e-7 * scale_of(ref.x));
    CHECK(ds_kkt(stack(a, b), stack(y, w), tau, out.x, out.lambda).pass);
  }
}

TEST_CASE("DS and BPDN agree for an orthonormal stacked system") {
  // Rows of a 4x4 orthogonal matrix: the first three rows form A, the last is b.
  Rng rng(43);
  const Eigen::HouseholderQR<Matrix> qr(randn(4, 4, rng));
  const Matrix q = qr.householderQ() * Matrix::Identity(4, 4);
  const Matrix a = q.topRows(3);
  const RowVector b = q.row(3);
  const Vector y = randn(3, rng);
  const double w = 1.3;
  const double tau = 0.2;
  MatrixOperator op(a);
  const BpdnState bs = bpdn_add_measurement(solve_bpdn(op, y, tau), op, y, b, w);
  const DsState ds = ds_add_measurement(solve_ds(op, y, tau), op, y, b, w);
  CHECK(max_abs(bs.x - ds.x) <= 1e-10);
  CHECK(bpdn_kkt(q, stack(y, w), tau, bs.x).pass);
  CHECK(ds_kkt(q, stack(y, w), tau, ds.x, ds.lambda).pass);
}

TEST_CASE("DS consistent measurement with orthogonal dual is unchanged") {
  Rng rng(47);
  const Matrix a = randn(6, 5, rng);
  const Vector y = randn(6, rng);
  MatrixOperator op(a);
  const DsState st = solve_ds(op, y, 0.3 * (a.transpose() * y).cwiseAbs().maxCoeff());
  // b orthogonal to lambda and consistent with x.
  RowVector b = randn(5, rng).transpose();
  if (st.lambda.squaredNorm() > 0) b -= (b.dot(st.lambda.transpose()) / st.lambda.squaredNorm()) * st.lambda.transpose();
  HomotopyTrace tr;
  const DsState out = ds_add_measurement(st, op, y, b, b.dot(st.x.transpose()), &tr);
  CHECK(tr.iterations() == 0);
  CHECK(max_abs(out.x - st.x) == 0.0);
}
