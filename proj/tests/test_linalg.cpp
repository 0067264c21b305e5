#include "doctest.h"

#include "l1h/error.hpp"
#include "l1h/linalg.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace l1h;
using l1h::testing::max_abs;

TEST_CASE("spd_factor of identity is identity") {
  const SpdFactor f = SpdFactor::factor(Matrix::Identity(3, 3));
  CHECK(max_abs(f.lower() - Matrix::Identity(3, 3)) == 0.0);
}

TEST_CASE("spd_factor of a 2x2 matrix") {
  Matrix g(2, 2);
  g << 4, 2, 2, 3;
  const SpdFactor f = SpdFactor::factor(g);
  Matrix expected(2, 2);
  expected << 2, 0, 1, std::sqrt(2.0);
  CHECK(max_abs(f.lower() - expected) < 1e-15);
  CHECK(max_abs(f.reconstruct() - g) < 1e-14);
}

TEST_CASE("spd_factor rejects an indefinite matrix") {
  Matrix g(2, 2);
  g << 1, 2, 2, 1;
  try {
    SpdFactor::factor(g);
    FAIL("expected NotPositiveDefinite");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotPositiveDefinite);
  }
}

TEST_CASE("factor_add_index") {
  Matrix one(1, 1);
  one << 4;
  SpdFactor f = SpdFactor::factor(one);
  Vector col(1);
  col << 2;
  f.add_index(1, col, 3.0);
  Matrix g(2, 2);
  g << 4, 2, 2, 3;
  CHECK(max_abs(f.lower() - SpdFactor::factor(g).lower()) < 1e-15);

  SpdFactor id = SpdFactor::factor(Matrix::Identity(2, 2));
  id.add_index(2, Vector::Zero(2), 1.0);
  CHECK(max_abs(id.lower() - Matrix::Identity(3, 3)) == 0.0);

  SUBCASE("duplicate column is rejected") {
    // Gram of columns a1 = [1,0], a2 = [1,1], a3 = a2.
    Matrix g2(2, 2);
    g2 << 1, 1, 1, 2;
    SpdFactor f2 = SpdFactor::factor(g2);
    Vector dup(2);
    dup << 1, 2;
    CHECK_THROWS_AS(f2.add_index(2, dup, 2.0), Error);
    CHECK(f2.dim() == 2);
  }
}

TEST_CASE("factor_remove_index") {
  SpdFactor f = SpdFactor::factor(Matrix::Identity(3, 3));
  f.remove_index(1);
  CHECK(max_abs(f.lower() - Matrix::Identity(2, 2)) < 1e-15);
  CHECK(f.source() == IndexList{0, 2});

  Matrix g(2, 2);
  g << 4, 2, 2, 3;
  SpdFactor h = SpdFactor::factor(g);
  h.remove_index(0);
  REQUIRE(h.dim() == 1);
  CHECK(std::abs(h.lower()(0, 0) - std::sqrt(3.0)) < 1e-15);

  Rng rng(5);
  const Matrix spd = l1h::testing::random_spd(6, rng);
  SpdFactor base = SpdFactor::factor(spd.topLeftCorner(5, 5));
  const Matrix before = base.lower();
  base.add_index(5, spd.col(5).head(5), spd(5, 5));
  base.remove_index(5);
  CHECK(max_abs(base.lower() - before) < 1e-10);
}

TEST_CASE("spd solve matches a dense solve") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 1 + static_cast<Index>(rng.below(50));
    const Matrix g = l1h::testing::random_spd(n, rng);
    const Vector b = l1h::testing::randn(n, rng);
    const Vector x = SpdFactor::factor(g).solve(b);
    const Vector ref = g.fullPivLu().solve(b);
    CHECK((x - ref).norm() <= 1e-9 * ref.norm());
  }
}

TEST_CASE("random add/remove sequences track the direct factor") {
  Rng rng(42);
  const Index pool = 40;
  const Matrix a = l1h::testing::randn(60, pool, rng);
  const Matrix gram = a.transpose() * a;
  SpdFactor f;
  std::vector<char> in(pool, 0);
  for (int event = 0; event < 100; ++event) {
    const bool add = f.dim() == 0 || (f.dim() < 30 && rng.uniform() < 0.6);
    if (add) {
      Index j;
      do {
        j = static_cast<Index>(rng.below(pool));
      } while (in[j]);
      Vector col(f.dim());
      for (Index i = 0; i < f.dim(); ++i) col(i) = gram(f.source()[i], j);
      f.add_index(j, col, gram(j, j));
      in[j] = 1;
    } else {
      const Index pos = static_cast<Index>(rng.below(static_cast<std::uint64_t>(f.dim())));
      in[f.source()[pos]] = 0;
      f.remove_index(pos);
    }
    if (f.dim() == 0) continue;
    Matrix sub(f.dim(), f.dim());
    for (Index i = 0; i < f.dim(); ++i)
      for (Index j = 0; j < f.dim(); ++j) sub(i, j) = gram(f.source()[i], f.source()[j]);
    const Matrix direct = SpdFactor::factor(sub).lower();
    CHECK(max_abs(f.lower() - direct) <= 1e-9 * max_abs(direct));
  }
}

TEST_CASE("rank-one update and downdate") {
  Rng rng(3);
  const Matrix g = l1h::testing::random_spd(7, rng);
  const Vector v = l1h::testing::randn(7, rng);
  SpdFactor f = SpdFactor::factor(g);
  f.rank_one_update(v, 1.0);
  CHECK(max_abs(f.reconstruct() - (g + v * v.transpose())) < 1e-10);
  f.rank_one_update(v, -1.0);
  CHECK(max_abs(f.reconstruct() - g) < 1e-10);
}

TEST_CASE("cross-gram inverse updates") {
  Rng rng(8);
  Matrix m = l1h::testing::randn(5, 5, rng);
  CrossGramInverse inv;
  inv.reset(m);
  CHECK(max_abs(inv.inverse() * m - Matrix::Identity(5, 5)) < 1e-10);

  const Vector row = l1h::testing::randn(5, rng);
  const Vector col = l1h::testing::randn(5, rng);
  const double corner = rng.normal();
  inv.append(row, col, corner);
  Matrix grown(6, 6);
  grown << m, col, row.transpose(), corner;
  CHECK(max_abs(inv.inverse() * grown - Matrix::Identity(6, 6)) < 1e-9);

  inv.remove(2, 4);
  Matrix shrunk(5, 5);
  for (Index i = 0, oi = 0; i < 6; ++i) {
    if (i == 2) continue;
    for (Index j = 0, oj = 0; j < 6; ++j) {
      if (j == 4) continue;
      shrunk(oi, oj++) = grown(i, j);
    }
    ++oi;
  }
  CHECK(max_abs(inv.inverse() * shrunk - Matrix::Identity(5, 5)) < 1e-9);

  const Vector delta = l1h::testing::randn(5, rng);
  inv.add_to_row(1, delta);
  shrunk.row(1) += delta.transpose();
  CHECK(max_abs(inv.inverse() * shrunk - Matrix::Identity(5, 5)) < 1e-9);
  inv.add_to_column(3, delta);
  shrunk.col(3) += delta;
  CHECK(max_abs(inv.inverse() * shrunk - Matrix::Identity(5, 5)) < 1e-9);

  Matrix singular = Matrix::Ones(3, 3);
  CHECK_THROWS_AS(inv.reset(singular), Error);
}

TEST_CASE("rls_append") {
  Matrix a(2, 1);
  a << 1, 1;
  Vector y(2);
  y << 1, 3;
  LsState s = ls_solve(a, y);
  CHECK(s.estimate(0) == doctest::Approx(2.0));
  RowVector b(1);
  b << 1;
  const LsState s1 = rls_append(s, b, 5.0);
  CHECK(s1.estimate(0) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(s1.m == 3);

  Rng rng(17);
  const Matrix a2 = l1h::testing::randn(6, 3, rng);
  const Vector y2 = l1h::testing::randn(6, rng);
  const LsState base = ls_solve(a2, y2);
  const LsState zero_row = rls_append(base, RowVector::Zero(3), 7.0);
  CHECK((zero_row.estimate - base.estimate).norm() < 1e-14);
  const RowVector b2 = l1h::testing::randn(3, rng).transpose();
  const LsState consistent = rls_append(base, b2, b2.dot(base.estimate));
  CHECK((consistent.estimate - base.estimate).norm() < 1e-12);
}

TEST_CASE("repeated rls_append equals the stacked least-squares solution") {
  Rng rng(23);
  const Index n = 8, m = 30;
  const Matrix a = l1h::testing::randn(m, n, rng);
  const Vector y = l1h::testing::randn(m, rng);
  LsState s = ls_solve(a.topRows(n), y.head(n));
  for (Index i = n; i < m; ++i) s = rls_append(s, a.row(i), y(i));
  const Vector direct = a.colPivHouseholderQr().solve(y);
  CHECK((s.estimate - direct).norm() <= 1e-8 * direct.norm());
  CHECK(max_abs(a.transpose() * a * s.p - Matrix::Identity(n, n)) < 1e-9);
}
