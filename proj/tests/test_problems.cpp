#include "doctest.h"

#include "l1h/error.hpp"
#include "l1h/problems.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <set>

using namespace l1h;
using l1h::testing::max_abs;

TEST_CASE("gaussian matrix moments and determinism") {
  const Matrix a = gaussian_matrix(256, 256, 42);
  const double count = static_cast<double>(a.size());
  const double mean = a.mean();
  const double var = (a.array() - mean).square().sum() / (count - 1.0);
  CHECK(std::abs(mean) <= 4.0 / std::sqrt(count * 256.0));
  CHECK(std::abs(var * 256.0 - 1.0) <= 0.1);
  const Matrix again = gaussian_matrix(256, 256, 42);
  CHECK((a.array() == again.array()).all());
  CHECK(!(a.array() == gaussian_matrix(256, 256, 43).array()).all());
}

TEST_CASE("orthonormal columns") {
  const Matrix q = orthonormal_columns(40, 12, 7);
  CHECK(max_abs(q.transpose() * q - Matrix::Identity(12, 12)) <= 1e-12);
}

TEST_CASE("spike signals and perturbations") {
  CHECK(spike_signal(50, 0, 1).cwiseAbs().maxCoeff() == 0.0);
  const Vector x = spike_signal(200, 17, 3);
  Index count = 0;
  for (Index i = 0; i < x.size(); ++i) {
    if (x(i) != 0.0) {
      ++count;
      CHECK(std::abs(x(i)) == 1.0);
    }
  }
  CHECK(count == 17);

  const Vector same = perturb_spikes(x, 0, 5);
  for (Index i = 0; i < x.size(); ++i) {
    CHECK((same(i) != 0.0) == (x(i) != 0.0));
    CHECK(std::abs(same(i) - x(i)) <= 0.4);
  }
  const Vector grown = perturb_spikes(x, 6, 5);
  Index nz = 0;
  for (Index i = 0; i < grown.size(); ++i) nz += grown(i) != 0.0;
  CHECK(nz == 23);
}

TEST_CASE("spike instances reproduce bit for bit") {
  const ProblemInstance a = spike_instance(32, 64, 6, 0.01, 99);
  const ProblemInstance b = spike_instance(32, 64, 6, 0.01, 99);
  CHECK((a.y.array() == b.y.array()).all());
  CHECK(max_abs(a.y - a.a * a.x_true) <= 0.1);
}

TEST_CASE("blocks signal levels and Haar sparsity") {
  const Index n = 1024;
  const Vector x = blocks_signal(n);
  std::set<double> levels(x.data(), x.data() + n);
  CHECK(levels.size() <= 12);
  const Vector w = wavelet_analysis(x, WaveletFamily::Haar);
  Index nz = 0;
  for (Index i = 0; i < n; ++i) nz += std::abs(w(i)) > 1e-12;
  CHECK(nz <= 11 * 10 + 1);

  const Vector varied = blocks_signal(n, 8);
  std::set<double> vlevels(varied.data(), varied.data() + n);
  CHECK(vlevels.size() <= 12);
  CHECK(max_abs(varied - x) > 0.0);
}

TEST_CASE("piecewise cubic is compressible under Daubechies-8") {
  for (std::uint64_t seed : {0ULL, 3ULL}) {
    const Vector x = pcwpoly_signal(1024, seed);
    Vector w = wavelet_analysis(x, WaveletFamily::Daub8).cwiseAbs2();
    std::sort(w.data(), w.data() + w.size(), std::greater<double>());
    const double top = w.head(102).sum();
    CHECK(top >= 0.999 * w.sum());
  }
}

TEST_CASE("wavelet transforms are orthonormal") {
  for (WaveletFamily fam : {WaveletFamily::Haar, WaveletFamily::Daub8}) {
    for (Index n : {1, 2, 4, 8, 16, 64, 256}) {
      const Matrix w = wavelet_synthesis_matrix(n, fam);
      CHECK(max_abs(w.transpose() * w - Matrix::Identity(n, n)) <= 1e-12);
    }
    Rng rng(2);
    const Vector x = l1h::testing::randn(512, rng);
    const Vector c = wavelet_analysis(x, fam);
    CHECK(std::abs(c.norm() - x.norm()) <= 1e-12 * x.norm());
    CHECK(max_abs(wavelet_synthesis(c, fam) - x) <= 1e-12);
  }
  const Vector constant = Vector::Constant(64, 3.0);
  const Vector c = wavelet_analysis(constant, WaveletFamily::Haar);
  CHECK(c(0) == doctest::Approx(24.0));
  CHECK(c.tail(63).cwiseAbs().maxCoeff() <= 1e-12);
  try {
    wavelet_analysis(Vector::Ones(12), WaveletFamily::Haar);
    FAIL("expected BadLength");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BadLength);
  }
}

TEST_CASE("codeword corruption bookkeeping") {
  const Vector code = Vector::LinSpaced(100, 1.0, 100.0);
  Corruption none;
  CHECK(max_abs(corrupt_codeword(code, none, 1).values - code) == 0.0);

  Corruption zk;
  zk.k = 13;
  const CorruptedCodeword out = corrupt_codeword(code, zk, 2);
  CHECK(out.support.size() == 13);
  Index zeros = 0;
  for (Index i = 0; i < 100; ++i) zeros += out.values(i) == 0.0;
  CHECK(zeros == 13);

  Corruption bern;
  bern.mode = Corruption::Mode::Bernoulli;
  bern.rate = 0.1;
  const CorruptedCodeword big = corrupt_codeword(Vector::Ones(10000), bern, 3);
  const double frac = static_cast<double>(big.support.size()) / 10000.0;
  CHECK(std::abs(frac - 0.1) <= 0.02);
}

TEST_CASE("PGM parsing") {
  const Matrix a = parse_pgm("P2\n# comment\n3 2\n255\n0 1 2\n3 4 255\n");
  CHECK(a.rows() == 2);
  CHECK(a.cols() == 3);
  CHECK(a(1, 2) == 255.0);
  std::string bin = "P5 2 1 65535\n";
  bin += std::string("\x01\x02\x00\x10", 4);
  const Matrix b = parse_pgm(bin);
  CHECK(b(0, 0) == 258.0);
  CHECK(b(0, 1) == 16.0);
  CHECK_THROWS_AS(parse_pgm("P5 4 4 255\n\x01"), Error);
  CHECK_THROWS_AS(parse_pgm("P3 1 1 255\n0"), Error);
}

TEST_CASE("seed parsing") {
  CHECK(parse_seed("123") == 123u);
  CHECK(parse_seed("0x1F") == 31u);
  CHECK(parse_seed("18446744073709551615") == 18446744073709551615ULL);
  for (const char* bad : {"", "abc", "12x", "0x", "-1", "18446744073709551616"}) {
    try {
      parse_seed(bad);
      FAIL("expected Config");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Config);
    }
  }
}
