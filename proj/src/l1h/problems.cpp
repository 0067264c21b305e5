#include "l1h/problems.hpp"

#include "l1h/error.hpp"
#include "l1h/matrix_io.hpp"
#include "l1h/rng.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <numeric>

namespace l1h {

namespace {

// Canonical Blocks layout: jump positions and jump heights.
constexpr std::array<double, 11> kBlockBreaks{0.10, 0.13, 0.15, 0.23, 0.25, 0.40, 0.44, 0.65, 0.76, 0.78, 0.81};
constexpr std::array<double, 11> kBlockJumps{4.0, -5.0, 3.0, -4.0, 5.0, -4.2, 2.1, 4.3, -3.1, 2.1, -4.2};

// Canonical piecewise cubic: piece i covers [kPolyBreaks[i], kPolyBreaks[i+1])
// and evaluates sum_k kPolyCoef[i][k] * u^k with u measured from the piece start.
constexpr std::array<double, 7> kPolyBreaks{0.0, 0.15, 0.35, 0.50, 0.70, 0.85, 1.0};
constexpr std::array<std::array<double, 4>, 6> kPolyCoef{{{1.0, 2.0, -8.0, 12.0},
                                                         {-2.0, 5.0, 3.0, -20.0},
                                                         {3.0, -4.0, 10.0, -25.0},
                                                         {0.5, 6.0, -12.0, 8.0},
                                                         {-1.0, -3.0, 15.0, -10.0},
                                                         {2.0, 1.0, -6.0, 20.0}}};

// Daubechies scaling filter with four vanishing moments (eight taps).
constexpr std::array<double, 8> kDaub8{0.23037781330889650,  0.71484657055291540, 0.63088076792985890,
                                       -0.02798376941685985, -0.18703481171909308, 0.03084138183556076,
                                       0.03288301166688520,  -0.01059740178506903};

// Distinct positions drawn by a partial Fisher-Yates shuffle of pool.
IndexList draw_distinct(IndexList pool, Index k, Rng& rng) {
  for (Index i = 0; i < k; ++i) {
    const std::size_t left = pool.size() - static_cast<std::size_t>(i);
    const std::size_t j = static_cast<std::size_t>(i) + static_cast<std::size_t>(rng.below(left));
    std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
  }
  pool.resize(static_cast<std::size_t>(k));
  return pool;
}

IndexList iota_list(Index n) {
  IndexList out(static_cast<std::size_t>(n));
  std::iota(out.begin(), out.end(), Index{0});
  return out;
}

struct Filters {
  std::vector<double> h, g;
};

Filters filters(WaveletFamily family) {
  Filters f;
  if (family == WaveletFamily::Haar) {
    f.h = {std::sqrt(0.5), std::sqrt(0.5)};
  } else {
    f.h.assign(kDaub8.begin(), kDaub8.end());
  }
  const std::size_t len = f.h.size();
  f.g.resize(len);
  for (std::size_t i = 0; i < len; ++i) f.g[i] = (i % 2 == 0 ? 1.0 : -1.0) * f.h[len - 1 - i];
  return f;
}

void require_power_of_two(Index n) {
  if (n < 1 || (n & (n - 1)) != 0) raise(ErrorCode::BadLength, "length " + std::to_string(n) + " is not a power of two");
}

}  // namespace

Matrix gaussian_matrix(Index m, Index n, std::uint64_t seed) {
  if (m < 1 || n < 1) raise(ErrorCode::InvalidArgument, "matrix dimensions must be positive");
  Rng rng(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  Matrix a(m, n);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) a(i, j) = scale * rng.normal();
  }
  return a;
}

Matrix orthonormal_columns(Index m, Index n, std::uint64_t seed) {
  if (m < n) raise(ErrorCode::InvalidArgument, "orthonormal columns need m >= n");
  const Eigen::HouseholderQR<Matrix> qr(gaussian_matrix(m, n, seed));
  return qr.householderQ() * Matrix::Identity(m, n);
}

Vector spike_signal(Index n, Index k, std::uint64_t seed) {
  if (k < 0 || k > n) raise(ErrorCode::InvalidArgument, "spike count out of range");
  Rng rng(seed);
  Vector x = Vector::Zero(n);
  for (Index j : draw_distinct(iota_list(n), k, rng)) x(j) = rng.bernoulli(0.5) ? 1.0 : -1.0;
  return x;
}

Vector perturb_spikes(const Vector& x, Index kn, std::uint64_t seed) {
  Rng rng(seed);
  Vector out = x;
  IndexList zeros;
  for (Index j = 0; j < x.size(); ++j) {
    if (x(j) != 0.0) {
      out(j) += 0.1 * rng.normal();
    } else {
      zeros.push_back(j);
    }
  }
  kn = std::min<Index>(kn, static_cast<Index>(zeros.size()));
  for (Index j : draw_distinct(zeros, kn, rng)) out(j) = rng.normal();
  return out;
}

ProblemInstance spike_instance(Index m, Index n, Index k, double sigma, std::uint64_t seed) {
  ProblemInstance inst;
  inst.seed = seed;
  inst.sigma = sigma;
  inst.a = gaussian_matrix(m, n, derive_seed(seed, 0));
  inst.x_true = spike_signal(n, k, derive_seed(seed, 1));
  Rng noise(derive_seed(seed, 2));
  inst.y = inst.a * inst.x_true;
  for (Index i = 0; i < m; ++i) inst.y(i) += sigma * noise.normal();
  return inst;
}

Vector blocks_signal(Index n, std::uint64_t seed) {
  require_power_of_two(n);
  std::array<double, 12> level{};
  for (std::size_t i = 0; i < kBlockJumps.size(); ++i) level[i + 1] = level[i] + kBlockJumps[i];
  if (seed != 0) {
    Rng rng(seed);
    for (double& v : level) v *= rng.uniform(0.8, 1.2);
  }
  Vector x(n);
  for (Index i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n);
    std::size_t piece = 0;
    while (piece < kBlockBreaks.size() && t >= kBlockBreaks[piece]) ++piece;
    x(i) = level[piece];
  }
  return x;
}

Vector pcwpoly_signal(Index n, std::uint64_t seed) {
  require_power_of_two(n);
  auto coef = kPolyCoef;
  if (seed != 0) {
    Rng rng(seed);
    for (auto& piece : coef) {
      for (double& c : piece) c += 0.05 * rng.normal();
    }
  }
  Vector x(n);
  for (Index i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n);
    std::size_t piece = 0;
    while (piece + 2 < kPolyBreaks.size() && t >= kPolyBreaks[piece + 1]) ++piece;
    const double u = t - kPolyBreaks[piece];
    const auto& c = coef[piece];
    x(i) = c[0] + u * (c[1] + u * (c[2] + u * c[3]));
  }
  return x;
}

WaveletFamily parse_wavelet(std::string_view name) {
  if (name == "haar") return WaveletFamily::Haar;
  if (name == "daub8") return WaveletFamily::Daub8;
  raise(ErrorCode::Config, "unknown wavelet family '" + std::string(name) + "' (expected haar or daub8)");
}

Vector wavelet_analysis(const Vector& signal, WaveletFamily family) {
  const Index n = signal.size();
  require_power_of_two(n);
  const Filters f = filters(family);
  Vector out(n);
  Vector cur = signal;
  for (Index len = n; len > 1; len /= 2) {
    const Index half = len / 2;
    Vector approx(half);
    for (Index k = 0; k < half; ++k) {
      double a = 0.0, d = 0.0;
      for (std::size_t t = 0; t < f.h.size(); ++t) {
        const double v = cur((2 * k + static_cast<Index>(t)) % len);
        a += f.h[t] * v;
        d += f.g[t] * v;
      }
      approx(k) = a;
      out(half + k) = d;
    }
    cur = approx;
  }
  out(0) = cur(0);
  return out;
}

Vector wavelet_synthesis(const Vector& coefficients, WaveletFamily family) {
  const Index n = coefficients.size();
  require_power_of_two(n);
  const Filters f = filters(family);
  Vector cur = coefficients.head(1);
  for (Index len = 2; len <= n; len *= 2) {
    const Index half = len / 2;
    Vector next = Vector::Zero(len);
    for (Index k = 0; k < half; ++k) {
      const double a = cur(k);
      const double d = coefficients(half + k);
      for (std::size_t t = 0; t < f.h.size(); ++t) next((2 * k + static_cast<Index>(t)) % len) += f.h[t] * a + f.g[t] * d;
    }
    cur = next;
  }
  return cur;
}

Matrix wavelet_synthesis_matrix(Index n, WaveletFamily family) {
  require_power_of_two(n);
  Matrix w(n, n);
  for (Index j = 0; j < n; ++j) w.col(j) = wavelet_synthesis(Vector::Unit(n, j), family);
  return w;
}

CorruptedCodeword corrupt_codeword(const Vector& codeword, const Corruption& how, std::uint64_t seed) {
  Rng rng(seed);
  CorruptedCodeword out;
  out.values = codeword;
  const Index len = codeword.size();
  if (how.mode == Corruption::Mode::ZeroK) {
    if (how.k < 0 || how.k > len) raise(ErrorCode::InvalidArgument, "corruption count exceeds codeword length");
    out.support = draw_distinct(iota_list(len), how.k, rng);
  } else {
    if (!(how.rate >= 0.0 && how.rate <= 1.0)) raise(ErrorCode::InvalidArgument, "corruption rate must lie in [0, 1]");
    for (Index i = 0; i < len; ++i) {
      if (rng.bernoulli(how.rate)) out.support.push_back(i);
    }
  }
  std::sort(out.support.begin(), out.support.end());
  for (Index i : out.support) out.values(i) = 0.0;
  return out;
}

namespace {

class PgmScanner {
 public:
  PgmScanner(std::string_view bytes, const std::string& origin) : b_(bytes), origin_(origin) {}

  std::string token() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < b_.size() && !is_space(b_[pos_]) && b_[pos_] != '#') ++pos_;
    if (start == pos_) fail("unexpected end of header");
    return std::string(b_.substr(start, pos_ - start));
  }

  long number(const char* what) {
    const std::string t = token();
    long v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || v < 0) fail(std::string("bad ") + what + " '" + t + "'");
    return v;
  }

  // Binary payload starts after exactly one whitespace byte.
  std::string_view raster() {
    if (pos_ >= b_.size() || !is_space(b_[pos_])) fail("missing whitespace before raster");
    return b_.substr(pos_ + 1);
  }

  [[noreturn]] void fail(const std::string& msg) const { raise(ErrorCode::Io, origin_ + ": " + msg); }

 private:
  static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

  void skip_space() {
    while (pos_ < b_.size()) {
      if (is_space(b_[pos_])) {
        ++pos_;
      } else if (b_[pos_] == '#') {
        while (pos_ < b_.size() && b_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view b_;
  std::string origin_;
  std::size_t pos_ = 0;
};

}  // namespace

Matrix parse_pgm(std::string_view bytes, const std::string& origin) {
  PgmScanner sc(bytes, origin);
  const std::string magic = sc.token();
  if (magic != "P2" && magic != "P5") sc.fail("not a PGM file (magic '" + magic + "')");
  const long width = sc.number("width");
  const long height = sc.number("height");
  const long maxval = sc.number("maxval");
  if (width < 1 || height < 1) sc.fail("empty image");
  if (maxval < 1 || maxval > 65535) sc.fail("maxval out of range");
  Matrix img(height, width);
  if (magic == "P2") {
    for (long r = 0; r < height; ++r) {
      for (long c = 0; c < width; ++c) {
        const long v = sc.number("pixel");
        if (v > maxval) sc.fail("pixel exceeds maxval");
        img(r, c) = static_cast<double>(v);
      }
    }
    return img;
  }
  const std::string_view raw = sc.raster();
  const std::size_t bpp = maxval < 256 ? 1 : 2;
  const std::size_t need = static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * bpp;
  if (raw.size() < need) sc.fail("raster truncated: need " + std::to_string(need) + " bytes, have " + std::to_string(raw.size()));
  std::size_t at = 0;
  for (long r = 0; r < height; ++r) {
    for (long c = 0; c < width; ++c) {
      unsigned v = static_cast<unsigned char>(raw[at++]);
      if (bpp == 2) v = (v << 8) | static_cast<unsigned char>(raw[at++]);
      img(r, c) = static_cast<double>(v);
    }
  }
  return img;
}

Matrix read_pgm(const std::string& path) { return parse_pgm(read_file(path), path); }

std::uint64_t parse_seed(std::string_view text) {
  int base = 10;
  std::string_view digits = text;
  if (digits.size() > 2 && digits[0] == '0' && (digits[1] == 'x' || digits[1] == 'X')) {
    base = 16;
    digits.remove_prefix(2);
  }
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v, base);
  if (digits.empty() || ec != std::errc() || ptr != digits.data() + digits.size()) {
    raise(ErrorCode::Config, "seed: expected a decimal or 0x-hex 64-bit integer, got '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace l1h
