#pragma once

#include "l1h/linalg.hpp"

#include <cstdint>
#include <string>
#include <string_view>

namespace l1h {

struct ProblemInstance {
  Matrix a;
  Vector x_true;
  Vector y;  // a * x_true + noise
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

// iid N(0, 1/m) entries.
Matrix gaussian_matrix(Index m, Index n, std::uint64_t seed);
// Gaussian matrix with orthonormalized columns (m >= n).
Matrix orthonormal_columns(Index m, Index n, std::uint64_t seed);

// +-1 spikes at K distinct random positions.
Vector spike_signal(Index n, Index k, std::uint64_t seed);
// Adds N(0, 0.1^2) to every nonzero and kn new N(0, 1) entries off the
// current support.
Vector perturb_spikes(const Vector& x, Index kn, std::uint64_t seed);

// Spike instance y = A x + N(0, sigma^2) with a Gaussian A.
ProblemInstance spike_instance(Index m, Index n, Index k, double sigma, std::uint64_t seed);

// Piecewise-constant signal on the canonical breakpoints. Seed 0 returns
// the canonical levels; any other seed scales each level by U[0.8, 1.2].
Vector blocks_signal(Index n, std::uint64_t seed = 0);
// Piecewise cubic on the canonical breakpoints. A nonzero seed adds
// N(0, 0.05^2) to every polynomial coefficient.
Vector pcwpoly_signal(Index n, std::uint64_t seed = 0);

enum class WaveletFamily { Haar, Daub8 };

WaveletFamily parse_wavelet(std::string_view name);
// Periodized orthonormal DWT down to one scaling coefficient. Output
// layout: scaling coefficient first, then detail bands coarse to fine.
Vector wavelet_analysis(const Vector& signal, WaveletFamily family);
Vector wavelet_synthesis(const Vector& coefficients, WaveletFamily family);
// Explicit synthesis matrix W^T (columns are the basis functions).
Matrix wavelet_synthesis_matrix(Index n, WaveletFamily family);

struct Corruption {
  enum class Mode { ZeroK, Bernoulli } mode = Mode::ZeroK;
  Index k = 0;
  double rate = 0.0;
};

struct CorruptedCodeword {
  Vector values;
  IndexList support;  // sorted corrupted positions
};

// Corrupted entries are set to zero.
CorruptedCodeword corrupt_codeword(const Vector& codeword, const Corruption& how, std::uint64_t seed);

// Plain PGM, ASCII (P2) or binary (P5), 8 or 16 bit. Rows of the result
// are image rows.
Matrix read_pgm(const std::string& path);
Matrix parse_pgm(std::string_view bytes, const std::string& origin = "<memory>");

// Decimal or 0x-prefixed hexadecimal 64-bit seed; throws Config.
std::uint64_t parse_seed(std::string_view text);

}  // namespace l1h
