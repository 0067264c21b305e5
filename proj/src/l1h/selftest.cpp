#include "l1h/selftest.hpp"

#include "l1h/decode.hpp"
#include "l1h/dynamic_seq.hpp"
#include "l1h/dynamic_x.hpp"
#include "l1h/error.hpp"
#include "l1h/oracle.hpp"
#include "l1h/problems.hpp"
#include "l1h/robust_decode.hpp"
#include "l1h/rng.hpp"

#include <cmath>
#include <functional>

namespace l1h::selftest {
namespace {

Matrix randn(Index rows, Index cols, Rng& rng, double sigma = 1.0) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = sigma * rng.normal();
  return m;
}

Vector randn(Index n, Rng& rng, double sigma = 1.0) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = sigma * rng.normal();
  return v;
}

Index between(Rng& rng, Index lo, Index hi) {
  return lo + static_cast<Index>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
}

double inf_norm(const Vector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

double tau_for(const Matrix& a, const Vector& y, Rng& rng) {
  return rng.uniform(0.05, 0.9) * inf_norm(a.transpose() * y);
}

constexpr double kMatch = 1e-7;

// One instance outcome: >= 0 discrepancy to compare against a tolerance,
// or skipped when the oracle refuses a degenerate draw.
struct Outcome {
  double gap = 0.0;
  bool pass = true;
  bool skipped = false;
  std::string why;
};

SuiteResult run_suite(const std::string& name, Index count, std::uint64_t seed,
                      const std::function<Outcome(Rng&, Index)>& one) {
  SuiteResult r;
  r.name = name;
  Index draws = 0;
  while (r.total < count && draws < 4 * count + 10) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(draws)));
    ++draws;
    Outcome o;
    try {
      o = one(rng, r.total);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NoCertifiedSolution) {
        ++r.skipped;
        continue;
      }
      o.pass = false;
      o.why = std::string(error_code_name(e.code())) + ": " + e.what();
    }
    if (o.skipped) {
      ++r.skipped;
      continue;
    }
    ++r.total;
    r.worst = std::max(r.worst, o.gap);
    if (o.pass) {
      ++r.passed;
    } else if (r.first_failure.empty()) {
      r.first_failure = "instance " + std::to_string(draws - 1) + ": " + o.why;
    }
  }
  return r;
}

double kkt_violation(const KktReport& k, double tau) {
  const double t = std::max(tau, 1e-300);
  double v = std::max(k.support_violation / t, k.off_support_max / t - 1.0);
  v = std::max(v, std::max(k.dual_support_violation, k.dual_off_support_max - 1.0));
  return std::max(v, 0.0);
}

Outcome from_kkt(const KktReport& k, double tau, const char* what) {
  Outcome o;
  o.gap = kkt_violation(k, tau);
  o.pass = k.pass;
  if (!o.pass) o.why = std::string(what) + " certificate fails";
  return o;
}

Outcome from_decode_kkt(const DecodeKkt& k, const char* what) {
  Outcome o;
  o.gap = std::max({k.residual_mismatch, k.dual_max - 1.0, k.sign_mismatch, k.balance, 0.0});
  o.pass = k.pass;
  if (!o.pass) o.why = std::string(what) + " certificate fails";
  return o;
}

Outcome compare(const Vector& got, const Vector& ref) {
  Outcome o;
  o.gap = inf_norm(got - ref);
  o.pass = o.gap <= kMatch * std::max(1.0, inf_norm(ref));
  if (!o.pass) o.why = "l_inf gap " + std::to_string(o.gap);
  return o;
}

// Small spike instance for the certificate suite.
struct Spikes {
  Matrix a;
  Vector x, y;
};

Spikes spikes(Rng& rng) {
  Spikes s;
  const Index n = between(rng, 16, 48);
  const Index m = between(rng, n / 2, n);
  const Index k = between(rng, 1, std::max<Index>(1, m / 4));
  s.a = randn(m, n, rng, 1.0 / std::sqrt(static_cast<double>(m)));
  s.x = spike_signal(n, k, rng());
  s.y = s.a * s.x + randn(m, rng, 0.01);
  return s;
}

Outcome kkt_case(Rng& rng, Index index) {
  switch (index % 8) {
    case 0: {
      const Spikes s = spikes(rng);
      const double tau = tau_for(s.a, s.y, rng);
      return from_kkt(bpdn_kkt(s.a, s.y, tau, solve_bpdn(s.a, s.y, tau).x), tau, "cold BPDN");
    }
    case 1: {
      const Spikes s = spikes(rng);
      const double tau = tau_for(s.a, s.y, rng);
      const DsState st = solve_ds(s.a, s.y, tau);
      return from_kkt(ds_kkt(s.a, s.y, tau, st.x, st.lambda), tau, "cold DS");
    }
    case 2: {
      const Spikes s = spikes(rng);
      const double tau = tau_for(s.a, s.y, rng);
      const Vector x2 = perturb_spikes(s.x, between(rng, 0, 2), rng());
      const Vector y2 = s.a * x2 + randn(s.a.rows(), rng, 0.01);
      const MatrixOperator op(s.a);
      const BpdnState st = update_bpdn_signal(solve_bpdn(op, s.y, tau), op, s.y, y2);
      return from_kkt(bpdn_kkt(s.a, y2, tau, st.x), tau, "dynamic signal BPDN");
    }
    case 3: {
      const Spikes s = spikes(rng);
      const double tau = tau_for(s.a, s.y, rng);
      const Vector x2 = perturb_spikes(s.x, between(rng, 0, 2), rng());
      const Vector y2 = s.a * x2 + randn(s.a.rows(), rng, 0.01);
      const MatrixOperator op(s.a);
      const DsState st = update_ds_signal(solve_ds(op, s.y, tau), op, s.y, y2);
      return from_kkt(ds_kkt(s.a, y2, tau, st.x, st.lambda), tau, "dynamic signal DS");
    }
    case 4: {
      const Spikes s = spikes(rng);
      const double tau = tau_for(s.a, s.y, rng);
      const Index p = between(rng, 1, 3);
      const Matrix b = randn(p, s.a.cols(), rng, 1.0 / std::sqrt(static_cast<double>(s.a.rows())));
      const Vector w = b * s.x + randn(p, rng, 0.01);
      const BpdnState st = bpdn_add_measurements(solve_bpdn(s.a, s.y, tau), s.a, s.y, b, w);
      Matrix a2(s.a.rows() + p, s.a.cols());
      a2 << s.a, b;
      Vector y2(s.y.size() + p);
      y2 << s.y, w;
      return from_kkt(bpdn_kkt(a2, y2, tau, st.x), tau, "sequential BPDN");
    }
    case 5: {
      const Spikes s = spikes(rng);
      const double tau = tau_for(s.a, s.y, rng);
      const RowVector b = randn(1, s.a.cols(), rng, 1.0 / std::sqrt(static_cast<double>(s.a.rows())));
      const double w = b.dot(s.x) + 0.01 * rng.normal();
      const MatrixOperator op(s.a);
      const DsState st = ds_add_measurement(solve_ds(op, s.y, tau), op, s.y, b, w);
      Matrix a2(s.a.rows() + 1, s.a.cols());
      a2 << s.a, b;
      Vector y2(s.y.size() + 1);
      y2 << s.y, w;
      return from_kkt(ds_kkt(a2, y2, tau, st.x, st.lambda), tau, "sequential DS");
    }
    case 6: {
      const Index n = between(rng, 4, 16);
      const Index m = between(rng, n + 2, 3 * n);
      const Index p = between(rng, 1, 4);
      const Matrix f = randn(m + p, n, rng);
      const Vector x = randn(n, rng);
      Corruption how;
      how.k = between(rng, 0, m / 4);
      const Vector s = corrupt_codeword(f * x, how, rng()).values + randn(m + p, rng, rng.bernoulli(0.5) ? 0.0 : 0.01);
      const DecodeState st = decode_add_measurements(decode_init(f.topRows(m), s.head(m)), f.bottomRows(p), s.tail(p));
      return from_decode_kkt(decode_kkt(st), "l1 decoding");
    }
    default: {
      const Index n = between(rng, 4, 8);
      const Index m = 5 * n;
      const Index p = between(rng, 1, 5);
      const Matrix f = orthonormal_columns(m, n, rng());
      const Vector x = randn(n, rng);
      Corruption how;
      how.k = m / 10;
      const Vector s = corrupt_codeword(f * x, how, rng()).values + randn(m, rng, 0.005);
      const Matrix b = randn(p, n, rng, 1.0 / std::sqrt(static_cast<double>(m)));
      Corruption bern;
      bern.mode = Corruption::Mode::Bernoulli;
      bern.rate = 0.1;
      const Vector w = corrupt_codeword(b * x, bern, rng()).values + randn(p, rng, 0.005);
      const RobustState st = robust_add_measurements(robust_init(f, s, 0.01), b, w);
      return from_kkt(robust_kkt(st), st.tau, "robust decoding");
    }
  }
}

}  // namespace

SuiteResult bpdn_oracle(Index count, std::uint64_t seed) {
  return run_suite("bpdn-vs-enumeration", count, seed, [](Rng& rng, Index) {
    const Index n = between(rng, 2, 10);
    const Index m = between(rng, std::max<Index>(2, n - 4), n + 2);
    const Matrix a = randn(m, n, rng);
    const Vector y = randn(m, rng);
    const double tau = tau_for(a, y, rng);
    const Vector ref = oracle::bpdn_brute(a, y, tau);
    return compare(solve_bpdn(a, y, tau).x, ref);
  });
}

SuiteResult ds_oracle(Index count, std::uint64_t seed) {
  return run_suite("ds-vs-enumeration", count, seed, [](Rng& rng, Index) {
    const Index n = between(rng, 2, 6);
    const Index m = between(rng, std::max<Index>(2, n - 1), n + 1);
    const Matrix a = randn(m, n, rng);
    const Vector y = randn(m, rng);
    const double tau = tau_for(a, y, rng);
    const oracle::DsSolution ref = oracle::ds_brute(a, y, tau);
    const DsState st = solve_ds(a, y, tau);
    Outcome o = compare(st.x, ref.x);
    const Outcome dual = compare(st.lambda, ref.lambda);
    o.gap = std::max(o.gap, dual.gap);
    if (!dual.pass) {
      o.pass = false;
      o.why = "dual " + dual.why;
    }
    return o;
  });
}

SuiteResult decode_oracle(Index count, std::uint64_t seed) {
  return run_suite("decode-vs-l1-regression", count, seed, [](Rng& rng, Index index) {
    const Index n = between(rng, 1, 6);
    const Index m = between(rng, n + 2, 14);
    const Matrix a = randn(m, n, rng);
    const Vector x = randn(n, rng);
    Vector y = a * x;
    const Index k = between(rng, 0, (m - n) / 2);
    for (Index e = 0; e < k; ++e) y(static_cast<Index>(rng.below(static_cast<std::uint64_t>(m)))) += 3.0 * rng.normal();
    y += randn(m, rng, rng.bernoulli(0.5) ? 0.0 : 0.1);
    const Vector ref = oracle::l1_regression_brute(a, y);
    DecodeState st;
    if (index % 2 == 0 || m - n < 3) {
      st = decode_init(a, y);
    } else {
      const Index p = between(rng, 1, m - n - 2);
      st = decode_add_measurements(decode_init(a.topRows(m - p), y.head(m - p)), a.bottomRows(p), y.tail(p));
    }
    Outcome o = compare(st.x, ref);
    if (o.pass && !decode_kkt(st).pass) {
      o.pass = false;
      o.why = "certificate fails";
    }
    return o;
  });
}

SuiteResult kkt_mixed(Index count, std::uint64_t seed) { return run_suite("kkt-certificates", count, seed, kkt_case); }

std::vector<SuiteResult> run_all(const Counts& counts, std::uint64_t seed) {
  return {bpdn_oracle(counts.bpdn, derive_seed(seed, 1)), ds_oracle(counts.ds, derive_seed(seed, 2)),
          decode_oracle(counts.decode, derive_seed(seed, 3)), kkt_mixed(counts.kkt, derive_seed(seed, 4))};
}

}  // namespace l1h::selftest
