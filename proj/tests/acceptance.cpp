// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Usage: acceptance [--jobs J] [--seed S] [--only AC4,AC5]
#include "l1h/bench.hpp"
#include "l1h/bpdn.hpp"
#include "l1h/dantzig.hpp"
#include "l1h/decode.hpp"
#include "l1h/dynamic_seq.hpp"
#include "l1h/dynamic_x.hpp"
#include "l1h/error.hpp"
#include "l1h/oracle.hpp"
#include "l1h/problems.hpp"
#include "l1h/rng.hpp"
#include "l1h/robust_decode.hpp"
#include "l1h/selftest.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace l1h;

namespace {

struct Options {
  long jobs = 1;
  std::uint64_t seed = 7;
  std::set<std::string> only;
};

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Matrix randn(Index rows, Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

Vector randn(Index n, Rng& rng) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = rng.normal();
  return v;
}

double inf_norm(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// ---- AC1 ----

Outcome ac1(const Options& o) {
  struct Case {
    bench::Kind kind;
    Index n, m, k, p;
  };
  const Case cases[] = {{bench::Kind::DynamicXBpdn, 64, 32, 6, 1},   {bench::Kind::DynamicXDs, 64, 32, 6, 1},
                        {bench::Kind::DynamicSeqBpdn, 64, 32, 6, 1}, {bench::Kind::DynamicSeqDs, 64, 32, 6, 1},
                        {bench::Kind::Decode, 24, 64, 8, 4},         {bench::Kind::RobustDecode, 24, 64, 8, 4}};
  Outcome out{true, ""};
  for (const Case& c : cases) {
    bench::ExperimentConfig cfg;
    cfg.kind = c.kind;
    cfg.n = c.n;
    cfg.m = c.m;
    cfg.k = c.k;
    cfg.p = c.p;
    cfg.lambda = 0.1;
    cfg.trials = 200;
    cfg.seed = derive_seed(o.seed, 0xac1 + static_cast<std::uint64_t>(c.kind));
    cfg.jobs = o.jobs;
    const auto t0 = std::chrono::steady_clock::now();
    const bench::ExperimentReport r = bench::run_experiment(cfg);
    const double secs = seconds_since(t0);
    double gap = 0.0;
    Index bad = 0;
    for (const auto& t : r.records) {
      gap = std::max(gap, t.warm_cold_gap);
      if (t.flagged || !(t.warm_cold_gap <= 1e-7)) ++bad;
    }
    const bool ok = bad == 0 && secs < 60.0;
    out.pass = out.pass && ok;
    out.detail += std::string(" ") + bench::kind_name(c.kind) + ":" + (ok ? "ok" : "BAD") + "(gap " +
                  fmt("%.1e", gap) + ", bad " + std::to_string(bad) + ", " + fmt("%.1fs", secs) + ")";
  }
  return out;
}

// ---- AC2 / AC3 ----

Outcome suites(const std::vector<selftest::SuiteResult>& rs) {
  Outcome out{true, ""};
  for (const auto& r : rs) {
    out.pass = out.pass && r.ok();
    out.detail += " " + r.name + " " + std::to_string(r.passed) + "/" + std::to_string(r.total) + " worst " +
                  fmt("%.1e", r.worst);
    if (!r.ok()) out.detail += " [" + r.first_failure + "]";
  }
  return out;
}

Outcome ac2(const Options& o) { return suites({selftest::kkt_mixed(500, derive_seed(o.seed, 0xac2))}); }

Outcome ac3(const Options& o) {
  return suites({selftest::bpdn_oracle(200, derive_seed(o.seed, 0xac31)),
                 selftest::ds_oracle(100, derive_seed(o.seed, 0xac32)),
                 selftest::decode_oracle(100, derive_seed(o.seed, 0xac33))});
}

// ---- AC4 / AC5 ----

Outcome table_reproduction(const Options& o, const std::string& table, const double (&reference)[4]) {
  std::vector<bench::ExperimentConfig> rows = bench::table_preset(table, "full", 500, o.seed);
  rows.erase(std::remove_if(rows.begin(), rows.end(),
                            [](const bench::ExperimentConfig& c) { return c.signal != bench::Signal::Spikes; }),
             rows.end());
  Outcome out{rows.size() == 4, ""};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].jobs = o.jobs;
    const bench::ExperimentReport r = bench::run_experiment(rows[i]);
    const double warm = r.warm_products.mean;
    const double cold = r.cold_products.mean;
    const double rel = warm / reference[i] - 1.0;
    const bool within = std::abs(rel) <= 0.30;
    const bool below = warm < cold;
    const bool ok = within && below && r.ok();
    out.pass = out.pass && ok;
    out.detail += " lambda=" + fmt("%g", rows[i].lambda) + ":" + (ok ? "ok" : "BAD") + "(warm " + fmt("%.2f", warm) +
                  " vs " + fmt("%.2f", reference[i]) + " " + fmt("%+.0f%%", 100.0 * rel) + ", cold " + fmt("%.2f", cold) +
                  ", flagged " + std::to_string(r.flagged) + ")";
  }
  return out;
}

Outcome ac4(const Options& o) {
  static const double reference[4] = {11.84, 12.9, 14.56, 23.72};
  return table_reproduction(o, "tableI", reference);
}

Outcome ac5(const Options& o) {
  static const double reference[4] = {2.43, 4.27, 5.57, 8.3};
  return table_reproduction(o, "tableII", reference);
}

// ---- AC6 ----

Outcome ac6(const Options& o) {
  std::vector<bench::ExperimentConfig> rows = bench::table_preset("tableIII", "desk", 50, o.seed);
  Outcome out{true, ""};
  double p1 = -1.0, p10 = -1.0;
  for (auto& cfg : rows) {
    cfg.jobs = o.jobs;
    const bench::ExperimentReport r = bench::run_experiment(cfg);
    const double warm = r.warm_steps.mean, cold = r.cold_steps.mean;
    const bool ok = warm < cold && r.ok();
    out.pass = out.pass && ok;
    if (cfg.p == 1) p1 = warm;
    if (cfg.p == 10) p10 = warm;
    out.detail += " p=" + std::to_string(cfg.p) + ":" + (ok ? "ok" : "BAD") + "(warm " + fmt("%.2f", warm) + ", cold " +
                  fmt("%.2f", cold) + ")";
  }
  const bool sublinear = p1 > 0.0 && p10 >= 0.0 && p10 < 10.0 * p1;
  out.pass = out.pass && sublinear;
  out.detail += " p10/p1=" + fmt("%.2f", p1 > 0.0 ? p10 / p1 : NAN);
  return out;
}

// ---- AC7 ----

Outcome ac7(const Options& o) {
  Index exact = 0, certified = 0;
  double worst = 0.0;
  for (Index t = 0; t < 100; ++t) {
    bench::PipelineConfig cfg;
    cfg.n = 64;
    cfg.m = 128;
    cfg.errors = 26;  // round(0.2 m)
    cfg.seed = derive_seed(derive_seed(o.seed, 0xac7), static_cast<std::uint64_t>(t));
    try {
      const bench::PipelineResult r = bench::decode_pipeline(cfg);
      worst = std::max(worst, r.max_error);
      if (r.max_error <= 1e-6) ++exact;
      if (r.kkt_pass) ++certified;
    } catch (const Error&) {
    }
  }
  // Certified trials are l1 minimizers whether or not they equal the message.
  return {exact >= 99, " exact " + std::to_string(exact) + "/100, l1-optimal (KKT) " + std::to_string(certified) +
                           "/100, worst error " + fmt("%.1e", worst)};
}

// ---- AC8 ----

struct Tally {
  Index total = 0, failed = 0;
  double worst = 0.0;
  std::string first;

  void check(bool ok, double value, const std::string& what) {
    ++total;
    worst = std::max(worst, value);
    if (!ok) {
      if (failed == 0) first = what;
      ++failed;
    }
  }
  std::string str(const std::string& name) const {
    std::string s = " " + name + " " + std::to_string(total - failed) + "/" + std::to_string(total);
    if (failed) s += " [" + first + "]";
    return s;
  }
};

// Steps must move epsilon (or tau) one way only.
bool monotone(const std::vector<double>& params, int direction, double start) {
  double prev = start;
  for (double v : params) {
    if (direction > 0 ? v < prev : v > prev) return false;
    prev = v;
  }
  return true;
}

IndexList oracle_support(const Matrix& a, const Vector& y, double tau) {
  const Vector x = oracle::bpdn_brute(a, y, tau);
  const double cut = 1e-9 * std::max(1.0, inf_norm(x));
  IndexList s;
  for (Index j = 0; j < x.size(); ++j)
    if (std::abs(x(j)) > cut) s.push_back(j);
  return s;
}

Index symmetric_difference(const IndexList& a, const IndexList& b) {
  IndexList out;
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return static_cast<Index>(out.size());
}

Outcome ac8(const Options& o) {
  Rng rng(derive_seed(o.seed, 0xac8));
  Tally eps, change, dual, proj, wave, rls;

  // Path properties on small BPDN and DS instances with their warm updates.
  for (int t = 0; t < 60; ++t) {
    const Index n = 4 + static_cast<Index>(rng.below(6)), m = 3 + static_cast<Index>(rng.below(5));
    const Matrix a = randn(m, n, rng);
    const Vector y = randn(m, rng);
    const double tmax = inf_norm(a.transpose() * y);
    const double tau = (0.05 + 0.5 * rng.uniform()) * tmax;
    const std::string tag = "trial " + std::to_string(t);

    MatrixOperator op(a);
    HomotopyTrace tr;
    const BpdnState st = solve_bpdn(op, y, tau, &tr);
    eps.check(monotone(tr.params, -1, tmax), 0.0, tag + " cold bpdn");

    // Supports strictly between consecutive breakpoints, from the oracle.
    std::vector<double> knots{tmax};
    knots.insert(knots.end(), tr.params.begin(), tr.params.end());
    IndexList prev;
    for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
      if (!(knots[k] - knots[k + 1] > 1e-9 * tmax)) continue;
      const IndexList s = oracle_support(a, y, 0.5 * (knots[k] + knots[k + 1]));
      const Index diff = symmetric_difference(prev, s);
      change.check(diff == 1, 0.0, tag + " step " + std::to_string(k) + " changed " + std::to_string(diff));
      prev = s;
    }

    const Vector xi = -(a.transpose() * (a * st.x - y)) / tau;
    dual.check(inf_norm(xi) <= 1.0 + 1e-9, inf_norm(xi) - 1.0, tag + " bpdn dual");

    const Vector y2 = y + 0.3 * randn(m, rng);
    HomotopyTrace tx;
    const BpdnState moved = update_bpdn_signal(st, op, y, y2, &tx);
    eps.check(monotone(tx.params, 1, 0.0), 0.0, tag + " dynamic-x bpdn");
    const Vector xi2 = -(a.transpose() * (a * moved.x - y2)) / tau;
    dual.check(inf_norm(xi2) <= 1.0 + 1e-9, inf_norm(xi2) - 1.0, tag + " dynamic-x dual");

    const RowVector b = randn(1, n, rng);
    HomotopyTrace ts;
    bpdn_add_measurement(st, op, y, b, rng.normal(), &ts);
    eps.check(monotone(ts.params, 1, 0.0), 0.0, tag + " dynamic-seq bpdn");

    if (n <= 6) {
      const DsState ds = solve_ds(a, y, tau);
      const double lam = inf_norm(a.transpose() * (a * ds.lambda));
      dual.check(lam <= 1.0 + 1e-9, lam - 1.0, tag + " ds dual");
    }
  }

  // Decoding duals.
  for (int t = 0; t < 30; ++t) {
    const Index n = 3 + static_cast<Index>(rng.below(5)), m = 3 * n;
    const Matrix f = randn(m, n, rng);
    Vector s = f * randn(n, rng);
    for (Index i = 0; i < n / 2 + 1; ++i) s(static_cast<Index>(rng.below(static_cast<std::uint64_t>(m)))) += 3.0;
    const DecodeState d = decode_init(f, s);
    dual.check(inf_norm(d.xi) <= 1.0 + 1e-9, inf_norm(d.xi) - 1.0, "decode " + std::to_string(t));

    const Matrix q = Eigen::HouseholderQR<Matrix>(f).householderQ() * Matrix::Identity(m, n);
    const double tau = 0.05;
    const RobustState r = robust_init(q, s, tau);
    // Independent null-space projector from QR.
    const Matrix p = Matrix::Identity(m, m) - q * q.transpose();
    const double rx = inf_norm(p * (s - r.c)) / tau;
    dual.check(rx <= 1.0 + 1e-9, rx - 1.0, "robust " + std::to_string(t));
  }

  // Projector identities, built whole and grown row by row.
  for (int t = 0; t < 30; ++t) {
    const Index n = 2 + static_cast<Index>(rng.below(8)), m = n + 2 + static_cast<Index>(rng.below(20));
    const Matrix f = randn(m + 3, n, rng);
    NullProjector np = null_projector(f.topRows(m));
    for (Index i = m; i < m + 3; ++i) np = projector_append(np, f.topRows(i), f.row(i));
    const NullProjector direct = null_projector(f);
    for (const NullProjector* x : std::vector<const NullProjector*>{&np, &direct}) {
      const double pf = inf_norm(x->p * f);
      const double idem = inf_norm(x->p * x->p - x->p);
      proj.check(pf <= 1e-9 && idem <= 1e-9, std::max(pf, idem), "projector " + std::to_string(t));
    }
  }

  for (WaveletFamily fam : {WaveletFamily::Haar, WaveletFamily::Daub8}) {
    for (Index n : {16, 64, 256, 1024}) {
      const Matrix w = wavelet_synthesis_matrix(n, fam);
      const double err = inf_norm(w.transpose() * w - Matrix::Identity(n, n));
      wave.check(err <= 1e-12, err, "wavelet n=" + std::to_string(n));
    }
  }

  for (int t = 0; t < 50; ++t) {
    const Index n = 1 + static_cast<Index>(rng.below(10)), m = n + 1 + static_cast<Index>(rng.below(10));
    const Index extra = 1 + static_cast<Index>(rng.below(8));
    const Matrix a = randn(m + extra, n, rng);
    const Vector y = randn(m + extra, rng);
    LsState s = ls_solve(a.topRows(m), y.head(m));
    for (Index i = m; i < m + extra; ++i) s = rls_append(s, a.row(i), y(i));
    const Vector direct = a.colPivHouseholderQr().solve(y);
    const double err = inf_norm(s.estimate - direct);
    rls.check(err <= 1e-8, err, "rls " + std::to_string(t));
  }

  const Tally* all[] = {&eps, &change, &dual, &proj, &wave, &rls};
  Outcome out{true, ""};
  const char* names[] = {"epsilon-monotone", "one-change-per-step", "dual-feasible", "projector", "wavelet", "rls"};
  for (int i = 0; i < 6; ++i) {
    out.pass = out.pass && all[i]->failed == 0;
    out.detail += all[i]->str(names[i]);
  }
  out.detail += " (worst projector " + fmt("%.1e", proj.worst) + ", wavelet " + fmt("%.1e", wave.worst) + ", rls " +
                fmt("%.1e", rls.worst) + ")";
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  o.jobs = std::max(1u, std::thread::hardware_concurrency());
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--jobs" && i + 1 < argc) {
      o.jobs = std::atol(argv[++i]);
    } else if (arg == "--seed" && i + 1 < argc) {
      o.seed = parse_seed(argv[++i]);
    } else if (arg == "--only" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      std::string item;
      while (std::getline(ss, item, ',')) o.only.insert(item);
    } else {
      std::fprintf(stderr, "usage: acceptance [--jobs J] [--seed S] [--only AC1,AC2,...]\n");
      return 2;
    }
  }

  const std::pair<const char*, std::function<Outcome(const Options&)>> criteria[] = {
      {"AC1 warm/cold equivalence", ac1}, {"AC2 KKT certificates", ac2},  {"AC3 oracle equivalence", ac3},
      {"AC4 Table I reproduction", ac4},  {"AC5 Table II reproduction", ac5}, {"AC6 Table III trend", ac6},
      {"AC7 exact l1 decoding", ac7},     {"AC8 property suite", ac8}};

  int failed = 0;
  for (const auto& [name, run] : criteria) {
    const std::string id(name, 3);
    if (!o.only.empty() && !o.only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome r;
    try {
      r = run(o);
    } catch (const std::exception& e) {
      r = {false, std::string(" error: ") + e.what()};
    }
    if (!r.pass) ++failed;
    std::printf("%s %s:%s [%.1fs]\n", r.pass ? "PASS" : "FAIL", name, r.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
