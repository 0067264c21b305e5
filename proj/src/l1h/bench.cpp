#include "l1h/bench.hpp"

#include "l1h/decode.hpp"
#include "l1h/dynamic_seq.hpp"
#include "l1h/dynamic_x.hpp"
#include "l1h/error.hpp"
#include "l1h/problems.hpp"
#include "l1h/robust_decode.hpp"
#include "l1h/rng.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <memory>
#include <sstream>
#include <thread>

namespace l1h::bench {

Vector CountingMatrix::apply(const Vector& x) const {
  ++forward_;
  return MatrixOperator::apply(x);
}

Vector CountingMatrix::apply_sparse(const Vector& x, const IndexList& support) const {
  ++forward_;
  return MatrixOperator::apply_sparse(x, support);
}

Vector CountingMatrix::apply_transpose(const Vector& r) const {
  ++adjoint_;
  return MatrixOperator::apply_transpose(r);
}

namespace {

struct KindName {
  Kind kind;
  const char* name;
};

constexpr KindName kKinds[] = {
    {Kind::DynamicXBpdn, "dynamic-x-bpdn"}, {Kind::DynamicXDs, "dynamic-x-ds"},
    {Kind::DynamicSeqBpdn, "dynamic-seq-bpdn"}, {Kind::DynamicSeqDs, "dynamic-seq-ds"},
    {Kind::Decode, "decode"}, {Kind::RobustDecode, "robust-decode"},
};

struct SignalName {
  Signal signal;
  const char* name;
};

constexpr SignalName kSignals[] = {
    {Signal::Spikes, "spikes"}, {Signal::Blocks, "blocks"}, {Signal::PcwPoly, "pcwpoly"}, {Signal::Pgm, "slices"}};

bool power_of_two(Index n) { return n > 0 && (n & (n - 1)) == 0; }

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
  raise(ErrorCode::Config, "experiment config: " + field + " " + why);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double inf_norm(const Vector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

Vector randn(Index n, Rng& rng, double sigma = 1.0) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = sigma * rng.normal();
  return v;
}

Matrix randn_rows(Index rows, Index cols, Rng& rng, double sigma) {
  Matrix b(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) b(i, j) = sigma * rng.normal();
  return b;
}

Matrix stack(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() + b.rows(), a.cols());
  out << a, b;
  return out;
}

Vector stack(const Vector& a, const Vector& b) {
  Vector out(a.size() + b.size());
  out << a, b;
  return out;
}

// Piecewise smooth stand-in image: a shaded background, a slanted edge that
// drifts from column to column, and a bright disc.
Matrix synthetic_image(Index rows, Index cols) {
  Matrix img(rows, cols);
  const double r = static_cast<double>(rows);
  const double c = static_cast<double>(cols);
  for (Index j = 0; j < cols; ++j) {
    const double edge = 0.3 * r + 0.08 * r * std::sin(6.0 * static_cast<double>(j) / c);
    for (Index i = 0; i < rows; ++i) {
      const double di = static_cast<double>(i);
      const double dj = static_cast<double>(j);
      double v = 60.0 + 40.0 * di / r;
      if (di < edge) v += 70.0;
      const double dx = di - 0.65 * r;
      const double dy = dj - 0.5 * c;
      if (dx * dx + dy * dy < 0.04 * r * c) v += 90.0 - 30.0 * (dx / r);
      img(i, j) = v;
    }
  }
  return img;
}

// Data shared by every trial of a wavelet-domain experiment: one
// measurement matrix, composed with the synthesis operator once.
struct Shared {
  Matrix a_eff;
  Matrix image;
  WaveletFamily family = WaveletFamily::Haar;
};

std::shared_ptr<const Shared> make_shared_context(const ExperimentConfig& cfg) {
  if (cfg.signal == Signal::Spikes) return nullptr;
  auto ctx = std::make_shared<Shared>();
  ctx->family = cfg.signal == Signal::PcwPoly ? WaveletFamily::Daub8 : WaveletFamily::Haar;
  if (cfg.signal == Signal::Pgm) {
    ctx->image = cfg.image.empty() ? synthetic_image(cfg.n, cfg.n) : read_pgm(cfg.image);
    if (ctx->image.rows() != cfg.n)
      bad_field("n", "must equal the image height " + std::to_string(ctx->image.rows()));
    if (ctx->image.cols() < 2) bad_field("image", "needs at least two columns");
  }
  const Matrix a = gaussian_matrix(cfg.m, cfg.n, derive_seed(cfg.seed, 0x5eed));
  ctx->a_eff = a * wavelet_synthesis_matrix(cfg.n, ctx->family);
  return ctx;
}

// Consecutive pair of signals (in coefficient form) for one trial.
std::pair<Vector, Vector> signal_pair(const ExperimentConfig& cfg, const Shared& ctx, Index trial,
                                      std::uint64_t ts) {
  Vector before, after;
  switch (cfg.signal) {
    case Signal::Blocks:
      before = blocks_signal(cfg.n, derive_seed(ts, 1) | 1);
      after = blocks_signal(cfg.n, derive_seed(ts, 2) | 1);
      break;
    case Signal::PcwPoly:
      before = pcwpoly_signal(cfg.n, derive_seed(ts, 1) | 1);
      after = pcwpoly_signal(cfg.n, derive_seed(ts, 2) | 1);
      break;
    case Signal::Pgm: {
      const Index col = trial % (ctx.image.cols() - 1);
      before = ctx.image.col(col);
      after = ctx.image.col(col + 1);
      break;
    }
    case Signal::Spikes:
      break;
  }
  return {wavelet_analysis(before, ctx.family), wavelet_analysis(after, ctx.family)};
}

struct Arm {
  Index steps = 0;
  double products = 0.0;
  double counted = std::numeric_limits<double>::quiet_NaN();
  double seconds = 0.0;
  bool lucky = false;
};

// Runs body, filling steps/products from the trace and the observed count
// from counter when one is supplied.
template <typename F>
auto timed(const ExperimentConfig& cfg, Arm& arm, CountingMatrix* counter, F&& body) {
  HomotopyTrace tr;
  if (counter) counter->reset();
  const auto t0 = std::chrono::steady_clock::now();
  auto result = body(tr);
  if (cfg.timing) arm.seconds += seconds_since(t0);
  arm.steps += tr.iterations();
  arm.products += tr.products;
  arm.lucky = tr.lucky_breakdown;
  if (counter) arm.counted = (std::isnan(arm.counted) ? 0.0 : arm.counted) + counter->products();
  return result;
}

void finish(TrialRecord& rec, const Arm& warm, const Arm& cold) {
  rec.warm_steps = warm.steps;
  rec.cold_steps = cold.steps;
  rec.warm_products = warm.products;
  rec.cold_products = cold.products;
  rec.warm_counted = warm.counted;
  rec.cold_counted = cold.counted;
  rec.warm_seconds = warm.seconds;
  rec.cold_seconds = cold.seconds;
  rec.lucky_breakdown = warm.lucky;
  if (!std::isnan(warm.counted)) {
    rec.counts_agree = warm.counted == warm.products && cold.counted == cold.products;
  }
}

constexpr double kGapTolerance = 1e-7;

void judge(TrialRecord& rec, double scale) {
  if (rec.warm_cold_gap > kGapTolerance * std::max(1.0, scale)) {
    rec.flagged = true;
    rec.note = "warm and cold solutions differ";
  } else if (!rec.kkt_pass) {
    rec.flagged = true;
    rec.note = "warm solution fails its optimality certificate";
  } else if (!rec.counts_agree) {
    rec.flagged = true;
    rec.note = "trace and counter disagree on products";
  }
}

// Old and new observations for the signal-update kinds.
struct SignalPair {
  Matrix a;  // empty when the shared matrix is used
  Vector y_old, y_new, x_new;
};

SignalPair signal_update_data(const ExperimentConfig& cfg, const Shared* ctx, Index trial, std::uint64_t ts) {
  SignalPair d;
  Rng noise(derive_seed(ts, 3));
  if (cfg.signal == Signal::Spikes) {
    d.a = gaussian_matrix(cfg.m, cfg.n, derive_seed(ts, 0));
    const Vector x = spike_signal(cfg.n, cfg.k, derive_seed(ts, 1));
    Rng pick(derive_seed(ts, 2));
    const Index kn = static_cast<Index>(pick.below(static_cast<std::uint64_t>(cfg.k / 20 + 1)));
    d.x_new = perturb_spikes(x, kn, derive_seed(ts, 4));
    d.y_old = d.a * x + randn(cfg.m, noise, cfg.sigma);
  } else {
    auto [before, after] = signal_pair(cfg, *ctx, trial, ts);
    d.x_new = after;
    d.y_old = ctx->a_eff * before + randn(cfg.m, noise, cfg.sigma);
  }
  const Matrix& a = cfg.signal == Signal::Spikes ? d.a : ctx->a_eff;
  d.y_new = a * d.x_new + randn(cfg.m, noise, cfg.sigma);
  return d;
}

double relative_error(const Vector& est, const Vector& truth) {
  const double den = truth.norm();
  return den > 0.0 ? (est - truth).norm() / den : est.norm();
}

void trial_dynamic_x(const ExperimentConfig& cfg, const Shared* ctx, TrialRecord& rec) {
  const SignalPair d = signal_update_data(cfg, ctx, rec.trial, rec.seed);
  const Matrix& a = cfg.signal == Signal::Spikes ? d.a : ctx->a_eff;
  CountingMatrix op(a);
  const double tau = cfg.lambda * inf_norm(a.transpose() * d.y_old);
  Arm warm, cold;
  Vector x_warm, x_cold;
  if (cfg.kind == Kind::DynamicXBpdn) {
    const BpdnState start = solve_bpdn(op, d.y_old, tau);
    const BpdnState w = timed(cfg, warm, &op, [&](HomotopyTrace& tr) {
      return update_bpdn_signal(start, op, d.y_old, d.y_new, &tr);
    });
    const BpdnState c = timed(cfg, cold, &op, [&](HomotopyTrace& tr) { return solve_bpdn(op, d.y_new, tau, &tr); });
    rec.kkt_pass = bpdn_kkt(a, d.y_new, tau, w.x).pass;
    x_warm = w.x;
    x_cold = c.x;
  } else {
    const DsState start = solve_ds(op, d.y_old, tau);
    const DsState w = timed(cfg, warm, &op, [&](HomotopyTrace& tr) {
      return update_ds_signal(start, op, d.y_old, d.y_new, &tr);
    });
    const DsState c = timed(cfg, cold, &op, [&](HomotopyTrace& tr) { return solve_ds(op, d.y_new, tau, &tr); });
    rec.kkt_pass = ds_kkt(a, d.y_new, tau, w.x, w.lambda).pass;
    x_warm = w.x;
    x_cold = c.x;
  }
  finish(rec, warm, cold);
  rec.warm_cold_gap = inf_norm(x_warm - x_cold);
  rec.final_error = relative_error(x_warm, d.x_new);
  judge(rec, inf_norm(x_cold));
}

void trial_dynamic_seq(const ExperimentConfig& cfg, TrialRecord& rec) {
  const std::uint64_t ts = rec.seed;
  const Matrix a = gaussian_matrix(cfg.m, cfg.n, derive_seed(ts, 0));
  const Vector x = spike_signal(cfg.n, cfg.k, derive_seed(ts, 1));
  Rng noise(derive_seed(ts, 3));
  const Vector y = a * x + randn(cfg.m, noise, cfg.sigma);
  Rng rows(derive_seed(ts, 2));
  const Matrix b = randn_rows(cfg.p, cfg.n, rows, 1.0 / std::sqrt(static_cast<double>(cfg.m)));
  const Vector w = b * x + randn(cfg.p, noise, cfg.sigma);
  const double tau = cfg.lambda * inf_norm(a.transpose() * y);
  const Matrix a_all = stack(a, b);
  const Vector y_all = stack(y, w);

  Arm warm, cold;
  Vector x_warm, x_cold;
  Matrix cur = a;
  Vector ycur = y;
  auto grow = [&](Index i) {
    cur = stack(cur, Matrix(b.row(i)));
    ycur = stack(ycur, Vector::Constant(1, w(i)));
  };
  if (cfg.kind == Kind::DynamicSeqBpdn) {
    BpdnState st = solve_bpdn(cur, ycur, tau);
    for (Index i = 0; i < cfg.p; ++i) {
      CountingMatrix op(cur);
      st = timed(cfg, warm, &op, [&](HomotopyTrace& tr) {
        return bpdn_add_measurement(st, op, ycur, b.row(i), w(i), &tr);
      });
      grow(i);
    }
    CountingMatrix all(a_all);
    const BpdnState c = timed(cfg, cold, &all, [&](HomotopyTrace& tr) { return solve_bpdn(all, y_all, tau, &tr); });
    rec.kkt_pass = bpdn_kkt(a_all, y_all, tau, st.x).pass;
    x_warm = st.x;
    x_cold = c.x;
  } else {
    DsState st = solve_ds(cur, ycur, tau);
    for (Index i = 0; i < cfg.p; ++i) {
      CountingMatrix op(cur);
      st = timed(cfg, warm, &op, [&](HomotopyTrace& tr) {
        return ds_add_measurement(st, op, ycur, b.row(i), w(i), &tr);
      });
      grow(i);
    }
    CountingMatrix all(a_all);
    const DsState c = timed(cfg, cold, &all, [&](HomotopyTrace& tr) { return solve_ds(all, y_all, tau, &tr); });
    rec.kkt_pass = ds_kkt(a_all, y_all, tau, st.x, st.lambda).pass;
    x_warm = st.x;
    x_cold = c.x;
  }
  finish(rec, warm, cold);
  rec.warm_cold_gap = inf_norm(x_warm - x_cold);
  rec.final_error = relative_error(x_warm, x);
  judge(rec, inf_norm(x_cold));
}

// Codeword data shared by both decoding kinds.
struct CodeData {
  Matrix f, b;
  Vector x, s, w;
};

CodeData code_data(const ExperimentConfig& cfg, std::uint64_t ts, bool orthonormal) {
  CodeData d;
  d.f = orthonormal ? orthonormal_columns(cfg.m, cfg.n, derive_seed(ts, 0)) : gaussian_matrix(cfg.m, cfg.n, derive_seed(ts, 0));
  Rng gen(derive_seed(ts, 1));
  d.x = randn(cfg.n, gen);
  Corruption zero_k;
  zero_k.k = cfg.k;
  Rng noise(derive_seed(ts, 3));
  d.s = corrupt_codeword(d.f * d.x, zero_k, derive_seed(ts, 2)).values + randn(cfg.m, noise, cfg.sigma);
  d.b = randn_rows(cfg.p, cfg.n, gen, 1.0 / std::sqrt(static_cast<double>(cfg.m)));
  Corruption bern;
  bern.mode = Corruption::Mode::Bernoulli;
  bern.rate = cfg.corruption;
  d.w = corrupt_codeword(d.b * d.x, bern, derive_seed(ts, 4)).values + randn(cfg.p, noise, cfg.sigma);
  return d;
}

void trial_decode(const ExperimentConfig& cfg, TrialRecord& rec) {
  const CodeData d = code_data(cfg, rec.seed, false);
  Arm warm, cold;
  const DecodeState start = decode_init(d.f, d.s);
  const DecodeState w = timed(cfg, warm, nullptr, [&](HomotopyTrace& tr) {
    return decode_add_measurements(start, d.b, d.w, &tr);
  });
  const DecodeState c = timed(cfg, cold, nullptr, [&](HomotopyTrace& tr) {
    return decode_init(stack(d.f, d.b), stack(d.s, d.w), &tr);
  });
  finish(rec, warm, cold);
  rec.kkt_pass = decode_kkt(w).pass;
  rec.warm_cold_gap = inf_norm(w.x - c.x);
  rec.final_error = inf_norm(w.x - d.x);
  judge(rec, inf_norm(c.x));
}

void trial_robust(const ExperimentConfig& cfg, TrialRecord& rec) {
  const CodeData d = code_data(cfg, rec.seed, true);
  Arm warm, cold;
  const RobustState start = robust_init(d.f, d.s, cfg.tau);
  const RobustState w = timed(cfg, warm, nullptr, [&](HomotopyTrace& tr) {
    return robust_add_measurements(start, d.b, d.w, &tr);
  });
  const RobustState c = timed(cfg, cold, nullptr, [&](HomotopyTrace& tr) {
    return robust_init(stack(d.f, d.b), stack(d.s, d.w), cfg.tau, &tr);
  });
  finish(rec, warm, cold);
  rec.kkt_pass = robust_kkt(w).pass;
  rec.warm_cold_gap = inf_norm(w.c - c.c);
  rec.final_error = inf_norm(decode_message(w) - d.x);
  judge(rec, inf_norm(c.c));
}

TrialRecord run_one(const ExperimentConfig& cfg, const Shared* ctx, Index trial) {
  TrialRecord rec;
  rec.trial = trial;
  rec.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(trial));
  try {
    switch (cfg.kind) {
      case Kind::DynamicXBpdn:
      case Kind::DynamicXDs:
        trial_dynamic_x(cfg, ctx, rec);
        break;
      case Kind::DynamicSeqBpdn:
      case Kind::DynamicSeqDs:
        trial_dynamic_seq(cfg, rec);
        break;
      case Kind::Decode:
        trial_decode(cfg, rec);
        break;
      case Kind::RobustDecode:
        trial_robust(cfg, rec);
        break;
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Config || e.code() == ErrorCode::Io) throw;
    rec.flagged = true;
    rec.kkt_pass = false;
    rec.note = std::string(error_code_name(e.code())) + ": " + e.what();
  }
  return rec;
}

template <typename Get>
Moments moments(const std::vector<TrialRecord>& recs, Get get) {
  Moments out;
  const double n = static_cast<double>(recs.size());
  if (recs.empty()) return out;
  double sum = 0.0;
  for (const auto& r : recs) sum += get(r);
  out.mean = sum / n;
  if (recs.size() > 1) {
    double ss = 0.0;
    for (const auto& r : recs) ss += (get(r) - out.mean) * (get(r) - out.mean);
    out.stddev = std::sqrt(ss / (n - 1.0));
  }
  return out;
}

}  // namespace

const char* kind_name(Kind kind) {
  for (const auto& k : kKinds)
    if (k.kind == kind) return k.name;
  return "unknown";
}

Kind parse_kind(const std::string& name) {
  for (const auto& k : kKinds)
    if (name == k.name) return k.kind;
  bad_field("kind", "must be one of dynamic-x-bpdn, dynamic-x-ds, dynamic-seq-bpdn, dynamic-seq-ds, decode, "
                    "robust-decode (got '" + name + "')");
}

const char* signal_name(Signal signal) {
  for (const auto& s : kSignals)
    if (s.signal == signal) return s.name;
  return "unknown";
}

Signal parse_signal(const std::string& name) {
  for (const auto& s : kSignals)
    if (name == s.name) return s.signal;
  bad_field("signal", "must be spikes, blocks, pcwpoly or slices (got '" + name + "')");
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.n < 1) bad_field("n", "must be at least 1");
  if (cfg.m < 1) bad_field("m", "must be at least 1");
  if (cfg.k < 0) bad_field("k", "must be nonnegative");
  if (cfg.trials < 1) bad_field("trials", "must be at least 1");
  if (cfg.jobs < 1) bad_field("jobs", "must be at least 1");
  if (!(cfg.sigma >= 0.0) || !std::isfinite(cfg.sigma)) bad_field("sigma", "must be a finite nonnegative number");
  const bool signal_kind = cfg.kind == Kind::DynamicXBpdn || cfg.kind == Kind::DynamicXDs;
  const bool seq_kind = cfg.kind == Kind::DynamicSeqBpdn || cfg.kind == Kind::DynamicSeqDs;
  if (signal_kind || seq_kind) {
    if (!(cfg.lambda > 0.0 && cfg.lambda <= 1.0)) bad_field("lambda", "must lie in (0, 1]");
    if (cfg.k > cfg.n) bad_field("k", "must not exceed n");
  }
  if (cfg.signal != Signal::Spikes) {
    if (!signal_kind) bad_field("signal", "non-spike signals apply to the dynamic-x kinds only");
    if (!power_of_two(cfg.n)) bad_field("n", "must be a power of two for wavelet signals");
  }
  if (seq_kind || cfg.kind == Kind::Decode || cfg.kind == Kind::RobustDecode) {
    if (cfg.p < 1) bad_field("p", "must be at least 1");
  }
  if (cfg.kind == Kind::Decode || cfg.kind == Kind::RobustDecode) {
    if (cfg.m < cfg.n) bad_field("m", "must be at least n for decoding");
    if (cfg.k > cfg.m) bad_field("k", "must not exceed m");
    if (!(cfg.corruption >= 0.0 && cfg.corruption <= 1.0)) bad_field("corruption", "must lie in [0, 1]");
  }
  if (cfg.kind == Kind::RobustDecode) {
    if (cfg.m <= cfg.n) bad_field("m", "must exceed n for robust decoding");
    if (!(cfg.tau > 0.0) || !std::isfinite(cfg.tau)) bad_field("tau", "must be positive");
  }
}

TrialRecord run_trial(const ExperimentConfig& cfg, Index trial) {
  validate(cfg);
  const auto ctx = make_shared_context(cfg);
  return run_one(cfg, ctx.get(), trial);
}

void summarize(ExperimentReport& r) {
  const auto& recs = r.records;
  r.warm_products = moments(recs, [](const TrialRecord& t) { return t.warm_products; });
  r.cold_products = moments(recs, [](const TrialRecord& t) { return t.cold_products; });
  r.warm_steps = moments(recs, [](const TrialRecord& t) { return static_cast<double>(t.warm_steps); });
  r.cold_steps = moments(recs, [](const TrialRecord& t) { return static_cast<double>(t.cold_steps); });
  r.warm_seconds = moments(recs, [](const TrialRecord& t) { return t.warm_seconds; });
  r.cold_seconds = moments(recs, [](const TrialRecord& t) { return t.cold_seconds; });
  r.final_error = moments(recs, [](const TrialRecord& t) { return t.final_error; });
  r.flagged = 0;
  for (const auto& t : recs) r.flagged += t.flagged;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  const auto ctx = make_shared_context(cfg);
  ExperimentReport report;
  report.config = cfg;
  report.records.resize(static_cast<std::size_t>(cfg.trials));

  // Trials write to their own slot, so the report never depends on
  // scheduling order.
  std::atomic<Index> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (Index t = next++; t < cfg.trials && !failed; t = next++) {
      try {
        report.records[static_cast<std::size_t>(t)] = run_one(cfg, ctx.get(), t);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  const Index jobs = std::min(cfg.jobs, cfg.trials);
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (Index j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  summarize(report);
  return report;
}

std::vector<ExperimentConfig> table_preset(const std::string& table, const std::string& scale, Index trials,
                                           std::uint64_t seed) {
  const bool full = scale == "full";
  if (!full && scale != "desk") bad_field("scale", "must be full or desk (got '" + scale + "')");
  std::vector<ExperimentConfig> out;
  auto base = [&](Kind kind, Index default_trials) {
    ExperimentConfig c;
    c.kind = kind;
    c.trials = trials > 0 ? trials : default_trials;
    c.seed = seed;
    return c;
  };
  if (table == "tableI" || table == "tableII") {
    const Kind kind = table == "tableI" ? Kind::DynamicXBpdn : Kind::DynamicSeqBpdn;
    for (double lambda : {0.5, 0.1, 0.05, 0.01}) {
      ExperimentConfig c = base(kind, full ? 500 : 100);
      c.n = full ? 1024 : 256;
      c.m = full ? 512 : 128;
      c.k = c.m / 5;
      c.p = 1;
      c.lambda = lambda;
      c.sigma = 0.01;
      c.seed = derive_seed(seed, out.size());
      out.push_back(c);
    }
    if (table == "tableI") {
      struct Row {
        Signal signal;
        Index n;
        double lambda;
      };
      const Row rows[] = {{Signal::Blocks, full ? 2048 : 512, 0.01},
                          {Signal::PcwPoly, full ? 2048 : 512, 0.01},
                          {Signal::Pgm, full ? 256 : 128, 0.005}};
      for (const Row& row : rows) {
        ExperimentConfig c = base(kind, full ? (row.signal == Signal::Pgm ? 255 : 200) : 30);
        c.signal = row.signal;
        c.n = row.n;
        c.m = row.n / 2;
        c.lambda = row.lambda;
        c.sigma = 0.01;
        c.seed = derive_seed(seed, out.size());
        out.push_back(c);
      }
    }
  } else if (table == "tableIII") {
    for (Index p : {1, 2, 5, 10}) {
      ExperimentConfig c = base(Kind::RobustDecode, full ? 100 : 50);
      c.n = full ? 150 : 75;
      c.m = full ? 300 : 150;
      c.k = full ? 60 : 30;
      c.p = p;
      c.sigma = 0.01;
      c.tau = 0.01;
      c.corruption = 0.1;
      // Every row sees the same initial codewords, only the block differs.
      out.push_back(c);
    }
  } else {
    bad_field("table", "must be tableI, tableII or tableIII (got '" + table + "')");
  }
  for (auto& c : out) c.label = table;
  return out;
}

PipelineResult decode_pipeline(const PipelineConfig& cfg) {
  if (cfg.n < 1) bad_field("n", "must be at least 1");
  if (cfg.m <= cfg.n) bad_field("m", "must exceed n");
  if (cfg.errors < 0 || cfg.errors > cfg.m) bad_field("errors", "must lie in [0, m]");
  if (cfg.block < 0) bad_field("block", "must be nonnegative");
  if (!(cfg.noise >= 0.0) || !std::isfinite(cfg.noise)) bad_field("noise", "must be a finite nonnegative number");
  if (cfg.robust && !(cfg.tau > 0.0)) bad_field("tau", "must be positive");

  const std::uint64_t ts = cfg.seed;
  const Matrix f = cfg.robust ? orthonormal_columns(cfg.m, cfg.n, derive_seed(ts, 0))
                              : gaussian_matrix(cfg.m, cfg.n, derive_seed(ts, 0));
  Rng gen(derive_seed(ts, 1));
  const Vector x = randn(cfg.n, gen);
  Corruption zero_k;
  zero_k.k = cfg.errors;
  Rng noise(derive_seed(ts, 3));
  const Vector s = corrupt_codeword(f * x, zero_k, derive_seed(ts, 2)).values + randn(cfg.m, noise, cfg.noise);
  const Matrix b = randn_rows(cfg.block, cfg.n, gen, 1.0 / std::sqrt(static_cast<double>(cfg.m)));
  Corruption bern;
  bern.mode = Corruption::Mode::Bernoulli;
  bern.rate = static_cast<double>(cfg.errors) / static_cast<double>(cfg.m);
  const Vector w = corrupt_codeword(b * x, bern, derive_seed(ts, 4)).values + randn(cfg.block, noise, cfg.noise);

  PipelineResult r;
  HomotopyTrace init, add;
  Vector x_hat;
  if (cfg.robust) {
    RobustState st = robust_init(f, s, cfg.tau, &init);
    if (cfg.block > 0) st = robust_add_measurements(st, b, w, &add);
    x_hat = decode_message(st);
    r.kkt_pass = robust_kkt(st).pass;
    r.error_support = st.active.size();
  } else {
    DecodeState st = decode_init(f, s, &init);
    if (cfg.block > 0) st = decode_add_measurements(st, b, w, &add);
    x_hat = st.x;
    r.kkt_pass = decode_kkt(st).pass;
    r.error_support = static_cast<Index>(st.error_support().size());
  }
  r.max_error = inf_norm(x_hat - x);
  r.recovered = r.max_error <= (cfg.robust ? std::max(1e-6, 10.0 * cfg.noise) : 1e-6);
  r.init_steps = init.iterations();
  r.init_products = init.products;
  r.add_steps = add.iterations();
  r.add_products = add.products;
  r.lucky_breakdown = add.lucky_breakdown;
  return r;
}

nlohmann::json to_json(const PipelineResult& r) {
  return {{"max_error", r.max_error},         {"recovered", r.recovered},       {"kkt_pass", r.kkt_pass},
          {"lucky_breakdown", r.lucky_breakdown}, {"init_steps", r.init_steps},  {"init_nProdAtA", r.init_products},
          {"add_steps", r.add_steps},         {"add_nProdAtA", r.add_products}, {"error_support", r.error_support}};
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
  return {{"kind", kind_name(cfg.kind)}, {"signal", signal_name(cfg.signal)}, {"image", cfg.image},
          {"n", cfg.n},   {"m", cfg.m},   {"k", cfg.k},   {"p", cfg.p},
          {"lambda", cfg.lambda}, {"tau", cfg.tau}, {"sigma", cfg.sigma}, {"corruption", cfg.corruption},
          {"trials", cfg.trials}, {"seed", cfg.seed}, {"timing", cfg.timing}, {"label", cfg.label}};
}

namespace {

nlohmann::json moments_json(const Moments& m) { return {{"mean", m.mean}, {"stddev", m.stddev}}; }

nlohmann::json number_or_null(double v) { return std::isnan(v) ? nlohmann::json() : nlohmann::json(v); }

}  // namespace

nlohmann::json to_json(const ExperimentReport& r) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& t : r.records) {
    records.push_back({{"trial", t.trial},
                       {"seed", t.seed},
                       {"warm", {{"steps", t.warm_steps},
                                 {"nProdAtA", t.warm_products},
                                 {"counted", number_or_null(t.warm_counted)},
                                 {"seconds", t.warm_seconds}}},
                       {"cold", {{"steps", t.cold_steps},
                                 {"nProdAtA", t.cold_products},
                                 {"counted", number_or_null(t.cold_counted)},
                                 {"seconds", t.cold_seconds}}},
                       {"warm_cold_gap", t.warm_cold_gap},
                       {"final_error", t.final_error},
                       {"kkt_pass", t.kkt_pass},
                       {"counts_agree", t.counts_agree},
                       {"lucky_breakdown", t.lucky_breakdown},
                       {"flagged", t.flagged},
                       {"note", t.note}});
  }
  const double ratio = r.warm_products.mean > 0.0 ? r.cold_products.mean / r.warm_products.mean : 0.0;
  return {{"config", to_json(r.config)},
          {"aggregate",
           {{"warm_nProdAtA", moments_json(r.warm_products)},
            {"cold_nProdAtA", moments_json(r.cold_products)},
            {"warm_steps", moments_json(r.warm_steps)},
            {"cold_steps", moments_json(r.cold_steps)},
            {"warm_seconds", moments_json(r.warm_seconds)},
            {"cold_seconds", moments_json(r.cold_seconds)},
            {"final_error", moments_json(r.final_error)},
            {"cold_over_warm_nProdAtA", ratio},
            {"flagged", r.flagged}}},
          {"ok", r.ok()},
          {"records", records}};
}

nlohmann::json to_json(const std::vector<ExperimentReport>& reports) {
  nlohmann::json rows = nlohmann::json::array();
  bool ok = true;
  for (const auto& r : reports) {
    rows.push_back(to_json(r));
    ok = ok && r.ok();
  }
  return {{"ok", ok}, {"experiments", rows}};
}

std::string to_csv(const std::vector<ExperimentReport>& reports) {
  std::ostringstream out;
  out << std::setprecision(10);
  out << "method,lambda,mean_nProdAtA,mean_time,p,mean_steps,signal\n";
  for (const auto& r : reports) {
    const auto& c = r.config;
    const double lambda = c.kind == Kind::RobustDecode ? c.tau : c.lambda;
    out << kind_name(c.kind) << "-warm," << lambda << ',' << r.warm_products.mean << ',' << r.warm_seconds.mean << ','
        << c.p << ',' << r.warm_steps.mean << ',' << signal_name(c.signal) << '\n';
    out << kind_name(c.kind) << "-cold," << lambda << ',' << r.cold_products.mean << ',' << r.cold_seconds.mean << ','
        << c.p << ',' << r.cold_steps.mean << ',' << signal_name(c.signal) << '\n';
  }
  return out.str();
}

}  // namespace l1h::bench
