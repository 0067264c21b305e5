#include "l1h/dynamic_seq.hpp"

#include "l1h/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace l1h {

double advance_epsilon(double eps, double theta, double u, double s) { return eps + s * theta / (1.0 - s * theta * u); }

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vector partial_correlation(const Matrix& a, const IndexList& idx, const Vector& y) {
  Vector out(static_cast<Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out(static_cast<Index>(i)) = a.col(idx[i]).dot(y);
  return out;
}

Index position(const IndexList& list, Index j) {
  return static_cast<Index>(std::find(list.begin(), list.end(), j) - list.begin());
}

// Moves the factor of A^T A + eps b^T b (on the support) to eps + s*delta.
void fold_row(ActiveSet& active, const Vector& bt, double delta, double s, SeqGram& g, double new_eps) {
  g.set_epsilon(new_eps);
  if (active.size() == 0) return;
  try {
    active.factor().rank_one_update(std::sqrt(delta) * gather(bt, active.indices()), s);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotPositiveDefinite) throw;
    active.rebuild(g);
  }
}

double innovation(const RowVector& b, const Vector& x, double w) { return b.dot(x.transpose()) - w; }

bool negligible(double beta, double w, const RowVector& b, const Vector& x) {
  const double scale = std::max({1.0, std::abs(w), b.cwiseAbs().dot(x.cwiseAbs().transpose())});
  return std::abs(beta) <= 1e-13 * scale;
}

BpdnState bpdn_sequential(const BpdnState& state, const MatrixOperator& a, const Vector& y, const RowVector& b,
                          double w, double s, HomotopyTrace& tr, const UpdateOptions& opts) {
  const Index n = a.cols();
  if (y.size() != a.rows()) raise(ErrorCode::InvalidArgument, "rhs length does not match rows");
  if (b.size() != n || state.x.size() != n) raise(ErrorCode::InvalidArgument, "row length does not match columns");
  const double target = s > 0 ? 1.0 : 0.0;
  double eps = 1.0 - target;
  SeqGram g(a, b, eps);
  const Vector bt = b.transpose();
  const Index max_steps = opts.max_steps > 0 ? opts.max_steps : 10 * n;

  BpdnState st = state;
  if (opts.verify_residual) {
    st.p = a.apply_transpose(a.apply_sparse(st.x, st.active.indices()) - y) + eps * innovation(b, st.x, w) * bt;
    tr.products += 1.0;
  }
  check_warm_bpdn(st);
  tr.final_epsilon = target;

  const double tau = st.tau;
  if (bt.cwiseAbs().maxCoeff() == 0.0 || negligible(innovation(b, st.x, w), w, b, st.x)) {
    fold_row(st.active, bt, 1.0, s, g, target);
    return st;
  }

  Index since_refresh = 0;
  for (Index k = 0;; ++k) {
    if (k >= max_steps) raise(ErrorCode::IterationLimit, "sequential update exceeded " + std::to_string(max_steps) + " steps");
    const IndexList& gamma = st.active.indices();
    const Vector bg = gather(bt, gamma);
    const Vector v = gamma.empty() ? Vector() : st.active.factor().solve(bg);
    const double u = gamma.empty() ? 0.0 : bg.dot(v);
    const double beta = innovation(b, st.x, w);
    const Vector dx = scatter(-s * beta * v, gamma, n);
    const Vector d = g.times(dx, gamma) + (s * beta) * bt;
    tr.products += 1.0;

    const StepEvent shrink = min_shrink_step(st.x, dx, gamma);
    const StepEvent activate = min_activation_step(st.p, d, tau, complement(st.active.membership()));
    StepEvent ev = earlier(shrink, activate);
    const double remaining = s > 0 ? 1.0 - eps : eps;
    const double denom = 1.0 + s * remaining * u;
    const double clamp = denom > 0.0 ? remaining / denom : kInf;
    const bool last = ev.terminal() || ev.theta >= clamp;
    if (last) {
      if (!std::isfinite(clamp)) raise(ErrorCode::DegenerateSupport, "epsilon endpoint unreachable on this support");
      ev = StepEvent{clamp, StepKind::Terminal, -1, 0.0};
    }
    const double delta = last ? remaining : ev.theta / (1.0 - s * ev.theta * u);
    if (!(delta >= 0.0) || !std::isfinite(delta)) {
      raise(ErrorCode::NonmonotoneEpsilon, "epsilon step " + std::to_string(delta) + " at theta " + std::to_string(ev.theta));
    }
    st.x += ev.theta * dx;
    st.p += ev.theta * d;
    eps = last ? target : eps + s * delta;
    tr.steps.push_back(ev);
    tr.params.push_back(eps);
    tr.u.push_back(u);
    fold_row(st.active, bt, delta, s, g, eps);
    if (last) break;

    if (ev.kind == StepKind::Shrink) {
      st.x(ev.gamma) = 0.0;
      st.active.remove_at(st.active.position_of(ev.gamma));
    } else {
      st.active.add(ev.gamma, -ev.sign, g);
    }
    st.active.maintain(g);
    if (++since_refresh >= opts.refresh_every) {
      since_refresh = 0;
      st.p = a.apply_transpose(a.apply_sparse(st.x, st.active.indices()) - y) + eps * innovation(b, st.x, w) * bt;
      tr.products += 1.0;
    }
  }

  const IndexList& gamma = st.active.indices();
  const Vector z = st.active.sign_vector();
  const Vector qg = partial_correlation(a.matrix(), gamma, y) + (target * w) * gather(bt, gamma);
  st.x = scatter(st.active.factor().solve(qg - tau * z), gamma, n);
  for (std::size_t i = 0; i < gamma.size(); ++i) st.p(gamma[i]) = -tau * z(static_cast<Index>(i));
  return st;
}

bool same_event(const StepEvent& a, const StepEvent& b) {
  return a.kind == b.kind && a.gamma == b.gamma && a.theta == b.theta;
}

}  // namespace

BpdnState bpdn_add_measurement(const BpdnState& state, const MatrixOperator& a, const Vector& y, const RowVector& b,
                               double w, HomotopyTrace* trace, const UpdateOptions& opts) {
  HomotopyTrace local;
  return bpdn_sequential(state, a, y, b, w, 1.0, trace ? *trace : local, opts);
}

BpdnState bpdn_remove_measurement(const BpdnState& state, const Matrix& a_stacked, const Vector& y_stacked,
                                  Index row, HomotopyTrace* trace, const UpdateOptions& opts) {
  const Index m = a_stacked.rows();
  if (row < 0 || row >= m) raise(ErrorCode::InvalidArgument, "row index out of range");
  if (y_stacked.size() != m) raise(ErrorCode::InvalidArgument, "rhs length does not match rows");
  Matrix reduced(m - 1, a_stacked.cols());
  Vector y(m - 1);
  reduced.topRows(row) = a_stacked.topRows(row);
  reduced.bottomRows(m - 1 - row) = a_stacked.bottomRows(m - 1 - row);
  y.head(row) = y_stacked.head(row);
  y.tail(m - 1 - row) = y_stacked.tail(m - 1 - row);
  MatrixOperator op(reduced);
  HomotopyTrace local;
  return bpdn_sequential(state, op, y, a_stacked.row(row), y_stacked(row), -1.0, trace ? *trace : local, opts);
}

BpdnState bpdn_add_measurements(const BpdnState& state, const Matrix& a, const Vector& y, const Matrix& b,
                                const Vector& w, HomotopyTrace* trace, const UpdateOptions& opts) {
  if (b.rows() != w.size()) raise(ErrorCode::InvalidArgument, "block rows and values differ in length");
  Matrix cur = a;
  Vector ycur = y;
  BpdnState st = state;
  for (Index i = 0; i < b.rows(); ++i) {
    MatrixOperator op(cur);
    st = bpdn_add_measurement(st, op, ycur, b.row(i), w(i), trace, opts);
    cur.conservativeResize(cur.rows() + 1, Eigen::NoChange);
    cur.row(cur.rows() - 1) = b.row(i);
    ycur.conservativeResize(ycur.size() + 1);
    ycur(ycur.size() - 1) = w(i);
  }
  return st;
}

DsState ds_add_measurement(const DsState& state, const MatrixOperator& a, const Vector& y, const RowVector& b,
                           double w, HomotopyTrace* trace, const UpdateOptions& opts) {
  const Index n = a.cols();
  if (y.size() != a.rows()) raise(ErrorCode::InvalidArgument, "rhs length does not match rows");
  if (b.size() != n || state.x.size() != n) raise(ErrorCode::InvalidArgument, "row length does not match columns");
  HomotopyTrace local;
  HomotopyTrace& tr = trace ? *trace : local;
  const Index max_steps = opts.max_steps > 0 ? opts.max_steps : 10 * n;
  double eps = 0.0;
  SeqGram g(a, b, eps);
  const Vector bt = b.transpose();

  DsState st = state;
  if (opts.verify_residual) {
    st.p = a.apply_transpose(a.apply_sparse(st.x, st.gx) - y);
    st.a = g.times(st.lambda, st.gl);
    tr.products += 2.0;
  }
  check_warm_ds(st);
  tr.final_epsilon = 1.0;

  auto fold = [&](double delta, double new_eps) {
    g.set_epsilon(new_eps);
    if (st.gx.empty()) return;
    try {
      st.minv.rank_one_update(delta * gather(bt, st.gl), gather(bt, st.gx));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SingularCrossGram) throw;
      ds_engine::rebuild_inverse(st, g);
    }
  };

  const double mu0 = b.dot(st.lambda.transpose());
  if (bt.cwiseAbs().maxCoeff() == 0.0 ||
      (negligible(innovation(b, st.x, w), w, b, st.x) && std::abs(mu0) <= 1e-13 * std::max(1.0, st.lambda.cwiseAbs().sum()))) {
    fold(1.0, 1.0);
    return st;
  }

  Index since_refresh = 0;
  for (Index k = 0;; ++k) {
    if (k >= max_steps) raise(ErrorCode::IterationLimit, "DS sequential update exceeded " + std::to_string(max_steps) + " steps");
    const Vector bl = gather(bt, st.gl);
    const Vector bx = gather(bt, st.gx);
    const Vector v = st.minv.solve(bl);
    const Vector vt = st.minv.solve_transpose(bx);
    const double u = st.gx.empty() ? 0.0 : bx.dot(v);
    const double beta = innovation(b, st.x, w);
    const double mu = b.dot(st.lambda.transpose());
    const Vector dx = scatter(-beta * v, st.gx, n);
    const Vector dl = scatter(-mu * vt, st.gl, n);
    const Vector dp = g.times(dx, st.gx) + beta * bt;
    const Vector da = g.times(dl, st.gl) + mu * bt;
    tr.products += 2.0;

    // 0: x shrink, 1: p activation, 2: lambda shrink, 3: a activation
    const std::array<StepEvent, 4> cand{min_shrink_step(st.x, dx, st.gx),
                                        min_activation_step(st.p, dp, st.tau, complement(st.in_l)),
                                        min_shrink_step(st.lambda, dl, st.gl),
                                        min_activation_step(st.a, da, 1.0, complement(st.in_x))};
    std::size_t which = 0;
    for (std::size_t i = 1; i < cand.size(); ++i) {
      if (!same_event(earlier(cand[which], cand[i]), cand[which])) which = i;
    }
    StepEvent ev = cand[which];
    const double remaining = 1.0 - eps;
    const double denom = 1.0 + remaining * u;
    const double clamp = denom > 0.0 ? remaining / denom : kInf;
    const bool last = ev.terminal() || ev.theta >= clamp;
    if (last) {
      if (!std::isfinite(clamp)) raise(ErrorCode::DegenerateSupport, "epsilon endpoint unreachable on this support");
      ev = StepEvent{clamp, StepKind::Terminal, -1, 0.0};
    }
    const double delta = last ? remaining : ev.theta / (1.0 - ev.theta * u);
    if (!(delta >= 0.0) || !std::isfinite(delta)) {
      raise(ErrorCode::NonmonotoneEpsilon, "epsilon step " + std::to_string(delta) + " at theta " + std::to_string(ev.theta));
    }
    st.x += ev.theta * dx;
    st.p += ev.theta * dp;
    st.lambda += ev.theta * dl;
    st.a += ev.theta * da;
    eps = last ? 1.0 : eps + delta;
    tr.steps.push_back(ev);
    tr.params.push_back(eps);
    tr.u.push_back(u);
    fold(delta, eps);
    if (last) break;

    switch (which) {
      case 0:
        ds_engine::after_x_loss(st, g, position(st.gx, ev.gamma), tr);
        break;
      case 1:
        ds_engine::after_lambda_gain(st, g, ev.gamma, ev.sign, tr);
        break;
      case 2:
        ds_engine::after_lambda_loss(st, g, position(st.gl, ev.gamma), tr);
        break;
      default:
        ds_engine::after_x_gain(st, g, ev.gamma, -ev.sign, tr);
        break;
    }
    ds_engine::maintain(st, g);
    if (++since_refresh >= opts.refresh_every) {
      since_refresh = 0;
      st.p = a.apply_transpose(a.apply_sparse(st.x, st.gx) - y) + eps * innovation(b, st.x, w) * bt;
      st.a = g.times(st.lambda, st.gl);
      tr.products += 2.0;
    }
  }

  const Vector q_rows = partial_correlation(a.matrix(), st.gl, y) + w * gather(bt, st.gl);
  ds_engine::polish(st, q_rows);
  return st;
}

}  // namespace l1h
