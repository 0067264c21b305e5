#include "l1h/bpdn.hpp"

#include "l1h/error.hpp"

#include <algorithm>
#include <cmath>

namespace l1h {

Index HomotopyTrace::support_changes() const {
  return static_cast<Index>(std::count_if(steps.begin(), steps.end(), [](const StepEvent& e) { return !e.terminal(); }));
}

IndexList support_of(const Vector& x) {
  IndexList out;
  for (Index j = 0; j < x.size(); ++j) {
    if (x(j) != 0.0) out.push_back(j);
  }
  return out;
}

void require_no_zero_columns(const Matrix& a) {
  for (Index j = 0; j < a.cols(); ++j) {
    if (a.col(j).squaredNorm() == 0.0) raise(ErrorCode::InvalidArgument, "column " + std::to_string(j) + " is zero");
  }
}

KktReport bpdn_kkt_from_correlations(const Vector& p, double tau, const Vector& x) {
  KktReport r;
  for (Index j = 0; j < x.size(); ++j) {
    if (x(j) != 0.0) {
      r.support_violation = std::max(r.support_violation, std::abs(p(j) + tau * sign_of(x(j))));
    } else {
      r.off_support_max = std::max(r.off_support_max, std::abs(p(j)));
    }
  }
  r.pass = r.support_violation <= 1e-8 * tau && r.off_support_max <= tau * (1.0 + 1e-8);
  return r;
}

KktReport bpdn_kkt(const Matrix& a, const Vector& y, double tau, const Vector& x) {
  const Vector p = a.transpose() * (a * x - y);
  return bpdn_kkt_from_correlations(p, tau, x);
}

BpdnState bpdn_path(const GramOperator& g, const Vector& q, double tau, HomotopyTrace* trace,
                    const PathOptions& opts) {
  if (!(tau > 0.0)) raise(ErrorCode::InvalidArgument, "tau must be positive");
  const Index n = g.size();
  if (q.size() != n) raise(ErrorCode::InvalidArgument, "q has wrong length");
  HomotopyTrace local;
  HomotopyTrace& tr = trace ? *trace : local;
  const Index max_steps = opts.max_steps > 0 ? opts.max_steps : 20 * n;

  BpdnState st;
  st.x = Vector::Zero(n);
  st.tau = tau;
  st.active = ActiveSet(n);
  st.p = -q;
  tr.final_epsilon = 1.0;
  if (n == 0) return st;

  Index start = 0;
  const double tau0 = q.cwiseAbs().maxCoeff(&start);
  if (tau >= tau0) return st;

  double tc = tau0;
  st.active.add(start, sign_of(q(start)), g);
  Index since_refresh = 0;
  for (Index k = 0;; ++k) {
    if (k >= max_steps) raise(ErrorCode::IterationLimit, "cold BPDN exceeded " + std::to_string(max_steps) + " steps");
    const IndexList& gamma = st.active.indices();
    const Vector dx = scatter(st.active.factor().solve(st.active.sign_vector()), gamma, n);
    const Vector d = g.times(dx, gamma);
    tr.products += 1.0;

    const StepEvent shrink = min_shrink_step(st.x, dx, gamma);
    const StepEvent activate = min_activation_step(st.p, d, tc, complement(st.active.membership()), 1.0);
    StepEvent ev = earlier(shrink, activate);
    const double remaining = tc - tau;
    const bool last = ev.terminal() || ev.theta >= remaining;
    if (last) ev = StepEvent{remaining, StepKind::Terminal, -1, 0.0};

    st.x += ev.theta * dx;
    st.p += ev.theta * d;
    tc = last ? tau : tc - ev.theta;
    tr.steps.push_back(ev);
    tr.params.push_back(tc);
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
      st.p = g.times(st.x, st.active.indices()) - q;
      tr.products += 1.0;
    }
  }

  // Land exactly on the closed-form solution for the final support.
  const IndexList& gamma = st.active.indices();
  const Vector z = st.active.sign_vector();
  const Vector xg = st.active.factor().solve(gather(q, gamma) - tau * z);
  st.x = scatter(xg, gamma, n);
  for (std::size_t i = 0; i < gamma.size(); ++i) st.p(gamma[i]) = -tau * z(static_cast<Index>(i));
  return st;
}

BpdnState solve_bpdn(const MatrixOperator& a, const Vector& y, double tau, HomotopyTrace* trace,
                     const PathOptions& opts) {
  if (y.size() != a.rows()) raise(ErrorCode::InvalidArgument, "rhs length does not match rows");
  require_no_zero_columns(a.matrix());
  HomotopyTrace local;
  HomotopyTrace& tr = trace ? *trace : local;
  const Vector q = a.apply_transpose(y);
  tr.products += 0.5;
  DenseGram g(a);
  return bpdn_path(g, q, tau, &tr, opts);
}

BpdnState solve_bpdn(const Matrix& a, const Vector& y, double tau) {
  MatrixOperator op(a);
  return solve_bpdn(op, y, tau);
}

}  // namespace l1h
