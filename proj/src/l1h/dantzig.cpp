#include "l1h/dantzig.hpp"

#include "l1h/error.hpp"

#include <algorithm>
#include <cmath>

namespace l1h {

namespace ds_engine {

namespace {

Index position(const IndexList& list, Index j) {
  auto it = std::find(list.begin(), list.end(), j);
  return it == list.end() ? -1 : static_cast<Index>(it - list.begin());
}

Vector as_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
}

double current_param(const HomotopyTrace& tr) { return tr.params.empty() ? 0.0 : tr.params.back(); }

void record(HomotopyTrace& tr, const StepEvent& ev) {
  tr.steps.push_back(ev);
  tr.params.push_back(current_param(tr));
}

[[noreturn]] void stuck(const char* phase) {
  raise(ErrorCode::DegenerateSupport, std::string(phase) + " found no critical point");
}

}  // namespace

DsState empty_state(Index n, double tau, const Vector& q) {
  DsState st;
  st.x = Vector::Zero(n);
  st.lambda = Vector::Zero(n);
  st.tau = tau;
  st.in_x.assign(static_cast<std::size_t>(n), 0);
  st.in_l.assign(static_cast<std::size_t>(n), 0);
  st.minv.reset(Matrix(0, 0));
  st.p = -q;
  st.a = Vector::Zero(n);
  return st;
}

Matrix cross_gram(const GramOperator& g, const IndexList& rows, const IndexList& cols) {
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) m.col(static_cast<Index>(c)) = g.column(cols[c], rows);
  return m;
}

void rebuild_inverse(DsState& st, const GramOperator& g) { st.minv.reset(cross_gram(g, st.gl, st.gx)); }

void maintain(DsState& st, const GramOperator& g) {
  if (st.minv.needs_refresh()) rebuild_inverse(st, g);
}

void after_lambda_gain(DsState& st, const GramOperator& g, Index gamma, double z, HomotopyTrace& tr) {
  const Index n = st.n();
  const Vector w = g.column(gamma, st.gx);  // G(gx, gamma) = G(gamma, gx)
  Vector dl = scatter(-z * st.minv.solve_transpose(w), st.gl, n);
  dl(gamma) = z;
  IndexList dsupp = st.gl;
  dsupp.push_back(gamma);
  const Vector da = g.times(dl, dsupp);
  tr.products += 1.0;

  const StepEvent shrink = min_shrink_step(st.lambda, dl, st.gl);
  const StepEvent act = min_activation_step(st.a, da, 1.0, complement(st.in_x));
  const StepEvent ev = earlier(shrink, act);
  if (ev.terminal()) stuck("dual update");
  st.lambda += ev.theta * dl;
  st.a += ev.theta * da;
  record(tr, ev);

  if (ev.kind == StepKind::Activate) {
    const Index j = ev.gamma;
    st.minv.append(w, g.column(j, st.gl), g.column(j, {gamma})(0));
    st.gl.push_back(gamma);
    st.zl.push_back(z);
    st.in_l[static_cast<std::size_t>(gamma)] = 1;
    st.gx.push_back(j);
    st.zx.push_back(-ev.sign);
    st.in_x[static_cast<std::size_t>(j)] = 1;
  } else {
    const Index out = ev.gamma;
    const Index pos = position(st.gl, out);
    st.lambda(out) = 0.0;
    st.minv.add_to_row(pos, w - g.column(out, st.gx));
    st.gl[static_cast<std::size_t>(pos)] = gamma;
    st.zl[static_cast<std::size_t>(pos)] = z;
    st.in_l[static_cast<std::size_t>(out)] = 0;
    st.in_l[static_cast<std::size_t>(gamma)] = 1;
  }
}

void after_x_loss(DsState& st, const GramOperator& g, Index col_pos, HomotopyTrace& tr) {
  const Index n = st.n();
  const Index lost = st.gx[static_cast<std::size_t>(col_pos)];
  const double zlost = st.zx[static_cast<std::size_t>(col_pos)];
  st.x(lost) = 0.0;
  st.in_x[static_cast<std::size_t>(lost)] = 0;

  // Release the dual constraint at the lost index: a(lost) moves inward.
  const Vector dl = scatter(zlost * st.minv.solve_transpose(Vector::Unit(st.minv.size(), col_pos)), st.gl, n);
  const Vector da = g.times(dl, st.gl);
  tr.products += 1.0;

  const StepEvent shrink = min_shrink_step(st.lambda, dl, st.gl);
  const StepEvent act = min_activation_step(st.a, da, 1.0, complement(st.in_x));
  const StepEvent ev = earlier(shrink, act);
  if (ev.terminal()) stuck("dual update");
  st.lambda += ev.theta * dl;
  st.a += ev.theta * da;
  record(tr, ev);

  if (ev.kind == StepKind::Activate) {
    const Index j = ev.gamma;
    st.minv.add_to_column(col_pos, g.column(j, st.gl) - g.column(lost, st.gl));
    st.gx[static_cast<std::size_t>(col_pos)] = j;
    st.zx[static_cast<std::size_t>(col_pos)] = -ev.sign;
    st.in_x[static_cast<std::size_t>(j)] = 1;
  } else {
    const Index out = ev.gamma;
    const Index row_pos = position(st.gl, out);
    st.lambda(out) = 0.0;
    st.minv.remove(row_pos, col_pos);
    st.gl.erase(st.gl.begin() + row_pos);
    st.zl.erase(st.zl.begin() + row_pos);
    st.in_l[static_cast<std::size_t>(out)] = 0;
    st.gx.erase(st.gx.begin() + col_pos);
    st.zx.erase(st.zx.begin() + col_pos);
  }
}

void after_x_gain(DsState& st, const GramOperator& g, Index j, double z, HomotopyTrace& tr) {
  const Index n = st.n();
  const Vector col = g.column(j, st.gl);  // G(gl, j)
  Vector dx = scatter(-z * st.minv.solve(col), st.gx, n);
  dx(j) = z;
  IndexList xsupp = st.gx;
  xsupp.push_back(j);
  const Vector dp = g.times(dx, xsupp);
  tr.products += 1.0;

  const StepEvent shrink = min_shrink_step(st.x, dx, st.gx);
  const StepEvent act = min_activation_step(st.p, dp, st.tau, complement(st.in_l));
  const StepEvent ev = earlier(shrink, act);
  if (ev.terminal()) stuck("primal update");
  st.x += ev.theta * dx;
  st.p += ev.theta * dp;
  record(tr, ev);

  if (ev.kind == StepKind::Activate) {
    const Index i = ev.gamma;
    st.minv.append(g.column(i, st.gx), col, g.column(j, {i})(0));
    st.gl.push_back(i);
    st.zl.push_back(ev.sign);
    st.in_l[static_cast<std::size_t>(i)] = 1;
    st.gx.push_back(j);
    st.zx.push_back(z);
    st.in_x[static_cast<std::size_t>(j)] = 1;
  } else {
    const Index out = ev.gamma;
    const Index pos = position(st.gx, out);
    st.x(out) = 0.0;
    st.minv.add_to_column(pos, col - g.column(out, st.gl));
    st.gx[static_cast<std::size_t>(pos)] = j;
    st.zx[static_cast<std::size_t>(pos)] = z;
    st.in_x[static_cast<std::size_t>(out)] = 0;
    st.in_x[static_cast<std::size_t>(j)] = 1;
  }
}

void after_lambda_loss(DsState& st, const GramOperator& g, Index row_pos, HomotopyTrace& tr) {
  const Index n = st.n();
  const Index lost = st.gl[static_cast<std::size_t>(row_pos)];
  const double zlost = st.zl[static_cast<std::size_t>(row_pos)];
  st.lambda(lost) = 0.0;
  st.in_l[static_cast<std::size_t>(lost)] = 0;

  // Release the primal constraint at the lost index: p(lost) moves inward.
  const Vector dx = scatter(-zlost * st.minv.solve(Vector::Unit(st.minv.size(), row_pos)), st.gx, n);
  const Vector dp = g.times(dx, st.gx);
  tr.products += 1.0;

  const StepEvent shrink = min_shrink_step(st.x, dx, st.gx);
  const StepEvent act = min_activation_step(st.p, dp, st.tau, complement(st.in_l));
  const StepEvent ev = earlier(shrink, act);
  if (ev.terminal()) stuck("primal update");
  st.x += ev.theta * dx;
  st.p += ev.theta * dp;
  record(tr, ev);

  if (ev.kind == StepKind::Activate) {
    const Index i = ev.gamma;
    st.minv.add_to_row(row_pos, g.column(i, st.gx) - g.column(lost, st.gx));
    st.gl[static_cast<std::size_t>(row_pos)] = i;
    st.zl[static_cast<std::size_t>(row_pos)] = ev.sign;
    st.in_l[static_cast<std::size_t>(i)] = 1;
  } else {
    const Index out = ev.gamma;
    const Index col_pos = position(st.gx, out);
    st.x(out) = 0.0;
    st.minv.remove(row_pos, col_pos);
    st.gl.erase(st.gl.begin() + row_pos);
    st.zl.erase(st.zl.begin() + row_pos);
    st.gx.erase(st.gx.begin() + col_pos);
    st.zx.erase(st.zx.begin() + col_pos);
    st.in_x[static_cast<std::size_t>(out)] = 0;
  }
}

void polish(DsState& st, const Vector& q_rows) {
  const Index n = st.n();
  if (st.gx.empty()) return;
  const Vector zl = as_vector(st.zl);
  const Vector zx = as_vector(st.zx);
  st.x = scatter(st.minv.solve(q_rows + st.tau * zl), st.gx, n);
  st.lambda = scatter(-st.minv.solve_transpose(zx), st.gl, n);
  for (std::size_t i = 0; i < st.gl.size(); ++i) st.p(st.gl[i]) = st.tau * st.zl[i];
  for (std::size_t i = 0; i < st.gx.size(); ++i) st.a(st.gx[i]) = -st.zx[i];
}

}  // namespace ds_engine

KktReport ds_kkt_from_correlations(const Vector& p, const Vector& a, double tau, const Vector& x,
                                   const Vector& lambda) {
  KktReport r;
  for (Index j = 0; j < x.size(); ++j) {
    if (lambda(j) != 0.0) {
      r.support_violation = std::max(r.support_violation, std::abs(p(j) - tau * sign_of(lambda(j))));
    } else {
      r.off_support_max = std::max(r.off_support_max, std::abs(p(j)));
    }
    if (x(j) != 0.0) {
      r.dual_support_violation = std::max(r.dual_support_violation, std::abs(a(j) + sign_of(x(j))));
    } else {
      r.dual_off_support_max = std::max(r.dual_off_support_max, std::abs(a(j)));
    }
  }
  r.pass = r.support_violation <= 1e-8 * tau && r.off_support_max <= tau * (1.0 + 1e-8) &&
           r.dual_support_violation <= 1e-8 && r.dual_off_support_max <= 1.0 + 1e-8;
  return r;
}

KktReport ds_kkt(const Matrix& a, const Vector& y, double tau, const Vector& x, const Vector& lambda) {
  const Vector p = a.transpose() * (a * x - y);
  const Vector al = a.transpose() * (a * lambda);
  return ds_kkt_from_correlations(p, al, tau, x, lambda);
}

DsState ds_path(const GramOperator& g, const Vector& q, double tau, HomotopyTrace* trace, const PathOptions& opts) {
  if (!(tau > 0.0)) raise(ErrorCode::InvalidArgument, "tau must be positive");
  const Index n = g.size();
  HomotopyTrace local;
  HomotopyTrace& tr = trace ? *trace : local;
  const Index max_steps = opts.max_steps > 0 ? opts.max_steps : 20 * n;
  DsState st = ds_engine::empty_state(n, tau, q);
  tr.final_epsilon = 1.0;
  if (n == 0) return st;
  Index start = 0;
  const double tau0 = q.cwiseAbs().maxCoeff(&start);
  if (tau >= tau0) return st;

  double tc = tau0;
  tr.params.push_back(tc);
  tr.steps.push_back(StepEvent{0.0, StepKind::Activate, start, sign_of(st.p(start))});
  ds_engine::after_lambda_gain(st, g, start, sign_of(st.p(start)), tr);

  Index since_refresh = 0;
  for (Index k = 0;; ++k) {
    if (k >= max_steps) raise(ErrorCode::IterationLimit, "cold DS exceeded " + std::to_string(max_steps) + " steps");
    const Vector zl = Eigen::Map<const Vector>(st.zl.data(), static_cast<Index>(st.zl.size()));
    const Vector dx = scatter(-st.minv.solve(zl), st.gx, n);
    const Vector dp = g.times(dx, st.gx);
    tr.products += 1.0;

    const StepEvent shrink = min_shrink_step(st.x, dx, st.gx);
    const StepEvent act = min_activation_step(st.p, dp, tc, complement(st.in_l), 1.0);
    StepEvent ev = earlier(shrink, act);
    const double remaining = tc - tau;
    const bool last = ev.terminal() || ev.theta >= remaining;
    if (last) ev = StepEvent{remaining, StepKind::Terminal, -1, 0.0};
    st.x += ev.theta * dx;
    st.p += ev.theta * dp;
    tc = last ? tau : tc - ev.theta;
    st.tau = tc;
    tr.steps.push_back(ev);
    tr.params.push_back(tc);
    if (last) break;

    if (ev.kind == StepKind::Activate) {
      ds_engine::after_lambda_gain(st, g, ev.gamma, ev.sign, tr);
    } else {
      ds_engine::after_x_loss(st, g, std::find(st.gx.begin(), st.gx.end(), ev.gamma) - st.gx.begin(), tr);
    }
    ds_engine::maintain(st, g);
    if (++since_refresh >= opts.refresh_every) {
      since_refresh = 0;
      st.p = g.times(st.x, st.gx) - q;
      st.a = g.times(st.lambda, st.gl);
      tr.products += 2.0;
    }
  }
  st.tau = tau;
  ds_engine::polish(st, gather(q, st.gl));
  return st;
}

DsState solve_ds(const MatrixOperator& a, const Vector& y, double tau, HomotopyTrace* trace,
                 const PathOptions& opts) {
  if (y.size() != a.rows()) raise(ErrorCode::InvalidArgument, "rhs length does not match rows");
  require_no_zero_columns(a.matrix());
  HomotopyTrace local;
  HomotopyTrace& tr = trace ? *trace : local;
  const Vector q = a.apply_transpose(y);
  tr.products += 0.5;
  DenseGram g(a);
  return ds_path(g, q, tau, &tr, opts);
}

DsState solve_ds(const Matrix& a, const Vector& y, double tau) {
  MatrixOperator op(a);
  return solve_ds(op, y, tau);
}

}  // namespace l1h
