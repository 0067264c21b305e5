#include "l1h/robust_decode.hpp"

#include "l1h/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace l1h {

NullProjector null_projector(const Matrix& f) {
  if (f.rows() < f.cols()) raise(ErrorCode::RankDeficient, "coding matrix has fewer rows than columns");
  NullProjector np;
  np.m = ls_solve(f, Vector::Zero(f.rows())).p;
  np.p = Matrix::Identity(f.rows(), f.rows()) - f * np.m * f.transpose();
  np.p = 0.5 * (np.p + np.p.transpose()).eval();
  return np;
}

NullProjector projector_append(const NullProjector& np, const Matrix& f, const RowVector& b) {
  const Index r = np.p.rows();
  if (f.rows() != r || b.size() != f.cols()) raise(ErrorCode::InvalidArgument, "projector append: shape mismatch");
  const Vector mb = np.m * b.transpose();
  const Vector k = f * mb;
  const double g = b.dot(mb.transpose());
  const double alpha = 1.0 / (1.0 + g);
  NullProjector out;
  out.p.resize(r + 1, r + 1);
  out.p.topLeftCorner(r, r) = np.p + alpha * k * k.transpose();
  out.p.topRightCorner(r, 1) = -alpha * k;
  out.p.bottomLeftCorner(1, r) = -alpha * k.transpose();
  out.p(r, r) = alpha;
  out.m = np.m - alpha * mb * mb.transpose();
  return out;
}

Vector decode_message(const RobustState& state) {
  if (state.proj.m.rows() != state.n()) raise(ErrorCode::RankDeficient, "state holds no least-squares inverse");
  return state.proj.m * (state.f.transpose() * (state.s - state.c));
}

KktReport robust_kkt(const RobustState& st) {
  const Vector p = st.proj.p * (st.c - st.s);
  KktReport r;
  for (Index j = 0; j < st.rows(); ++j) {
    if (st.c(j) != 0.0) {
      const double weight = st.in_new[static_cast<std::size_t>(j)] ? st.epsilon : 1.0;
      r.support_violation = std::max(r.support_violation, std::abs(p(j) + weight * st.tau * sign_of(st.c(j))));
    } else {
      r.off_support_max = std::max(r.off_support_max, std::abs(p(j)));
    }
  }
  r.pass = r.support_violation <= 1e-8 * st.tau && r.off_support_max <= st.tau * (1.0 + 1e-8);
  return r;
}

RobustState robust_init(const Matrix& a, const Vector& y, double tau, HomotopyTrace* trace) {
  if (y.size() != a.rows()) raise(ErrorCode::InvalidArgument, "codeword length does not match rows");
  if (!(tau > 0.0)) raise(ErrorCode::InvalidArgument, "tau must be positive");
  HomotopyTrace local;
  HomotopyTrace& tr = trace ? *trace : local;
  RobustState st;
  st.f = a;
  st.s = y;
  st.tau = tau;
  st.proj = null_projector(a);
  st.in_new.assign(static_cast<std::size_t>(a.rows()), 0);
  const ProjectorGram g(st.proj.p);
  const Vector q = st.proj.p * y;
  tr.products += 1.0;
  BpdnState b;
  try {
    b = bpdn_path(g, q, tau, &tr);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::DegenerateSupport) raise(ErrorCode::SingularGram, e.what());
    throw;
  }
  st.c = b.x;
  st.active = b.active;
  st.p = b.p;
  return st;
}

namespace {

void check_support_size(const RobustState& st) {
  if (st.active.size() > st.rows() - st.n()) {
    raise(ErrorCode::SingularGram, "support of size " + std::to_string(st.active.size()) + " exceeds " +
                                       std::to_string(st.rows() - st.n()));
  }
}

template <class F>
void as_singular_gram(F&& body) {
  try {
    body();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::DegenerateSupport) raise(ErrorCode::SingularGram, e.what());
    throw;
  }
}

// With |Gamma| = rank(P) every column of P lies in the span of the support
// columns, so j cannot simply join. c + t v with v_j = sign, v_Gamma = -sign
// P_GG^-1 P_Gj leaves P (c - s) unchanged; walk t up until the first
// support entry reaches zero and swap that index for j.
void pivot_at_full_rank(RobustState& st, const GramOperator& g, Index j, double sign, HomotopyTrace& tr,
                        double eps) {
  const IndexList gamma = st.active.indices();
  const Vector w = st.active.factor().solve(g.column(j, gamma));
  Index out = -1;
  double t_best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    const double v = -sign * w(static_cast<Index>(i));
    const double c = st.c(gamma[i]);
    if (c * v < 0.0 && -c / v < t_best) {
      t_best = -c / v;
      out = static_cast<Index>(i);
    }
  }
  if (out < 0) raise(ErrorCode::SingularGram, "full-rank support admits no exchange for index " + std::to_string(j));
  for (std::size_t i = 0; i < gamma.size(); ++i) st.c(gamma[i]) -= t_best * sign * w(static_cast<Index>(i));
  st.c(j) = t_best * sign;
  const Index leaving = gamma[static_cast<std::size_t>(out)];
  st.c(leaving) = 0.0;
  st.in_new[static_cast<std::size_t>(leaving)] = 0;
  st.active.remove_at(out);
  st.active.add(j, sign, g);
  tr.steps.push_back(StepEvent{0.0, StepKind::Shrink, leaving, 0.0});
  tr.params.push_back(eps);
}

}  // namespace

RobustState robust_add_measurements(const RobustState& state, const Matrix& b, const Vector& w, HomotopyTrace* trace,
                                    Index max_steps) {
  if (b.cols() != state.n()) raise(ErrorCode::InvalidArgument, "new rows have the wrong width");
  if (b.rows() != w.size()) raise(ErrorCode::InvalidArgument, "new rows and values differ in length");
  HomotopyTrace local;
  HomotopyTrace& tr = trace ? *trace : local;
  tr.final_epsilon = 1.0;
  RobustState st = state;
  const Index pnew = b.rows();
  if (pnew == 0) return st;

  const Vector x0 = decode_message(st);
  tr.products += 0.5;
  for (Index i = 0; i < pnew; ++i) {
    st.proj = projector_append(st.proj, st.f, b.row(i));
    st.f.conservativeResize(st.f.rows() + 1, Eigen::NoChange);
    st.f.row(st.f.rows() - 1) = b.row(i);
  }
  const Index old_rows = st.s.size();
  const Index rows = old_rows + pnew;
  const Vector d0 = w - b * x0;
  const double scale = std::max({1.0, st.c.cwiseAbs().maxCoeff(), d0.cwiseAbs().maxCoeff()});
  st.s.conservativeResize(rows);
  st.s.tail(pnew) = w;
  st.c.conservativeResize(rows);
  // The new entries are orthogonal to range(F) in P(c - s), so p is zero there.
  st.p.conservativeResize(rows);
  st.p.tail(pnew).setZero();
  st.in_new.resize(static_cast<std::size_t>(rows), 0);

  const ProjectorGram g(st.proj.p);
  ActiveSet active(rows);
  as_singular_gram([&] {
    const IndexList& old = st.active.indices();
    for (std::size_t i = 0; i < old.size(); ++i) active.add(old[i], st.active.signs()[i], g);
    for (Index i = 0; i < pnew; ++i) {
      const Index j = old_rows + i;
      if (std::abs(d0(i)) <= 1e-10 * scale) {
        st.c(j) = 0.0;
        tr.steps.push_back(StepEvent{0.0, StepKind::Shrink, j, 0.0});
        tr.params.push_back(0.0);
      } else {
        st.c(j) = d0(i);
        st.in_new[static_cast<std::size_t>(j)] = 1;
        active.add(j, sign_of(d0(i)), g);
      }
    }
  });
  st.active = std::move(active);
  check_support_size(st);

  if (max_steps <= 0) max_steps = 10 * rows;
  const double tau = st.tau;
  double eps = 0.0;
  Index since_refresh = 0;
  for (Index k = 0;; ++k) {
    if (std::none_of(st.in_new.begin(), st.in_new.end(), [](char v) { return v != 0; })) {
      tr.lucky_breakdown = eps < 1.0;
      break;
    }
    if (k >= max_steps) raise(ErrorCode::IterationLimit, "robust decoding exceeded " + std::to_string(max_steps) + " steps");
    const IndexList& gamma = st.active.indices();
    Vector rhs = Vector::Zero(st.active.size());
    for (std::size_t i = 0; i < gamma.size(); ++i) {
      if (st.in_new[static_cast<std::size_t>(gamma[i])]) rhs(static_cast<Index>(i)) = -st.active.signs()[i];
    }
    const Vector dc = scatter(st.active.factor().solve(rhs), gamma, rows);
    const Vector d = g.times(dc, gamma);
    tr.products += 1.0;

    const StepEvent shrink = min_shrink_step(st.c, dc, gamma);
    const StepEvent activate = min_activation_step(st.p, d, tau, complement(st.active.membership()));
    StepEvent ev = earlier(shrink, activate);
    const double clamp = (1.0 - eps) * tau;
    const bool last = ev.terminal() || ev.theta >= clamp;
    if (last) ev = StepEvent{clamp, StepKind::Terminal, -1, 0.0};
    st.c += ev.theta * dc;
    st.p += ev.theta * d;
    eps = last ? 1.0 : eps + ev.theta / tau;
    tr.steps.push_back(ev);
    tr.params.push_back(eps);
    if (last) break;

    if (ev.kind == StepKind::Shrink) {
      st.c(ev.gamma) = 0.0;
      st.active.remove_at(st.active.position_of(ev.gamma));
      st.in_new[static_cast<std::size_t>(ev.gamma)] = 0;
    } else if (st.active.size() >= rows - st.n()) {
      as_singular_gram([&] { pivot_at_full_rank(st, g, ev.gamma, -ev.sign, tr, eps); });
    } else {
      as_singular_gram([&] { st.active.add(ev.gamma, -ev.sign, g); });
      check_support_size(st);
    }
    as_singular_gram([&] { st.active.maintain(g); });
    if (++since_refresh >= 50) {
      since_refresh = 0;
      st.p = st.proj.p * (st.c - st.s);
      tr.products += 1.0;
    }
  }
  tr.final_epsilon = eps;

  // Every weight is one now; land on the closed form for the support.
  const IndexList& gamma = st.active.indices();
  const Vector z = st.active.sign_vector();
  Vector qg(static_cast<Index>(gamma.size()));
  for (std::size_t i = 0; i < gamma.size(); ++i) qg(static_cast<Index>(i)) = st.proj.p.row(gamma[i]).dot(st.s);
  st.c = scatter(st.active.factor().solve(qg - tau * z), gamma, rows);
  for (std::size_t i = 0; i < gamma.size(); ++i) st.p(gamma[i]) = -tau * z(static_cast<Index>(i));
  std::fill(st.in_new.begin(), st.in_new.end(), 0);
  st.epsilon = 1.0;
  return st;
}

}  // namespace l1h
