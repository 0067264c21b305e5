#include "l1h/session.hpp"

#include "l1h/dynamic_seq.hpp"
#include "l1h/dynamic_x.hpp"
#include "l1h/error.hpp"
#include "l1h/matrix_io.hpp"

#include <cmath>

namespace l1h {
namespace {

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

Matrix index_column(const IndexList& idx, const std::vector<double>* signs = nullptr) {
  Matrix m(static_cast<Index>(idx.size()), 1);
  for (std::size_t i = 0; i < idx.size(); ++i)
    m(static_cast<Index>(i), 0) = signs ? (*signs)[i] : static_cast<double>(idx[i]);
  return m;
}

const Matrix& section(const SectionMap& s, const std::string& name) {
  auto it = s.find(name);
  if (it == s.end()) raise(ErrorCode::Io, "state file lacks section '" + name + "'");
  return it->second;
}

Vector as_vector(const Matrix& m, const std::string& name) {
  if (m.size() == 0) return Vector();
  if (m.cols() != 1 && m.rows() != 1) raise(ErrorCode::Io, "state section '" + name + "' is not a vector");
  return Eigen::Map<const Vector>(m.data(), m.size());
}

double as_scalar(const SectionMap& s, const std::string& name) {
  const Matrix& m = section(s, name);
  if (m.size() != 1) raise(ErrorCode::Io, "state section '" + name + "' is not a scalar");
  return m(0, 0);
}

IndexList as_indices(const Matrix& m, Index n, const std::string& name) {
  const Vector v = as_vector(m, name);
  IndexList out;
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (Index i = 0; i < v.size(); ++i) {
    const double d = v(i);
    if (!(d >= 0.0) || d >= static_cast<double>(n) || d != std::floor(d))
      raise(ErrorCode::Io, "state section '" + name + "' holds an invalid index");
    const Index j = static_cast<Index>(d);
    if (seen[static_cast<std::size_t>(j)]) raise(ErrorCode::Io, "state section '" + name + "' repeats an index");
    seen[static_cast<std::size_t>(j)] = 1;
    out.push_back(j);
  }
  return out;
}

std::vector<double> as_signs(const Matrix& m, std::size_t count, const std::string& name) {
  const Vector v = as_vector(m, name);
  if (static_cast<std::size_t>(v.size()) != count) raise(ErrorCode::Io, "state section '" + name + "' has the wrong length");
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double s = v(static_cast<Index>(i));
    if (s != 1.0 && s != -1.0) raise(ErrorCode::Io, "state section '" + name + "' holds a sign other than +-1");
    out[i] = s;
  }
  return out;
}

Vector flatten_rows(const Vector& w, Index expected) {
  if (w.size() != expected) raise(ErrorCode::InvalidArgument, "values do not match the number of rows");
  return w;
}

}  // namespace

Session Session::solve(Program program, Matrix a, Vector y, double tau) {
  if (y.size() != a.rows()) raise(ErrorCode::InvalidArgument, "rhs length does not match matrix rows");
  Session s;
  s.program_ = program;
  s.a_ = std::move(a);
  s.y_ = std::move(y);
  const MatrixOperator op(s.a_);
  if (program == Program::Bpdn) {
    s.bpdn_ = solve_bpdn(op, s.y_, tau, &s.last_);
  } else {
    s.ds_ = solve_ds(op, s.y_, tau, &s.last_);
  }
  return s;
}

Session Session::solve_ratio(Program program, Matrix a, Vector y, double ratio) {
  if (!(ratio > 0.0) || !std::isfinite(ratio)) raise(ErrorCode::Config, "tau ratio must be positive");
  if (y.size() != a.rows()) raise(ErrorCode::InvalidArgument, "rhs length does not match matrix rows");
  const Vector c = a.transpose() * y;
  const double tau = ratio * (c.size() ? c.cwiseAbs().maxCoeff() : 0.0);
  if (!(tau > 0.0)) raise(ErrorCode::InvalidArgument, "A^T y is zero; tau would be zero");
  return solve(program, std::move(a), std::move(y), tau);
}

IndexList Session::support() const { return program_ == Program::Bpdn ? bpdn_.active.indices() : ds_.gx; }

KktReport Session::kkt() const {
  if (program_ == Program::Bpdn) return bpdn_kkt(a_, y_, bpdn_.tau, bpdn_.x);
  return ds_kkt(a_, y_, ds_.tau, ds_.x, ds_.lambda);
}

void Session::update_signal(const Vector& y_new) {
  if (y_new.size() != y_.size()) raise(ErrorCode::InvalidArgument, "new rhs length does not match matrix rows");
  const MatrixOperator op(a_);
  HomotopyTrace tr;
  if (program_ == Program::Bpdn) {
    bpdn_ = update_bpdn_signal(bpdn_, op, y_, y_new, &tr);
  } else {
    ds_ = update_ds_signal(ds_, op, y_, y_new, &tr);
  }
  y_ = y_new;
  last_ = std::move(tr);
}

void Session::add_rows(const Matrix& b, const Vector& w) {
  if (b.cols() != a_.cols()) raise(ErrorCode::InvalidArgument, "new rows do not match the column count");
  const Vector values = flatten_rows(w, b.rows());
  HomotopyTrace tr;
  for (Index i = 0; i < b.rows(); ++i) {
    const MatrixOperator op(a_);
    if (program_ == Program::Bpdn) {
      bpdn_ = bpdn_add_measurement(bpdn_, op, y_, b.row(i), values(i), &tr);
    } else {
      ds_ = ds_add_measurement(ds_, op, y_, b.row(i), values(i), &tr);
    }
    a_.conservativeResize(a_.rows() + 1, Eigen::NoChange);
    a_.row(a_.rows() - 1) = b.row(i);
    y_.conservativeResize(y_.size() + 1);
    y_(y_.size() - 1) = values(i);
  }
  last_ = std::move(tr);
}

void Session::remove_row(Index row) {
  if (program_ != Program::Bpdn) raise(ErrorCode::Config, "row removal is available for BPDN only");
  if (row < 0 || row >= a_.rows()) raise(ErrorCode::InvalidArgument, "row index out of range");
  HomotopyTrace tr;
  bpdn_ = bpdn_remove_measurement(bpdn_, a_, y_, row, &tr);
  Matrix a(a_.rows() - 1, a_.cols());
  Vector y(y_.size() - 1);
  a << a_.topRows(row), a_.bottomRows(a_.rows() - row - 1);
  y << y_.head(row), y_.tail(y_.size() - row - 1);
  a_ = std::move(a);
  y_ = std::move(y);
  last_ = std::move(tr);
}

void Session::save(const std::string& path) const {
  SectionMap s;
  s["program"] = scalar(program_ == Program::Bpdn ? 0.0 : 1.0);
  s["a"] = a_;
  s["y"] = y_;
  s["tau"] = scalar(tau());
  s["epsilon"] = scalar(1.0);
  s["x"] = x();
  if (program_ == Program::Bpdn) {
    s["support"] = index_column(bpdn_.active.indices());
    s["signs"] = index_column(bpdn_.active.indices(), &bpdn_.active.signs());
  } else {
    s["support"] = index_column(ds_.gx);
    s["signs"] = index_column(ds_.gx, &ds_.zx);
    s["lambda"] = ds_.lambda;
    s["lsupp"] = index_column(ds_.gl);
    s["lsigns"] = index_column(ds_.gl, &ds_.zl);
  }
  write_container(path, s);
}

Session Session::load(const std::string& path) {
  const SectionMap s = read_container(path);
  Session out;
  const double prog = as_scalar(s, "program");
  if (prog != 0.0 && prog != 1.0) raise(ErrorCode::Io, "state file names an unknown program");
  out.program_ = prog == 0.0 ? Program::Bpdn : Program::Ds;
  out.a_ = section(s, "a");
  out.y_ = as_vector(section(s, "y"), "y");
  const Index n = out.a_.cols();
  if (out.y_.size() != out.a_.rows()) raise(ErrorCode::Io, "state rhs does not match the matrix");
  if (as_scalar(s, "epsilon") != 1.0) raise(ErrorCode::StaleWarmStart, "state was saved mid-path");
  const double tau = as_scalar(s, "tau");
  const Vector x = as_vector(section(s, "x"), "x");
  if (x.size() != n) raise(ErrorCode::Io, "state solution does not match the matrix");
  const IndexList support = as_indices(section(s, "support"), n, "support");
  const std::vector<double> signs = as_signs(section(s, "signs"), support.size(), "signs");

  const MatrixOperator op(out.a_);
  const DenseGram g(op);
  const Vector q = out.a_.transpose() * out.y_;
  if (out.program_ == Program::Bpdn) {
    BpdnState& st = out.bpdn_;
    st.x = x;
    st.tau = tau;
    st.active = ActiveSet(n);
    for (std::size_t i = 0; i < support.size(); ++i) st.active.add(support[i], signs[i], g);
    st.p = out.a_.transpose() * (out.a_ * x) - q;
    check_warm_bpdn(st);
  } else {
    DsState st = ds_engine::empty_state(n, tau, q);
    st.x = x;
    st.lambda = as_vector(section(s, "lambda"), "lambda");
    if (st.lambda.size() != n) raise(ErrorCode::Io, "state dual does not match the matrix");
    st.gx = support;
    st.zx = signs;
    st.gl = as_indices(section(s, "lsupp"), n, "lsupp");
    st.zl = as_signs(section(s, "lsigns"), st.gl.size(), "lsigns");
    if (st.gl.size() != st.gx.size()) raise(ErrorCode::StaleWarmStart, "DS supports differ in size");
    for (Index j : st.gx) st.in_x[static_cast<std::size_t>(j)] = 1;
    for (Index j : st.gl) st.in_l[static_cast<std::size_t>(j)] = 1;
    st.p = out.a_.transpose() * (out.a_ * x) - q;
    st.a = out.a_.transpose() * (out.a_ * st.lambda);
    if (!st.gx.empty()) ds_engine::rebuild_inverse(st, g);
    check_warm_ds(st);
    out.ds_ = std::move(st);
  }
  return out;
}

}  // namespace l1h
