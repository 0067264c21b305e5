#pragma once

#include "l1h/bpdn.hpp"
#include "l1h/dantzig.hpp"

#include <string>

namespace l1h {

enum class Program { Bpdn, Ds };

// A solved program together with its data, ready for warm updates and for
// persistence across processes.
class Session {
 public:
  static Session solve(Program program, Matrix a, Vector y, double tau);
  // tau = ratio * ||A^T y||_inf
  static Session solve_ratio(Program program, Matrix a, Vector y, double ratio);

  // Container sections: program, a, y, tau, epsilon, x, support, signs and
  // for DS also lambda, lsupp, lsigns. Loading refactors the
  // supports, recomputes the correlations and throws StaleWarmStart if the
  // stored solution is not optimal for the stored data.
  void save(const std::string& path) const;
  static Session load(const std::string& path);

  void update_signal(const Vector& y_new);
  void add_rows(const Matrix& b, const Vector& w);
  void remove_row(Index row);  // BPDN only

  Program program() const { return program_; }
  const Matrix& matrix() const { return a_; }
  const Vector& rhs() const { return y_; }
  const Vector& x() const { return program_ == Program::Bpdn ? bpdn_.x : ds_.x; }
  // Dual vector for DS, empty for BPDN.
  Vector lambda() const { return program_ == Program::Ds ? ds_.lambda : Vector(); }
  double tau() const { return program_ == Program::Bpdn ? bpdn_.tau : ds_.tau; }
  IndexList support() const;
  const HomotopyTrace& last_trace() const { return last_; }
  KktReport kkt() const;

 private:
  Program program_ = Program::Bpdn;
  Matrix a_;
  Vector y_;
  BpdnState bpdn_;
  DsState ds_;
  HomotopyTrace last_;
};

}  // namespace l1h
