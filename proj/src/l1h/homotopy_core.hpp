#pragma once

#include "l1h/linalg.hpp"
#include "l1h/operators.hpp"

#include <limits>
#include <vector>

namespace l1h {

enum class StepKind { Shrink, Activate, Terminal };

struct StepEvent {
  double theta = std::numeric_limits<double>::infinity();
  StepKind kind = StepKind::Terminal;
  Index gamma = -1;  // -1 when kind == Terminal
  double sign = 0.0;

  bool terminal() const { return kind == StepKind::Terminal; }
};

const char* step_kind_name(StepKind kind);

inline constexpr double kRatioTolerance = 1e-12;

// Smallest strictly positive -values(j)/directions(j) over j in support.
StepEvent min_shrink_step(const Vector& values, const Vector& directions, const IndexList& support);

// Like min_shrink_step, but each entry carries the sign it must keep; an
// entry sitting at zero whose direction opposes its sign fires at theta 0.
// signs is aligned with support.
StepEvent min_shrink_step_signed(const Vector& values, const Vector& directions,
                                 const std::vector<double>& signs, const IndexList& support);

// Smallest theta > 0 with |p(j) + theta*d(j)| = bound - rate*theta for a
// candidate j. The hit sign is returned in the event.
StepEvent min_activation_step(const Vector& p, const Vector& d, double bound, const IndexList& candidates,
                              double rate = 0.0);

// Earlier event wins; ties within tolerance go to the smaller index.
StepEvent earlier(const StepEvent& a, const StepEvent& b);

// Indices 0..n-1 not flagged in the membership mask.
IndexList complement(const std::vector<char>& member);

// Support indices, their signs, and a Cholesky factor of the Gram submatrix
// over the support, rebuilt from scratch every 200 updates or when a cheap
// residual probe drifts past 1e-6.
class ActiveSet {
 public:
  ActiveSet() = default;
  explicit ActiveSet(Index n) : member_(static_cast<std::size_t>(n), 0) {}

  const IndexList& indices() const { return indices_; }
  const std::vector<double>& signs() const { return signs_; }
  const SpdFactor& factor() const { return factor_; }
  SpdFactor& factor() { return factor_; }
  Index size() const { return static_cast<Index>(indices_.size()); }
  bool contains(Index j) const { return member_[static_cast<std::size_t>(j)] != 0; }
  const std::vector<char>& membership() const { return member_; }
  Index position_of(Index j) const;
  Vector sign_vector() const;

  // Throws DegenerateSupport if the extended Gram submatrix is singular.
  void add(Index j, double sign, const GramOperator& g);
  void remove_at(Index position);
  void set_sign(Index position, double sign) { signs_[static_cast<std::size_t>(position)] = sign; }

  void rebuild(const GramOperator& g);
  // Applies the refactorization policy; returns true if it rebuilt.
  bool maintain(const GramOperator& g);

 private:
  IndexList indices_;
  std::vector<double> signs_;
  std::vector<char> member_;
  SpdFactor factor_;
  Index since_probe_ = 0;
};

}  // namespace l1h
