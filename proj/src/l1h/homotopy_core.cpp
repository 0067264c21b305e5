#include "l1h/homotopy_core.hpp"

#include "l1h/error.hpp"

#include <algorithm>
#include <cmath>

namespace l1h {

const char* step_kind_name(StepKind kind) {
  switch (kind) {
    case StepKind::Shrink: return "shrink";
    case StepKind::Activate: return "activate";
    case StepKind::Terminal: return "terminal";
  }
  return "?";
}

namespace {

bool ties(double a, double b) { return std::abs(a - b) <= kRatioTolerance * std::max(1.0, std::abs(b)); }

void offer(StepEvent& best, double theta, StepKind kind, Index j, double sign) {
  if (best.terminal() || theta < best.theta - kRatioTolerance * std::max(1.0, best.theta) ||
      (ties(theta, best.theta) && j < best.gamma)) {
    best.theta = theta;
    best.kind = kind;
    best.gamma = j;
    best.sign = sign;
  }
}

}  // namespace

StepEvent earlier(const StepEvent& a, const StepEvent& b) {
  if (a.terminal()) return b;
  if (b.terminal()) return a;
  if (ties(a.theta, b.theta)) return a.gamma <= b.gamma ? a : b;
  return a.theta < b.theta ? a : b;
}

StepEvent min_shrink_step(const Vector& values, const Vector& directions, const IndexList& support) {
  StepEvent best;
  for (Index j : support) {
    const double d = directions(j);
    if (d == 0.0) continue;
    const double ratio = -values(j) / d;
    if (ratio > kRatioTolerance) offer(best, ratio, StepKind::Shrink, j, sign_of(values(j)));
  }
  return best;
}

StepEvent min_shrink_step_signed(const Vector& values, const Vector& directions,
                                 const std::vector<double>& signs, const IndexList& support) {
  StepEvent best;
  for (std::size_t k = 0; k < support.size(); ++k) {
    const Index j = support[k];
    const double s = signs[k];
    const double d = directions(j);
    if (s * d >= 0.0) continue;
    const double ratio = std::max(0.0, s * values(j)) / (-s * d);
    offer(best, ratio, StepKind::Shrink, j, s);
  }
  return best;
}

StepEvent min_activation_step(const Vector& p, const Vector& d, double bound, const IndexList& candidates,
                              double rate) {
  StepEvent best;
  const double slack = 1e-9 * std::max(1.0, bound);
  for (Index j : candidates) {
    const double pj = p(j);
    if (std::abs(pj) > bound + slack) {
      raise(ErrorCode::ConstraintAlreadyViolated,
            "index " + std::to_string(j) + " has |p| = " + std::to_string(std::abs(pj)) + " above bound " +
                std::to_string(bound));
    }
    const double up = d(j) + rate;
    if (up > 0.0) {
      const double theta = (bound - pj) / up;
      if (theta > kRatioTolerance) offer(best, theta, StepKind::Activate, j, 1.0);
    }
    const double down = rate - d(j);
    if (down > 0.0) {
      const double theta = (bound + pj) / down;
      if (theta > kRatioTolerance) offer(best, theta, StepKind::Activate, j, -1.0);
    }
  }
  return best;
}

IndexList complement(const std::vector<char>& member) {
  IndexList out;
  for (std::size_t j = 0; j < member.size(); ++j) {
    if (!member[j]) out.push_back(static_cast<Index>(j));
  }
  return out;
}

Index ActiveSet::position_of(Index j) const {
  auto it = std::find(indices_.begin(), indices_.end(), j);
  return it == indices_.end() ? -1 : static_cast<Index>(it - indices_.begin());
}

Vector ActiveSet::sign_vector() const {
  return Eigen::Map<const Vector>(signs_.data(), static_cast<Index>(signs_.size()));
}

void ActiveSet::add(Index j, double sign, const GramOperator& g) {
  if (contains(j)) raise(ErrorCode::InvalidArgument, "index already active: " + std::to_string(j));
  try {
    factor_.add_index(j, g.column(j, indices_), g.diagonal(j));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotPositiveDefinite) {
      raise(ErrorCode::DegenerateSupport, "adding index " + std::to_string(j) + ": " + e.what());
    }
    throw;
  }
  indices_.push_back(j);
  signs_.push_back(sign);
  member_[static_cast<std::size_t>(j)] = 1;
}

void ActiveSet::remove_at(Index position) {
  const Index j = indices_[static_cast<std::size_t>(position)];
  factor_.remove_index(position);
  indices_.erase(indices_.begin() + position);
  signs_.erase(signs_.begin() + position);
  member_[static_cast<std::size_t>(j)] = 0;
}

void ActiveSet::rebuild(const GramOperator& g) {
  try {
    factor_ = SpdFactor::factor(g.submatrix(indices_), indices_);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotPositiveDefinite) raise(ErrorCode::DegenerateSupport, e.what());
    throw;
  }
  since_probe_ = 0;
}

bool ActiveSet::maintain(const GramOperator& g) {
  if (indices_.empty()) return false;
  if (factor_.updates_since_factor() >= 200) {
    rebuild(g);
    return true;
  }
  if (++since_probe_ >= 25) {
    since_probe_ = 0;
    const Index k = size() - 1;
    const Matrix l = factor_.lower();
    const Vector recon = l * l.row(k).transpose();
    const Vector exact = g.column(indices_.back(), indices_);
    const double scale = std::max(1.0, exact.cwiseAbs().maxCoeff());
    if ((recon - exact).cwiseAbs().maxCoeff() > 1e-6 * scale) {
      rebuild(g);
      return true;
    }
  }
  return false;
}

}  // namespace l1h
