#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "depthcraft/error.hpp"

namespace depthcraft {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  Eigen::VectorXd x;
  double objective = 0.0;
  int iterations = 0;
};

struct LpOptions {
  double tolerance = 1e-10;
  int max_iterations = 100000;
  // Dantzig pricing until this many consecutive degenerate pivots, Bland's
  // rule afterwards. Zero means Bland from the start.
  int degenerate_switch = 50;
};

namespace detail {

/// Dense bounded-variable primal simplex on a tableau. Columns past
/// `structural` are artificials.
class BoundedSimplex {
 public:
  BoundedSimplex(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& upper,
                 const LpOptions& opt)
      : opt_(opt), m_(a.rows()), n_(a.cols()) {
    const Eigen::Index total = n_ + m_;
    t_ = Eigen::MatrixXd::Zero(m_, total);
    t_.leftCols(n_) = a;
    t_.rightCols(m_).setIdentity();
    rhs_ = b;
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (rhs_(i) < 0) {
        t_.row(i).head(n_) *= -1.0;
        rhs_(i) = -rhs_(i);
      }
    }
    upper_.resize(total);
    upper_.head(n_) = upper;
    upper_.tail(m_).setConstant(std::numeric_limits<double>::infinity());
    at_upper_.assign(static_cast<std::size_t>(total), false);
    basis_.resize(static_cast<std::size_t>(m_));
    for (Eigen::Index i = 0; i < m_; ++i) basis_[static_cast<std::size_t>(i)] = n_ + i;
    value_ = rhs_;
  }

  /// Phase one: minimise the artificial sum. Returns false if infeasible.
  bool phase_one() {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n_ + m_);
    c.tail(m_).setOnes();
    if (value_.sum() > opt_.tolerance) {
      if (!optimise(c)) throw SolverError("lp: phase one unbounded");
      if (artificial_sum() > opt_.tolerance * std::max(1.0, rhs_.lpNorm<Eigen::Infinity>())) return false;
    }
    // Artificials are pinned at zero from here on.
    upper_.tail(m_).setZero();
    return true;
  }

  bool phase_two(const Eigen::VectorXd& cost) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n_ + m_);
    c.head(n_) = cost;
    return optimise(c);
  }

  Eigen::VectorXd solution() const {
    Eigen::VectorXd x(n_ + m_);
    for (Eigen::Index j = 0; j < n_ + m_; ++j) x(j) = at_upper_[static_cast<std::size_t>(j)] ? upper_(j) : 0.0;
    for (Eigen::Index i = 0; i < m_; ++i) x(basis_[static_cast<std::size_t>(i)]) = value_(i);
    return x.head(n_);
  }

  int iterations() const { return iterations_; }

 private:
  double artificial_sum() const {
    double s = 0.0;
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (basis_[static_cast<std::size_t>(i)] >= n_) s += std::max(0.0, value_(i));
    }
    return s;
  }

  bool is_basic(Eigen::Index j) const {
    for (Eigen::Index b : basis_) {
      if (b == j) return true;
    }
    return false;
  }

  bool optimise(const Eigen::VectorXd& c) {
    const Eigen::Index total = n_ + m_;
    const double tol = opt_.tolerance;
    int degenerate_streak = 0;
    for (;;) {
      if (iterations_ >= opt_.max_iterations) throw SolverError("lp: iteration limit reached");
      bool bland = degenerate_streak >= opt_.degenerate_switch;

      // Reduced costs d_j = c_j - c_B' T_j.
      Eigen::VectorXd cb(m_);
      for (Eigen::Index i = 0; i < m_; ++i) cb(i) = c(basis_[static_cast<std::size_t>(i)]);
      Eigen::RowVectorXd d = c.transpose() - cb.transpose() * t_;

      Eigen::Index enter = -1;
      double best = 0.0;
      for (Eigen::Index j = 0; j < total; ++j) {
        if (upper_(j) <= 0.0 || is_basic(j)) continue;
        bool up = at_upper_[static_cast<std::size_t>(j)];
        double gain = up ? d(j) : -d(j);
        if (gain <= tol) continue;
        if (bland) {
          enter = j;
          break;
        }
        if (gain > best) {
          best = gain;
          enter = j;
        }
      }
      if (enter < 0) return true;

      const double s = at_upper_[static_cast<std::size_t>(enter)] ? -1.0 : 1.0;
      double theta = upper_(enter);
      Eigen::Index leave = -1;
      bool leave_to_upper = false;
      for (Eigen::Index i = 0; i < m_; ++i) {
        double rate = -s * t_(i, enter);
        Eigen::Index bi = basis_[static_cast<std::size_t>(i)];
        double cand;
        bool to_upper;
        if (rate < -tol) {
          cand = std::max(0.0, value_(i)) / -rate;
          to_upper = false;
        } else if (rate > tol && std::isfinite(upper_(bi))) {
          cand = std::max(0.0, upper_(bi) - value_(i)) / rate;
          to_upper = true;
        } else {
          continue;
        }
        if (cand < theta - tol ||
            (leave >= 0 && cand <= theta + tol && bi < basis_[static_cast<std::size_t>(leave)])) {
          theta = std::min(theta, cand);
          leave = i;
          leave_to_upper = to_upper;
        }
      }
      if (!std::isfinite(theta)) return false;
      ++iterations_;
      degenerate_streak = theta <= tol ? degenerate_streak + 1 : 0;

      value_ -= (s * theta) * t_.col(enter);
      if (leave < 0) {
        // Bound flip, the basis is unchanged.
        at_upper_[static_cast<std::size_t>(enter)] = !at_upper_[static_cast<std::size_t>(enter)];
        continue;
      }
      double entering_value = s > 0 ? theta : upper_(enter) - theta;
      Eigen::Index old = basis_[static_cast<std::size_t>(leave)];
      at_upper_[static_cast<std::size_t>(old)] = leave_to_upper;
      at_upper_[static_cast<std::size_t>(enter)] = false;
      basis_[static_cast<std::size_t>(leave)] = enter;
      value_(leave) = entering_value;

      double pivot = t_(leave, enter);
      t_.row(leave) /= pivot;
      for (Eigen::Index i = 0; i < m_; ++i) {
        if (i == leave) continue;
        double f = t_(i, enter);
        if (f != 0.0) t_.row(i) -= f * t_.row(leave);
      }
    }
  }

  LpOptions opt_;
  Eigen::Index m_;
  Eigen::Index n_;
  Eigen::MatrixXd t_;
  Eigen::VectorXd rhs_;
  Eigen::VectorXd upper_;
  Eigen::VectorXd value_;
  std::vector<bool> at_upper_;
  std::vector<Eigen::Index> basis_;
  int iterations_ = 0;
};

}  // namespace detail

/// Solves  min c'x  s.t.  A x = b,  0 <= x <= upper  (upper may be +inf)
/// with a dense two-phase primal simplex.
inline LpResult solve_lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                         const Eigen::VectorXd& upper, const LpOptions& opt = {}) {
  if (a.cols() != c.size() || a.rows() != b.size() || upper.size() != c.size()) {
    throw ParameterError("lp: dimension mismatch");
  }
  LpResult res;
  detail::BoundedSimplex simplex(a, b, upper, opt);
  if (!simplex.phase_one()) {
    res.status = LpStatus::infeasible;
    res.iterations = simplex.iterations();
    return res;
  }
  bool bounded = simplex.phase_two(c);
  res.iterations = simplex.iterations();
  res.x = simplex.solution();
  res.status = bounded ? LpStatus::optimal : LpStatus::unbounded;
  res.objective = c.dot(res.x);
  return res;
}

/// Feasibility of {x : A x = b, 0 <= x <= upper}.
inline bool lp_feasible(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& upper,
                        const LpOptions& opt = {}) {
  detail::BoundedSimplex simplex(a, b, upper, opt);
  return simplex.phase_one();
}

}  // namespace depthcraft
