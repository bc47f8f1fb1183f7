#include "tinlinq/power.hpp"

#include "tinlinq/error.hpp"
#include "tinlinq/matching.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

namespace tinlinq {
namespace {

constexpr double kOff = -std::numeric_limits<double>::infinity();

PowerAlloc expand(int k, const UserSet& subset, const Eigen::VectorXd& y_u) {
  PowerAlloc r{Eigen::VectorXd::Constant(k, kOff)};
  for (std::size_t a = 0; a < subset.size(); ++a) {
    r.r(subset[a]) = std::min(0.0, -y_u(static_cast<Eigen::Index>(a)));
  }
  return r;
}

class KuhnMunkres {
 public:
  KuhnMunkres(const Eigen::MatrixXd& a, double tol)
      : a_(a), n_(static_cast<int>(a.rows())), tol_(tol), match_u_(n_, -1), match_v_(n_, -1) {
    labels_.y_u = a_.rowwise().maxCoeff();
    labels_.y_v = Eigen::VectorXd::Zero(n_);
    trace_.initial_y_u = labels_.y_u;
  }

  void run() {
    if (diagonal_tight()) return;
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) {
        if (match_v_[j] == -1 && tight(i, j)) {
          match_u_[i] = j;
          match_v_[j] = i;
          break;
        }
      }
    }
    for (;;) {
      const auto free_u = std::find(match_u_.begin(), match_u_.end(), -1);
      if (free_u == match_u_.end()) break;
      if (grow_tree(static_cast<int>(free_u - match_u_.begin()))) return;
    }
    if (!diagonal_tight()) {
      throw Error(ErrorCode::InfeasibleGdof, "target not achievable: the diagonal is not a maximum assignment");
    }
  }

  const LabelPair& labels() const { return labels_; }
  const HungarianTrace& trace() const { return trace_; }
  int rounds() const { return static_cast<int>(trace_.steps.size()); }
  int phases() const { return phases_; }
  std::vector<int> assignment() const {
    if (std::find(match_u_.begin(), match_u_.end(), -1) == match_u_.end()) return match_u_;
    std::vector<int> diag(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) diag[i] = i;
    return diag;
  }

 private:
  bool tight(int i, int j) const { return std::abs(labels_.y_u(i) + labels_.y_v(j) - a_(i, j)) <= tol_; }

  bool diagonal_tight() const {
    for (int j = 0; j < n_; ++j) {
      if (!tight(j, j)) return false;
    }
    return true;
  }

  // Grows an alternating tree from free row u. Returns true when the
  // diagonal became tight (labels final), false after one augmentation.
  bool grow_tree(int u) {
    ++phases_;
    std::vector<char> in_s(n_, 0), in_t(n_, 0);
    std::vector<int> parent(n_, -1);
    in_s[u] = 1;
    for (;;) {
      int v = -1;
      for (int j = 0; j < n_ && v == -1; ++j) {
        if (in_t[j]) continue;
        for (int i = 0; i < n_; ++i) {
          if (in_s[i] && tight(i, j)) {
            v = j;
            parent[j] = i;
            break;
          }
        }
      }
      if (v == -1) {
        double step = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n_; ++i) {
          if (!in_s[i]) continue;
          for (int j = 0; j < n_; ++j) {
            if (!in_t[j]) step = std::min(step, labels_.y_u(i) + labels_.y_v(j) - a_(i, j));
          }
        }
        for (int k = 0; k < n_; ++k) {
          if (in_s[k]) labels_.y_u(k) -= step;
          if (in_t[k]) labels_.y_v(k) += step;
        }
        trace_.steps.push_back(step);
        trace_.labels.push_back(labels_);
        if (diagonal_tight()) return true;
        continue;
      }
      if (match_v_[v] == -1) {
        for (int j = v; j != -1;) {
          const int i = parent[j];
          const int prev = match_u_[i];
          match_u_[i] = j;
          match_v_[j] = i;
          j = prev;
        }
        return diagonal_tight();
      }
      in_s[match_v_[v]] = 1;
      in_t[v] = 1;
    }
  }

  const Eigen::MatrixXd& a_;
  int n_;
  double tol_;
  std::vector<int> match_u_;
  std::vector<int> match_v_;
  LabelPair labels_;
  HungarianTrace trace_;
  int phases_ = 0;
};

UserSet checked_subset(const ChannelMatrix& alpha, const GdofTuple& d, const UserSet& subset) {
  if (d.size() != alpha.size()) throw Error(ErrorCode::ShapeError, "GDoF tuple length differs from K");
  validate_subset(alpha.size(), subset);
  return subset;
}

}  // namespace

AssignmentMatrix build_assignment_matrix(const ChannelMatrix& alpha, const GdofTuple& d,
                                         const UserSet& subset) {
  checked_subset(alpha, d, subset);
  const auto n = static_cast<Eigen::Index>(subset.size());
  AssignmentMatrix m{subset, Eigen::MatrixXd(n, n)};
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) m.a(a, b) = alpha(subset[a], subset[b]);
    const double diag = alpha(subset[a], subset[a]) - d[subset[a]];
    if (diag < 0.0) {
      throw Error(ErrorCode::ImmediatelyInfeasible,
                  "target of user " + std::to_string(subset[a]) + " exceeds its direct strength");
    }
    m.a(a, a) = diag;
  }
  return m;
}

PowerSolution solve_power_hungarian(const ChannelMatrix& alpha, const GdofTuple& d,
                                    const UserSet& subset, double tol) {
  const AssignmentMatrix m = build_assignment_matrix(alpha, d, subset);
  PowerSolution out;
  out.subset = subset;
  if (subset.empty()) {
    out.r.r = Eigen::VectorXd::Constant(alpha.size(), kOff);
    return out;
  }
  KuhnMunkres km(m.a, tol);
  km.run();
  out.labels = km.labels();
  if (out.labels.y_u.minCoeff() < -kFeasibilityTolerance) {
    throw Error(ErrorCode::InfeasibleGdof, "target needs more than full power");
  }
  out.r = expand(alpha.size(), subset, out.labels.y_u);
  out.assignment = km.assignment();
  out.rounds = km.rounds();
  out.phases = km.phases();
  out.trace = km.trace();
  return out;
}

PowerSolution solve_power_hungarian(const ChannelMatrix& alpha, const GdofTuple& d, double tol) {
  return solve_power_hungarian(alpha, d, d.support(), tol);
}

LabelPair minimum_price_labels(const AssignmentMatrix& m, double tol) {
  const auto n = m.a.rows();
  LabelPair out{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
  bool changed = true;
  for (Eigen::Index pass = 0; pass <= n && changed; ++pass) {
    changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i == j) continue;
        const double cand = m.a(i, j) - m.a(i, i) + out.y_v(i);
        if (cand > out.y_v(j) + tol) {
          out.y_v(j) = cand;
          changed = true;
        }
      }
    }
  }
  if (changed) throw Error(ErrorCode::InfeasibleGdof, "target not achievable: positive interference cycle");
  out.y_u = m.a.diagonal() - out.y_v;
  if (n > 0 && out.y_u.minCoeff() < -tol) {
    throw Error(ErrorCode::InfeasibleGdof, "target needs more than full power");
  }
  out.y_u = out.y_u.cwiseMax(0.0);
  return out;
}

PowerSolution solve_power_auction(const ChannelMatrix& alpha, const GdofTuple& d,
                                  const UserSet& subset, const AuctionOptions& options) {
  if (!(options.epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "auction epsilon must be positive");
  const AssignmentMatrix m = build_assignment_matrix(alpha, d, subset);
  const int n = static_cast<int>(subset.size());
  PowerSolution out;
  out.subset = subset;
  if (n == 0) {
    out.r.r = Eigen::VectorXd::Constant(alpha.size(), kOff);
    return out;
  }
  const double eps = options.epsilon;
  const double cap = std::max(1000.0, options.bid_cap_factor * n * n * std::max(m.a.maxCoeff(), eps) / eps);

  Eigen::VectorXd price = Eigen::VectorXd::Zero(n);
  std::vector<int> owner(n, -1), product(n, -1);
  std::deque<int> demand;
  for (int i = 0; i < n; ++i) demand.push_back(i);
  while (!demand.empty()) {
    const int i = demand.front();
    demand.pop_front();
    int best = 0;
    for (int j = 1; j < n; ++j) {
      if (m.a(i, j) - price(j) > m.a(i, best) - price(best)) best = j;
    }
    const double profit = m.a(i, best) - price(best);
    if (profit < eps || owner[best] == i) continue;
    if (owner[best] != -1) {
      product[owner[best]] = -1;
      demand.push_back(owner[best]);
    }
    if (product[i] != -1) owner[product[i]] = -1;
    owner[best] = i;
    product[i] = best;
    price(best) += eps;
    if (++out.bids > cap) {
      throw Error(ErrorCode::InfeasibleOrEpsilonTooLarge, "auction bid cap reached");
    }
  }

  if (options.snap) {
    out.labels = minimum_price_labels(m);
  } else {
    out.labels.y_v = price;
    out.labels.y_u = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
      double margin = 0.0;
      if (product[i] != -1) {
        margin = m.a(i, product[i]) - price(product[i]);
      } else {
        for (int j = 0; j < n; ++j) margin = std::max(margin, m.a(i, j) - price(j));
      }
      out.labels.y_u(i) = std::max(0.0, margin);
    }
  }
  out.assignment = product;
  out.r = expand(alpha.size(), subset, out.labels.y_u);

  const GdofTuple got = achieved_gdof(alpha, out.r, false);
  const double slack = 4.0 * n * eps + kFeasibilityTolerance;
  for (int u : subset) {
    if (got[u] < d[u] - slack) {
      throw Error(ErrorCode::InfeasibleOrEpsilonTooLarge,
                  "auction result misses the target of user " + std::to_string(u));
    }
  }
  return out;
}

PowerSolution solve_power_auction(const ChannelMatrix& alpha, const GdofTuple& d,
                                  const AuctionOptions& options) {
  return solve_power_auction(alpha, d, d.support(), options);
}

bool is_feasible(const ChannelMatrix& alpha, const GdofTuple& d, double tol) {
  if (d.size() != alpha.size()) throw Error(ErrorCode::ShapeError, "GDoF tuple length differs from K");
  for (int k = 0; k < d.size(); ++k) {
    if (d[k] < -tol || !std::isfinite(d[k])) return false;
  }
  const UserSet support = d.support(tol);
  if (support.empty()) return true;
  for (int u : support) {
    if (d[u] > alpha(u, u) + tol) return false;
  }
  GdofTuple clipped = d;
  for (int u : support) clipped.d(u) = std::min(d[u], alpha(u, u));
  const AssignmentMatrix m = build_assignment_matrix(alpha, clipped, support);
  return m.a.trace() >= max_assignment_weight(m.a) - tol;
}

}  // namespace tinlinq
