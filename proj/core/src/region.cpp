#include "tinlinq/region.hpp"

#include "tinlinq/error.hpp"
#include "tinlinq/matching.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace tinlinq {
namespace {

using Mask = unsigned long long;

std::vector<SubsetBound> ordered_constraints(const UserSet& subset, const std::vector<double>& by_mask) {
  std::vector<SubsetBound> out;
  out.reserve(by_mask.size() > 0 ? by_mask.size() - 1 : 0);
  for (Mask m = 1; m < by_mask.size(); ++m) out.push_back({subset_from_mask(subset, m), by_mask[m]});
  std::sort(out.begin(), out.end(), [](const SubsetBound& a, const SubsetBound& b) {
    if (a.subset.size() != b.subset.size()) return a.subset.size() < b.subset.size();
    return a.subset < b.subset;
  });
  return out;
}

Mask mask_of(const UserSet& universe, const UserSet& users) {
  Mask m = 0;
  for (int u : users) {
    const auto it = std::lower_bound(universe.begin(), universe.end(), u);
    if (it == universe.end() || *it != u) {
      throw Error(ErrorCode::IndexError, "user " + std::to_string(u) + " is not in the subset");
    }
    m |= 1ULL << static_cast<unsigned>(it - universe.begin());
  }
  return m;
}

double diagonal_sum(const ChannelMatrix& alpha, const UserSet& users) {
  double s = 0.0;
  for (int u : users) s += alpha(u, u);
  return s;
}

// Calls fn(order) for every cyclic order of `users` (first element fixed).
template <typename Fn>
void for_each_cyclic_order(const UserSet& users, Fn&& fn) {
  std::vector<int> order = users;
  do {
    fn(order);
  } while (std::next_permutation(order.begin() + 1, order.end()));
}

// sum_k (alpha_{i_k i_k} - alpha_{i_{k-1} i_k}) around the cycle.
double cycle_bound(const ChannelMatrix& alpha, const std::vector<int>& order) {
  const std::size_t m = order.size();
  double s = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const int cur = order[k];
    const int prev = order[(k + m - 1) % m];
    s += alpha(cur, cur) - (prev == cur ? 0.0 : alpha(prev, cur));
  }
  return s;
}

// Raw single-cycle bounds, indexed by mask over `subset`.
std::vector<double> cyclic_bounds_by_mask(const ChannelMatrix& alpha, const UserSet& subset) {
  const Mask full = 1ULL << subset.size();
  std::vector<double> by_mask(full, 0.0);
  for (Mask m = 1; m < full; ++m) {
    const UserSet users = subset_from_mask(subset, m);
    if (users.size() == 1) {
      by_mask[m] = alpha(users[0], users[0]);
      continue;
    }
    double best = std::numeric_limits<double>::infinity();
    for_each_cyclic_order(users, [&](const std::vector<int>& order) {
      best = std::min(best, cycle_bound(alpha, order));
    });
    by_mask[m] = best;
  }
  return by_mask;
}

// by_mask[m] <- min(by_mask[m], by_mask[a] + by_mask[m \ a]) over splits.
void close_under_unions(std::vector<double>& by_mask) {
  for (Mask m = 1; m < by_mask.size(); ++m) {
    const Mask low = m & (~m + 1);
    for (Mask a = (m - 1) & m; a > 0; a = (a - 1) & m) {
      if (!(a & low)) continue;
      by_mask[m] = std::min(by_mask[m], by_mask[a] + by_mask[m ^ a]);
    }
  }
}

bool c1_for_user(const ChannelMatrix& alpha, const UserSet& users, int k, double tol,
                 ConditionWitness* witness) {
  double worst = -std::numeric_limits<double>::infinity();
  ConditionWitness w{k, k, k, 0.0};
  for (int i : users) {
    if (i == k) continue;
    for (int j : users) {
      if (j == k) continue;
      const double rhs = alpha(i, k) + alpha(k, j) - alpha.cross(i, j);
      if (rhs > worst) {
        worst = rhs;
        w = {i, j, k, rhs - alpha(k, k)};
      }
    }
  }
  if (witness) *witness = w;
  return worst == -std::numeric_limits<double>::infinity() || alpha(k, k) >= worst - tol;
}

bool gnaj_for_user(const ChannelMatrix& alpha, const UserSet& users, int k, double tol,
                   ConditionWitness* witness) {
  double in = 0.0, out = 0.0;
  int arg_in = k, arg_out = k;
  bool any = false;
  for (int u : users) {
    if (u == k) continue;
    if (!any || alpha(u, k) > in) {
      in = alpha(u, k);
      arg_in = u;
    }
    if (!any || alpha(k, u) > out) {
      out = alpha(k, u);
      arg_out = u;
    }
    any = true;
  }
  if (witness) *witness = {arg_in, arg_out, k, in + out - alpha(k, k)};
  return alpha(k, k) >= in + out - tol;
}

// Does some maximum matching of G[users] contain an off-diagonal edge with
// alpha_ij = 0? Forces each zero edge in turn and compares the constrained
// optimum with w(M*).
bool has_zero_edge_in_max_matching(const ChannelMatrix& alpha, const UserSet& users, double tol) {
  const double best = max_matching_weight(alpha, users);
  const auto n = static_cast<Eigen::Index>(users.size());
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      if (a == b || alpha(users[a], users[b]) != 0.0) continue;
      Eigen::MatrixXd rest(n - 1, n - 1);
      for (Eigen::Index r = 0, rr = 0; r < n; ++r) {
        if (r == a) continue;
        for (Eigen::Index c = 0, cc = 0; c < n; ++c) {
          if (c == b) continue;
          rest(rr, cc++) = alpha.cross(users[r], users[c]);
        }
        ++rr;
      }
      if (max_assignment_weight(rest) >= best - tol) return true;
    }
  }
  return false;
}

void require_limit(const UserSet& subset, int limit, const char* what) {
  if (subset.size() > static_cast<std::size_t>(limit)) {
    throw Error(ErrorCode::OracleLimitExceeded,
                std::string(what) + " is limited to " + std::to_string(limit) + " users");
  }
}

}  // namespace

TinaPolytope::TinaPolytope(int num_users, UserSet subset, std::vector<double> bounds_by_mask)
    : k_(num_users), subset_(std::move(subset)), by_mask_(std::move(bounds_by_mask)) {
  validate_subset(k_, subset_);
  if (by_mask_.size() != (1ULL << subset_.size())) {
    throw Error(ErrorCode::ShapeError, "bound table size must be 2^|S|");
  }
  constraints_ = ordered_constraints(subset_, by_mask_);
}

double TinaPolytope::bound(const UserSet& users) const {
  if (users.empty()) throw Error(ErrorCode::IndexError, "bound of the empty set is undefined");
  return by_mask_[mask_of(subset_, users)];
}

bool TinaPolytope::contains(const GdofTuple& d, double tol) const {
  if (d.size() != k_) return false;
  for (int u = 0; u < k_; ++u) {
    const bool active = std::binary_search(subset_.begin(), subset_.end(), u);
    if (d[u] < -tol) return false;
    if (!active && std::abs(d[u]) > tol) return false;
  }
  const Mask full = 1ULL << subset_.size();
  for (Mask m = 1; m < full; ++m) {
    double s = 0.0;
    for (std::size_t b = 0; b < subset_.size(); ++b) {
      if (m & (1ULL << b)) s += d[subset_[b]];
    }
    if (s > by_mask_[m] + tol) return false;
  }
  return true;
}

TinaPolytope tina_polytope(const ChannelMatrix& alpha, const UserSet& subset, int cap) {
  validate_subset(alpha.size(), subset);
  if (subset.size() > static_cast<std::size_t>(std::min(cap, 62))) {
    throw Error(ErrorCode::SubsetTooLarge,
                "polytope of " + std::to_string(subset.size()) + " users exceeds cap " + std::to_string(cap));
  }
  const Mask full = 1ULL << subset.size();
  std::vector<double> by_mask(full, 0.0);
  for (Mask m = 1; m < full; ++m) {
    const UserSet users = subset_from_mask(subset, m);
    by_mask[m] = diagonal_sum(alpha, users) - max_matching_weight(alpha, users);
  }
  return TinaPolytope(alpha.size(), subset, std::move(by_mask));
}

std::vector<SubsetBound> tina_polytope_cyclic(const ChannelMatrix& alpha, const UserSet& subset) {
  validate_subset(alpha.size(), subset);
  require_limit(subset, kCyclicOracleLimit, "cyclic representation");
  return ordered_constraints(subset, cyclic_bounds_by_mask(alpha, subset));
}

std::vector<SubsetBound> cyclic_implied_bounds(const ChannelMatrix& alpha, const UserSet& subset) {
  validate_subset(alpha.size(), subset);
  require_limit(subset, kCyclicOracleLimit, "cyclic representation");
  auto by_mask = cyclic_bounds_by_mask(alpha, subset);
  close_under_unions(by_mask);
  return ordered_constraints(subset, by_mask);
}

bool cyclic_contains(const ChannelMatrix& alpha, const UserSet& subset, const GdofTuple& d, double tol) {
  validate_subset(alpha.size(), subset);
  require_limit(subset, kCyclicOracleLimit, "cyclic representation");
  // The raw inequality list is a polytope in its own right; reuse the
  // membership routine with the unclosed bound table.
  return TinaPolytope(alpha.size(), subset, cyclic_bounds_by_mask(alpha, subset)).contains(d, tol);
}

bool contains(const TinaPolytope& poly, const GdofTuple& d, double tol) { return poly.contains(d, tol); }

UnionMembership union_membership(const ChannelMatrix& alpha, const GdofTuple& d, double tol) {
  if (d.size() != alpha.size()) throw Error(ErrorCode::ShapeError, "GDoF tuple length differs from K");
  UnionMembership out;
  for (int k = 0; k < d.size(); ++k) {
    if (d[k] < -tol) return out;
  }
  out.witness = d.support(tol);
  if (out.witness.empty()) {
    out.member = true;
    return out;
  }
  GdofTuple cleaned = d;
  for (int k = 0; k < d.size(); ++k) {
    if (!std::binary_search(out.witness.begin(), out.witness.end(), k)) cleaned.d(k) = 0.0;
  }
  out.member = tina_polytope(alpha, out.witness).contains(cleaned, tol);
  return out;
}

bool ConditionReport::all_gnaj() const {
  return std::all_of(gnaj.begin(), gnaj.end(), [](bool b) { return b; });
}

bool ConditionReport::all_c1() const {
  return std::all_of(c1.begin(), c1.end(), [](bool b) { return b; });
}

ConditionReport check_conditions(const ChannelMatrix& alpha, int c2_cap, double tol) {
  const int k = alpha.size();
  const UserSet users = all_users(k);
  ConditionReport report;
  report.gnaj.resize(static_cast<std::size_t>(k));
  report.c1.resize(static_cast<std::size_t>(k));
  for (int u = 0; u < k; ++u) {
    ConditionWitness w;
    report.gnaj[u] = gnaj_for_user(alpha, users, u, tol, &w);
    if (!report.gnaj[u]) report.gnaj_violations.push_back(w);
    report.c1[u] = c1_for_user(alpha, users, u, tol, &w);
    if (!report.c1[u]) report.c1_violations.push_back(w);
  }

  if (k > c2_cap || k > 62) {
    report.c2 = C2Status::Skipped;
    return report;
  }
  report.c2 = C2Status::Holds;
  const Mask full = 1ULL << k;
  for (Mask m = 1; m < full; ++m) {
    if (std::popcount(m) <= 2) continue;
    const UserSet s = subset_from_mask(users, m);
    if (!has_zero_edge_in_max_matching(alpha, s, tol)) {
      report.c2 = C2Status::Fails;
      report.c2_counterexample = s;
      break;
    }
  }
  return report;
}

bool c1_holds_on(const ChannelMatrix& alpha, const UserSet& subset, double tol) {
  validate_subset(alpha.size(), subset);
  return std::all_of(subset.begin(), subset.end(),
                     [&](int u) { return c1_for_user(alpha, subset, u, tol, nullptr); });
}

bool gnaj_holds_on(const ChannelMatrix& alpha, const UserSet& subset, double tol) {
  validate_subset(alpha.size(), subset);
  return std::all_of(subset.begin(), subset.end(),
                     [&](int u) { return gnaj_for_user(alpha, subset, u, tol, nullptr); });
}

double converse_g_bound(const ChannelMatrix& alpha, const UserSet& subset) {
  validate_subset(alpha.size(), subset);
  require_limit(subset, kConverseOracleLimit, "converse bound");
  if (subset.empty()) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for_each_cyclic_order(subset, [&](const std::vector<int>& order) {
    const std::size_t m = order.size();
    const double base = cycle_bound(alpha, order);
    for (std::size_t k = 0; k < m; ++k) {
      const int cur = order[k];
      const int prev = order[(k + m - 1) % m];
      best = std::min(best, base + (prev == cur ? alpha(cur, cur) : alpha(prev, cur)));
    }
  });
  return best;
}

double converse_bound(const ChannelMatrix& alpha, const UserSet& subset) {
  validate_subset(alpha.size(), subset);
  require_limit(subset, kConverseOracleLimit, "converse bound");
  if (subset.empty()) return 0.0;
  const Mask full = 1ULL << subset.size();
  std::vector<double> by_mask(full, 0.0);
  for (Mask m = 1; m < full; ++m) {
    const UserSet users = subset_from_mask(subset, m);
    double best = converse_g_bound(alpha, users);
    for_each_cyclic_order(users, [&](const std::vector<int>& order) {
      const std::size_t n = order.size();
      double f = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const int cur = order[j];
        const int next = order[(j + 1) % n];
        const int prev = order[(j + n - 1) % n];
        const double own = alpha(cur, cur) - (prev == cur ? 0.0 : alpha(prev, cur));
        const double fwd = next == cur ? 0.0 : alpha(cur, next);
        f += std::max({0.0, fwd, own});
      }
      best = std::min(best, f);
    });
    by_mask[m] = best;
  }
  close_under_unions(by_mask);
  return by_mask[full - 1];
}

}  // namespace tinlinq
