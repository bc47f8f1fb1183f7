#include "tinlinq/matching.hpp"

#include "tinlinq/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace tinlinq {
namespace {

// Shortest-augmenting-path Hungarian method for a square cost matrix
// (minimization). Returns row -> column.
std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

Eigen::MatrixXd pad_square(const Eigen::MatrixXd& w) {
  const auto n = std::max(w.rows(), w.cols());
  Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(n, n);
  sq.topLeftCorner(w.rows(), w.cols()) = w;
  return sq;
}

Eigen::MatrixXd cross_weights(const ChannelMatrix& alpha, const UserSet& subset) {
  const auto n = static_cast<Eigen::Index>(subset.size());
  Eigen::MatrixXd w(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) w(a, b) = alpha.cross(subset[a], subset[b]);
  }
  return w;
}

Matching to_matching(const ChannelMatrix& alpha, const UserSet& subset,
                     const std::vector<int>& perm) {
  Matching m;
  for (std::size_t a = 0; a < subset.size(); ++a) {
    m.pairs.push_back({subset[a], subset[static_cast<std::size_t>(perm[a])]});
  }
  m.weight = matching_weight(alpha, m);
  return m;
}

}  // namespace

double max_assignment_weight(const Eigen::MatrixXd& weights) {
  if (weights.size() == 0) return 0.0;
  const Eigen::MatrixXd sq = pad_square(weights);
  const auto assign = min_cost_assignment(-sq);
  double total = 0.0;
  for (std::size_t r = 0; r < assign.size(); ++r) total += sq(static_cast<Eigen::Index>(r), assign[r]);
  return total;
}

std::vector<int> max_assignment(const Eigen::MatrixXd& weights, bool lexicographic, double tol) {
  if (weights.rows() != weights.cols()) {
    throw Error(ErrorCode::ShapeError, "max_assignment expects a square matrix");
  }
  const int n = static_cast<int>(weights.rows());
  if (n == 0) return {};
  if (!lexicographic) return min_cost_assignment(-weights);

  // Fix rows one at a time to the smallest column that still admits an
  // optimal completion.
  double remaining = max_assignment_weight(weights);
  std::vector<int> assign(n, -1);
  std::vector<char> col_used(n, 0);
  for (int r = 0; r < n; ++r) {
    const int rest_rows = n - r - 1;
    for (int c = 0; c < n; ++c) {
      if (col_used[c]) continue;
      double completion = 0.0;
      if (rest_rows > 0) {
        Eigen::MatrixXd sub(rest_rows, rest_rows);
        for (int rr = 0; rr < rest_rows; ++rr) {
          int cc_out = 0;
          for (int cc = 0; cc < n; ++cc) {
            if (col_used[cc] || cc == c) continue;
            sub(rr, cc_out++) = weights(r + 1 + rr, cc);
          }
        }
        completion = max_assignment_weight(sub);
      }
      if (weights(r, c) + completion >= remaining - tol) {
        assign[r] = c;
        col_used[c] = 1;
        remaining -= weights(r, c);
        break;
      }
    }
  }
  return assign;
}

double matching_weight(const ChannelMatrix& alpha, const Matching& m) {
  double w = 0.0;
  for (const auto& e : m.pairs) w += alpha.cross(e.tx, e.rx);
  return w;
}

double max_matching_weight(const ChannelMatrix& alpha, const UserSet& subset) {
  validate_subset(alpha.size(), subset);
  if (subset.size() <= 1) return 0.0;
  return max_assignment_weight(cross_weights(alpha, subset));
}

Matching max_weight_matching(const ChannelMatrix& alpha, const UserSet& subset, double tol) {
  validate_subset(alpha.size(), subset);
  if (subset.empty()) throw Error(ErrorCode::IndexError, "matching needs a non-empty subset");
  const auto perm = max_assignment(cross_weights(alpha, subset), true, tol);
  return to_matching(alpha, subset, perm);
}

Matching brute_force_matching(const ChannelMatrix& alpha, const UserSet& subset) {
  validate_subset(alpha.size(), subset);
  if (subset.empty()) throw Error(ErrorCode::IndexError, "matching needs a non-empty subset");
  if (subset.size() > static_cast<std::size_t>(kOracleMatchingLimit)) {
    throw Error(ErrorCode::OracleLimitExceeded, "brute-force matching is limited to 8 users");
  }
  const Eigen::MatrixXd w = cross_weights(alpha, subset);
  std::vector<int> perm(subset.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  double best_weight = -1.0;
  // std::next_permutation walks in lexicographic order, so the first strict
  // improvement wins ties exactly as max_weight_matching does.
  do {
    double total = 0.0;
    for (std::size_t a = 0; a < perm.size(); ++a) total += w(static_cast<Eigen::Index>(a), perm[a]);
    if (total > best_weight + kMatchingTolerance) {
      best_weight = total;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return to_matching(alpha, subset, best);
}

CyclicPartition cyclic_partition(const ChannelMatrix& alpha, const Matching& m,
                                 const UserSet& subset, double tol) {
  validate_subset(alpha.size(), subset);
  if (m.pairs.size() != subset.size()) {
    throw Error(ErrorCode::NotPerfect, "matching does not cover every user of the subset");
  }
  std::vector<int> next(static_cast<std::size_t>(alpha.size()), -1);
  std::vector<char> rx_seen(static_cast<std::size_t>(alpha.size()), 0);
  for (const auto& e : m.pairs) {
    const bool tx_in = std::binary_search(subset.begin(), subset.end(), e.tx);
    const bool rx_in = std::binary_search(subset.begin(), subset.end(), e.rx);
    if (!tx_in || !rx_in || next[e.tx] != -1 || rx_seen[e.rx]) {
      throw Error(ErrorCode::NotPerfect, "matching is not a perfect matching of the subset");
    }
    next[e.tx] = e.rx;
    rx_seen[e.rx] = 1;
  }

  CyclicPartition out;
  std::vector<char> visited(static_cast<std::size_t>(alpha.size()), 0);
  for (int start : subset) {
    if (visited[start]) continue;
    std::vector<int> cycle;
    for (int u = start; !visited[u]; u = next[u]) {
      visited[u] = 1;
      cycle.push_back(u);
    }
    out.cycles.push_back(std::move(cycle));
  }

  double parts = 0.0;
  for (const auto& cycle : out.cycles) {
    UserSet sorted = cycle;
    std::sort(sorted.begin(), sorted.end());
    parts += max_matching_weight(alpha, sorted);
  }
  out.is_best = std::abs(max_matching_weight(alpha, subset) - parts) <= tol;
  return out;
}

}  // namespace tinlinq
