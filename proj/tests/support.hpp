#pragma once

// Independent oracles and random-instance generators shared by the unit and
// acceptance tests. Nothing here calls the matching, region or power code
// under test.

#include "tinlinq/lp.hpp"
#include "tinlinq/model.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

namespace tinlinq::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

/// alpha_kk ~ U[diag_lo, diag_hi], cross ~ U[0, cross_hi].
inline ChannelMatrix random_alpha(Rng& rng, int k, double diag_lo = 1.0, double diag_hi = 2.0,
                                  double cross_hi = 1.0) {
  Eigen::MatrixXd a(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) a(i, j) = i == j ? uniform(rng, diag_lo, diag_hi) : uniform(rng, 0.0, cross_hi);
  }
  return ChannelMatrix(a);
}

/// Entries rounded to one decimal so ties and zero edges actually occur.
inline ChannelMatrix random_alpha_coarse(Rng& rng, int k) {
  Eigen::MatrixXd a(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      a(i, j) = i == j ? uniform_int(rng, 10, 25) / 10.0 : uniform_int(rng, 0, 10) / 10.0;
    }
  }
  return ChannelMatrix(a);
}

/// Every permutation of `subset`, summing cross strengths.
inline double brute_matching_weight(const ChannelMatrix& alpha, const std::vector<int>& subset) {
  std::vector<int> perm(subset.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = 0.0;
  do {
    double w = 0.0;
    for (std::size_t p = 0; p < perm.size(); ++p) {
      const int tx = subset[p];
      const int rx = subset[perm[p]];
      if (tx != rx) w += alpha(tx, rx);
    }
    best = std::max(best, w);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

inline std::vector<int> subset_of(unsigned mask, int k) {
  std::vector<int> s;
  for (int i = 0; i < k; ++i) {
    if (mask >> i & 1U) s.push_back(i);
  }
  return s;
}

/// Direct evaluation of the per-receiver GDoF formula.
inline double gdof_of(const ChannelMatrix& alpha, const Eigen::VectorXd& r, int j) {
  double interference = 0.0;
  for (int i = 0; i < alpha.size(); ++i) {
    if (i != j && std::isfinite(r(i))) interference = std::max(interference, alpha(i, j) + r(i));
  }
  return alpha(j, j) + r(j) - interference;
}

/// A target that is achievable by construction: random exponents, the GDoF
/// they achieve, users below `floor` switched off.
inline Eigen::VectorXd random_feasible_target(Rng& rng, const ChannelMatrix& alpha, double floor = 1e-3) {
  const int k = alpha.size();
  Eigen::VectorXd r(k);
  for (int i = 0; i < k; ++i) r(i) = uniform(rng, -1.0, 0.0);
  for (int pass = 0; pass < 2; ++pass) {
    for (int j = 0; j < k; ++j) {
      if (std::isfinite(r(j)) && gdof_of(alpha, r, j) < floor) r(j) = -std::numeric_limits<double>::infinity();
    }
  }
  Eigen::VectorXd d = Eigen::VectorXd::Zero(k);
  for (int j = 0; j < k; ++j) {
    if (std::isfinite(r(j))) d(j) = std::max(0.0, gdof_of(alpha, r, j));
  }
  return d;
}

/// Largest sum of left labels of the assignment dual: y_u_i + y_v_j >= A_ij
/// off the diagonal, equality on it, y >= 0. Solved as a plain LP; returns
/// y_u (empty when the LP is not optimal).
inline Eigen::VectorXd max_left_label_oracle(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  const int rows = n * (n - 1) + 2 * n;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, 2 * n);
  Eigen::VectorXd b(rows);
  int r = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      m(r, i) = -1.0;
      m(r, n + j) = -1.0;
      b(r++) = -a(i, j);
    }
  }
  for (int j = 0; j < n; ++j) {
    m(r, j) = 1.0;
    m(r, n + j) = 1.0;
    b(r++) = a(j, j);
    m(r, j) = -1.0;
    m(r, n + j) = -1.0;
    b(r++) = -a(j, j);
  }
  Eigen::VectorXd c = Eigen::VectorXd::Zero(2 * n);
  c.head(n).setOnes();
  const LpResult res = solve_lp(m, b, c);
  if (res.status != LpStatus::Optimal) return {};
  return res.x.head(n);
}

}  // namespace tinlinq::testing
