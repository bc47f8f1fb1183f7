#pragma once

// Maximum-weight bipartite matching on the transmitter/receiver graph of a
// user subset with weights alpha'_ij (cross strengths, zero diagonal).
//
// Matchings are stored as perfect matchings of the subset: a user whose
// transmitter is matched to its own receiver (weight 0) is effectively
// unmatched, so partial matchings are representable without special cases.

#include "tinlinq/model.hpp"

#include <Eigen/Dense>

#include <compare>
#include <vector>

namespace tinlinq {

inline constexpr double kMatchingTolerance = 1e-9;
inline constexpr int kOracleMatchingLimit = 8;

struct Edge {
  int tx = 0;
  int rx = 0;

  auto operator<=>(const Edge&) const = default;
};

struct Matching {
  std::vector<Edge> pairs;  // sorted by tx
  double weight = 0.0;
};

struct CyclicPartition {
  std::vector<std::vector<int>> cycles;
  bool is_best = false;
};

/// Weight of a maximum-weight assignment of a nonnegative rectangular matrix
/// (rows may stay unassigned). O(n^3).
double max_assignment_weight(const Eigen::MatrixXd& weights);

/// Row -> column assignment of maximum weight for a nonnegative square
/// matrix. With `lexicographic`, among all optimal assignments (weights
/// compared with `tol`) the one with the smallest column sequence is
/// returned.
std::vector<int> max_assignment(const Eigen::MatrixXd& weights, bool lexicographic = true,
                                double tol = kMatchingTolerance);

/// w(M*_S) only; the fast path used when enumerating subsets.
double max_matching_weight(const ChannelMatrix& alpha, const UserSet& subset);

/// Maximum-weight matching of G[S] with deterministic lexicographic
/// tie-breaking.
Matching max_weight_matching(const ChannelMatrix& alpha, const UserSet& subset,
                             double tol = kMatchingTolerance);

/// Exhaustive search over all permutations of `subset` (|subset| <= 8).
Matching brute_force_matching(const ChannelMatrix& alpha, const UserSet& subset);

/// Decomposes the permutation j -> match(j) of a perfect matching on
/// `subset` into disjoint cycles and tests w(M*_S) = sum_i w(M*_{S_i}).
CyclicPartition cyclic_partition(const ChannelMatrix& alpha, const Matching& m,
                                 const UserSet& subset, double tol = kMatchingTolerance);

/// Recomputes sum of alpha' over the pairs of `m`.
double matching_weight(const ChannelMatrix& alpha, const Matching& m);

}  // namespace tinlinq
