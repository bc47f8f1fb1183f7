#pragma once

// Minimum-power allocation for a target GDoF tuple.
//
// With A_ij = alpha_ij (i != j) and A_jj = alpha_jj - d_j, a power exponent
// vector r achieves d exactly iff the labels y_u = -r, y_v (received
// interference levels) form a dual-feasible solution of the assignment
// problem on A that is tight on the diagonal. The tuple is achievable iff the
// diagonal is a maximum-weight assignment of A, and the labelling with the
// smallest prices y_v (equivalently the largest y_u) is the unique
// componentwise minimum-power allocation.

#include "tinlinq/model.hpp"

#include <vector>

namespace tinlinq {

inline constexpr double kLabelTolerance = 1e-10;
inline constexpr double kFeasibilityTolerance = 1e-9;

struct AssignmentMatrix {
  UserSet subset;
  Eigen::MatrixXd a;  // rows/cols indexed by position in subset
};

struct LabelPair {
  Eigen::VectorXd y_u;
  Eigen::VectorXd y_v;
};

/// Label history of a Kuhn-Munkres run: the initial row-max labels, the
/// size of every label update and the labels right after each update.
struct HungarianTrace {
  Eigen::VectorXd initial_y_u;
  std::vector<double> steps;
  std::vector<LabelPair> labels;
};

struct PowerSolution {
  PowerAlloc r;           // length K; -inf outside the subset
  UserSet subset;
  LabelPair labels;       // indexed by position in subset
  std::vector<int> assignment;  // row -> column of the final matching
  int rounds = 0;         // label updates (Hungarian)
  int phases = 0;         // alternating-tree searches (Hungarian), <= n
  long bids = 0;          // accepted bids (auction)
  HungarianTrace trace;
};

/// Throws ImmediatelyInfeasible if d_j > alpha_jj for some j in `subset`.
AssignmentMatrix build_assignment_matrix(const ChannelMatrix& alpha, const GdofTuple& d,
                                         const UserSet& subset);

/// Kuhn-Munkres from y_u = row max, y_v = 0. Stops as soon as the diagonal is
/// tight; throws InfeasibleGdof if a perfect matching is completed without
/// the diagonal becoming tight.
PowerSolution solve_power_hungarian(const ChannelMatrix& alpha, const GdofTuple& d,
                                    const UserSet& subset, double tol = kLabelTolerance);
/// Same on the support of d.
PowerSolution solve_power_hungarian(const ChannelMatrix& alpha, const GdofTuple& d,
                                    double tol = kLabelTolerance);

struct AuctionOptions {
  double epsilon = 1e-5;
  /// Replace the auction prices by the exact minimum prices supporting the
  /// diagonal assignment (see minimum_price_labels).
  bool snap = false;
  /// Bid cap is bid_cap_factor * n^2 * max(A) / epsilon (at least 1000).
  double bid_cap_factor = 10.0;
};

/// Ascending-price auction: FIFO demand queue, lowest-index tie-breaking,
/// every accepted bid raises the price of the product by epsilon. Throws
/// InfeasibleOrEpsilonTooLarge when the bid cap is hit or the result misses
/// the target by more than 4 n epsilon.
PowerSolution solve_power_auction(const ChannelMatrix& alpha, const GdofTuple& d,
                                  const UserSet& subset, const AuctionOptions& options = {});
PowerSolution solve_power_auction(const ChannelMatrix& alpha, const GdofTuple& d,
                                  const AuctionOptions& options = {});

/// Smallest prices with y_v_j >= A_ij - A_ii + y_v_i and y_v >= 0 (longest
/// paths), and y_u_j = A_jj - y_v_j. Throws InfeasibleGdof when a positive
/// cycle exists or some y_u would be negative.
LabelPair minimum_price_labels(const AssignmentMatrix& m, double tol = kFeasibilityTolerance);

/// d is achievable with TIN on its support, i.e. the diagonal of the
/// assignment matrix is a maximum-weight assignment.
bool is_feasible(const ChannelMatrix& alpha, const GdofTuple& d, double tol = kFeasibilityTolerance);

}  // namespace tinlinq
