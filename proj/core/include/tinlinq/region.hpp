#pragma once

// TIN-achievable GDoF (TINA) regions.
//
// For an active subset S the region is the polytope
//
//   d_k >= 0 (k in S),  d_i = 0 (i outside S),
//   sum_{k in S'} d_k <= sum_{k in S'} alpha_kk - w(M*_{S'})  for all S' in S,
//
// one inequality per non-empty S' (2^|S| - 1 in total). The older cyclic
// representation with one inequality per ordered subset is provided as an
// equivalence oracle, together with the TIN-optimality condition checkers
// and the cyclic converse bounds.

#include "tinlinq/model.hpp"

#include <optional>
#include <vector>

namespace tinlinq {

inline constexpr double kMembershipTolerance = 1e-9;
inline constexpr int kDefaultPolytopeCap = 20;
inline constexpr int kCyclicOracleLimit = 8;
inline constexpr int kConverseOracleLimit = 7;
inline constexpr int kConditionC2Limit = 12;

struct SubsetBound {
  UserSet subset;
  double bound = 0.0;
};

class TinaPolytope {
 public:
  /// `bounds_by_mask[m]` is the bound of the subset of `subset` selected by
  /// the bits of m (index 0 unused).
  TinaPolytope(int num_users, UserSet subset, std::vector<double> bounds_by_mask);

  int num_users() const noexcept { return k_; }
  const UserSet& subset() const noexcept { return subset_; }

  /// Constraints ordered by subset size, then lexicographically.
  const std::vector<SubsetBound>& constraints() const noexcept { return constraints_; }

  /// Bound of a non-empty S' contained in subset().
  double bound(const UserSet& users) const;

  bool contains(const GdofTuple& d, double tol = kMembershipTolerance) const;

 private:
  int k_;
  UserSet subset_;
  std::vector<double> by_mask_;
  std::vector<SubsetBound> constraints_;
};

TinaPolytope tina_polytope(const ChannelMatrix& alpha, const UserSet& subset,
                           int cap = kDefaultPolytopeCap);

/// Cyclic representation: for every unordered S' in `subset` the tightest
/// single-cycle bound over all cyclic orders of S' (alpha_kk for
/// singletons). |subset| <= 8.
std::vector<SubsetBound> tina_polytope_cyclic(const ChannelMatrix& alpha, const UserSet& subset);

/// Closes the cyclic bounds under disjoint unions: the tightest bound on
/// sum_{S'} d_k implied by adding cycle inequalities of a partition of S'.
/// Same ordering as TinaPolytope::constraints().
std::vector<SubsetBound> cyclic_implied_bounds(const ChannelMatrix& alpha, const UserSet& subset);

/// Membership in the polytope described by the raw cyclic inequalities.
bool cyclic_contains(const ChannelMatrix& alpha, const UserSet& subset, const GdofTuple& d,
                     double tol = kMembershipTolerance);

bool contains(const TinaPolytope& poly, const GdofTuple& d, double tol = kMembershipTolerance);

struct UnionMembership {
  bool member = false;
  UserSet witness;
};

/// Membership in the union over all subsets. Only the polytope of the
/// support of d can contain it with strictly positive entries, so that is
/// the one tested (and returned as witness).
UnionMembership union_membership(const ChannelMatrix& alpha, const GdofTuple& d,
                                 double tol = kMembershipTolerance);

struct ConditionWitness {
  int i = 0;  // interfering transmitter
  int j = 0;  // interfered receiver
  int k = 0;  // user under test
  double excess = 0.0;  // right-hand side minus alpha_kk
};

enum class C2Status { Holds, Fails, Skipped };

struct ConditionReport {
  std::vector<bool> gnaj;
  std::vector<bool> c1;
  C2Status c2 = C2Status::Skipped;
  std::vector<ConditionWitness> gnaj_violations;
  std::vector<ConditionWitness> c1_violations;
  UserSet c2_counterexample;

  bool all_gnaj() const;
  bool all_c1() const;
};

/// Per-user GNAJ (alpha_kk >= max incoming + max outgoing) and relaxed C1
/// (alpha_kk >= max_{i,j != k} alpha_ik + alpha_kj - alpha'_ij) flags, and
/// the global zero-edge topology condition C2 (skipped when K > c2_cap).
ConditionReport check_conditions(const ChannelMatrix& alpha, int c2_cap = kConditionC2Limit,
                                 double tol = kMembershipTolerance);

/// C1 restricted to the subnetwork `subset`.
bool c1_holds_on(const ChannelMatrix& alpha, const UserSet& subset, double tol = kMembershipTolerance);
/// GNAJ restricted to the subnetwork `subset`.
bool gnaj_holds_on(const ChannelMatrix& alpha, const UserSet& subset,
                   double tol = kMembershipTolerance);

/// min over orders pi of `subset` and positions k of
/// g_{pi,k} = sum_j (alpha_{i_j i_j} - alpha_{i_{j-1} i_j}) + alpha_{i_{k-1} i_k}.
double converse_g_bound(const ChannelMatrix& alpha, const UserSet& subset);

/// Full cyclic outer bound on sum_{subset} d_j: the minimum of the f and g
/// bounds over all orders, closed under disjoint unions of cycles.
double converse_bound(const ChannelMatrix& alpha, const UserSet& subset);

}  // namespace tinlinq
