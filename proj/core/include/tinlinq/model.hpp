#pragma once

// Core domain types of a K-user Gaussian interference channel in the
// generalized-degrees-of-freedom (GDoF) regime, and the per-user GDoF/SINR
// arithmetic shared by the rest of the library.
//
// Orientation is fixed everywhere: entry (i, j) of any K x K matrix describes
// the link from transmitter i to receiver j.

#include <Eigen/Dense>

#include <vector>

namespace tinlinq {

/// Sorted, duplicate-free list of 0-based user indices.
using UserSet = std::vector<int>;

/// {0, 1, ..., k-1}
UserSet all_users(int k);

/// Throws IndexError unless `subset` is sorted, unique and inside [0, k).
void validate_subset(int k, const UserSet& subset);

/// Users whose bit is set in `mask`, in increasing order.
UserSet subset_from_mask(const UserSet& universe, unsigned long long mask);

/// Channel strength exponents alpha_ij >= 0 (log-P scale).
class ChannelMatrix {
 public:
  ChannelMatrix() = default;
  explicit ChannelMatrix(Eigen::MatrixXd alpha);

  int size() const noexcept { return static_cast<int>(alpha_.rows()); }
  double operator()(int tx, int rx) const { return alpha_(tx, rx); }

  /// alpha'_ij: the cross strength, zero on the diagonal.
  double cross(int tx, int rx) const { return tx == rx ? 0.0 : alpha_(tx, rx); }

  const Eigen::MatrixXd& values() const noexcept { return alpha_; }

  /// Restriction to `subset` x `subset` (re-indexed 0..n-1).
  ChannelMatrix restrict_to(const UserSet& subset) const;

 private:
  Eigen::MatrixXd alpha_;
};

/// Per-user GDoF values; users outside the active set carry 0.
struct GdofTuple {
  Eigen::VectorXd d;

  int size() const noexcept { return static_cast<int>(d.size()); }
  double operator[](int k) const { return d(k); }
  /// Users with d_k > tol.
  UserSet support(double tol = 0.0) const;
};

/// Power exponents r_k <= 0 (transmit power P^{r_k}); -inf marks a user
/// that is switched off.
struct PowerAlloc {
  Eigen::VectorXd r;

  int size() const noexcept { return static_cast<int>(r.size()); }
  double operator[](int k) const { return r(k); }
};

/// Physical description: linear power gains, per-transmitter power caps
/// (watts), receiver noise power (watts) and the reference SNR P that maps
/// received power onto exponents.
struct PhysicalNetwork {
  Eigen::MatrixXd gains;
  Eigen::VectorXd max_tx_power;
  double noise_power = 1.0;
  double reference_power = 10.0;

  int size() const noexcept { return static_cast<int>(gains.rows()); }
  void validate() const;

  /// G_ij * P_i / noise, the SNR/INR of each link at full power.
  Eigen::MatrixXd normalized_gains() const;
};

/// Builds a physical network whose normalized gains are exactly P^{alpha_ij}
/// (unit noise, unit power caps).
PhysicalNetwork realize(const ChannelMatrix& alpha, double reference_power);

/// alpha_ij = log(max{1, G_ij P_i / noise}) / log P.
ChannelMatrix strength_from_physical(const PhysicalNetwork& net);

/// d_j = alpha_jj + r_j - max{0, max_{i != j} (alpha_ij + r_i)}; with
/// `clamp` the result is additionally floored at 0.
GdofTuple achieved_gdof(const ChannelMatrix& alpha, const PowerAlloc& r, bool clamp = true);

/// Linear SINR at every receiver when transmitter i sends with power
/// P^{r_i} times its cap. Switched-off users report 0.
Eigen::VectorXd sinr(const PhysicalNetwork& net, const PowerAlloc& r);

}  // namespace tinlinq
