#pragma once

// Weighted sum-GDoF maximization and high-SNR power control.

#include "tinlinq/error.hpp"
#include "tinlinq/model.hpp"
#include "tinlinq/power.hpp"

#include <vector>

namespace tinlinq {

inline constexpr int kLpSubsetCap = 16;
inline constexpr int kExactUserCap = 10;

/// Nonnegative user priorities; throws InvalidArgument on negative or
/// non-finite entries or a length different from k.
void validate_weights(const Eigen::VectorXd& w, int k);

struct GdofOptimum {
  GdofTuple d;
  UserSet subset;        // users the polytope was built on (positive weight)
  double objective = 0.0;
  bool feasible = true;  // false when the polytope is empty
};

/// maximize w^T d over the TINA polytope of `subset`. Users with w_k = 0 are
/// dropped first and get d_k = 0.
GdofOptimum max_weighted_gdof_lp(const ChannelMatrix& alpha, const UserSet& subset,
                                 const Eigen::VectorXd& w, int cap = kLpSubsetCap);

/// Optimum over the union of all TINA polytopes by subset enumeration
/// (K <= 10, otherwise SubsetTooLarge). Ties keep the first subset in mask
/// order.
GdofOptimum max_weighted_gdof_exact(const ChannelMatrix& alpha, const Eigen::VectorXd& w);

struct GpOptions {
  int max_iterations = 500;
  double tolerance = 1e-10;  // projected-gradient infinity norm
};

struct GpSolution {
  Eigen::VectorXd powers;  // fraction of each transmitter's cap; 0 outside the subset
  Eigen::VectorXd sinr;
  Eigen::VectorXd t;       // 1 / SINR on the subset, 0 elsewhere
  double weighted_log_sinr = 0.0;   // sum w ln SINR
  double weighted_rate = 0.0;       // sum w log2(1 + SINR), bits per symbol
  double log_product_t = 0.0;       // ln prod t^w = -weighted_log_sinr
  int iterations = 0;
};

/// Thrown by gp_power_control when the iteration budget runs out.
class GpConvergenceError : public Error {
 public:
  GpConvergenceError(const std::string& what, GpSolution last)
      : Error(ErrorCode::ConvergenceFailure, what), last_(std::move(last)) {}
  const GpSolution& last_iterate() const noexcept { return last_; }

 private:
  GpSolution last_;
};

/// Maximizes sum w_i ln SINR_i over 0 < p_i <= 1 (equivalently minimizes
/// prod t_i^{w_i}) by projected Newton in x = ln p.
GpSolution gp_power_control(const PhysicalNetwork& net, const UserSet& subset, const Eigen::VectorXd& w,
                            const GpOptions& options = {});

/// sum_{i in subset} w_i ln SINR_i at log-powers x (one entry per subset
/// member, x <= 0). Concave in x.
double gp_log_objective(const PhysicalNetwork& net, const UserSet& subset, const Eigen::VectorXd& w,
                        const Eigen::VectorXd& log_powers);

/// |GP optimum / ln P - LP optimum| on the strengths implied by `net`.
double gp_gdof_equivalence_gap(const PhysicalNetwork& net, const UserSet& subset, const Eigen::VectorXd& w);

struct DgpOptions {
  int iterations = 5000;
  double step0 = 0.5;             // dual step step0 / sqrt(t)
  double residual_tolerance = 1e-3;
  int divergence_window = 100;
};

struct DgpResult {
  PowerAlloc r;   // length K, -inf outside the subset
  GdofTuple d;    // achieved_gdof(r), clamped
  double residual = 0.0;  // sum |r'_ji - alpha_ji - r_j| at the averaged iterate
  int iterations = 0;
};

/// Dual decomposition of the per-receiver GDoF program: every user solves
/// its local Lagrangian term in closed form, the coupling multipliers take
/// projected-free subgradient steps, and the primal answer is the
/// step-weighted running average. Throws DivergenceDetected when the
/// residual grows for `divergence_window` consecutive steps.
DgpResult decentralized_gp(const ChannelMatrix& alpha, const UserSet& subset, const Eigen::VectorXd& w,
                           const DgpOptions& options = {});

enum class PowerSolver { Hungarian, Auction };

/// Minimum-power exponents achieving d on its support (exact labels; the
/// auction runs with snap). -inf for users with d_k = 0.
PowerAlloc minimum_power(const ChannelMatrix& alpha, const GdofTuple& d, PowerSolver solver = PowerSolver::Auction,
                         double epsilon = 1e-5);

struct PipelineResult {
  GpSolution gp;
  PowerAlloc r_prime;  // GP exponents ln p / ln P
  GdofTuple d;         // GDoF achieved by r_prime
  PowerAlloc r_min;    // minimum power for d, r_min <= r_prime
};

/// GP, then the GDoF tuple its powers achieve, then minimum power for it.
PipelineResult gp_then_assignment(const PhysicalNetwork& net, const UserSet& subset, const Eigen::VectorXd& w,
                                  PowerSolver solver = PowerSolver::Auction, const GpOptions& options = {},
                                  double epsilon = 1e-5);

}  // namespace tinlinq
