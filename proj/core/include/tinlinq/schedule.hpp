#pragma once

// Greedy priority-ordered link admission (FlashLinQ, ITLinQ, ITLinQ+) and
// the drift-plus-penalty utility loop built on weighted sum-GDoF solvers.
//
// All admission tests run in dB: with SNR_k = P^{alpha_kk} and
// INR_ij = P^{alpha_ij}, an inequality SNR^eta >= INR / m^gamma becomes
// eta * snr_db >= inr_db - gamma * m_db.

#include "tinlinq/model.hpp"
#include "tinlinq/optimize.hpp"

#include <string>
#include <vector>

namespace tinlinq {

struct SchedulerParams {
  double eta = 0.9;           // ITLinQ+ signal exponent
  double gamma = 0.1;         // ITLinQ+ weakest-interferer exponent
  double itlinq_eta = 0.7;
  double itlinq_m_db = 25.0;
  double flashlinq_sir_db = 9.0;

  /// Throws InvalidArgument unless exponents are in [0, 1] and thresholds
  /// finite.
  void validate() const;
};

/// Link strengths in dB, floored at 0 dB (strength exponents are >= 0).
struct LinkGains {
  Eigen::VectorXd snr_db;
  Eigen::MatrixXd inr_db;  // (i, j): Tx i -> Rx j, diagonal unused

  int size() const noexcept { return static_cast<int>(snr_db.size()); }

  static LinkGains from_alpha(const ChannelMatrix& alpha, double reference_power);
  static LinkGains from_network(const PhysicalNetwork& net);
};

struct SignalingTally {
  long pilot_messages = 0;     // two full-power pilot rounds, one per device each
  long min_inr_updates = 0;    // changed min-INR table entries broadcast after admissions
};

struct ScheduleResult {
  UserSet active;                 // sorted
  std::vector<int> admitted;      // in admission order
  Eigen::VectorXd min_in_db;      // weakest incoming interference at each active Rx
  Eigen::VectorXd min_out_db;     // weakest outgoing interference of each active Tx
  SignalingTally signaling;
};

/// Priority orders.
std::vector<int> identity_order(int k);
/// Slot-dependent rotation: slot s starts at link s mod k.
std::vector<int> round_robin_order(int k, long slot);
/// Descending weight, lower index first on ties.
std::vector<int> weight_order(const Eigen::VectorXd& w);
/// Throws InvalidArgument unless `order` is a permutation of 0..k-1.
void validate_order(const std::vector<int>& order, int k);

/// C1 restricted to `subset`.
bool itis_plus_check(const ChannelMatrix& alpha, const UserSet& subset);
/// GNAJ restricted to `subset`.
bool itis_check(const ChannelMatrix& alpha, const UserSet& subset);

ScheduleResult itlinq_plus_schedule(const LinkGains& gains, const std::vector<int>& order,
                                    const SchedulerParams& params = {});
ScheduleResult itlinq_schedule(const LinkGains& gains, const std::vector<int>& order,
                               const SchedulerParams& params = {});
ScheduleResult flashlinq_schedule(const LinkGains& gains, const std::vector<int>& order,
                                  const SchedulerParams& params = {});
/// Every link active.
ScheduleResult no_schedule(const LinkGains& gains);

enum class Scheme { None, FlashLinQ, ITLinQ, ITLinQPlus };
ScheduleResult schedule(Scheme scheme, const LinkGains& gains, const std::vector<int>& order,
                        const SchedulerParams& params = {});
const char* to_string(Scheme scheme) noexcept;
/// Accepts none, flashlinq, itlinq, itlinq+.
Scheme parse_scheme(const std::string& name);

// ---------------------------------------------------------------------------
// Utility maximization loop

/// Alpha-fair utility sum_k c_k x^{1-fairness} / (1 - fairness), log at
/// fairness 1, linear at 0. Empty coefficients mean all ones.
struct Utility {
  double fairness = 1.0;
  Eigen::VectorXd coefficients;

  double coefficient(int k) const { return coefficients.size() == 0 ? 1.0 : coefficients(k); }
  double value(const Eigen::VectorXd& x) const;
  /// argmax_{0 <= a <= a_max} v c_k U(a) - w a.
  double arrival(int k, double v, double w, double a_max) const;
};

enum class NumSolver { Exact, LpFullSet, ItlinqPlusLp };

struct NumConfig {
  Utility utility;
  double v = 10.0;
  double a_max = 1.0;
  NumSolver solver = NumSolver::Exact;
  SchedulerParams params;
};

struct NumState {
  Eigen::VectorXd w;
  long slot = 0;
};

struct NumSlot {
  GdofTuple d;
  Eigen::VectorXd a;
};

/// One slot: d* maximizes w^T d with the configured solver, a* solves the
/// arrival problem, then w <- max(0, w - d* + a*).
NumSlot num_step(NumState& state, const ChannelMatrix& alpha, const NumConfig& config);

struct NumTrajectory {
  std::vector<GdofTuple> d;            // per slot
  std::vector<double> running_sum_avg; // time-averaged sum GDoF after each slot
  Eigen::VectorXd average_d;
  Eigen::VectorXd average_a;
  Eigen::VectorXd final_w;
  double max_weight = 0.0;             // largest weight seen
  double utility = 0.0;                // U(average_d)
};

NumTrajectory num_run(const ChannelMatrix& alpha, const NumConfig& config, long slots,
                      const Eigen::VectorXd& initial_w = {});

}  // namespace tinlinq
