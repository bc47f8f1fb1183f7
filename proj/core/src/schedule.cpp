#include "tinlinq/schedule.hpp"

#include "tinlinq/error.hpp"
#include "tinlinq/region.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace tinlinq {
namespace {

constexpr double kTestSlack = 1e-9;
constexpr double kEmpty = std::numeric_limits<double>::infinity();

double to_db(double linear) { return 10.0 * std::log10(std::max(1.0, linear)); }

// Admission test for candidate k against selected link j, given the
// weakest incoming (at Rx j) and outgoing (of Tx j) interference among the
// other selected links, in dB (0 when there are none).
using PairTest = std::function<bool(int k, int j, double min_in_j, double min_out_j)>;

ScheduleResult greedy(const LinkGains& g, const std::vector<int>& order, const PairTest& admits) {
  validate_order(order, g.size());
  const int n = g.size();
  ScheduleResult out;
  out.signaling.pilot_messages = 2L * n;
  Eigen::VectorXd min_in = Eigen::VectorXd::Constant(n, kEmpty);
  Eigen::VectorXd min_out = Eigen::VectorXd::Constant(n, kEmpty);
  auto finite_or_zero = [](double v) { return v == kEmpty ? 0.0 : v; };

  for (int k : order) {
    bool ok = true;
    for (int j : out.admitted) {
      if (!admits(k, j, finite_or_zero(min_in(j)), finite_or_zero(min_out(j)))) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    for (int j : out.admitted) {
      if (g.inr_db(k, j) < min_in(j)) {
        min_in(j) = g.inr_db(k, j);
        ++out.signaling.min_inr_updates;
      }
      if (g.inr_db(j, k) < min_out(j)) {
        min_out(j) = g.inr_db(j, k);
        ++out.signaling.min_inr_updates;
      }
      min_in(k) = std::min(min_in(k), g.inr_db(j, k));
      min_out(k) = std::min(min_out(k), g.inr_db(k, j));
    }
    out.admitted.push_back(k);
  }

  out.active = out.admitted;
  std::sort(out.active.begin(), out.active.end());
  out.min_in_db = Eigen::VectorXd::Zero(n);
  out.min_out_db = Eigen::VectorXd::Zero(n);
  for (int k : out.active) {
    out.min_in_db(k) = finite_or_zero(min_in(k));
    out.min_out_db(k) = finite_or_zero(min_out(k));
  }
  return out;
}

}  // namespace

void SchedulerParams::validate() const {
  auto unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!unit(eta) || !unit(gamma) || !unit(itlinq_eta)) {
    throw Error(ErrorCode::InvalidArgument, "scheduler exponents must lie in [0, 1]");
  }
  if (!std::isfinite(itlinq_m_db) || !std::isfinite(flashlinq_sir_db)) {
    throw Error(ErrorCode::InvalidArgument, "scheduler thresholds must be finite");
  }
}

LinkGains LinkGains::from_alpha(const ChannelMatrix& alpha, double reference_power) {
  if (!(reference_power > 1.0)) throw Error(ErrorCode::InvalidReferencePower, "reference power must exceed 1");
  const double scale = 10.0 * std::log10(reference_power);
  LinkGains g;
  g.inr_db = alpha.values() * scale;
  g.snr_db = g.inr_db.diagonal();
  return g;
}

LinkGains LinkGains::from_network(const PhysicalNetwork& net) {
  net.validate();
  const Eigen::MatrixXd ng = net.normalized_gains();
  LinkGains g;
  g.inr_db = ng.unaryExpr([](double x) { return to_db(x); });
  g.snr_db = g.inr_db.diagonal();
  return g;
}

std::vector<int> identity_order(int k) {
  std::vector<int> order(static_cast<std::size_t>(std::max(k, 0)));
  std::iota(order.begin(), order.end(), 0);
  return order;
}

std::vector<int> round_robin_order(int k, long slot) {
  std::vector<int> order = identity_order(k);
  if (k > 0) std::rotate(order.begin(), order.begin() + ((slot % k) + k) % k, order.end());
  return order;
}

std::vector<int> weight_order(const Eigen::VectorXd& w) {
  std::vector<int> order = identity_order(static_cast<int>(w.size()));
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return w(a) > w(b); });
  return order;
}

void validate_order(const std::vector<int>& order, int k) {
  std::vector<char> seen(static_cast<std::size_t>(std::max(k, 0)), 0);
  if (static_cast<int>(order.size()) != k) throw Error(ErrorCode::InvalidArgument, "priority order must list every link");
  for (int v : order) {
    if (v < 0 || v >= k || seen[v]) throw Error(ErrorCode::InvalidArgument, "priority order is not a permutation");
    seen[v] = 1;
  }
}

bool itis_plus_check(const ChannelMatrix& alpha, const UserSet& subset) { return c1_holds_on(alpha, subset); }

bool itis_check(const ChannelMatrix& alpha, const UserSet& subset) { return gnaj_holds_on(alpha, subset); }

ScheduleResult itlinq_plus_schedule(const LinkGains& g, const std::vector<int>& order, const SchedulerParams& p) {
  p.validate();
  return greedy(g, order, [&](int k, int j, double min_in_j, double min_out_j) {
    const double lhs = p.eta * g.snr_db(k) + kTestSlack;
    return lhs >= g.inr_db(k, j) - p.gamma * min_in_j && lhs >= g.inr_db(j, k) - p.gamma * min_out_j;
  });
}

ScheduleResult itlinq_schedule(const LinkGains& g, const std::vector<int>& order, const SchedulerParams& p) {
  p.validate();
  return greedy(g, order, [&](int k, int j, double, double) {
    const double lhs = p.itlinq_m_db + p.itlinq_eta * g.snr_db(k) + kTestSlack;
    return lhs >= g.inr_db(k, j) && lhs >= g.inr_db(j, k);
  });
}

ScheduleResult flashlinq_schedule(const LinkGains& g, const std::vector<int>& order, const SchedulerParams& p) {
  p.validate();
  return greedy(g, order, [&](int k, int j, double, double) {
    // SIR at the selected receiver j caused by k, and at k's own receiver
    // caused by j.
    return g.snr_db(j) - g.inr_db(k, j) + kTestSlack >= p.flashlinq_sir_db &&
           g.snr_db(k) - g.inr_db(j, k) + kTestSlack >= p.flashlinq_sir_db;
  });
}

ScheduleResult no_schedule(const LinkGains& g) {
  return greedy(g, identity_order(g.size()), [](int, int, double, double) { return true; });
}

ScheduleResult schedule(Scheme scheme, const LinkGains& gains, const std::vector<int>& order,
                        const SchedulerParams& params) {
  switch (scheme) {
    case Scheme::None:
      return no_schedule(gains);
    case Scheme::FlashLinQ:
      return flashlinq_schedule(gains, order, params);
    case Scheme::ITLinQ:
      return itlinq_schedule(gains, order, params);
    case Scheme::ITLinQPlus:
      return itlinq_plus_schedule(gains, order, params);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown scheme");
}

const char* to_string(Scheme scheme) noexcept {
  switch (scheme) {
    case Scheme::None:
      return "none";
    case Scheme::FlashLinQ:
      return "flashlinq";
    case Scheme::ITLinQ:
      return "itlinq";
    case Scheme::ITLinQPlus:
      return "itlinq+";
  }
  return "?";
}

Scheme parse_scheme(const std::string& name) {
  for (Scheme s : {Scheme::None, Scheme::FlashLinQ, Scheme::ITLinQ, Scheme::ITLinQPlus}) {
    if (name == to_string(s)) return s;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown scheme '" + name + "'");
}

double Utility::value(const Eigen::VectorXd& x) const {
  double u = 0.0;
  for (int k = 0; k < x.size(); ++k) {
    const double c = coefficient(k);
    if (fairness == 0.0) {
      u += c * x(k);
    } else if (fairness == 1.0) {
      u += c * std::log(x(k));
    } else {
      u += c * std::pow(x(k), 1.0 - fairness) / (1.0 - fairness);
    }
  }
  return u;
}

double Utility::arrival(int k, double v, double w, double a_max) const {
  const double vc = v * coefficient(k);
  if (fairness == 0.0) return vc > w ? a_max : 0.0;
  if (w <= 0.0) return a_max;
  return std::clamp(std::pow(vc / w, 1.0 / fairness), 0.0, a_max);
}

NumSlot num_step(NumState& state, const ChannelMatrix& alpha, const NumConfig& config) {
  const int k = alpha.size();
  if (!(config.v > 0.0) || !(config.a_max > 0.0)) throw Error(ErrorCode::InvalidArgument, "V and A_max must be positive");
  if (config.utility.fairness < 0.0) throw Error(ErrorCode::InvalidArgument, "fairness must be >= 0");
  if (state.w.size() != k) throw Error(ErrorCode::ShapeError, "weight vector length differs from K");

  NumSlot slot;
  slot.d.d = Eigen::VectorXd::Zero(k);
  if (state.w.maxCoeff() > 0.0) {
    switch (config.solver) {
      case NumSolver::Exact:
        slot.d = max_weighted_gdof_exact(alpha, state.w).d;
        break;
      case NumSolver::LpFullSet:
        slot.d = max_weighted_gdof_lp(alpha, all_users(k), state.w).d;
        break;
      case NumSolver::ItlinqPlusLp: {
        const ScheduleResult s =
            itlinq_plus_schedule(LinkGains::from_alpha(alpha, 10.0), weight_order(state.w), config.params);
        slot.d = max_weighted_gdof_lp(alpha, s.active, state.w).d;
        break;
      }
    }
  }
  slot.a = Eigen::VectorXd(k);
  for (int i = 0; i < k; ++i) slot.a(i) = config.utility.arrival(i, config.v, state.w(i), config.a_max);
  state.w = (state.w - slot.d.d + slot.a).cwiseMax(0.0);
  ++state.slot;
  return slot;
}

NumTrajectory num_run(const ChannelMatrix& alpha, const NumConfig& config, long slots,
                      const Eigen::VectorXd& initial_w) {
  if (slots < 1) throw Error(ErrorCode::InvalidArgument, "need at least one slot");
  const int k = alpha.size();
  NumState state{initial_w.size() == 0 ? Eigen::VectorXd::Zero(k) : initial_w, 0};
  validate_weights(state.w, k);

  NumTrajectory out;
  Eigen::VectorXd sum_d = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd sum_a = Eigen::VectorXd::Zero(k);
  out.d.reserve(static_cast<std::size_t>(slots));
  out.running_sum_avg.reserve(static_cast<std::size_t>(slots));
  out.max_weight = state.w.size() ? state.w.maxCoeff() : 0.0;
  for (long t = 1; t <= slots; ++t) {
    NumSlot s = num_step(state, alpha, config);
    sum_d += s.d.d;
    sum_a += s.a;
    out.running_sum_avg.push_back(sum_d.sum() / static_cast<double>(t));
    out.max_weight = std::max(out.max_weight, state.w.maxCoeff());
    out.d.push_back(std::move(s.d));
  }
  out.average_d = sum_d / static_cast<double>(slots);
  out.average_a = sum_a / static_cast<double>(slots);
  out.final_w = state.w;
  out.utility = config.utility.value(out.average_d);
  return out;
}

}  // namespace tinlinq
