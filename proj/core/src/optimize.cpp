#include "tinlinq/optimize.hpp"

#include "tinlinq/lp.hpp"
#include "tinlinq/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace tinlinq {
namespace {

constexpr double kOff = -std::numeric_limits<double>::infinity();

UserSet positive_weight_users(const UserSet& subset, const Eigen::VectorXd& w) {
  UserSet out;
  for (int u : subset) {
    if (w(u) > 0.0) out.push_back(u);
  }
  return out;
}

// Pieces of the log-domain GP objective f(x) = sum_i w_i [ln(1 + I_i(x)) -
// ln g_ii - x_i], the negative of sum w ln SINR.
struct GpProblem {
  Eigen::MatrixXd g;  // g(j, i): normalized gain Tx j -> Rx i on the subset
  Eigen::VectorXd w;

  int size() const { return static_cast<int>(w.size()); }

  double value(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd p = x.array().exp();
    double f = 0.0;
    for (int i = 0; i < size(); ++i) {
      double interference = 0.0;
      for (int j = 0; j < size(); ++j) {
        if (j != i) interference += g(j, i) * p(j);
      }
      f += w(i) * (std::log1p(interference) - std::log(g(i, i)) - x(i));
    }
    return f;
  }

  void derivatives(const Eigen::VectorXd& x, Eigen::VectorXd& grad, Eigen::MatrixXd& hess) const {
    const int n = size();
    const Eigen::VectorXd p = x.array().exp();
    grad = -w;
    hess = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd q(n);
    for (int i = 0; i < n; ++i) {
      double denom = 1.0;
      for (int j = 0; j < n; ++j) {
        if (j != i) denom += g(j, i) * p(j);
      }
      for (int j = 0; j < n; ++j) q(j) = j == i ? 0.0 : g(j, i) * p(j) / denom;
      grad += w(i) * q;
      hess.diagonal() += w(i) * q;
      hess.noalias() -= w(i) * q * q.transpose();
    }
  }
};

GpSolution make_solution(const PhysicalNetwork& net, const UserSet& active, const Eigen::VectorXd& w,
                         const Eigen::VectorXd& x, int iterations) {
  const int k = net.size();
  const Eigen::MatrixXd ng = net.normalized_gains();
  GpSolution s;
  s.powers = Eigen::VectorXd::Zero(k);
  s.sinr = Eigen::VectorXd::Zero(k);
  s.t = Eigen::VectorXd::Zero(k);
  for (std::size_t a = 0; a < active.size(); ++a) s.powers(active[a]) = std::exp(x(static_cast<Eigen::Index>(a)));
  for (int i : active) {
    double interference = 0.0;
    for (int j : active) {
      if (j != i) interference += ng(j, i) * s.powers(j);
    }
    s.sinr(i) = ng(i, i) * s.powers(i) / (1.0 + interference);
    s.t(i) = 1.0 / s.sinr(i);
    s.weighted_log_sinr += w(i) * std::log(s.sinr(i));
    s.weighted_rate += w(i) * std::log2(1.0 + s.sinr(i));
  }
  s.log_product_t = -s.weighted_log_sinr;
  s.iterations = iterations;
  return s;
}

GpProblem make_problem(const PhysicalNetwork& net, const UserSet& active, const Eigen::VectorXd& w) {
  const Eigen::MatrixXd ng = net.normalized_gains();
  const auto n = static_cast<Eigen::Index>(active.size());
  GpProblem prob{Eigen::MatrixXd(n, n), Eigen::VectorXd(n)};
  for (Eigen::Index a = 0; a < n; ++a) {
    prob.w(a) = w(active[a]);
    for (Eigen::Index b = 0; b < n; ++b) prob.g(a, b) = ng(active[a], active[b]);
    if (!(prob.g(a, a) > 0.0)) {
      throw Error(ErrorCode::DomainError, "GP needs a positive direct gain for user " + std::to_string(active[a]));
    }
  }
  return prob;
}

}  // namespace

void validate_weights(const Eigen::VectorXd& w, int k) {
  if (w.size() != k) throw Error(ErrorCode::ShapeError, "weight vector length differs from K");
  for (int i = 0; i < k; ++i) {
    if (!std::isfinite(w(i)) || w(i) < 0.0) throw Error(ErrorCode::InvalidArgument, "weights must be finite and >= 0");
  }
}

GdofOptimum max_weighted_gdof_lp(const ChannelMatrix& alpha, const UserSet& subset, const Eigen::VectorXd& w,
                                 int cap) {
  validate_subset(alpha.size(), subset);
  validate_weights(w, alpha.size());
  GdofOptimum out;
  out.d.d = Eigen::VectorXd::Zero(alpha.size());
  out.subset = positive_weight_users(subset, w);
  if (out.subset.empty()) return out;
  if (static_cast<int>(out.subset.size()) > cap) {
    throw Error(ErrorCode::SubsetTooLarge, "LP over " + std::to_string(out.subset.size()) + " users exceeds cap " +
                                               std::to_string(cap));
  }
  const TinaPolytope poly = tina_polytope(alpha, out.subset, cap);
  const auto& cons = poly.constraints();
  const auto n = static_cast<Eigen::Index>(out.subset.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(cons.size()), n);
  Eigen::VectorXd b(static_cast<Eigen::Index>(cons.size()));
  for (std::size_t r = 0; r < cons.size(); ++r) {
    for (int u : cons[r].subset) {
      const auto pos = std::lower_bound(out.subset.begin(), out.subset.end(), u) - out.subset.begin();
      a(static_cast<Eigen::Index>(r), pos) = 1.0;
    }
    b(static_cast<Eigen::Index>(r)) = cons[r].bound;
  }
  Eigen::VectorXd c(n);
  for (Eigen::Index i = 0; i < n; ++i) c(i) = w(out.subset[i]);

  const LpResult lp = solve_lp(a, b, c);
  if (lp.status != LpStatus::Optimal) {
    out.feasible = false;
    out.objective = kOff;
    return out;
  }
  for (Eigen::Index i = 0; i < n; ++i) out.d.d(out.subset[i]) = std::max(0.0, lp.x(i));
  out.objective = w.dot(out.d.d);
  return out;
}

GdofOptimum max_weighted_gdof_exact(const ChannelMatrix& alpha, const Eigen::VectorXd& w) {
  validate_weights(w, alpha.size());
  if (alpha.size() > kExactUserCap) {
    throw Error(ErrorCode::SubsetTooLarge, "exact disjunctive search is limited to " +
                                               std::to_string(kExactUserCap) + " users; use a scheduler");
  }
  const UserSet candidates = positive_weight_users(all_users(alpha.size()), w);
  GdofOptimum best;
  best.d.d = Eigen::VectorXd::Zero(alpha.size());
  const unsigned long long full = 1ULL << candidates.size();
  for (unsigned long long mask = 1; mask < full; ++mask) {
    const GdofOptimum cur = max_weighted_gdof_lp(alpha, subset_from_mask(candidates, mask), w, kExactUserCap);
    if (cur.feasible && cur.objective > best.objective + 1e-12) best = cur;
  }
  return best;
}

double gp_log_objective(const PhysicalNetwork& net, const UserSet& subset, const Eigen::VectorXd& w,
                        const Eigen::VectorXd& log_powers) {
  net.validate();
  validate_subset(net.size(), subset);
  validate_weights(w, net.size());
  if (log_powers.size() != static_cast<Eigen::Index>(subset.size())) {
    throw Error(ErrorCode::ShapeError, "one log-power per subset member expected");
  }
  return -make_problem(net, subset, w).value(log_powers);
}

GpSolution gp_power_control(const PhysicalNetwork& net, const UserSet& subset, const Eigen::VectorXd& w,
                            const GpOptions& options) {
  net.validate();
  validate_subset(net.size(), subset);
  validate_weights(w, net.size());
  const UserSet active = positive_weight_users(subset, w);
  const GpProblem prob = make_problem(net, active, w);
  const int n = prob.size();

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
  double f = prob.value(x);
  for (int it = 0; it < options.max_iterations; ++it) {
    prob.derivatives(x, grad, hess);
    const Eigen::VectorXd projected = (x - grad).cwiseMin(0.0);
    if (n == 0 || (x - projected).lpNorm<Eigen::Infinity>() <= options.tolerance) {
      return make_solution(net, active, w, x, it);
    }
    // Coordinates pinned at full power with a push outward stay fixed; a
    // regularized Newton step on the rest.
    std::vector<Eigen::Index> free;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!(x(i) >= -1e-12 && grad(i) < 0.0)) free.push_back(i);
    }
    Eigen::VectorXd dir = Eigen::VectorXd::Zero(n);
    if (!free.empty()) {
      const auto m = static_cast<Eigen::Index>(free.size());
      Eigen::MatrixXd hf(m, m);
      Eigen::VectorXd gf(m);
      for (Eigen::Index a = 0; a < m; ++a) {
        gf(a) = grad(free[a]);
        for (Eigen::Index b = 0; b < m; ++b) hf(a, b) = hess(free[a], free[b]);
      }
      hf.diagonal().array() += 1e-10 + 1e-12 * hf.diagonal().cwiseAbs().maxCoeff();
      Eigen::VectorXd step = -hf.ldlt().solve(gf);
      if (!step.allFinite() || step.dot(gf) >= 0.0) step = -gf;
      for (Eigen::Index a = 0; a < m; ++a) dir(free[a]) = step(a);
    }
    bool moved = false;
    for (double s = 1.0; s > 1e-20; s *= 0.5) {
      const Eigen::VectorXd xn = (x + s * dir).cwiseMin(0.0);
      const double fn = prob.value(xn);
      if (fn <= f + 1e-4 * grad.dot(xn - x)) {
        moved = (xn - x).lpNorm<Eigen::Infinity>() > 0.0;
        x = xn;
        f = fn;
        break;
      }
    }
    if (!moved) {
      // No descent left at machine precision.
      if ((x - projected).lpNorm<Eigen::Infinity>() <= 1e-6) return make_solution(net, active, w, x, it);
      break;
    }
  }
  throw GpConvergenceError("GP power control did not converge", make_solution(net, active, w, x, options.max_iterations));
}

double gp_gdof_equivalence_gap(const PhysicalNetwork& net, const UserSet& subset, const Eigen::VectorXd& w) {
  const GpSolution gp = gp_power_control(net, subset, w);
  const GdofOptimum lp = max_weighted_gdof_lp(strength_from_physical(net), subset, w);
  return std::abs(gp.weighted_log_sinr / std::log(net.reference_power) - lp.objective);
}

DgpResult decentralized_gp(const ChannelMatrix& alpha, const UserSet& subset, const Eigen::VectorXd& w,
                           const DgpOptions& options) {
  validate_subset(alpha.size(), subset);
  validate_weights(w, alpha.size());
  if (options.iterations < 1 || !(options.step0 > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "decentralized GP needs iterations >= 1 and a positive step");
  }
  const UserSet active = positive_weight_users(subset, w);
  const int n = static_cast<int>(active.size());
  Eigen::MatrixXd al(n, n);
  Eigen::VectorXd wl(n);
  for (int a = 0; a < n; ++a) {
    wl(a) = w(active[a]);
    for (int b = 0; b < n; ++b) al(a, b) = alpha(active[a], active[b]);
  }
  const double lo = -(n > 0 ? al.maxCoeff() : 0.0) - 1.0;

  // gamma(b, a) prices the copy r'(b, a) that receiver a keeps of the
  // exponent received from transmitter b.
  Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd rp = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd rp_avg = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd r_avg = Eigen::VectorXd::Zero(n);
  double weight_sum = 0.0;

  auto residual_of = [&](const Eigen::VectorXd& rr, const Eigen::MatrixXd& copies) {
    double s = 0.0;
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        if (a != b) s += std::abs(copies(b, a) - al(b, a) - rr(b));
      }
    }
    return s;
  };

  DgpResult out;
  double prev_residual = std::numeric_limits<double>::infinity();
  int growing = 0;
  for (int t = 1; t <= options.iterations; ++t) {
    for (int a = 0; a < n; ++a) {
      const double coeff = -wl(a) - (gamma.row(a).sum() - gamma(a, a));
      r(a) = coeff > 0.0 ? lo : 0.0;

      double floor_level = 0.0;
      for (int b = 0; b < n; ++b) {
        if (b != a) floor_level = std::max(floor_level, al(b, a) + lo);
      }
      auto cost = [&](double level) {
        double c = wl(a) * level;
        for (int b = 0; b < n; ++b) {
          if (b != a && gamma(b, a) < 0.0) c += gamma(b, a) * std::min(level, al(b, a));
        }
        return c;
      };
      double level = floor_level;
      double best = cost(level);
      for (int b = 0; b < n; ++b) {
        if (b == a || gamma(b, a) >= 0.0 || al(b, a) <= floor_level) continue;
        const double c = cost(al(b, a));
        if (c < best - 1e-15 || (c <= best + 1e-15 && al(b, a) < level)) {
          best = c;
          level = al(b, a);
        }
      }
      for (int b = 0; b < n; ++b) {
        if (b == a) continue;
        rp(b, a) = gamma(b, a) >= 0.0 ? al(b, a) + lo : std::min(level, al(b, a));
      }
    }

    const double step = options.step0 / std::sqrt(static_cast<double>(t));
    weight_sum += step;
    r_avg += (step / weight_sum) * (r - r_avg);
    rp_avg += (step / weight_sum) * (rp - rp_avg);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        if (a != b) gamma(b, a) += step * (rp(b, a) - al(b, a) - r(b));
      }
    }

    out.residual = residual_of(r_avg, rp_avg);
    growing = out.residual > prev_residual + 1e-12 ? growing + 1 : 0;
    prev_residual = out.residual;
    if (growing >= options.divergence_window && out.residual > options.residual_tolerance) {
      throw Error(ErrorCode::DivergenceDetected,
                  "decentralized GP residual grew for " + std::to_string(growing) + " consecutive steps");
    }
    out.iterations = t;
  }

  out.r.r = Eigen::VectorXd::Constant(alpha.size(), kOff);
  for (int a = 0; a < n; ++a) out.r.r(active[a]) = std::min(0.0, r_avg(a));
  out.d = achieved_gdof(alpha, out.r, true);
  return out;
}

PowerAlloc minimum_power(const ChannelMatrix& alpha, const GdofTuple& d, PowerSolver solver, double epsilon) {
  const UserSet support = d.support(kFeasibilityTolerance);
  GdofTuple target{Eigen::VectorXd::Zero(alpha.size())};
  for (int u : support) target.d(u) = std::min(d[u], alpha(u, u));
  if (solver == PowerSolver::Hungarian) return solve_power_hungarian(alpha, target, support).r;
  AuctionOptions opts;
  opts.epsilon = epsilon;
  opts.snap = true;
  return solve_power_auction(alpha, target, support, opts).r;
}

PipelineResult gp_then_assignment(const PhysicalNetwork& net, const UserSet& subset, const Eigen::VectorXd& w,
                                  PowerSolver solver, const GpOptions& options, double epsilon) {
  PipelineResult out;
  out.gp = gp_power_control(net, subset, w, options);
  const ChannelMatrix alpha = strength_from_physical(net);
  const double log_p = std::log(net.reference_power);
  out.r_prime.r = Eigen::VectorXd::Constant(net.size(), kOff);
  for (int k = 0; k < net.size(); ++k) {
    if (out.gp.powers(k) > 0.0) out.r_prime.r(k) = std::min(0.0, std::log(out.gp.powers(k)) / log_p);
  }
  out.d = achieved_gdof(alpha, out.r_prime, true);
  out.r_min = minimum_power(alpha, out.d, solver, epsilon);
  return out;
}

}  // namespace tinlinq
