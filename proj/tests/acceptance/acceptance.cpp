// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include "cli.hpp"
#include "support.hpp"

#include "tinlinq/error.hpp"
#include "tinlinq/fixtures.hpp"
#include "tinlinq/matching.hpp"
#include "tinlinq/optimize.hpp"
#include "tinlinq/power.hpp"
#include "tinlinq/region.hpp"
#include "tinlinq/schedule.hpp"
#include "tinlinq/sim.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>

using namespace tinlinq;
using namespace tinlinq::testing;

namespace {

const std::string kData = TINLINQ_TEST_DATA_DIR;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

std::string fmt(double x) {
  std::ostringstream s;
  s << x;
  return s.str();
}

std::map<UserSet, double> by_subset(const std::vector<SubsetBound>& c) {
  std::map<UserSet, double> m;
  for (const auto& b : c) m[b.subset] = b.bound;
  return m;
}

unsigned hardware_jobs() { return std::max(1U, std::min(8U, std::thread::hardware_concurrency())); }

// 1 -------------------------------------------------------------------------
Outcome fixture_a() {
  Outcome o;
  const ChannelMatrix a = fixtures::fix_a();
  const auto b = by_subset(tina_polytope(a, {0, 1, 2}).constraints());
  const std::map<UserSet, double> want{{{0}, 2.0},      {{1}, 1.0},      {{2}, 1.5},         {{0, 1}, 2.3},
                                       {{1, 2}, 1.5},   {{0, 2}, 2.4},   {{0, 1, 2}, 2.5}};
  o.require(b.size() == 7, "expected 7 constraints");
  for (const auto& [s, v] : want) o.require(b.count(s) && close(b.at(s), v, 1e-9), "region bound mismatch");

  const GdofTuple d{Eigen::Vector3d(0.5, 0.6, 0.7)};
  const Eigen::Vector3d r_ref(-1.2, -0.4, -0.7);
  const PowerSolution h = solve_power_hungarian(a, d);
  for (int k = 0; k < 3; ++k) o.require(close(h.r[k], r_ref(k), 1e-12), "Kuhn-Munkres r mismatch");
  AuctionOptions opts;
  const PowerSolution au = solve_power_auction(a, d, opts);
  for (int k = 0; k < 3; ++k) o.require(close(au.r[k], r_ref(k), 3 * opts.epsilon), "auction r outside 3 eps");

  o.require(h.trace.initial_y_u.isApprox(Eigen::Vector3d(1.5, 0.5, 1.0), 1e-12), "initial labels");
  o.require(h.trace.steps.size() == 2 && close(h.trace.steps[0], 0.2, 1e-12) && close(h.trace.steps[1], 0.1, 1e-12),
            "label updates");
  o.require((h.labels.y_v - Eigen::Vector3d(0.3, 0.0, 0.1)).cwiseAbs().maxCoeff() < 1e-12, "final y_v");
  return o;
}

// 2 -------------------------------------------------------------------------
Outcome fixture_b() {
  Outcome o;
  const ChannelMatrix a = fixtures::fix_b();
  const auto b = by_subset(tina_polytope(a, {0, 1, 2}).constraints());
  const std::map<UserSet, double> want{{{0}, 1.0},      {{1}, 1.0},      {{2}, 1.0},         {{0, 1}, 1.1},
                                       {{1, 2}, 1.3},   {{0, 2}, 1.2},   {{0, 1, 2}, 1.8}};
  for (const auto& [s, v] : want) o.require(b.count(s) && close(b.at(s), v, 1e-9), "region bound mismatch");
  const ConditionReport r = check_conditions(a);
  o.require(r.all_c1(), "C1 should hold for every user");
  o.require(r.gnaj == std::vector<bool>{false, false, true}, "GNAJ should fail exactly for users 1 and 2");
  o.require(r.c2 == C2Status::Holds, "C2 should hold");
  return o;
}

// 3 -------------------------------------------------------------------------
Outcome representation_equivalence() {
  Outcome o;
  Rng rng(1003);
  int subsets = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int k = 2 + trial % 4;
    const ChannelMatrix a = trial % 3 == 0 ? random_alpha_coarse(rng, k) : random_alpha(rng, k);
    const UserSet all = all_users(k);
    const auto m = tina_polytope(a, all).constraints();
    const auto c = cyclic_implied_bounds(a, all);
    o.require(m.size() == c.size(), "different constraint counts");
    for (std::size_t i = 0; i < std::min(m.size(), c.size()); ++i) {
      o.require(m[i].subset == c[i].subset && close(m[i].bound, c[i].bound, 1e-9),
                "bound differs at K=" + std::to_string(k));
      ++subsets;
    }
  }
  o.detail = std::to_string(subsets) + " subset bounds compared";
  return o;
}

// 4 -------------------------------------------------------------------------
Outcome minimality_oracle() {
  Outcome o;
  Rng rng(1004);
  const double eps = 1e-4;
  int solved = 0;
  while (solved < 200) {
    const int k = uniform_int(rng, 2, 6);
    const ChannelMatrix a = random_alpha(rng, k);
    const GdofTuple d{random_feasible_target(rng, a)};
    const UserSet sup = d.support(1e-9);
    if (sup.empty()) continue;
    ++solved;
    const PowerSolution h = solve_power_hungarian(a, d);
    const Eigen::VectorXd yu = max_left_label_oracle(build_assignment_matrix(a, d, sup).a);
    o.require(yu.size() == static_cast<Eigen::Index>(sup.size()), "oracle LP not optimal");
    if (yu.size() != static_cast<Eigen::Index>(sup.size())) continue;
    AuctionOptions opts;
    opts.epsilon = eps;
    const PowerSolution au = solve_power_auction(a, d, opts);
    for (std::size_t p = 0; p < sup.size(); ++p) {
      const int u = sup[p];
      o.require(close(h.r[u], -yu(static_cast<Eigen::Index>(p)), 1e-7), "Kuhn-Munkres differs from LP oracle");
      o.require(close(au.r[u], h.r[u], static_cast<double>(k) * eps), "auction outside K eps");
    }
    const GdofTuple got = achieved_gdof(a, h.r);
    for (int u = 0; u < k; ++u) o.require(close(got[u], d[u], 1e-9), "achieved GDoF differs from target");
  }
  return o;
}

// 5 -------------------------------------------------------------------------
// A point of the polytope: random point of the box scaled onto or inside it.
Eigen::VectorXd point_in(const TinaPolytope& p, const ChannelMatrix& a, Rng& rng) {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(a.size());
  for (int u : p.subset()) d(u) = uniform(rng, 0.0, a(u, u));
  double t = 1.0;
  for (const auto& c : p.constraints()) {
    double s = 0.0;
    for (int u : c.subset) s += d(u);
    if (s > c.bound) t = std::min(t, c.bound / s);
  }
  return d * (t * uniform(rng, 0.5, 1.0));
}

Outcome condition_hierarchy() {
  Outcome o;
  Rng rng(1005);
  int gnaj_users = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int k = uniform_int(rng, 2, 6);
    const ChannelMatrix a = trial % 2 ? random_alpha(rng, k, 0.5, 3.0) : random_alpha_coarse(rng, k);
    const ConditionReport r = check_conditions(a, 0);
    for (int u = 0; u < k; ++u) {
      if (!r.gnaj[static_cast<std::size_t>(u)]) continue;
      ++gnaj_users;
      o.require(r.c1[static_cast<std::size_t>(u)], "GNAJ without C1");
    }
  }
  int instances = 0;
  long points = 0;
  while (instances < 200) {
    const int k = uniform_int(rng, 2, 6);
    const ChannelMatrix a = random_alpha(rng, k, 1.0, 2.5, 0.8);
    if (!check_conditions(a, 0).all_c1()) continue;
    ++instances;
    for (int s = 0; s < 1000; ++s) {
      const unsigned big_mask = static_cast<unsigned>(uniform_int(rng, 1, (1 << k) - 1));
      unsigned small_mask = big_mask & static_cast<unsigned>(uniform_int(rng, 0, (1 << k) - 1));
      if (small_mask == 0) small_mask = big_mask;
      const TinaPolytope small = tina_polytope(a, subset_of(small_mask, k));
      const TinaPolytope big = tina_polytope(a, subset_of(big_mask, k));
      const GdofTuple d{point_in(small, a, rng)};
      if (!small.contains(d)) continue;
      ++points;
      o.require(big.contains(d), "point of a subset polytope outside the superset polytope");
    }
  }
  if (o.pass) {
    o.detail = std::to_string(gnaj_users) + " GNAJ users, " + std::to_string(points) + " nested points";
  }
  return o;
}

// 6 -------------------------------------------------------------------------
Outcome converse_tightness() {
  Outcome o;
  Rng rng(1006);
  int instances = 0;
  int g_above = 0;
  int g_below = 0;
  while (instances < 100) {
    const int k = uniform_int(rng, 2, 5);
    const ChannelMatrix a = random_alpha_coarse(rng, k);
    const ConditionReport r = check_conditions(a);
    if (!r.all_c1() || r.c2 != C2Status::Holds) continue;
    ++instances;
    const TinaPolytope p = tina_polytope(a, all_users(k));
    for (const auto& c : p.constraints()) {
      o.require(close(converse_bound(a, c.subset), c.bound, 1e-9), "outer bound differs from achievable bound");
      const double g = converse_g_bound(a, c.subset);
      if (g > c.bound + 1e-9) ++g_above;
      if (g < c.bound - 1e-9) ++g_below;
    }
  }
  if (o.pass) {
    o.detail = "single-order g bound alone is looser on " + std::to_string(g_above) + " and tighter on " +
               std::to_string(g_below) + " subsets";
  }
  return o;
}

// 7 -------------------------------------------------------------------------
Outcome removal_bound() {
  Outcome o;
  Rng rng(1007);
  int violations = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int k = uniform_int(rng, 2, 7);
    const ChannelMatrix a = trial % 2 ? random_alpha(rng, k) : random_alpha_coarse(rng, k);
    std::vector<int> s = subset_of(static_cast<unsigned>(uniform_int(rng, 1, (1 << k) - 1)), k);
    if (s.size() < 2) s = all_users(k);
    const int kk = s[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(s.size()) - 1))];
    std::vector<int> rest;
    for (int u : s) {
      if (u != kk) rest.push_back(u);
    }
    double rhs = -1e300;
    for (int i : rest) {
      for (int j : rest) rhs = std::max(rhs, a(i, kk) + a(kk, j) - (i == j ? 0.0 : a(i, j)));
    }
    if (brute_matching_weight(a, s) - brute_matching_weight(a, rest) > rhs + 1e-9) ++violations;
  }
  o.require(violations == 0, std::to_string(violations) + " violations");
  return o;
}

// 8 -------------------------------------------------------------------------
Outcome gp_lp_equivalence() {
  Outcome o;
  const ChannelMatrix a = fixtures::fix_a();
  const Eigen::VectorXd w = Eigen::VectorXd::Ones(3);
  double previous = std::numeric_limits<double>::infinity();
  std::string gaps;
  for (double p : {1e4, 1e6, 1e8}) {
    const double gap = gp_gdof_equivalence_gap(realize(a, p), {0, 1, 2}, w);
    gaps += (gaps.empty() ? "" : ", ") + fmt(gap);
    o.require(gap <= w.sum() * std::log(3.0) / std::log(p), "gap above sum(w) log 3 / log P at P=" + fmt(p));
    o.require(gap < previous, "gap not decreasing");
    previous = gap;
  }
  if (o.pass) o.detail = "gaps " + gaps;
  return o;
}

// 9 -------------------------------------------------------------------------
Outcome num_convergence() {
  Outcome o;
  const ChannelMatrix a = fixtures::fix_b();
  NumConfig linear;
  linear.utility.fairness = 0.0;
  linear.v = 10.0;
  const NumTrajectory t = num_run(a, linear, 5000);
  const double avg = t.running_sum_avg.back();
  o.require(close(avg, 1.8, 0.05), "linear utility average sum GDoF " + fmt(avg));
  double previous = -std::numeric_limits<double>::infinity();
  std::string utils;
  for (double v : {1.0, 10.0, 100.0}) {
    NumConfig cfg;
    cfg.utility.fairness = 1.0;
    cfg.v = v;
    const double u = num_run(a, cfg, 5000).utility;
    utils += (utils.empty() ? "" : ", ") + fmt(u);
    o.require(u >= previous - 1e-9, "log utility dropped at V=" + fmt(v));
    previous = u;
  }
  if (o.pass) o.detail = "linear avg " + fmt(avg) + ", log utility " + utils;
  return o;
}

// 10 ------------------------------------------------------------------------
Outcome scheduler_ordering() {
  Outcome o;
  const std::vector<Scheme> schemes{Scheme::ITLinQPlus, Scheme::ITLinQ, Scheme::FlashLinQ, Scheme::None};
  for (int links : {64, 256}) {
    ExperimentConfig cfg;
    cfg.scenario = scenario1(links);
    cfg.n_drops = 100;
    cfg.master_seed = 2024;
    cfg.jobs = static_cast<int>(hardware_jobs());
    cfg.schemes = schemes;
    const ExperimentResult res = run_experiment(cfg);
    std::map<Scheme, std::vector<double>> tput;
    for (const MetricRow& row : res.rows) tput[row.scheme].push_back(row.sum_tput_bps_hz);
    std::string line = std::to_string(links) + " links:";
    for (std::size_t s = 0; s + 1 < schemes.size(); ++s) {
      const auto& hi = tput[schemes[s]];
      const auto& lo = tput[schemes[s + 1]];
      std::vector<double> diff(hi.size());
      for (std::size_t i = 0; i < hi.size(); ++i) diff[i] = hi[i] - lo[i];
      const MeanCi ci = mean_ci95(diff);
      line += std::string(" ") + to_string(schemes[s]) + "-" + to_string(schemes[s + 1]) + "=" + fmt(ci.mean) +
              "+-" + fmt(ci.half_width);
      if (!(ci.mean - ci.half_width > 0.0)) o.pass = false;
    }
    o.detail += line + "; ";
  }
  return o;
}

// 11 ------------------------------------------------------------------------
Outcome energy_efficiency() {
  Outcome o;
  std::string report;
  for (double snr : {20.0, 30.0, 40.0}) {
    ExperimentConfig cfg;
    cfg.scenario = scenario1(10);
    cfg.synthetic = true;
    cfg.synthetic_snr_db = snr;
    cfg.n_drops = 200;
    cfg.master_seed = 77;
    cfg.jobs = static_cast<int>(hardware_jobs());
    cfg.schemes = {Scheme::None};
    cfg.modes = {PowerMode::Full, PowerMode::Gp, PowerMode::GpAssignment};
    const ExperimentResult res = run_experiment(cfg);
    std::map<PowerMode, double> mean;
    for (const Aggregate& ag : res.aggregates) {
      o.require(ag.valid, "too many excluded drops");
      mean[ag.mode] = ag.mean_energy;
    }
    o.require(mean[PowerMode::GpAssignment] > mean[PowerMode::Gp], "gp+assignment not above gp at " + fmt(snr) + " dB");
    o.require(mean[PowerMode::Gp] > mean[PowerMode::Full], "gp not above full at " + fmt(snr) + " dB");
    std::map<std::uint64_t, const MetricRow*> gp;
    for (const MetricRow& row : res.rows) {
      if (row.mode == PowerMode::Gp) gp[row.drop_seed] = &row;
    }
    for (const MetricRow& row : res.rows) {
      if (row.mode != PowerMode::GpAssignment) continue;
      const MetricRow* g = gp.at(row.drop_seed);
      for (std::size_t k = 0; k < row.powers_w.size(); ++k) {
        o.require(row.powers_w[k] <= g->powers_w[k] * (1.0 + 1e-9), "gp+assignment power above gp power");
      }
    }
    report += fmt(snr) + " dB ratio " + fmt(mean[PowerMode::GpAssignment] / mean[PowerMode::Full]) + "; ";
  }
  if (o.pass) o.detail = "gp+assignment / full bits per joule: " + report;
  return o;
}

// 12 ------------------------------------------------------------------------
std::string run_cli(std::vector<std::string> args, int& code) {
  args.insert(args.begin(), "tinlinq");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return out.str() + "\x1f" + err.str();
}

Outcome cli_determinism() {
  Outcome o;
  const std::string a = kData + "/fixA.json";
  const std::string b = kData + "/fixB.json";
  const std::vector<std::vector<std::string>> commands{
      {"region", "--network", a},
      {"region", "--network", a, "--cyclic"},
      {"power", "--network", a, "--gdof", "0.5,0.6,0.7", "--solver", "hungarian"},
      {"power", "--network", a, "--gdof", "0.5,0.6,0.7", "--solver", "auction", "--epsilon", "1e-4"},
      {"power", "--network", a, "--gdof", "2,1,1.5"},
      {"feasible", "--network", b, "--gdof", "0.5,0.5,0.5"},
      {"check", "--network", b},
      {"sumgdof", "--network", b, "--weights", "1,2,1", "--method", "gp"},
      {"sumgdof", "--network", b, "--weights", "1,1,1", "--method", "dgp"},
      {"schedule", "--network", a, "--scheme", "itlinq+", "--priority", "rr", "--slot", "4"},
      {"num", "--network", b, "--fairness", "1", "--slots", "200"},
      {"simulate", "--links", "16", "--drops", "5", "--seed", "9", "--jobs", "3", "--modes", "full,gp+assignment"},
      {"simulate", "--synthetic", "--links", "6", "--drops", "5", "--seed", "3", "--modes", "lp+assignment,dgp+assignment",
       "--summary"},
      {"--version"},
  };
  for (const auto& cmd : commands) {
    int c1 = 0, c2 = 0;
    const std::string first = run_cli(cmd, c1);
    const std::string second = run_cli(cmd, c2);
    o.require(c1 == c2 && first == second, "output differs for '" + cmd[0] + "'");
  }
  o.detail = std::to_string(commands.size()) + " commands";
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;  // 0: no runtime limit
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "fixture A bounds, powers and label trace", 1.0, fixture_a},
      {2, "fixture B bounds and condition report", 1.0, fixture_b},
      {3, "matching and cyclic forms agree", 60.0, representation_equivalence},
      {4, "minimum power equals the LP label oracle", 0.0, minimality_oracle},
      {5, "GNAJ implies C1, C1 gives nested polytopes", 0.0, condition_hierarchy},
      {6, "outer bound meets the region under C1 and C2", 0.0, converse_tightness},
      {7, "single-user removal bound on matchings", 0.0, removal_bound},
      {8, "GP and LP optima agree at high SNR", 0.0, gp_lp_equivalence},
      {9, "utility loop convergence", 0.0, num_convergence},
      {10, "scheduler throughput ordering", 600.0, scheduler_ordering},
      {11, "energy efficiency ordering", 0.0, energy_efficiency},
      {12, "CLI output is deterministic", 0.0, cli_determinism},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_s > 0.0 && secs >= c.limit_s) {
      o.pass = false;
      o.detail = "runtime " + fmt(secs) + " s over the " + fmt(c.limit_s) + " s limit; " + o.detail;
    }
    if (!o.pass) ++failed;
    std::printf("%s %2d %s (%.2f s)%s%s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.empty() ? "" : ": ",
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
