#include "cli.hpp"

#include "tinlinq/error.hpp"
#include "tinlinq/fixtures.hpp"
#include "tinlinq/network_io.hpp"
#include "tinlinq/optimize.hpp"
#include "tinlinq/power.hpp"
#include "tinlinq/region.hpp"
#include "tinlinq/schedule.hpp"
#include "tinlinq/sim.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#ifndef TINLINQ_VERSION
#define TINLINQ_VERSION "0.0.0"
#endif

namespace tinlinq::cli {
namespace {

using nlohmann::json;

// Bad flag values found after CLI11 parsing; exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      parts.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

std::vector<double> parse_doubles(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  for (const std::string& p : split(text)) {
    double v = 0.0;
    const auto res = std::from_chars(p.data(), p.data() + p.size(), v);
    if (p.empty() || res.ec != std::errc() || res.ptr != p.data() + p.size() || !std::isfinite(v)) {
      throw UsageError(flag + ": '" + p + "' is not a number");
    }
    out.push_back(v);
  }
  return out;
}

std::vector<int> parse_ints(const std::string& text, const std::string& flag) {
  std::vector<int> out;
  for (const std::string& p : split(text)) {
    int v = 0;
    const auto res = std::from_chars(p.data(), p.data() + p.size(), v);
    if (p.empty() || res.ec != std::errc() || res.ptr != p.data() + p.size()) {
      throw UsageError(flag + ": '" + p + "' is not an integer");
    }
    out.push_back(v);
  }
  return out;
}

Eigen::VectorXd to_vector(const std::vector<double>& v, int k, const std::string& flag) {
  if (static_cast<int>(v.size()) != k) {
    throw UsageError(flag + " needs " + std::to_string(k) + " values, got " + std::to_string(v.size()));
  }
  return Eigen::Map<const Eigen::VectorXd>(v.data(), k);
}

UserSet parse_subset(const std::string& text, int k) {
  if (text.empty()) return all_users(k);
  UserSet s = parse_ints(text, "--subset");
  std::sort(s.begin(), s.end());
  try {
    validate_subset(k, s);
  } catch (const Error& e) {
    throw UsageError(std::string("--subset: ") + e.what());
  }
  return s;
}

json number(double x) { return std::isfinite(x) ? json(round12(x)) : json(nullptr); }

json vec(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number(v(i)));
  return a;
}

// Per-position labels expanded to length k, null outside the subset.
json expand(const Eigen::VectorXd& v, const UserSet& subset, int k) {
  json a = json::array();
  for (int i = 0; i < k; ++i) a.push_back(nullptr);
  for (std::size_t p = 0; p < subset.size(); ++p) a[subset[p]] = number(v(static_cast<Eigen::Index>(p)));
  return a;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Output {
 public:
  Output(std::ostream& out, std::string path) : out_(out), path_(std::move(path)) {}

  void write(const std::string& text) const {
    if (path_.empty()) {
      out_ << text;
      return;
    }
    std::ofstream f(path_, std::ios::binary);
    if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path_ + "'");
    f << text;
  }
  void write(const json& doc) const { write(doc.dump() + "\n"); }

 private:
  std::ostream& out_;
  std::string path_;
};

struct Common {
  std::string network;
  std::string out;
  double snr_db = kDefaultAlphaSnrDb;
};

void add_common(CLI::App* sub, Common& c, bool needs_network = true) {
  if (needs_network) {
    sub->add_option("--network", c.network, "network JSON file (alpha or physical form)")->required();
    sub->add_option("--snr-db", c.snr_db, "SNR used to realize an alpha-form network")->capture_default_str();
  }
  sub->add_option("--out", c.out, "write the result here instead of stdout");
}

LoadedNetwork load(const Common& c) { return read_network_file(c.network, c.snr_db); }

int cmd_region(const Common& c, const std::string& subset_text, bool cyclic, std::ostream& out) {
  const LoadedNetwork net = load(c);
  const UserSet subset = parse_subset(subset_text, net.alpha.size());
  const std::vector<SubsetBound> cons =
      cyclic ? tina_polytope_cyclic(net.alpha, subset) : tina_polytope(net.alpha, subset).constraints();
  Output(out, c.out).write(constraints_json(cons) + "\n");
  return kExitOk;
}

int cmd_power(const Common& c, const std::string& gdof_text, const std::string& solver, double epsilon, bool snap,
              std::ostream& out) {
  const LoadedNetwork net = load(c);
  const int k = net.alpha.size();
  GdofTuple d{to_vector(parse_doubles(gdof_text, "--gdof"), k, "--gdof")};
  PowerSolution sol;
  if (solver == "hungarian") {
    sol = solve_power_hungarian(net.alpha, d);
  } else {
    AuctionOptions opts;
    opts.epsilon = epsilon;
    opts.snap = snap;
    sol = solve_power_auction(net.alpha, d, opts);
  }
  json doc;
  doc["r"] = vec(sol.r.r);
  doc["y_u"] = expand(sol.labels.y_u, sol.subset, k);
  doc["y_v"] = expand(sol.labels.y_v, sol.subset, k);
  doc["rounds"] = sol.rounds;
  doc["subset"] = sol.subset;
  if (solver == "auction") doc["bids"] = sol.bids;
  Output(out, c.out).write(doc);
  return kExitOk;
}

int cmd_feasible(const Common& c, const std::string& gdof_text, std::ostream& out) {
  const LoadedNetwork net = load(c);
  GdofTuple d{to_vector(parse_doubles(gdof_text, "--gdof"), net.alpha.size(), "--gdof")};
  const UnionMembership m = union_membership(net.alpha, d);
  json doc;
  doc["feasible"] = m.member;
  doc["support"] = m.witness;
  Output(out, c.out).write(doc);
  return m.member ? kExitOk : kExitInfeasible;
}

json witnesses(const std::vector<ConditionWitness>& ws) {
  json a = json::array();
  for (const auto& w : ws) a.push_back({{"user", w.k}, {"tx", w.i}, {"rx", w.j}, {"excess", number(w.excess)}});
  return a;
}

int cmd_check(const Common& c, std::ostream& out) {
  const LoadedNetwork net = load(c);
  const ConditionReport rep = check_conditions(net.alpha);
  json doc;
  doc["gnaj"] = rep.gnaj;
  doc["c1"] = rep.c1;
  doc["c2"] = rep.c2 == C2Status::Holds ? "holds" : rep.c2 == C2Status::Fails ? "fails" : "skipped";
  doc["gnaj_violations"] = witnesses(rep.gnaj_violations);
  doc["c1_violations"] = witnesses(rep.c1_violations);
  doc["c2_counterexample"] = rep.c2_counterexample;
  Output(out, c.out).write(doc);
  return kExitOk;
}

int cmd_sumgdof(const Common& c, const std::string& weights_text, const std::string& method,
                const std::string& subset_text, std::ostream& out) {
  const LoadedNetwork net = load(c);
  const int k = net.alpha.size();
  Eigen::VectorXd w = to_vector(parse_doubles(weights_text, "--weights"), k, "--weights");
  const UserSet subset = parse_subset(subset_text, k);
  json doc;
  doc["method"] = method;
  int code = kExitOk;
  if (method == "lp" || method == "exact") {
    GdofOptimum opt;
    if (method == "lp") {
      opt = max_weighted_gdof_lp(net.alpha, subset, w);
    } else {
      Eigen::VectorXd masked = Eigen::VectorXd::Zero(k);
      for (int u : subset) masked(u) = w(u);
      opt = max_weighted_gdof_exact(net.alpha, masked);
    }
    doc["d"] = vec(opt.d.d);
    doc["objective"] = number(opt.objective);
    doc["subset"] = opt.subset;
    doc["feasible"] = opt.feasible;
    if (!opt.feasible) code = kExitInfeasible;
  } else if (method == "gp") {
    const GpSolution gp = gp_power_control(net.physical, subset, w);
    const double log_p = std::log(net.physical.reference_power);
    PowerAlloc r{Eigen::VectorXd::Constant(k, -std::numeric_limits<double>::infinity())};
    for (int u = 0; u < k; ++u) {
      if (gp.powers(u) > 0.0) r.r(u) = std::log(gp.powers(u)) / log_p;
    }
    doc["powers"] = vec(gp.powers);
    doc["sinr"] = vec(gp.sinr);
    doc["weighted_log_sinr"] = number(gp.weighted_log_sinr);
    doc["weighted_rate"] = number(gp.weighted_rate);
    doc["objective"] = number(gp.weighted_log_sinr / log_p);
    doc["r"] = vec(r.r);
    doc["d"] = vec(achieved_gdof(net.alpha, r).d);
    doc["iterations"] = gp.iterations;
  } else {
    const DgpResult res = decentralized_gp(net.alpha, subset, w);
    doc["r"] = vec(res.r.r);
    doc["d"] = vec(res.d.d);
    doc["objective"] = number(w.dot(res.d.d));
    doc["residual"] = number(res.residual);
    doc["iterations"] = res.iterations;
  }
  Output(out, c.out).write(doc);
  return code;
}

struct ScheduleFlags {
  std::string scheme = "itlinq+";
  std::optional<double> eta;
  std::optional<double> gamma;
  std::optional<double> m_db;
  std::optional<double> sir_db;
  std::string priority = "perm";
  std::string order;
  std::string weights;
  long slot = 0;
};

int cmd_schedule(const Common& c, const ScheduleFlags& f, std::ostream& out) {
  const LoadedNetwork net = load(c);
  const int k = net.alpha.size();
  const Scheme scheme = parse_scheme(f.scheme);
  SchedulerParams params;
  if (f.eta) (scheme == Scheme::ITLinQ ? params.itlinq_eta : params.eta) = *f.eta;
  if (f.gamma) params.gamma = *f.gamma;
  if (f.m_db) params.itlinq_m_db = *f.m_db;
  if (f.sir_db) params.flashlinq_sir_db = *f.sir_db;
  std::vector<int> order;
  if (f.priority == "rr") {
    order = round_robin_order(k, f.slot);
  } else if (f.priority == "weights") {
    if (f.weights.empty()) throw UsageError("--priority weights needs --weights");
    order = weight_order(to_vector(parse_doubles(f.weights, "--weights"), k, "--weights"));
  } else {
    order = f.order.empty() ? identity_order(k) : parse_ints(f.order, "--order");
  }
  try {
    validate_order(order, k);
  } catch (const Error& e) {
    throw UsageError(std::string("--order: ") + e.what());
  }
  const ScheduleResult res = schedule(scheme, LinkGains::from_network(net.physical), order, params);
  json doc;
  doc["scheme"] = to_string(scheme);
  doc["active"] = res.active;
  doc["admitted"] = res.admitted;
  doc["pilot_messages"] = res.signaling.pilot_messages;
  doc["min_inr_updates"] = res.signaling.min_inr_updates;
  Output(out, c.out).write(doc);
  return kExitOk;
}

struct NumFlags {
  double fairness = 1.0;
  std::string coefficients;
  double v = 10.0;
  double a_max = 1.0;
  long slots = 1000;
  std::string solver = "exact";
};

int cmd_num(const Common& c, const NumFlags& f, std::ostream& out) {
  const LoadedNetwork net = load(c);
  const int k = net.alpha.size();
  NumConfig cfg;
  cfg.utility.fairness = f.fairness;
  if (!f.coefficients.empty()) {
    cfg.utility.coefficients = to_vector(parse_doubles(f.coefficients, "--coefficients"), k, "--coefficients");
  }
  cfg.v = f.v;
  cfg.a_max = f.a_max;
  cfg.solver = f.solver == "exact" ? NumSolver::Exact : f.solver == "lp" ? NumSolver::LpFullSet : NumSolver::ItlinqPlusLp;
  if (f.slots < 1) throw UsageError("--slots must be >= 1");
  const NumTrajectory t = num_run(net.alpha, cfg, f.slots);
  json doc;
  doc["average_d"] = vec(t.average_d);
  doc["average_a"] = vec(t.average_a);
  doc["sum_gdof"] = number(t.average_d.sum());
  doc["utility"] = number(t.utility);
  doc["final_w"] = vec(t.final_w);
  doc["max_weight"] = number(t.max_weight);
  Output(out, c.out).write(doc);
  return kExitOk;
}

struct SimFlags {
  int scenario = 1;
  std::string config;
  int links = 64;
  int drops = 100;
  std::uint64_t seed = 1;
  int jobs = 1;
  std::string schemes = "none,flashlinq,itlinq,itlinq+";
  std::string modes = "full";
  bool synthetic = false;
  double snr_db = 30.0;
  double epsilon = 1e-3;
  bool summary = false;
};

std::string aggregates_csv(const std::vector<Aggregate>& aggs) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << "scheme,power_mode,drops,excluded,valid,mean_tput,ci95_tput,mean_energy,ci95_energy,mean_active\n";
  for (const Aggregate& a : aggs) {
    os << to_string(a.scheme) << ',' << to_string(a.mode) << ',' << a.drops << ',' << a.excluded << ','
       << (a.valid ? 1 : 0) << ',' << format_number(a.mean_tput) << ',' << format_number(a.ci95_tput) << ','
       << format_number(a.mean_energy) << ',' << format_number(a.ci95_energy) << ',' << format_number(a.mean_active)
       << '\n';
  }
  return os.str();
}

int cmd_simulate(const Common& c, const SimFlags& f, std::ostream& out) {
  ExperimentConfig cfg;
  cfg.scenario = f.scenario == 1 ? scenario1(f.links) : scenario2(f.links);
  if (!f.config.empty()) cfg.scenario = parse_scenario(read_text_file(f.config), cfg.scenario);
  cfg.synthetic = f.synthetic;
  cfg.synthetic_snr_db = f.snr_db;
  cfg.n_drops = f.drops;
  cfg.master_seed = f.seed;
  cfg.jobs = f.jobs;
  cfg.auction_epsilon = f.epsilon;
  cfg.schemes.clear();
  for (const std::string& s : split(f.schemes)) cfg.schemes.push_back(parse_scheme(s));
  cfg.modes.clear();
  for (const std::string& m : split(f.modes)) cfg.modes.push_back(parse_power_mode(m));
  const ExperimentResult res = run_experiment(cfg);
  Output(out, c.out).write(f.summary ? aggregates_csv(res.aggregates) : metrics_csv(res.rows));
  return kExitOk;
}

int exit_code_for(const Error& e) {
  if (is_infeasibility(e.code())) return kExitInfeasible;
  switch (e.code()) {
    case ErrorCode::ParseError:
    case ErrorCode::ShapeError:
    case ErrorCode::IndexError:
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidReferencePower:
      return kExitUsage;
    default:
      return kExitFailure;
  }
}

}  // namespace

std::string version_text() {
  std::ostringstream os;
  os << "tinlinq " << TINLINQ_VERSION << '\n';
  const std::pair<const char*, ChannelMatrix> fx[] = {{"fix-a", fixtures::fix_a()}, {"fix-b", fixtures::fix_b()}};
  for (const auto& [name, alpha] : fx) {
    os << "fixture " << name << " fnv1a64:" << std::hex << std::setw(16) << std::setfill('0')
       << fnv1a64(alpha_network_json(alpha)) << std::dec << '\n';
  }
  return os.str();
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"TIN GDoF regions, minimum power control and link scheduling", "tinlinq"};
  app.require_subcommand(1);
  std::string version = version_text();
  version.pop_back();  // CLI11 adds the final newline
  app.set_version_flag("--version", version);

  Common region_c, power_c, feasible_c, check_c, sum_c, sched_c, num_c, sim_c;

  std::string region_subset;
  bool region_cyclic = false;
  auto* region = app.add_subcommand("region", "TINA polytope bounds of a subset");
  add_common(region, region_c);
  region->add_option("--subset", region_subset, "comma-separated 0-based users (default all)");
  region->add_flag("--cyclic", region_cyclic, "tightest single-cycle bound per subset instead");

  std::string power_gdof, power_solver = "hungarian";
  double power_eps = 1e-5;
  bool power_snap = false;
  auto* power = app.add_subcommand("power", "minimum power exponents for a GDoF target");
  add_common(power, power_c);
  power->add_option("--gdof", power_gdof, "comma-separated target, one per user")->required();
  power->add_option("--solver", power_solver)->check(CLI::IsMember({"hungarian", "auction"}))->capture_default_str();
  power->add_option("--epsilon", power_eps, "auction bid increment")->check(CLI::PositiveNumber)->capture_default_str();
  power->add_flag("--snap", power_snap, "replace auction prices by exact minimum prices");

  std::string feasible_gdof;
  auto* feasible = app.add_subcommand("feasible", "is a GDoF tuple TIN-achievable");
  add_common(feasible, feasible_c);
  feasible->add_option("--gdof", feasible_gdof)->required();

  auto* check = app.add_subcommand("check", "GNAJ, C1 and C2 condition report");
  add_common(check, check_c);

  std::string sum_weights, sum_method = "lp", sum_subset;
  auto* sumgdof = app.add_subcommand("sumgdof", "weighted sum-GDoF maximization");
  add_common(sumgdof, sum_c);
  sumgdof->add_option("--weights", sum_weights)->required();
  sumgdof->add_option("--method", sum_method)->check(CLI::IsMember({"lp", "exact", "gp", "dgp"}))->capture_default_str();
  sumgdof->add_option("--subset", sum_subset);

  ScheduleFlags sf;
  auto* sched = app.add_subcommand("schedule", "greedy link admission");
  add_common(sched, sched_c);
  sched->add_option("--scheme", sf.scheme)
      ->check(CLI::IsMember({"none", "flashlinq", "itlinq", "itlinq+"}))
      ->capture_default_str();
  sched->add_option("--eta", sf.eta, "signal exponent (ITLinQ+ or ITLinQ)");
  sched->add_option("--gamma", sf.gamma, "ITLinQ+ weakest-interferer exponent");
  sched->add_option("--m-db", sf.m_db, "ITLinQ margin in dB");
  sched->add_option("--sir-db", sf.sir_db, "FlashLinQ SIR threshold in dB");
  sched->add_option("--priority", sf.priority)->check(CLI::IsMember({"perm", "rr", "weights"}))->capture_default_str();
  sched->add_option("--order", sf.order, "explicit permutation for --priority perm (default identity)");
  sched->add_option("--slot", sf.slot, "rotation for --priority rr");
  sched->add_option("--weights", sf.weights, "weights for --priority weights");

  NumFlags nf;
  auto* num = app.add_subcommand("num", "utility maximization by weight updates");
  add_common(num, num_c);
  num->add_option("--fairness", nf.fairness, "0 linear, 1 log")->check(CLI::NonNegativeNumber)->capture_default_str();
  num->add_option("--coefficients", nf.coefficients);
  num->add_option("--v", nf.v)->check(CLI::PositiveNumber)->capture_default_str();
  num->add_option("--a-max", nf.a_max)->check(CLI::PositiveNumber)->capture_default_str();
  num->add_option("--slots", nf.slots)->capture_default_str();
  num->add_option("--solver", nf.solver)->check(CLI::IsMember({"exact", "lp", "itlinq+"}))->capture_default_str();

  SimFlags mf;
  auto* sim = app.add_subcommand("simulate", "Monte-Carlo scheduling and power-control comparison");
  add_common(sim, sim_c, false);
  sim->add_option("--scenario", mf.scenario)->check(CLI::IsMember({1, 2}))->capture_default_str();
  sim->add_option("--config", mf.config, "scenario JSON overriding the preset");
  sim->add_option("--links", mf.links)->check(CLI::PositiveNumber)->capture_default_str();
  sim->add_option("--drops", mf.drops)->check(CLI::PositiveNumber)->capture_default_str();
  sim->add_option("--seed", mf.seed)->capture_default_str();
  sim->add_option("--jobs", mf.jobs)->check(CLI::PositiveNumber)->capture_default_str();
  sim->add_option("--schemes", mf.schemes)->capture_default_str();
  sim->add_option("--modes", mf.modes)->capture_default_str();
  sim->add_flag("--synthetic", mf.synthetic, "random strengths instead of geometric drops");
  sim->add_option("--snr-db", mf.snr_db, "SNR of synthetic networks")->capture_default_str();
  sim->add_option("--epsilon", mf.epsilon, "auction increment")->check(CLI::PositiveNumber)->capture_default_str();
  sim->add_flag("--summary", mf.summary, "per scheme/mode aggregates instead of per-drop rows");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (region->parsed()) return cmd_region(region_c, region_subset, region_cyclic, out);
    if (power->parsed()) return cmd_power(power_c, power_gdof, power_solver, power_eps, power_snap, out);
    if (feasible->parsed()) return cmd_feasible(feasible_c, feasible_gdof, out);
    if (check->parsed()) return cmd_check(check_c, out);
    if (sumgdof->parsed()) return cmd_sumgdof(sum_c, sum_weights, sum_method, sum_subset, out);
    if (sched->parsed()) return cmd_schedule(sched_c, sf, out);
    if (num->parsed()) return cmd_num(num_c, nf, out);
    if (sim->parsed()) return cmd_simulate(sim_c, mf, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    if (is_infeasibility(e.code())) err << "infeasible\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace tinlinq::cli
