#include "tinlinq/sim.hpp"

#include "tinlinq/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

namespace tinlinq {
namespace {

constexpr double kSpeedOfLight = 299792458.0;

double dbm_to_w(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct DropInput {
  PhysicalNetwork net;
  double cap_w = 1.0;
  double bandwidth_hz = 1.0;
};

DropInput make_input(const ExperimentConfig& cfg, std::uint64_t seed) {
  DropInput in;
  in.bandwidth_hz = cfg.scenario.bandwidth_hz;
  in.cap_w = cfg.scenario.tx_power_w();
  if (cfg.synthetic) {
    in.net = realize(synthetic_alpha(cfg.scenario.n_links, seed), std::pow(10.0, cfg.synthetic_snr_db / 10.0));
  } else {
    in.net = generate_drop(cfg.scenario, seed).network;
  }
  return in;
}

class Kahan {
 public:
  void add(double v) {
    const double y = v - c_;
    const double t = sum_ + y;
    c_ = (t - sum_) - y;
    sum_ = t;
  }
  double sum() const { return sum_; }

 private:
  double sum_ = 0.0;
  double c_ = 0.0;
};

}  // namespace

void Scenario::validate() const {
  const bool positive = area_m > 0 && n_links > 0 && dist_min_m > 0 && dist_max_m > 0 && bandwidth_hz > 0 &&
                        antenna_height_m > 0 && carrier_hz > 0;
  if (!positive || dist_min_m > dist_max_m || dist_max_m >= area_m) {
    throw Error(ErrorCode::InvalidArgument, "invalid scenario '" + name + "'");
  }
  for (double v : {tx_power_dbm, noise_psd_dbm_hz, noise_figure_db, antenna_gain_db}) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "invalid scenario '" + name + "'");
  }
}

double Scenario::noise_dbm() const { return noise_psd_dbm_hz + 10.0 * std::log10(bandwidth_hz) + noise_figure_db; }

double Scenario::tx_power_w() const { return dbm_to_w(tx_power_dbm); }

Scenario scenario1(int n_links) {
  Scenario s;
  s.name = "scenario1";
  s.n_links = n_links;
  return s;
}

Scenario scenario2(int n_links) {
  Scenario s;
  s.name = "scenario2";
  s.n_links = n_links;
  s.dist_min_m = 10.0;
  s.dist_max_m = 60.0;
  s.bandwidth_hz = 10e6;
  s.tx_power_dbm = 30.0;
  return s;
}

double breakpoint_distance(double carrier_hz, double antenna_height_m) {
  const double lambda = kSpeedOfLight / carrier_hz;
  return 4.0 * antenna_height_m * antenna_height_m / lambda;
}

double pathloss_itu1411_los(double distance_m, double carrier_hz, double antenna_height_m) {
  if (!(distance_m > 0.0)) throw Error(ErrorCode::DomainError, "path loss needs a positive distance");
  if (!(carrier_hz > 0.0) || !(antenna_height_m > 0.0)) {
    throw Error(ErrorCode::DomainError, "carrier and antenna height must be positive");
  }
  const double lambda = kSpeedOfLight / carrier_hz;
  const double h2 = antenna_height_m * antenna_height_m;
  const double r_bp = 4.0 * h2 / lambda;
  const double l_bp = std::abs(20.0 * std::log10(lambda * lambda / (8.0 * std::numbers::pi * h2)));
  const double slope = distance_m <= r_bp ? 20.0 : 40.0;
  return l_bp + slope * std::log10(distance_m / r_bp);
}

DropRecord generate_drop(const Scenario& sc, std::uint64_t seed, int max_attempts) {
  sc.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(0.0, sc.area_m);
  std::uniform_real_distribution<double> len(sc.dist_min_m, sc.dist_max_m);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);

  DropRecord drop;
  drop.seed = seed;
  const int n = sc.n_links;
  for (int k = 0; k < n; ++k) {
    const Point tx{pos(rng), pos(rng)};
    const double d = len(rng);
    bool placed = false;
    for (int attempt = 0; attempt < max_attempts && !placed; ++attempt) {
      const double th = angle(rng);
      const Point rx{tx.x + d * std::cos(th), tx.y + d * std::sin(th)};
      if (rx.x >= 0.0 && rx.x <= sc.area_m && rx.y >= 0.0 && rx.y <= sc.area_m) {
        drop.tx.push_back(tx);
        drop.rx.push_back(rx);
        placed = true;
      }
    }
    if (!placed) throw Error(ErrorCode::RegionTooTight, "could not place a receiver inside the area");
  }

  PhysicalNetwork& net = drop.network;
  net.gains.resize(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double dist = std::max(kMinPathDistance, distance(drop.tx[i], drop.rx[j]));
      const double loss_db = pathloss_itu1411_los(dist, sc.carrier_hz, sc.antenna_height_m);
      net.gains(i, j) = std::pow(10.0, (2.0 * sc.antenna_gain_db - loss_db) / 10.0);
    }
  }
  net.max_tx_power = Eigen::VectorXd::Constant(n, sc.tx_power_w());
  net.noise_power = dbm_to_w(sc.noise_dbm());
  net.reference_power = 1.0;
  net.reference_power = net.normalized_gains().diagonal().maxCoeff();
  net.validate();
  return drop;
}

std::uint64_t drop_seed(std::uint64_t master_seed, std::uint64_t index) {
  return splitmix64(splitmix64(master_seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

ChannelMatrix synthetic_alpha(int n_links, std::uint64_t seed) {
  if (n_links < 1) throw Error(ErrorCode::InvalidArgument, "need at least one link");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd a(n_links, n_links);
  for (int i = 0; i < n_links; ++i) {
    for (int j = 0; j < n_links; ++j) a(i, j) = (i == j ? 1.0 : 0.0) + unit(rng);
  }
  return ChannelMatrix(a);
}

const char* to_string(PowerMode mode) noexcept {
  switch (mode) {
    case PowerMode::Full:
      return "full";
    case PowerMode::Gp:
      return "gp";
    case PowerMode::GpAssignment:
      return "gp+assignment";
    case PowerMode::LpAssignment:
      return "lp+assignment";
    case PowerMode::DgpAssignment:
      return "dgp+assignment";
  }
  return "?";
}

PowerMode parse_power_mode(const std::string& name) {
  for (PowerMode m : {PowerMode::Full, PowerMode::Gp, PowerMode::GpAssignment, PowerMode::LpAssignment,
                      PowerMode::DgpAssignment}) {
    if (name == to_string(m)) return m;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown power mode '" + name + "'");
}

PowerEvaluation allocate_power(PowerMode mode, const PhysicalNetwork& net, const UserSet& active,
                               double auction_epsilon, const DgpOptions& dgp) {
  const int k = net.size();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(k);
  PowerEvaluation ev;
  ev.fraction = Eigen::VectorXd::Zero(k);
  auto from_exponents = [&](const PowerAlloc& r) {
    for (int u = 0; u < k; ++u) {
      if (std::isfinite(r[u])) ev.fraction(u) = std::pow(net.reference_power, r[u]);
    }
  };

  switch (mode) {
    case PowerMode::Full:
      for (int u : active) ev.fraction(u) = 1.0;
      break;
    case PowerMode::Gp:
      ev.fraction = gp_power_control(net, active, ones).powers;
      break;
    case PowerMode::GpAssignment:
      from_exponents(gp_then_assignment(net, active, ones, PowerSolver::Auction, {}, auction_epsilon).r_min);
      break;
    case PowerMode::LpAssignment: {
      const ChannelMatrix alpha = strength_from_physical(net);
      const GdofOptimum lp = max_weighted_gdof_lp(alpha, active, ones);
      if (!lp.feasible) throw Error(ErrorCode::InfeasibleGdof, "scheduled set has an empty GDoF polytope");
      from_exponents(minimum_power(alpha, lp.d, PowerSolver::Auction, auction_epsilon));
      break;
    }
    case PowerMode::DgpAssignment: {
      const ChannelMatrix alpha = strength_from_physical(net);
      const DgpResult res = decentralized_gp(alpha, active, ones, dgp);
      from_exponents(minimum_power(alpha, res.d, PowerSolver::Auction, auction_epsilon));
      break;
    }
  }

  const Eigen::MatrixXd ng = net.normalized_gains();
  ev.sinr = Eigen::VectorXd::Zero(k);
  for (int i = 0; i < k; ++i) {
    if (ev.fraction(i) <= 0.0) continue;
    double interference = 0.0;
    for (int j = 0; j < k; ++j) {
      if (j != i) interference += ng(j, i) * ev.fraction(j);
    }
    ev.sinr(i) = ng(i, i) * ev.fraction(i) / (1.0 + interference);
  }
  return ev;
}

MeanCi mean_ci95(const std::vector<double>& values) {
  MeanCi out;
  if (values.empty()) return out;
  Kahan sum;
  for (double v : values) sum.add(v);
  const double n = static_cast<double>(values.size());
  out.mean = sum.sum() / n;
  if (values.size() < 2) return out;
  Kahan sq;
  for (double v : values) sq.add((v - out.mean) * (v - out.mean));
  out.half_width = 1.96 * std::sqrt(sq.sum() / (n - 1.0) / n);
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.scenario.validate();
  cfg.params.validate();
  if (cfg.n_drops < 1) throw Error(ErrorCode::InvalidArgument, "need at least one drop");
  if (cfg.schemes.empty() || cfg.modes.empty()) throw Error(ErrorCode::InvalidArgument, "no schemes or power modes");

  const std::size_t per_drop = cfg.schemes.size() * cfg.modes.size();
  // One slot per (drop, scheme, mode); an empty powers_w with n_links == 0
  // marks an excluded combination.
  std::vector<MetricRow> slots(static_cast<std::size_t>(cfg.n_drops) * per_drop);
  std::vector<char> ok(slots.size(), 0);

  auto run_drop = [&](int drop) {
    const std::uint64_t seed = drop_seed(cfg.master_seed, static_cast<std::uint64_t>(drop));
    const DropInput in = make_input(cfg, seed);
    const LinkGains gains = LinkGains::from_network(in.net);
    const std::vector<int> order = identity_order(in.net.size());
    std::size_t idx = static_cast<std::size_t>(drop) * per_drop;
    for (Scheme scheme : cfg.schemes) {
      const ScheduleResult sched = schedule(scheme, gains, order, cfg.params);
      for (PowerMode mode : cfg.modes) {
        MetricRow& row = slots[idx];
        row.scheme = scheme;
        row.mode = mode;
        row.n_links = in.net.size();
        row.drop_seed = seed;
        try {
          const PowerEvaluation ev = allocate_power(mode, in.net, sched.active, cfg.auction_epsilon, cfg.dgp);
          Kahan tput;
          Kahan power;
          row.powers_w.assign(static_cast<std::size_t>(in.net.size()), 0.0);
          for (int u = 0; u < in.net.size(); ++u) {
            if (ev.fraction(u) <= 0.0) continue;
            ++row.active_links;
            tput.add(std::log2(1.0 + ev.sinr(u)));
            row.powers_w[u] = ev.fraction(u) * (cfg.synthetic ? in.cap_w : in.net.max_tx_power(u));
            power.add(row.powers_w[u]);
          }
          row.sum_tput_bps_hz = tput.sum();
          row.energy_bits_per_joule = power.sum() > 0.0 ? tput.sum() * in.bandwidth_hz / power.sum() : 0.0;
          ok[idx] = 1;
        } catch (const Error&) {
          ok[idx] = 0;
        }
        ++idx;
      }
    }
  };

  const int jobs = std::max(1, std::min(cfg.jobs, cfg.n_drops));
  if (jobs == 1) {
    for (int d = 0; d < cfg.n_drops; ++d) run_drop(d);
  } else {
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (int d = next++; d < cfg.n_drops; d = next++) run_drop(d);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  ExperimentResult out;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (ok[i]) out.rows.push_back(slots[i]);
  }
  for (std::size_t c = 0; c < per_drop; ++c) {
    Aggregate agg;
    agg.scheme = cfg.schemes[c / cfg.modes.size()];
    agg.mode = cfg.modes[c % cfg.modes.size()];
    std::vector<double> tput, energy, active;
    for (int d = 0; d < cfg.n_drops; ++d) {
      const std::size_t i = static_cast<std::size_t>(d) * per_drop + c;
      if (!ok[i]) {
        ++agg.excluded;
        continue;
      }
      tput.push_back(slots[i].sum_tput_bps_hz);
      energy.push_back(slots[i].energy_bits_per_joule);
      active.push_back(slots[i].active_links);
    }
    agg.drops = static_cast<int>(tput.size());
    agg.valid = agg.excluded * 100 <= cfg.n_drops;
    const MeanCi t = mean_ci95(tput);
    const MeanCi e = mean_ci95(energy);
    agg.mean_tput = t.mean;
    agg.ci95_tput = t.half_width;
    agg.mean_energy = e.mean;
    agg.ci95_energy = e.half_width;
    agg.mean_active = mean_ci95(active).mean;
    out.aggregates.push_back(agg);
  }
  return out;
}

std::string metrics_csv(const std::vector<MetricRow>& rows) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << "scheme,power_mode,n_links,drop_seed,sum_tput_bps_hz,energy_bits_per_joule,active_links\n";
  os << std::setprecision(12);
  for (const MetricRow& r : rows) {
    os << to_string(r.scheme) << ',' << to_string(r.mode) << ',' << r.n_links << ',' << r.drop_seed << ','
       << r.sum_tput_bps_hz << ',' << r.energy_bits_per_joule << ',' << r.active_links << '\n';
  }
  return os.str();
}

}  // namespace tinlinq
