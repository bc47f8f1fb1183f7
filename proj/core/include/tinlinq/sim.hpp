#pragma once

// Random D2D drops, line-of-sight path loss and the Monte-Carlo experiment
// runner comparing scheduling schemes and power-control modes.

#include "tinlinq/model.hpp"
#include "tinlinq/optimize.hpp"
#include "tinlinq/schedule.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace tinlinq {

struct Scenario {
  std::string name = "scenario1";
  double area_m = 1000.0;
  int n_links = 64;
  double dist_min_m = 5.0;
  double dist_max_m = 30.0;
  double bandwidth_hz = 5e6;
  double tx_power_dbm = 20.0;
  double noise_psd_dbm_hz = -174.0;
  double noise_figure_db = 7.0;
  double antenna_height_m = 1.5;
  double antenna_gain_db = -2.5;  // per device
  double carrier_hz = 2.4e9;

  void validate() const;
  double noise_dbm() const;
  double tx_power_w() const;
};

/// [5, 30] m links, 5 MHz, 20 dBm.
Scenario scenario1(int n_links);
/// [10, 60] m links, 10 MHz, 30 dBm.
Scenario scenario2(int n_links);

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct DropRecord {
  std::vector<Point> tx;
  std::vector<Point> rx;
  PhysicalNetwork network;  // reference power = largest direct-link SNR
  std::uint64_t seed = 0;
};

/// Path loss in dB, dual-slope LoS form with breakpoint 4 h^2 / lambda.
double pathloss_itu1411_los(double distance_m, double carrier_hz, double antenna_height_m);
double breakpoint_distance(double carrier_hz, double antenna_height_m);

/// Cross-link distances are floored at this value before path loss.
inline constexpr double kMinPathDistance = 1.0;

/// Tx uniform in the square, link length uniform in range, direction
/// redrawn until the Rx lands inside (RegionTooTight after max_attempts).
DropRecord generate_drop(const Scenario& scenario, std::uint64_t seed, int max_attempts = 10000);

/// Counter-based seed split: drop i of a run is reproducible alone.
std::uint64_t drop_seed(std::uint64_t master_seed, std::uint64_t index);

/// alpha_kk ~ U[1, 2], alpha_ij ~ U[0, 1].
ChannelMatrix synthetic_alpha(int n_links, std::uint64_t seed);

enum class PowerMode { Full, Gp, GpAssignment, LpAssignment, DgpAssignment };
const char* to_string(PowerMode mode) noexcept;
/// Accepts full, gp, gp+assignment, lp+assignment, dgp+assignment.
PowerMode parse_power_mode(const std::string& name);

struct MetricRow {
  Scheme scheme = Scheme::None;
  PowerMode mode = PowerMode::Full;
  int n_links = 0;
  std::uint64_t drop_seed = 0;
  double sum_tput_bps_hz = 0.0;
  double energy_bits_per_joule = 0.0;
  int active_links = 0;
  std::vector<double> powers_w;  // per link, 0 when off
};

struct PowerEvaluation {
  Eigen::VectorXd fraction;  // of each transmitter's cap
  Eigen::VectorXd sinr;
};

/// Powers of one mode on an already scheduled set, unit weights.
PowerEvaluation allocate_power(PowerMode mode, const PhysicalNetwork& net, const UserSet& active,
                               double auction_epsilon = 1e-3, const DgpOptions& dgp = {});

struct ExperimentConfig {
  Scenario scenario;
  /// Use synthetic strengths (synthetic_alpha) at synthetic_snr_db instead
  /// of geometric drops; scenario still supplies bandwidth and power cap.
  bool synthetic = false;
  double synthetic_snr_db = 30.0;
  std::vector<Scheme> schemes{Scheme::None, Scheme::FlashLinQ, Scheme::ITLinQ, Scheme::ITLinQPlus};
  std::vector<PowerMode> modes{PowerMode::Full};
  int n_drops = 100;
  std::uint64_t master_seed = 1;
  int jobs = 1;
  SchedulerParams params;
  double auction_epsilon = 1e-3;
  DgpOptions dgp;
};

struct Aggregate {
  Scheme scheme = Scheme::None;
  PowerMode mode = PowerMode::Full;
  int drops = 0;
  int excluded = 0;
  bool valid = true;  // exclusions <= 1% of drops
  double mean_tput = 0.0;
  double ci95_tput = 0.0;
  double mean_energy = 0.0;
  double ci95_energy = 0.0;
  double mean_active = 0.0;
};

struct ExperimentResult {
  std::vector<MetricRow> rows;  // drop-major, then scheme, then mode
  std::vector<Aggregate> aggregates;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

/// Header plus one line per row, fixed column order.
std::string metrics_csv(const std::vector<MetricRow>& rows);

/// Kahan-summed mean and 1.96 * sample standard error.
struct MeanCi {
  double mean = 0.0;
  double half_width = 0.0;
};
MeanCi mean_ci95(const std::vector<double>& values);

}  // namespace tinlinq
