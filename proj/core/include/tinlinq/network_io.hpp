#pragma once

// JSON readers and writers for networks and scenario configs, plus the
// number formatting shared by every machine-readable output.
//
// Network documents come in two forms with exactly these keys:
//   {"k": K, "alpha": [[...]]}
//   {"k": K, "gains_db": [[...]], "tx_power_dbm": [...], "noise_dbm": x, "ref_snr_db": x}
// gains_db is the path gain Tx i -> Rx j in dB (row = Tx).

#include "tinlinq/model.hpp"
#include "tinlinq/region.hpp"
#include "tinlinq/sim.hpp"

#include <string>
#include <vector>

namespace tinlinq {

/// SNR used to realize an alpha-only network when physical values are
/// needed (GP, simulation).
inline constexpr double kDefaultAlphaSnrDb = 30.0;

struct LoadedNetwork {
  ChannelMatrix alpha;
  PhysicalNetwork physical;
  bool from_physical = false;
};

/// Throws ParseError on malformed JSON, missing or extra keys, or wrong
/// shapes. Alpha-form input is realized at `alpha_snr_db`.
LoadedNetwork parse_network(const std::string& text, double alpha_snr_db = kDefaultAlphaSnrDb);
LoadedNetwork read_network_file(const std::string& path, double alpha_snr_db = kDefaultAlphaSnrDb);

std::string alpha_network_json(const ChannelMatrix& alpha);
/// Writes gains_db / tx_power_dbm / noise_dbm / ref_snr_db.
std::string physical_network_json(const PhysicalNetwork& net);

/// Scenario JSON: any subset of the Scenario field names; unknown keys are
/// a ParseError. Missing fields keep `base` values.
Scenario parse_scenario(const std::string& text, const Scenario& base = {});
std::string scenario_json(const Scenario& scenario);

/// [{"subset": [...], "bound": x}, ...]
std::string constraints_json(const std::vector<SubsetBound>& constraints);
std::vector<SubsetBound> parse_constraints(const std::string& text);

/// Rounds to 12 significant digits (locale-independent); non-finite values
/// pass through unchanged.
double round12(double value);
/// 12-significant-digit text, "null" for non-finite values.
std::string format_number(double value);

std::string read_text_file(const std::string& path);

}  // namespace tinlinq
