#include "tinlinq/network_io.hpp"

#include "tinlinq/error.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace tinlinq {
namespace {

using nlohmann::json;

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    parse_fail(std::string("invalid JSON: ") + e.what());
  }
}

void require_keys(const json& doc, const std::set<std::string>& keys) {
  if (!doc.is_object()) parse_fail("expected a JSON object");
  for (const auto& [key, value] : doc.items()) {
    (void)value;
    if (!keys.count(key)) parse_fail("unexpected key '" + key + "'");
  }
  for (const auto& key : keys) {
    if (!doc.contains(key)) parse_fail("missing key '" + key + "'");
  }
}

double as_number(const json& v, const std::string& what) {
  if (!v.is_number()) parse_fail(what + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) parse_fail(what + " must be finite");
  return x;
}

Eigen::VectorXd as_vector(const json& v, int k, const std::string& what) {
  if (!v.is_array() || static_cast<int>(v.size()) != k) {
    parse_fail(what + " must be an array of length " + std::to_string(k));
  }
  Eigen::VectorXd out(k);
  for (int i = 0; i < k; ++i) out(i) = as_number(v[i], what);
  return out;
}

Eigen::MatrixXd as_matrix(const json& v, int k, const std::string& what) {
  if (!v.is_array() || static_cast<int>(v.size()) != k) parse_fail(what + " must have " + std::to_string(k) + " rows");
  Eigen::MatrixXd out(k, k);
  for (int i = 0; i < k; ++i) out.row(i) = as_vector(v[i], k, what).transpose();
  return out;
}

json number(double x) { return std::isfinite(x) ? json(round12(x)) : json(nullptr); }

json vector_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(number(v(i)));
  return arr;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) arr.push_back(vector_json(m.row(i).transpose()));
  return arr;
}

double to_db(double x) { return 10.0 * std::log10(x); }

}  // namespace

double round12(double value) {
  if (!std::isfinite(value)) return value;
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 12);
  double out = 0.0;
  std::from_chars(buf, res.ptr, out);
  return out;
}

std::string format_number(double value) {
  if (!std::isfinite(value)) return "null";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

LoadedNetwork parse_network(const std::string& text, double alpha_snr_db) {
  const json doc = parse_json(text);
  if (!doc.is_object() || !doc.contains("k")) parse_fail("network needs key 'k'");
  if (!doc["k"].is_number_integer() || doc["k"].get<long long>() < 1 || doc["k"].get<long long>() > 100000) {
    parse_fail("'k' must be a positive integer");
  }
  const int k = doc["k"].get<int>();
  LoadedNetwork out;
  try {
    if (doc.contains("alpha")) {
      require_keys(doc, {"k", "alpha"});
      const Eigen::MatrixXd a = as_matrix(doc["alpha"], k, "alpha");
      if ((a.array() < 0.0).any()) parse_fail("alpha entries must be >= 0");
      out.alpha = ChannelMatrix(a);
      out.physical = realize(out.alpha, std::pow(10.0, alpha_snr_db / 10.0));
    } else {
      require_keys(doc, {"k", "gains_db", "tx_power_dbm", "noise_dbm", "ref_snr_db"});
      const Eigen::MatrixXd g_db = as_matrix(doc["gains_db"], k, "gains_db");
      const Eigen::VectorXd p_dbm = as_vector(doc["tx_power_dbm"], k, "tx_power_dbm");
      PhysicalNetwork& net = out.physical;
      net.gains = g_db.unaryExpr([](double x) { return std::pow(10.0, x / 10.0); });
      net.max_tx_power = p_dbm.unaryExpr([](double x) { return std::pow(10.0, (x - 30.0) / 10.0); });
      net.noise_power = std::pow(10.0, (as_number(doc["noise_dbm"], "noise_dbm") - 30.0) / 10.0);
      net.reference_power = std::pow(10.0, as_number(doc["ref_snr_db"], "ref_snr_db") / 10.0);
      net.validate();
      out.alpha = strength_from_physical(net);
      out.from_physical = true;
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) throw;
    parse_fail(std::string("invalid network: ") + e.what());
  }
  return out;
}

LoadedNetwork read_network_file(const std::string& path, double alpha_snr_db) {
  return parse_network(read_text_file(path), alpha_snr_db);
}

std::string alpha_network_json(const ChannelMatrix& alpha) {
  json doc;
  doc["k"] = alpha.size();
  doc["alpha"] = matrix_json(alpha.values());
  return doc.dump();
}

std::string physical_network_json(const PhysicalNetwork& net) {
  net.validate();
  json doc;
  doc["k"] = net.size();
  doc["gains_db"] = matrix_json(net.gains.unaryExpr([](double x) { return to_db(x); }));
  doc["tx_power_dbm"] = vector_json(net.max_tx_power.unaryExpr([](double x) { return to_db(x) + 30.0; }));
  doc["noise_dbm"] = number(to_db(net.noise_power) + 30.0);
  doc["ref_snr_db"] = number(to_db(net.reference_power));
  return doc.dump();
}

Scenario parse_scenario(const std::string& text, const Scenario& base) {
  const json doc = parse_json(text);
  if (!doc.is_object()) parse_fail("scenario must be a JSON object");
  Scenario s = base;
  const std::vector<std::pair<std::string, double*>> fields{
      {"area_m", &s.area_m},
      {"dist_min_m", &s.dist_min_m},
      {"dist_max_m", &s.dist_max_m},
      {"bandwidth_hz", &s.bandwidth_hz},
      {"tx_power_dbm", &s.tx_power_dbm},
      {"noise_psd_dbm_hz", &s.noise_psd_dbm_hz},
      {"noise_figure_db", &s.noise_figure_db},
      {"antenna_height_m", &s.antenna_height_m},
      {"antenna_gain_db", &s.antenna_gain_db},
      {"carrier_hz", &s.carrier_hz},
  };
  for (const auto& [key, value] : doc.items()) {
    if (key == "name") {
      if (!value.is_string()) parse_fail("'name' must be a string");
      s.name = value.get<std::string>();
      continue;
    }
    if (key == "n_links") {
      if (!value.is_number_integer()) parse_fail("'n_links' must be an integer");
      s.n_links = value.get<int>();
      continue;
    }
    bool known = false;
    for (const auto& [name, ptr] : fields) {
      if (name == key) {
        *ptr = as_number(value, key);
        known = true;
      }
    }
    if (!known) parse_fail("unexpected key '" + key + "'");
  }
  try {
    s.validate();
  } catch (const Error& e) {
    parse_fail(e.what());
  }
  return s;
}

std::string scenario_json(const Scenario& s) {
  json doc;
  doc["name"] = s.name;
  doc["area_m"] = number(s.area_m);
  doc["n_links"] = s.n_links;
  doc["dist_min_m"] = number(s.dist_min_m);
  doc["dist_max_m"] = number(s.dist_max_m);
  doc["bandwidth_hz"] = number(s.bandwidth_hz);
  doc["tx_power_dbm"] = number(s.tx_power_dbm);
  doc["noise_psd_dbm_hz"] = number(s.noise_psd_dbm_hz);
  doc["noise_figure_db"] = number(s.noise_figure_db);
  doc["antenna_height_m"] = number(s.antenna_height_m);
  doc["antenna_gain_db"] = number(s.antenna_gain_db);
  doc["carrier_hz"] = number(s.carrier_hz);
  return doc.dump();
}

std::string constraints_json(const std::vector<SubsetBound>& constraints) {
  json arr = json::array();
  for (const auto& c : constraints) arr.push_back({{"subset", c.subset}, {"bound", number(c.bound)}});
  return arr.dump();
}

std::vector<SubsetBound> parse_constraints(const std::string& text) {
  const json doc = parse_json(text);
  if (!doc.is_array()) parse_fail("constraints must be an array");
  std::vector<SubsetBound> out;
  for (const json& item : doc) {
    require_keys(item, {"subset", "bound"});
    if (!item["subset"].is_array()) parse_fail("'subset' must be an array");
    SubsetBound c;
    for (const json& u : item["subset"]) {
      if (!u.is_number_integer()) parse_fail("subset entries must be integers");
      c.subset.push_back(u.get<int>());
    }
    c.bound = as_number(item["bound"], "bound");
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace tinlinq
