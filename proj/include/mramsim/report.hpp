#pragma once

// Run reports: per-sample CSV rows plus a JSON summary whose statistics are
// recomputable from the rows. Files are written atomically (temp + rename).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "variation.hpp"

namespace mramsim {

namespace detail {
inline std::string fmt_full(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
} // namespace detail

struct Stats {
  double mean = std::numeric_limits<double>::quiet_NaN();
  double std_dev = std::numeric_limits<double>::quiet_NaN();
  int count = 0;
};

inline Stats compute_stats(const std::vector<double>& xs) {
  Stats s;
  std::vector<double> v;
  v.reserve(xs.size());
  for (double x : xs)
    if (!std::isnan(x)) v.push_back(x);
  s.count = static_cast<int>(v.size());
  if (v.empty()) return s;
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double acc = 0.0;
  for (double x : v) acc += (x - s.mean) * (x - s.mean);
  s.std_dev = v.size() > 1 ? std::sqrt(acc / (v.size() - 1)) : 0.0;
  return s;
}

struct RunReport {
  std::string design_id;
  std::string data_state;
  std::uint64_t seed = 0;
  int samples = 0;
  double sigma_tox_rel = 0.0;
  double sigma_vth = 0.0;
  int error_count = 0;
  int solver_failures = 0;
  Stats delay, power, margin;
  const EnsembleResult* ensemble = nullptr;
};

inline RunReport make_report(const EnsembleResult& er, const VariationSpec& spec) {
  RunReport r;
  r.design_id = er.design_id;
  r.data_state = to_string(er.data_state);
  r.seed = spec.seed;
  r.samples = spec.samples;
  r.sigma_tox_rel = spec.sigma_tox_rel;
  r.sigma_vth = spec.sigma_vth;
  r.error_count = er.error_count;
  r.solver_failures = er.solver_failures;
  std::vector<double> delays, powers, margins;
  for (const auto& s : er.per_sample) {
    delays.push_back(s.delay);
    powers.push_back(s.power);
    margins.push_back(s.sense_margin);
  }
  r.delay = compute_stats(delays);
  r.power = compute_stats(powers);
  r.margin = compute_stats(margins);
  r.ensemble = &er;
  return r;
}

inline void atomic_write(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write '" + tmp + "'");
    os << content;
  }
  std::filesystem::rename(tmp, path);
}

inline std::string samples_csv(const EnsembleResult& er, int first_index = 0) {
  std::ostringstream os;
  os << "index,decision,delay_s,power_w,margin_v,solver_failed\n";
  for (size_t i = 0; i < er.per_sample.size(); ++i) {
    const auto& s = er.per_sample[i];
    os << (first_index + static_cast<int>(i)) << "," << to_string(s.decision) << ","
       << detail::fmt_full(s.delay) << "," << detail::fmt_full(s.power) << ","
       << detail::fmt_full(s.sense_margin) << "," << (s.solver_failed ? 1 : 0) << "\n";
  }
  return os.str();
}

inline nlohmann::json summary_json(const RunReport& r) {
  auto stats_json = [](const Stats& s) {
    nlohmann::json j;
    j["count"] = s.count;
    if (s.count > 0) {
      j["mean"] = s.mean;
      j["std"] = s.std_dev;
    } else {
      j["mean"] = nullptr;
      j["std"] = nullptr;
    }
    return j;
  };
  nlohmann::json j;
  j["design"] = r.design_id;
  j["state"] = r.data_state;
  j["seed"] = r.seed;
  j["samples"] = r.samples;
  j["sigma_tox_rel"] = r.sigma_tox_rel;
  j["sigma_vth"] = r.sigma_vth;
  j["error_count"] = r.error_count;
  j["solver_failures"] = r.solver_failures;
  j["delay_s"] = stats_json(r.delay);
  j["power_w"] = stats_json(r.power);
  j["margin_v"] = stats_json(r.margin);
  return j;
}

} // namespace mramsim
