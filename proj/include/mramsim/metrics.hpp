#pragma once

// Figure-of-merit extraction from transient results: digital decision,
// readout delay, dynamic power (integrated and closed-form), sensing
// margin, and read-disturbance compliance.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "senseamps.hpp"
#include "solver.hpp"

namespace mramsim {

enum class Decision { P, AP, indeterminate };

inline const char* to_string(Decision d) {
  switch (d) {
    case Decision::P: return "P";
    case Decision::AP: return "AP";
    default: return "X";
  }
}

struct MetricsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ReadoutMetrics {
  Decision decision = Decision::indeterminate;
  double delay = std::numeric_limits<double>::quiet_NaN(); // s, NaN when unavailable
  double power_avg = 0.0;                                  // W
  double sense_margin = 0.0;                               // V
  double i_rd_peak = 0.0;                                  // A, worst junction
};

// Hysteresis band for classifying the latched output.
inline constexpr double k_decision_band = 0.010; // V

// Output polarity convention: the AP (high resistance) data state drives
// SAOUT high; P drives it low.
inline Decision extract_decision(const TransientResult& tr, const TimingPlan& timing) {
  const int a = tr.find_node("saout");
  const int b = tr.find_node("saoutb");
  if (a < 0 || b < 0) throw MetricsError("transient result lacks saout/saoutb nodes");
  const double t_end = timing.wl_fall();
  if (tr.times.back() + 1e-18 < t_end)
    throw MetricsError("transient does not cover the decision instant");
  const double diff = tr.at(a, t_end) - tr.at(b, t_end);
  if (diff > k_decision_band) return Decision::AP;
  if (diff < -k_decision_band) return Decision::P;
  return Decision::indeterminate;
}

// Time from the SAE rising edge to the first instant |SAOUT - SAOUTB|
// crosses VDD/2 with the final polarity, linearly interpolated.
inline double extract_readout_delay(const TransientResult& tr, const TimingPlan& timing) {
  const int a = tr.find_node("saout");
  const int b = tr.find_node("saoutb");
  if (a < 0 || b < 0) throw MetricsError("transient result lacks saout/saoutb nodes");
  const double t0 = timing.sae_rise();
  const double t_end = timing.wl_fall();
  const double final_diff = tr.at(a, t_end) - tr.at(b, t_end);
  const double sign = final_diff >= 0.0 ? 1.0 : -1.0;
  const double target = 0.5 * timing.vdd;

  double prev_t = 0.0, prev_v = 0.0;
  bool have_prev = false;
  for (size_t k = 0; k < tr.times.size(); ++k) {
    const double t = tr.times[k];
    if (t < t0) continue;
    const double v = sign * (tr.voltages[a][k] - tr.voltages[b][k]);
    if (v >= target) {
      if (!have_prev || prev_v >= target) return t - t0; // crossed at or before first sample
      const double tc = prev_t + (target - prev_v) * (t - prev_t) / (v - prev_v);
      return tc - t0;
    }
    prev_t = t;
    prev_v = v;
    have_prev = true;
  }
  throw MetricsError("no decision within window");
}

// Cycle energy drawn from the supply times the read frequency.
inline double extract_power_integrated(const TransientResult& tr, double vdd, double f = 66.7e6) {
  if (tr.supply_current.empty()) throw MetricsError("no supply current recorded");
  double energy = 0.0;
  for (size_t k = 1; k < tr.times.size(); ++k) {
    const double dt = tr.times[k] - tr.times[k - 1];
    energy += 0.5 * (tr.supply_current[k] + tr.supply_current[k - 1]) * dt;
  }
  return f * vdd * energy;
}

struct PowerModel {
  double activity = 1.0;  // alpha
  double c_total = 0.0;   // F
  double v_swing = 0.0;   // V
  double vdd = 1.0;       // V
  double f = 66.7e6;      // Hz
};

inline double power_dynamic_model(const PowerModel& m) {
  return m.activity * m.c_total * m.v_swing * m.vdd * m.f;
}

// |V_BL - V_REFL| at the latch handoff instant (SAE1 rise).
inline double sense_margin(const TransientResult& tr, const TimingPlan& timing) {
  const int a = tr.find_node("bl");
  const int b = tr.find_node("refl");
  if (a < 0 || b < 0) throw MetricsError("transient result lacks bl/refl nodes");
  const double t = timing.sae1_rise();
  return std::abs(tr.at(a, t) - tr.at(b, t));
}

// Read disturbance rule: the read current must stay below 20% of the
// critical current.
inline bool check_read_disturbance(double i_rd_peak, double i_c) {
  if (!(i_c > 0.0)) throw MetricsError("critical current must be > 0");
  return i_rd_peak < 0.20 * i_c;
}

struct MtjCurrentPeak {
  std::string name;
  double peak = 0.0; // A
  double i_c = 0.0;  // per-element critical current at the device's area
};

// Peak |current| through every junction over the run, with the matching
// per-element critical current (area scaling included via the device area).
inline std::vector<MtjCurrentPeak> mtj_peak_currents(const FlatCircuit& c,
                                                     const TransientResult& tr) {
  std::vector<MtjCurrentPeak> out;
  for (const auto& d : c.devices) {
    if (d.kind != ElementKind::mtj) continue;
    const double r = mtj_resistance(d.mtj, d.state, d.tox);
    double peak = 0.0;
    for (size_t k = 0; k < tr.times.size(); ++k) {
      const double va = tr.voltages[d.nodes[0]][k];
      const double vb = tr.voltages[d.nodes[1]][k];
      peak = std::max(peak, std::abs(va - vb) / r);
    }
    out.push_back({d.name, peak, d.mtj.jc0 * d.mtj.area});
  }
  return out;
}

inline ReadoutMetrics extract_all(const FlatCircuit& c, const TransientResult& tr,
                                  const TimingPlan& timing) {
  ReadoutMetrics m;
  m.decision = extract_decision(tr, timing);
  if (m.decision != Decision::indeterminate) {
    try {
      m.delay = extract_readout_delay(tr, timing);
    } catch (const MetricsError&) {
      m.delay = std::numeric_limits<double>::quiet_NaN();
    }
  }
  m.power_avg = extract_power_integrated(tr, timing.vdd);
  m.sense_margin = sense_margin(tr, timing);
  for (const auto& p : mtj_peak_currents(c, tr)) m.i_rd_peak = std::max(m.i_rd_peak, p.peak);
  return m;
}

} // namespace mramsim
