#pragma once

// Device constitutive relations: square-law MOSFETs with continuous
// derivatives, tunnel-junction resistors with exponential oxide-thickness
// dependence, constant overlap capacitances, and piecewise-linear sources.

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mramsim {

enum class MosPolarity { nmos, pmos };

struct MosParams {
  MosPolarity polarity = MosPolarity::nmos;
  double vth0 = 0.40;          // threshold voltage [V], negative for pmos
  double kprime = 200e-6;      // transconductance parameter [A/V^2]
  double lambda = 0.1;         // channel-length modulation [1/V]
  double w = 1e-6;             // gate width [m]
  double l = 1e-6;             // gate length [m]
  double cox_overlap = 0.5e-9; // overlap capacitance [F per meter of width]
};

inline MosParams default_nmos() {
  MosParams p;
  p.polarity = MosPolarity::nmos;
  p.vth0 = 0.40;
  p.kprime = 200e-6;
  return p;
}

inline MosParams default_pmos() {
  MosParams p;
  p.polarity = MosPolarity::pmos;
  p.vth0 = -0.42;
  p.kprime = 80e-6;
  return p;
}

inline void validate(const MosParams& p) {
  if (!(p.w > 0.0) || !(p.l > 0.0)) throw std::invalid_argument("mosfet W and L must be > 0");
  if (!(p.kprime > 0.0)) throw std::invalid_argument("mosfet kprime must be > 0");
  if (p.lambda < 0.0) throw std::invalid_argument("mosfet lambda must be >= 0");
  if (p.cox_overlap < 0.0) throw std::invalid_argument("mosfet cox_overlap must be >= 0");
}

enum class MtjState { P, AP };

inline const char* to_string(MtjState s) { return s == MtjState::P ? "P" : "AP"; }

struct MtjParams {
  double area = 1.6e-15;    // junction area [m^2] (40 nm x 40 nm)
  double tox0 = 1e-9;       // nominal barrier thickness [m]
  double ra_p = 1.1872e-12; // resistance-area product, parallel state [ohm m^2]
  double tmr = 1228.0 / 742.0; // (R_AP - R_P) / R_P
  double beta = 6.5e9;      // d(ln R)/d(tox) [1/m]
  double jc0 = 3e10;        // critical switching current density [A/m^2] (3 MA/cm^2)
};

inline void validate(const MtjParams& p) {
  if (!(p.area > 0.0)) throw std::invalid_argument("mtj area must be > 0");
  if (!(p.tox0 > 0.0)) throw std::invalid_argument("mtj tox0 must be > 0");
  if (!(p.ra_p > 0.0)) throw std::invalid_argument("mtj ra_p must be > 0");
  if (!(p.tmr > 0.0)) throw std::invalid_argument("mtj tmr must be > 0");
  if (!(p.beta > 0.0)) throw std::invalid_argument("mtj beta must be > 0");
  if (!(p.jc0 > 0.0)) throw std::invalid_argument("mtj jc0 must be > 0");
}

// Junction resistance. The two states share the same exponential barrier
// sensitivity, so R_AP / R_P stays fixed at 1 + tmr for any tox.
inline double mtj_resistance(const MtjParams& p, MtjState s, double tox) {
  if (!(tox > 0.0)) throw std::invalid_argument("mtj tox must be > 0");
  const double ra = (s == MtjState::P) ? p.ra_p : p.ra_p * (1.0 + p.tmr);
  return ra * std::exp(p.beta * (tox - p.tox0)) / p.area;
}

// Critical current of one element of a (possibly stacked) reference.
// Stacking elements in series leaves the per-element current density
// unchanged; only the area scale raises the critical current.
inline double mtj_critical_current(const MtjParams& p, int series_count, double area_scale) {
  if (series_count < 1) throw std::invalid_argument("series_count must be >= 1");
  if (!(area_scale > 0.0)) throw std::invalid_argument("area_scale must be > 0");
  return p.jc0 * p.area * area_scale;
}

struct MosEval {
  double ids = 0.0; // drain-to-source current [A]
  double gm = 0.0;  // d ids / d vgs
  double gds = 0.0; // d ids / d vds
};

namespace detail {

// n-type square law for vds >= 0. Current, gm, gds are C1-continuous
// across the cutoff/triode/saturation boundaries.
inline MosEval mos_core_n(double vgs, double vds, double vth, double beta_wl, double lambda) {
  MosEval e;
  const double vov = vgs - vth;
  if (vov <= 0.0) return e;
  if (vds < vov) {
    const double q = vov * vds - 0.5 * vds * vds;
    const double clm = 1.0 + lambda * vds;
    e.ids = beta_wl * q * clm;
    e.gm = beta_wl * vds * clm;
    e.gds = beta_wl * (vov - vds) * clm + beta_wl * q * lambda;
  } else {
    const double q = 0.5 * vov * vov;
    const double clm = 1.0 + lambda * vds;
    e.ids = beta_wl * q * clm;
    e.gm = beta_wl * vov * clm;
    e.gds = beta_wl * q * lambda;
  }
  return e;
}

// Handles vds < 0 through source/drain swap symmetry:
// ids(vgs, vds) = -core(vgs - vds, -vds).
inline MosEval mos_eval_n(double vgs, double vds, double vth, double beta_wl, double lambda) {
  if (vds >= 0.0) return mos_core_n(vgs, vds, vth, beta_wl, lambda);
  const MosEval r = mos_core_n(vgs - vds, -vds, vth, beta_wl, lambda);
  MosEval e;
  e.ids = -r.ids;
  e.gm = -r.gm;
  e.gds = r.gm + r.gds;
  return e;
}

} // namespace detail

// Drain current and exact small-signal derivatives. For pmos the n-type
// expression is mirrored: ids_p(vgs, vds) = -ids_n(-vgs, -vds) with
// vth_n = -vth0.
inline MosEval mos_eval(const MosParams& p, double vgs, double vds) {
  const double beta_wl = p.kprime * p.w / p.l;
  if (p.polarity == MosPolarity::nmos)
    return detail::mos_eval_n(vgs, vds, p.vth0, beta_wl, p.lambda);
  const MosEval r = detail::mos_eval_n(-vgs, -vds, -p.vth0, beta_wl, p.lambda);
  MosEval e;
  e.ids = -r.ids;
  e.gm = r.gm;
  e.gds = r.gds;
  return e;
}

struct MosCaps {
  double cgd = 0.0; // gate-drain overlap [F]
  double cgs = 0.0; // gate-source overlap [F]
};

// Constant overlap model; also used to size the neutralization capacitors
// that must track the clamp transistors' gate-drain capacitance.
inline MosCaps mos_caps(const MosParams& p) {
  if (!(p.w > 0.0)) throw std::invalid_argument("mosfet W must be > 0");
  const double c = p.cox_overlap * p.w;
  return MosCaps{c, c};
}

struct Waveform {
  // (time, value) points with strictly increasing times; value held
  // constant before the first and after the last point.
  std::vector<std::pair<double, double>> points;

  Waveform() = default;
  explicit Waveform(double dc) : points{{0.0, dc}} {}
  Waveform(std::initializer_list<std::pair<double, double>> pts) : points(pts) {}

  double value(double t) const;
  bool operator==(const Waveform&) const = default;
};

inline void validate(const Waveform& w) {
  if (w.points.empty()) throw std::invalid_argument("waveform needs at least one point");
  for (size_t i = 0; i < w.points.size(); ++i) {
    if (!std::isfinite(w.points[i].first) || !std::isfinite(w.points[i].second))
      throw std::invalid_argument("waveform points must be finite");
    if (i > 0 && !(w.points[i].first > w.points[i - 1].first))
      throw std::invalid_argument("waveform times must be strictly increasing");
  }
}

inline double pwl_value(const Waveform& w, double t) {
  const auto& pts = w.points;
  if (pts.empty()) throw std::invalid_argument("empty waveform");
  if (t <= pts.front().first) return pts.front().second;
  if (t >= pts.back().first) return pts.back().second;
  for (size_t i = 1; i < pts.size(); ++i) {
    if (t <= pts[i].first) {
      const double t0 = pts[i - 1].first, v0 = pts[i - 1].second;
      const double t1 = pts[i].first, v1 = pts[i].second;
      return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
    }
  }
  return pts.back().second;
}

inline double Waveform::value(double t) const { return pwl_value(*this, t); }

} // namespace mramsim
