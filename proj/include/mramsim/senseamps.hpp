#pragma once

// Parameterized read-path generators for the three sensing schemes:
// current-mode (CSenseAmp), voltage-mode (VSenseAmp), and voltage-mode
// with clamped-reference capacitive neutralization (NVSenseAmp).
//
// Shared structure per design: a data column (access nmos gated by WL,
// junction to ground, 50 fF bitline), a reference column (single junction
// or three series-stacked junctions at 3x area), line pre-charge pmos pair
// with an equalizer, clamp transistors MC/MR biased at VC/VR through a
// finite bias impedance, isolation switches on the SAE1 phase, and a
// regenerative cross-coupled latch on saout/saoutb enabled by SAE.

#include <array>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "netlist.hpp"

namespace mramsim {

enum class SenseAmpKind { CSenseAmp, VSenseAmp, NVSenseAmp };

inline const char* to_string(SenseAmpKind k) {
  switch (k) {
    case SenseAmpKind::CSenseAmp: return "CSenseAmp";
    case SenseAmpKind::VSenseAmp: return "VSenseAmp";
    default: return "NVSenseAmp";
  }
}

enum class RefMode { single_P, multi_3S };

// Reference cells are always parallel-state; the 3S option stacks three
// junctions in series at three times the area, keeping the network
// resistance equal to a single cell while tripling the per-element
// critical current.
struct ReferenceConfig {
  RefMode mode = RefMode::single_P;
  int series_count = 1;
  double area_scale = 1.0;

  static ReferenceConfig single() { return {RefMode::single_P, 1, 1.0}; }
  static ReferenceConfig multi_3s() { return {RefMode::multi_3S, 3, 3.0}; }
};

struct TimingPlan {
  Waveform wl, sae, sae1;
  double vdd = 1.0;
  double vc = 0.8;
  double vr = 0.7;
  double edge_time = 10e-12;

  // edge instants, taken at the start of the ramp
  double wl_rise() const { return first_rise(wl); }
  double wl_fall() const { return last_fall(wl); }
  double sae_rise() const { return first_rise(sae); }
  double sae_fall() const { return last_fall(sae); }
  double sae1_rise() const { return first_rise(sae1); }

 private:
  static double first_rise(const Waveform& w) {
    for (size_t i = 1; i < w.points.size(); ++i)
      if (w.points[i].second > w.points[i - 1].second) return w.points[i - 1].first;
    return 0.0;
  }
  static double last_fall(const Waveform& w) {
    for (size_t i = w.points.size(); i-- > 1;)
      if (w.points[i].second < w.points[i - 1].second) return w.points[i - 1].first;
    return w.points.back().first;
  }
};

namespace detail {
inline Waveform pulse(double t_rise, double width, double edge, double high) {
  Waveform w;
  if (t_rise > 0.0) {
    w.points = {{t_rise, 0.0}, {t_rise + edge, high}, {t_rise + width, high},
                {t_rise + width + edge, 0.0}};
  } else {
    w.points = {{0.0, 0.0}, {edge, high}, {width, high}, {width + edge, 0.0}};
  }
  return w;
}

inline Waveform complement(const Waveform& w, double high) {
  Waveform c;
  c.points.reserve(w.points.size());
  for (const auto& [t, v] : w.points) c.points.emplace_back(t, high - v);
  return c;
}
} // namespace detail

// WL 0..1 ns, SAE 0.5..1 ns, SAE1 0.75..1 ns, 10 ps edges, 1.0 V rail,
// clamp biases 0.8 V / 0.7 V.
inline TimingPlan default_timing() {
  TimingPlan t;
  t.vdd = 1.0;
  t.vc = 0.8;
  t.vr = 0.7;
  t.edge_time = 10e-12;
  t.wl = detail::pulse(0.0, 1e-9, t.edge_time, t.vdd);
  t.sae = detail::pulse(0.5e-9, 0.5e-9, t.edge_time, t.vdd);
  t.sae1 = detail::pulse(0.75e-9, 0.25e-9, t.edge_time, t.vdd);
  return t;
}

struct SenseAmpParams {
  // line capacitances
  double c_bl = 50e-15;
  double c_refl = 50e-15;
  // clamp transistors MC / MR and the matching neutralization caps
  double clamp_w = 1e-6;
  double clamp_l = 12.6e-6; // MC
  double clamp_r_l = 7e-6;  // MR length trim equalizing the two injections
  double neutral_cap_w = 0.0; // 0 disables CRCNT; must equal clamp size on NVSenseAmp
  double neutral_cap_l = 0.0;
  double bias_source_r = 10e3;
  // array devices
  double access_w = 0.27e-6;
  double access_l = 2e-6;
  double ref_access_scale = 1.54; // reference-level trim (width multiplier)
  double line_pchg_w = 2e-6;
  double line_pchg_l = 0.2e-6;
  double eq_w = 1e-6;
  double eq_l = 0.1e-6;
  // isolation switches (SAE1 phase)
  double iso_w = 0.3e-6;
  double iso_l = 0.1e-6;
  // latch
  double tail_w = 1.2e-6;
  double tail_l = 0.2e-6;
  double input_w = 0.6e-6; // input pair (voltage-mode kinds)
  double input_l = 0.1e-6;
  double cross_p_w = 0.8e-6;
  double cross_p_l = 0.1e-6;
  double cross_n_w = 0.72e-6;
  double cross_n_l = 0.12e-6;
  double latch_pchg_w = 0.25e-6;
  double latch_pchg_l = 0.1e-6;
  double c_out = 1.5e-15; // explicit output load per side
  double c_tail = 8e-15; // tail-node filter
  // comparator finger count (offset averaging)
  int unit_fingers = 6;
  // current-mode mirror front end
  double mirror_w = 3e-6;
  double mirror_l = 0.5e-6;
  double mirror_ref_ratio = 1.007;
  // junction geometry
  double mtj_area = 1.6e-15;
  double mtj_tox = 1e-9;
  // source-line parasitic at each junction top node
  double c_cell = 120e-15;
};

// Per-design tuned defaults. Voltage-mode single-reference runs the
// reference near its read-disturbance budget (below the ideal midpoint);
// the 3S reference has triple the budget, so that variant re-centers.
// The reference level is trimmed per design within its read-disturbance
// budget. A single-reference cell cannot be biased up to the ideal midpoint
// of the two data levels without crossing 20% of its critical current, so
// the voltage-mode single-reference design runs its reference at the
// budget; the 3S reference has triple the budget and centers exactly; the
// neutralized kind runs a reduced read current, which moves the midpoint
// inside the single-reference budget.
inline SenseAmpParams default_params(SenseAmpKind kind, RefMode ref) {
  SenseAmpParams p;
  switch (kind) {
    case SenseAmpKind::CSenseAmp:
      p.access_w = 0.12e-6;
      p.access_l = 2e-6;
      p.ref_access_scale = 1.0;
      p.tail_w = 0.4e-6;
      p.tail_l = 0.2e-6;
      p.c_tail = 0.0;
      p.input_w = 0.0; // mirror injection replaces the input pair
      break;
    case SenseAmpKind::VSenseAmp:
      p.c_out = 2.5e-15;
      if (ref == RefMode::multi_3S) {
        p.access_w = 0.22e-6;
        p.ref_access_scale = 2.10;
      } else {
        p.ref_access_scale = 1.26;
      }
      break;
    case SenseAmpKind::NVSenseAmp:
      p.access_w = 0.154e-6;
      p.ref_access_scale = 2.00;
      p.neutral_cap_w = p.clamp_w;
      p.neutral_cap_l = p.clamp_l;
      p.tail_w = 1.55e-6;
      p.c_tail = 12e-15;
      break;
  }
  return p;
}

// ---------------------------------------------------------------------------
// netlist emission

namespace detail {

class NetlistBuilder {
 public:
  void r(const std::string& name, const std::string& a, const std::string& b, double ohms) {
    ElementLine e;
    e.kind = ElementKind::resistor;
    e.name = name;
    e.nodes = {a, b};
    e.params["value"] = ohms;
    nl_.elements.push_back(std::move(e));
  }
  void c(const std::string& name, const std::string& a, const std::string& b, double farads) {
    ElementLine e;
    e.kind = ElementKind::capacitor;
    e.name = name;
    e.nodes = {a, b};
    e.params["value"] = farads;
    nl_.elements.push_back(std::move(e));
  }
  void m(const std::string& name, const std::string& d, const std::string& g,
         const std::string& s, const std::string& b, const char* model, double w, double l) {
    ElementLine e;
    e.kind = ElementKind::mosfet;
    e.name = name;
    e.nodes = {d, g, s, b};
    e.sparams["model"] = model;
    e.params["w"] = w;
    e.params["l"] = l;
    nl_.elements.push_back(std::move(e));
  }
  void j(const std::string& name, const std::string& a, const std::string& b, MtjState st,
         double area, double tox) {
    ElementLine e;
    e.kind = ElementKind::mtj;
    e.name = name;
    e.nodes = {a, b};
    e.sparams["state"] = (st == MtjState::P) ? "p" : "ap";
    e.params["area"] = area;
    e.params["tox"] = tox;
    nl_.elements.push_back(std::move(e));
  }
  void v_dc(const std::string& name, const std::string& p, const std::string& m, double volts) {
    ElementLine e;
    e.kind = ElementKind::vsource;
    e.name = name;
    e.nodes = {p, m};
    e.params["dc"] = volts;
    nl_.elements.push_back(std::move(e));
  }
  // n parallel unit devices; independent threshold draws average out, the
  // way large multi-finger pairs suppress comparator offset
  void m_fingers(const std::string& name, const std::string& d, const std::string& g,
                 const std::string& s, const std::string& b, const char* model, double w,
                 double l, int n) {
    if (n <= 1) {
      m(name, d, g, s, b, model, w, l);
      return;
    }
    for (int i = 0; i < n; ++i)
      m(name + "f" + std::to_string(i), d, g, s, b, model, w / n, l);
  }
  void v_pwl(const std::string& name, const std::string& p, const std::string& m,
             const Waveform& w) {
    ElementLine e;
    e.kind = ElementKind::vsource;
    e.name = name;
    e.nodes = {p, m};
    e.pwl = w.points;
    nl_.elements.push_back(std::move(e));
  }
  Netlist take() { return std::move(nl_); }

 private:
  Netlist nl_;
};

} // namespace detail

inline Netlist build_design(SenseAmpKind kind, const ReferenceConfig& ref,
                            const SenseAmpParams& p, MtjState data_state,
                            const TimingPlan& timing = default_timing()) {
  if (kind == SenseAmpKind::NVSenseAmp) {
    if (!(p.neutral_cap_w > 0.0) || !(p.neutral_cap_l > 0.0))
      throw BuildError("NVSenseAmp requires neutralization capacitors");
    if (p.neutral_cap_w != p.clamp_w || p.neutral_cap_l != p.clamp_l)
      throw BuildError("neutralization cap sizing must match the clamp transistors");
  } else if (p.neutral_cap_w > 0.0 || p.neutral_cap_l > 0.0) {
    throw BuildError(std::string("neutralization caps are only valid on NVSenseAmp, not ") +
                     to_string(kind));
  }
  if (ref.mode == RefMode::single_P) {
    if (ref.series_count != 1 || ref.area_scale != 1.0)
      throw BuildError("single_P reference must have series_count=1, area_scale=1");
  } else {
    if (ref.series_count != 3 || ref.area_scale != 3.0)
      throw BuildError("multi_3S reference must have series_count=3, area_scale=3");
  }
  if (!(p.c_bl > 0.0) || !(p.c_refl > 0.0)) throw BuildError("line capacitances must be > 0");
  if (timing.sae_rise() <= timing.wl_rise() || timing.sae1_rise() <= timing.sae_rise())
    throw BuildError("timing plan must order WL, SAE, SAE1 rises");

  detail::NetlistBuilder b;
  const Waveform saeb = detail::complement(timing.sae, timing.vdd);
  const Waveform sae1b = detail::complement(timing.sae1, timing.vdd);

  // supplies and clocks
  b.v_dc("vdd", "vdd", "0", timing.vdd);
  b.v_pwl("vwl", "wl", "0", timing.wl);
  b.v_pwl("vsae", "sae", "0", timing.sae);
  b.v_pwl("vsaeb", "saeb", "0", saeb);
  b.v_pwl("vsae1", "sae1", "0", timing.sae1);
  b.v_pwl("vsae1b", "sae1b", "0", sae1b);
  b.v_dc("vvc", "vcs", "0", timing.vc);
  b.v_dc("vvr", "vrs", "0", timing.vr);
  b.r("rvc", "vcs", "vcb", p.bias_source_r);
  b.r("rvr", "vrs", "vrb", p.bias_source_r);

  // data column
  b.m("mad", "bl", "wl", "nd", "0", "nmos", p.access_w, p.access_l);
  b.j("jd", "nd", "0", data_state, p.mtj_area, p.mtj_tox);
  b.c("cbl", "bl", "0", p.c_bl);
  if (p.c_cell > 0.0) b.c("cnd", "nd", "0", p.c_cell);

  // reference column (always parallel state)
  b.m("mar", "refl", "wl", "nr", "0", "nmos", p.access_w * p.ref_access_scale, p.access_l);
  if (ref.mode == RefMode::single_P) {
    b.j("jr", "nr", "0", MtjState::P, p.mtj_area * ref.area_scale, p.mtj_tox);
  } else {
    b.j("jr1", "nr", "q1", MtjState::P, p.mtj_area * ref.area_scale, p.mtj_tox);
    b.j("jr2", "q1", "q2", MtjState::P, p.mtj_area * ref.area_scale, p.mtj_tox);
    b.j("jr3", "q2", "0", MtjState::P, p.mtj_area * ref.area_scale, p.mtj_tox);
  }
  b.c("crefl", "refl", "0", p.c_refl);
  if (p.c_cell > 0.0) b.c("cnr", "nr", "0", p.c_cell);

  // line pre-charge and equalizer (active while SAE is low)
  b.m("mpb", "bl", "sae", "vdd", "vdd", "pmos", p.line_pchg_w, p.line_pchg_l);
  b.m("mpr", "refl", "sae", "vdd", "vdd", "pmos", p.line_pchg_w, p.line_pchg_l);
  b.m("m9", "bl", "saeb", "refl", "0", "nmos", p.eq_w, p.eq_l);

  if (kind == SenseAmpKind::CSenseAmp) {
    // current-mode front end: the clamps hang under pmos mirror diodes and
    // the mirrored branch currents are cross-injected into the latch
    b.m_fingers("mdd", "md", "md", "vdd", "vdd", "pmos", p.mirror_w, p.mirror_l,
                p.unit_fingers); // data diode
    b.m_fingers("mdm", "saoutb", "md", "vdd", "vdd", "pmos", p.mirror_w, p.mirror_l,
                p.unit_fingers);
    b.m_fingers("mrd", "mrn", "mrn", "vdd", "vdd", "pmos", p.mirror_w, p.mirror_l,
                p.unit_fingers); // ref diode
    b.m_fingers("mrm", "saout", "mrn", "vdd", "vdd", "pmos",
                p.mirror_w * p.mirror_ref_ratio, p.mirror_l, p.unit_fingers);
    b.m("mc", "md", "vcb", "ndx", "0", "nmos", p.clamp_w, p.clamp_l);
    b.m("msd", "ndx", "sae1b", "nd", "0", "nmos", p.iso_w, p.iso_l);
    b.m("mr", "mrn", "vrb", "nrx", "0", "nmos", p.clamp_w, p.clamp_r_l);
    b.m("msr", "nrx", "sae1b", "nr", "0", "nmos", p.iso_w, p.iso_l);
  } else {
    // voltage-mode kinds: clamp drains directly on the latch outputs,
    // sources into the junction nodes through the isolation switches
    b.m("mc", "saout", "vcb", "ndx", "0", "nmos", p.clamp_w, p.clamp_l);
    b.m("msd", "ndx", "sae1b", "nd", "0", "nmos", p.iso_w, p.iso_l);
    b.m("mr", "saoutb", "vrb", "nrx", "0", "nmos", p.clamp_w, p.clamp_r_l);
    b.m("msr", "nrx", "sae1b", "nr", "0", "nmos", p.iso_w, p.iso_l);
  }

  // decision circuit: cross-coupled inverter pair on saout/saoutb with a
  // pmos tail enabled on SAE; outputs reset low while SAE is low
  b.m("mtp", "tp", "saeb", "vdd", "vdd", "pmos", p.tail_w, p.tail_l);
  if (p.input_w > 0.0) {
    b.m_fingers("mi1", "saoutb", "nd", "tp", "vdd", "pmos", p.input_w, p.input_l,
                p.unit_fingers);
    b.m_fingers("mi2", "saout", "nr", "tp", "vdd", "pmos", p.input_w, p.input_l,
                p.unit_fingers);
  }
  b.m_fingers("mp1", "saout", "saoutb", "tp", "vdd", "pmos", p.cross_p_w, p.cross_p_l,
              p.unit_fingers);
  b.m_fingers("mp2", "saoutb", "saout", "tp", "vdd", "pmos", p.cross_p_w, p.cross_p_l,
              p.unit_fingers);
  b.m_fingers("mn1", "saout", "saoutb", "0", "0", "nmos", p.cross_n_w, p.cross_n_l,
              p.unit_fingers);
  b.m_fingers("mn2", "saoutb", "saout", "0", "0", "nmos", p.cross_n_w, p.cross_n_l,
              p.unit_fingers);
  b.m("mq1", "saout", "saeb", "0", "0", "nmos", p.latch_pchg_w, p.latch_pchg_l);
  b.m("mq2", "saoutb", "saeb", "0", "0", "nmos", p.latch_pchg_w, p.latch_pchg_l);
  b.c("clo", "saout", "0", p.c_out);
  if (p.c_tail > 0.0) b.c("ctp", "tp", "0", p.c_tail);
  b.c("clob", "saoutb", "0", p.c_out);

  if (kind == SenseAmpKind::NVSenseAmp) {
    // cross-coupled neutralization: each output couples into the opposite
    // clamp's gate with a capacitor matched to the clamp overlap cap
    MosParams cap_dev = default_nmos();
    cap_dev.w = p.neutral_cap_w;
    cap_dev.l = p.neutral_cap_l;
    const double c_neu = mos_caps(cap_dev).cgd;
    b.c("c1", "saout", "vrb", c_neu);
    b.c("c2", "saoutb", "vcb", c_neu);
  }

  return b.take();
}

// ---------------------------------------------------------------------------
// design catalog

struct DesignSpec {
  std::string id;
  SenseAmpKind kind;
  ReferenceConfig ref;
  SenseAmpParams params;
};

inline const std::vector<std::string>& design_ids() {
  static const std::vector<std::string> ids = {"csa-1ref", "vsa-1ref", "vsa-3s", "nvsa-1ref",
                                               "nvsa-3s"};
  return ids;
}

inline DesignSpec design_by_id(const std::string& id) {
  SenseAmpKind kind;
  ReferenceConfig ref;
  if (id == "csa-1ref") {
    kind = SenseAmpKind::CSenseAmp;
    ref = ReferenceConfig::single();
  } else if (id == "vsa-1ref") {
    kind = SenseAmpKind::VSenseAmp;
    ref = ReferenceConfig::single();
  } else if (id == "vsa-3s") {
    kind = SenseAmpKind::VSenseAmp;
    ref = ReferenceConfig::multi_3s();
  } else if (id == "nvsa-1ref") {
    kind = SenseAmpKind::NVSenseAmp;
    ref = ReferenceConfig::single();
  } else if (id == "nvsa-3s") {
    kind = SenseAmpKind::NVSenseAmp;
    ref = ReferenceConfig::multi_3s();
  } else {
    std::string msg = "unknown design id '" + id + "'; valid ids:";
    for (const auto& d : design_ids()) msg += " " + d;
    throw BuildError(msg);
  }
  return DesignSpec{id, kind, ref, default_params(kind, ref.mode)};
}

// ---------------------------------------------------------------------------
// clamped-reference coupling balance
//
// Both sides of the two balance relations for the neutralized clamp gates:
//   (V_SAOUT  - VC) / (V_SAOUT  - V_SAOUTB) = C_GDC / (C1 + C_GDR)
//   (V_SAOUTB - VR) / (V_SAOUTB - V_SAOUT)  = C_GDR / (C2 + C_GDC)
// The design is balanced when |lhs - rhs| is small for both.

struct NeutralizationBalance {
  double lhs1, rhs1, lhs2, rhs2;
};

inline NeutralizationBalance neutralization_balance(double v_saout, double v_saoutb, double vc,
                                                    double vr, double c_gdc, double c_gdr,
                                                    double c1, double c2) {
  if (v_saout == v_saoutb)
    throw std::invalid_argument("balance undefined when the outputs are equal");
  NeutralizationBalance nb;
  nb.lhs1 = (v_saout - vc) / (v_saout - v_saoutb);
  nb.rhs1 = c_gdc / (c1 + c_gdr);
  nb.lhs2 = (v_saoutb - vr) / (v_saoutb - v_saout);
  nb.rhs2 = c_gdr / (c2 + c_gdc);
  return nb;
}

} // namespace mramsim
