#pragma once

// Modified nodal analysis on a FlatCircuit: Newton-Raphson DC operating
// point with gmin stepping, and fixed-step backward-Euler transients.
// Unknowns are the non-ground node voltages followed by one branch current
// per voltage source.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "netlist.hpp"

namespace mramsim {

struct SolveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverConfig {
  double abstol_v = 1e-6;   // volts
  double abstol_i = 1e-12;  // amperes
  double reltol = 1e-4;
  int max_newton_iters = 100;
  double gmin = 1e-12;      // siemens, node to ground
  double dt = 1e-12;        // seconds
  double t_stop = 2e-9;     // seconds
};

struct OperatingPoint {
  Eigen::VectorXd node_voltages;              // indexed by node, [0] == 0
  std::map<std::string, double> source_currents; // current out of the + terminal
};

struct TransientResult {
  std::vector<double> times;
  std::vector<std::string> node_names;
  std::vector<std::vector<double>> voltages; // [node][step]
  std::vector<double> supply_current;        // source named "vdd" (empty if absent)
  std::map<std::string, std::vector<double>> source_currents;

  int find_node(const std::string& name) const {
    for (size_t i = 0; i < node_names.size(); ++i)
      if (node_names[i] == name) return static_cast<int>(i);
    return -1;
  }
  // linear interpolation of a node voltage at time t
  double at(int node, double t) const {
    const auto& ts = times;
    if (t <= ts.front()) return voltages[node].front();
    if (t >= ts.back()) return voltages[node].back();
    const auto it = std::lower_bound(ts.begin(), ts.end(), t);
    const size_t k = static_cast<size_t>(it - ts.begin());
    const double t1 = ts[k], t0 = ts[k - 1];
    const double v1 = voltages[node][k], v0 = voltages[node][k - 1];
    return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
  }
};

namespace detail {

class Assembler {
 public:
  Assembler(const FlatCircuit& c, const SolverConfig& cfg) : c_(c), cfg_(cfg) {
    n_nodes_ = c.node_count;
    for (const auto& d : c.devices)
      if (d.kind == ElementKind::vsource) vsrc_.push_back(&d);
    n_ = (n_nodes_ - 1) + static_cast<int>(vsrc_.size());
    A_.resize(n_, n_);
    z_.resize(n_);
  }

  int unknowns() const { return n_; }
  int branch_count() const { return static_cast<int>(vsrc_.size()); }
  const std::vector<const Device*>& sources() const { return vsrc_; }

  // Builds the linearized system A x = z about `guess`. `prev` enables the
  // backward-Euler companion models; without it capacitors are open.
  void stamp(const Eigen::VectorXd& guess, double t, double dt, const Eigen::VectorXd* prev,
             double gmin) {
    A_.setZero();
    z_.setZero();
    int branch = 0;
    for (const auto& d : c_.devices) {
      switch (d.kind) {
        case ElementKind::resistor:
          stamp_conductance(d.nodes[0], d.nodes[1], 1.0 / d.value);
          break;
        case ElementKind::mtj:
          stamp_conductance(d.nodes[0], d.nodes[1], 1.0 / mtj_resistance(d.mtj, d.state, d.tox));
          break;
        case ElementKind::capacitor:
          if (prev) stamp_cap(d.nodes[0], d.nodes[1], d.value, *prev, dt);
          break;
        case ElementKind::mosfet: {
          stamp_mosfet(d, guess);
          if (prev) {
            const MosCaps caps = mos_caps(d.mos);
            stamp_cap(d.nodes[1], d.nodes[0], caps.cgd, *prev, dt); // gate-drain
            stamp_cap(d.nodes[1], d.nodes[2], caps.cgs, *prev, dt); // gate-source
          }
          break;
        }
        case ElementKind::vsource: {
          const int row = (n_nodes_ - 1) + branch;
          const int p = d.nodes[0], m = d.nodes[1];
          if (p != 0) {
            A_(p - 1, row) += 1.0;
            A_(row, p - 1) += 1.0;
          }
          if (m != 0) {
            A_(m - 1, row) -= 1.0;
            A_(row, m - 1) -= 1.0;
          }
          z_(row) = pwl_value(d.wave, t);
          ++branch;
          break;
        }
        default:
          break;
      }
    }
    for (int i = 0; i < n_nodes_ - 1; ++i) A_(i, i) += gmin;
  }

  const Eigen::MatrixXd& matrix() const { return A_; }
  const Eigen::VectorXd& rhs() const { return z_; }

  // One Newton solve sequence starting from x (unknown vector). Returns true
  // on convergence; x holds the solution.
  bool newton(Eigen::VectorXd& x, double t, double dt, const Eigen::VectorXd* prev, double gmin) {
    Eigen::VectorXd xnew(n_);
    for (int it = 0; it < cfg_.max_newton_iters; ++it) {
      stamp(x, t, dt, prev, gmin);
      lu_.compute(A_);
      xnew = lu_.solve(z_);
      if (!xnew.allFinite()) return false;
      bool converged = true;
      for (int i = 0; i < n_; ++i) {
        double dx = xnew(i) - x(i);
        const bool is_node = i < n_nodes_ - 1;
        const double limit = is_node ? 0.5 : 1e-2; // damping per iteration
        if (dx > limit) dx = limit;
        if (dx < -limit) dx = -limit;
        const double tol = is_node ? cfg_.abstol_v + cfg_.reltol * std::abs(x(i))
                                   : cfg_.abstol_i + cfg_.reltol * std::abs(x(i));
        if (std::abs(xnew(i) - x(i)) > tol) converged = false;
        x(i) += dx;
      }
      if (converged) return true;
    }
    return false;
  }

  Eigen::VectorXd full_voltages(const Eigen::VectorXd& x) const {
    Eigen::VectorXd v(n_nodes_);
    v(0) = 0.0;
    for (int i = 1; i < n_nodes_; ++i) v(i) = x(i - 1);
    return v;
  }

  // Current delivered out of the + terminal of each source.
  std::map<std::string, double> currents(const Eigen::VectorXd& x) const {
    std::map<std::string, double> out;
    for (size_t b = 0; b < vsrc_.size(); ++b)
      out[vsrc_[b]->name] = -x(n_nodes_ - 1 + static_cast<int>(b));
    return out;
  }

  std::string worst_node(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
    int worst = 0;
    double w = -1.0;
    for (int i = 0; i < n_nodes_ - 1; ++i) {
      const double d = std::abs(a(i) - b(i));
      if (d > w) {
        w = d;
        worst = i + 1;
      }
    }
    return c_.node_names[worst];
  }

 private:
  void stamp_conductance(int a, int b, double g) {
    if (a != 0) A_(a - 1, a - 1) += g;
    if (b != 0) A_(b - 1, b - 1) += g;
    if (a != 0 && b != 0) {
      A_(a - 1, b - 1) -= g;
      A_(b - 1, a - 1) -= g;
    }
  }

  void stamp_cap(int a, int b, double cap, const Eigen::VectorXd& prev, double dt) {
    if (cap <= 0.0) return;
    const double g = cap / dt;
    stamp_conductance(a, b, g);
    const double ieq = g * (prev(a) - prev(b)); // history current
    if (a != 0) z_(a - 1) += ieq;
    if (b != 0) z_(b - 1) -= ieq;
  }

  void stamp_mosfet(const Device& d, const Eigen::VectorXd& guess) {
    const int nd = d.nodes[0], ng = d.nodes[1], ns = d.nodes[2];
    const double vd = node_v(guess, nd), vg = node_v(guess, ng), vs = node_v(guess, ns);
    const MosEval e = mos_eval(d.mos, vg - vs, vd - vs);
    // Linearized: i = ids0 + gds*(vd - vd0) + gm*(vg - vg0) - (gm+gds)*(vs - vs0)
    const double ieq = e.ids - e.gds * vd - e.gm * vg + (e.gm + e.gds) * vs;
    if (nd != 0) {
      A_(nd - 1, nd - 1) += e.gds;
      if (ng != 0) A_(nd - 1, ng - 1) += e.gm;
      if (ns != 0) A_(nd - 1, ns - 1) -= e.gm + e.gds;
      z_(nd - 1) -= ieq;
    }
    if (ns != 0) {
      A_(ns - 1, ns - 1) += e.gm + e.gds;
      if (ng != 0) A_(ns - 1, ng - 1) -= e.gm;
      if (nd != 0) A_(ns - 1, nd - 1) -= e.gds;
      z_(ns - 1) += ieq;
    }
  }

  double node_v(const Eigen::VectorXd& x, int node) const {
    return node == 0 ? 0.0 : x(node - 1);
  }

  const FlatCircuit& c_;
  const SolverConfig& cfg_;
  int n_nodes_ = 0;
  int n_ = 0;
  std::vector<const Device*> vsrc_;
  Eigen::MatrixXd A_;
  Eigen::VectorXd z_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

} // namespace detail

// Linearized MNA system about `guess` (documented stamp contract; the
// solvers below use the same assembly internally).
inline std::pair<Eigen::MatrixXd, Eigen::VectorXd> stamp_system(const FlatCircuit& circuit,
                                                                const OperatingPoint& guess,
                                                                double t, double dt,
                                                                const OperatingPoint* prev) {
  SolverConfig cfg;
  detail::Assembler asmb(circuit, cfg);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(asmb.unknowns());
  for (int i = 1; i < circuit.node_count; ++i) x(i - 1) = guess.node_voltages(i);
  if (prev) {
    Eigen::VectorXd pv = prev->node_voltages;
    asmb.stamp(x, t, dt, &pv, cfg.gmin);
  } else {
    asmb.stamp(x, t, dt, nullptr, cfg.gmin);
  }
  return {asmb.matrix(), asmb.rhs()};
}

inline OperatingPoint dc_operating_point(const FlatCircuit& circuit, const SolverConfig& cfg) {
  detail::Assembler asmb(circuit, cfg);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(asmb.unknowns());
  if (asmb.newton(x, 0.0, 0.0, nullptr, cfg.gmin)) {
    OperatingPoint op;
    op.node_voltages = asmb.full_voltages(x);
    op.source_currents = asmb.currents(x);
    return op;
  }
  // gmin stepping: start heavily damped toward ground and decade down.
  Eigen::VectorXd xg = Eigen::VectorXd::Zero(asmb.unknowns());
  double g = cfg.gmin * 1e6;
  while (g > cfg.gmin * 1.0000001) {
    if (!asmb.newton(xg, 0.0, 0.0, nullptr, g)) {
      Eigen::VectorXd zero = Eigen::VectorXd::Zero(asmb.unknowns());
      throw SolveError("dc operating point did not converge (gmin stepping at g=" +
                       std::to_string(g) + ", worst node '" + asmb.worst_node(xg, zero) + "')");
    }
    g *= 0.1;
  }
  if (!asmb.newton(xg, 0.0, 0.0, nullptr, cfg.gmin)) {
    Eigen::VectorXd zero = Eigen::VectorXd::Zero(asmb.unknowns());
    throw SolveError("dc operating point did not converge, worst node '" +
                     asmb.worst_node(xg, zero) + "'");
  }
  OperatingPoint op;
  op.node_voltages = asmb.full_voltages(xg);
  op.source_currents = asmb.currents(xg);
  return op;
}

// Fixed-step backward-Euler transient. `initial` overrides the DC solution
// at t = 0 for the named nodes only (no ramping).
inline TransientResult transient_analysis(const FlatCircuit& circuit, const SolverConfig& cfg,
                                          const std::map<std::string, double>& initial = {}) {
  if (!(cfg.dt > 0.0) || !(cfg.dt < cfg.t_stop))
    throw SolveError("transient requires 0 < dt < t_stop");

  detail::Assembler asmb(circuit, cfg);

  OperatingPoint op = dc_operating_point(circuit, cfg);
  Eigen::VectorXd v_prev = op.node_voltages;
  // capacitor ic= values first, then explicit overrides on top
  for (const auto& d : circuit.devices)
    if (d.kind == ElementKind::capacitor && d.has_ic && d.nodes[0] > 0) v_prev(d.nodes[0]) = d.ic;
  for (const auto& [name, volts] : initial) {
    const int n = circuit.find_node(detail::normalize_node(name));
    if (n < 0) throw SolveError("initial condition on unknown node '" + name + "'");
    if (n > 0) v_prev(n) = volts;
  }

  const int steps = std::max(1, static_cast<int>(std::llround(cfg.t_stop / cfg.dt)));

  TransientResult tr;
  tr.node_names = circuit.node_names;
  tr.times.reserve(steps + 1);
  tr.voltages.assign(circuit.node_count, {});
  for (auto& series : tr.voltages) series.reserve(steps + 1);
  for (const auto* s : asmb.sources()) tr.source_currents[s->name].reserve(steps + 1);

  // Branch currents at t=0 come from the DC solve; node voltages may have
  // been overridden.
  Eigen::VectorXd x(asmb.unknowns());
  for (int i = 1; i < circuit.node_count; ++i) x(i - 1) = v_prev(i);
  {
    int b = 0;
    for (const auto* s : asmb.sources()) x((circuit.node_count - 1) + b++) = -op.source_currents[s->name];
  }

  auto record = [&](double t, const Eigen::VectorXd& xs) {
    tr.times.push_back(t);
    for (int nidx = 0; nidx < circuit.node_count; ++nidx)
      tr.voltages[nidx].push_back(nidx == 0 ? 0.0 : xs(nidx - 1));
    int b = 0;
    for (const auto* s : asmb.sources())
      tr.source_currents[s->name].push_back(-xs((circuit.node_count - 1) + b++));
  };
  record(0.0, x);

  // Advances from (t0, state in x/v_prev) to t1; splits the step on Newton
  // failure, up to 8 halvings.
  std::function<void(double, double, int)> advance = [&](double t0, double t1, int depth) {
    Eigen::VectorXd v_start = v_prev;
    Eigen::VectorXd x_try = x;
    const double h = t1 - t0;
    if (asmb.newton(x_try, t1, h, &v_prev, cfg.gmin)) {
      x = x_try;
      v_prev = asmb.full_voltages(x);
      return;
    }
    if (depth >= 8)
      throw SolveError("transient step failed to converge at t=" + std::to_string(t1));
    const double tm = 0.5 * (t0 + t1);
    advance(t0, tm, depth + 1);
    advance(tm, t1, depth + 1);
    (void)v_start;
  };

  for (int k = 1; k <= steps; ++k) {
    const double t = (k == steps) ? cfg.t_stop : k * cfg.dt;
    const double t_prev = (k - 1) * cfg.dt;
    advance(t_prev, t, 0);
    record(t, x);
  }

  // Supply current series, if a source named "vdd" exists.
  auto it = tr.source_currents.find("vdd");
  if (it != tr.source_currents.end()) tr.supply_current = it->second;
  return tr;
}

} // namespace mramsim
