#pragma once

// Process-variation sampling and Monte Carlo ensembles. Draws come from a
// counter-based generator keyed by (seed, sample index, device ordinal), so
// results are reproducible and independent of evaluation order, and sample
// ranges can be split across runs and concatenated bit-exactly.

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

#include "metrics.hpp"
#include "netlist.hpp"
#include "senseamps.hpp"
#include "solver.hpp"

namespace mramsim {

struct VariationSpec {
  double sigma_tox_rel = 0.02 / 3.0; // per-1-sigma relative tox variation
  double sigma_vth = 0.010;          // per-1-sigma threshold shift [V]
  std::uint64_t seed = 1;
  int samples = 1000;
};

namespace rng {

inline std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t keyed(std::uint64_t seed, std::uint64_t index, std::uint64_t tag,
                           std::uint64_t ordinal, std::uint64_t stream) {
  std::uint64_t h = splitmix(seed ^ splitmix(index + 1));
  h = splitmix(h ^ splitmix((tag << 56) ^ ordinal));
  return splitmix(h ^ stream);
}

inline double u01(std::uint64_t x) {
  return (static_cast<double>(x >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

// standard normal draw, Box-Muller on two keyed uniforms
inline double normal(std::uint64_t seed, std::uint64_t index, std::uint64_t tag,
                     std::uint64_t ordinal) {
  const double u1 = u01(keyed(seed, index, tag, ordinal, 0));
  const double u2 = u01(keyed(seed, index, tag, ordinal, 1));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

} // namespace rng

struct SampleDraw {
  int index = 0;
  std::vector<double> tox_values; // one per junction, device order
  std::vector<double> vth_deltas; // one per mosfet, device order
};

// Ordinals count junctions and mosfets separately in device order, so
// adding unrelated instrumentation never perturbs existing draws.
inline SampleDraw draw_sample(const VariationSpec& spec, int index, const FlatCircuit& circuit) {
  SampleDraw d;
  d.index = index;
  std::uint64_t j_ord = 0, m_ord = 0;
  for (const auto& dev : circuit.devices) {
    if (dev.kind == ElementKind::mtj) {
      const double z = rng::normal(spec.seed, static_cast<std::uint64_t>(index), 1, j_ord++);
      double tox = dev.tox * (1.0 + spec.sigma_tox_rel * z);
      if (tox < 0.05 * dev.tox) tox = 0.05 * dev.tox; // guard the exponential model
      d.tox_values.push_back(spec.sigma_tox_rel > 0.0 ? tox : dev.tox);
    } else if (dev.kind == ElementKind::mosfet) {
      const double z = rng::normal(spec.seed, static_cast<std::uint64_t>(index), 2, m_ord++);
      d.vth_deltas.push_back(spec.sigma_vth * z);
    }
  }
  return d;
}

inline void apply_draw(FlatCircuit& circuit, const SampleDraw& d) {
  size_t j = 0, m = 0;
  for (auto& dev : circuit.devices) {
    if (dev.kind == ElementKind::mtj)
      dev.tox = d.tox_values.at(j++);
    else if (dev.kind == ElementKind::mosfet)
      dev.mos.vth0 += d.vth_deltas.at(m++);
  }
}

// Small-variation slope mapping a 3-sigma relative tox spread to a
// 3-sigma relative resistance spread: beta = (sr/3) / ((st/3) * tox0).
inline double calibrate_beta(double sigma_tox_rel_3s, double sigma_r_rel_3s, double tox0) {
  if (!(sigma_tox_rel_3s > 0.0) || sigma_tox_rel_3s >= 1.0)
    throw std::invalid_argument("sigma_tox_rel_3s must be in (0,1)");
  if (sigma_r_rel_3s < 0.0 || sigma_r_rel_3s >= 1.0)
    throw std::invalid_argument("sigma_r_rel_3s must be in [0,1)");
  return (sigma_r_rel_3s / 3.0) / ((sigma_tox_rel_3s / 3.0) * tox0);
}

// ---------------------------------------------------------------------------
// ensembles

struct SampleMetrics {
  Decision decision = Decision::indeterminate;
  double delay = std::numeric_limits<double>::quiet_NaN();
  double power = 0.0;
  double sense_margin = 0.0;
  bool solver_failed = false;
};

struct EnsembleResult {
  std::vector<SampleMetrics> per_sample; // ordered by sample index
  int error_count = 0;                   // decisions != data_state (indeterminate included)
  int solver_failures = 0;
  std::string design_id;
  MtjState data_state = MtjState::P;
};

struct NominalRun {
  FlatCircuit circuit;
  TransientResult tr;
  ReadoutMetrics metrics;
};

inline int thread_budget() {
  if (const char* env = std::getenv("MRAMSIM_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

inline NominalRun run_nominal(const DesignSpec& design, MtjState data_state,
                              const TimingPlan& timing, const SolverConfig& cfg) {
  NominalRun run;
  const Netlist nl = build_design(design.kind, design.ref, design.params, data_state, timing);
  run.circuit = flatten_hierarchy(nl);
  const auto diags = validate_circuit(run.circuit);
  if (!diags.empty()) throw BuildError("design '" + design.id + "' failed validation: " +
                                       diags.front().message);
  run.tr = transient_analysis(run.circuit, cfg);
  run.metrics = extract_all(run.circuit, run.tr, timing);
  return run;
}

// Runs `spec.samples` samples starting at `first_index`. Samples are
// independent; per_sample is ordered by index regardless of scheduling.
inline EnsembleResult run_ensemble(const DesignSpec& design, MtjState data_state,
                                   const VariationSpec& spec, const TimingPlan& timing,
                                   const SolverConfig& cfg, int first_index = 0) {
  if (spec.samples < 1) throw std::invalid_argument("samples must be >= 1");
  const Netlist nl = build_design(design.kind, design.ref, design.params, data_state, timing);
  const FlatCircuit base = flatten_hierarchy(nl);
  {
    const auto diags = validate_circuit(base);
    if (!diags.empty())
      throw BuildError("design '" + design.id + "' failed validation: " + diags.front().message);
  }

  EnsembleResult res;
  res.design_id = design.id;
  res.data_state = data_state;
  res.per_sample.resize(spec.samples);

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int slot = next.fetch_add(1);
      if (slot >= spec.samples) return;
      const int index = first_index + slot;
      SampleMetrics sm;
      try {
        FlatCircuit c = base;
        apply_draw(c, draw_sample(spec, index, base));
        const TransientResult tr = transient_analysis(c, cfg);
        const ReadoutMetrics m = extract_all(c, tr, timing);
        sm.decision = m.decision;
        sm.delay = m.delay;
        sm.power = m.power_avg;
        sm.sense_margin = m.sense_margin;
      } catch (const SolveError&) {
        sm.solver_failed = true;
        sm.decision = Decision::indeterminate;
      }
      res.per_sample[slot] = sm;
    }
  };

  const int n_threads = std::min(thread_budget(), spec.samples);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  const Decision expect = (data_state == MtjState::P) ? Decision::P : Decision::AP;
  for (const auto& sm : res.per_sample) {
    if (sm.decision != expect) ++res.error_count;
    if (sm.solver_failed) ++res.solver_failures;
  }
  return res;
}

} // namespace mramsim
