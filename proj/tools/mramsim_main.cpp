// Command-line front end: nominal simulations, Monte Carlo ensembles,
// the five-design comparison sweep, and SVG histograms.
//
// Exit codes: 0 ok, 2 usage/input error, 3 numerical failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include <mramsim/mramsim.hpp>

using namespace mramsim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

std::string read_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

MtjState parse_state(const std::string& s) {
  if (s == "P" || s == "p") return MtjState::P;
  if (s == "AP" || s == "ap") return MtjState::AP;
  throw CLI::ValidationError("--state", "must be P or AP");
}

std::string fmt(double v, const char* unit = "") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g%s", v, unit);
  return buf;
}

void dump_waves(const TransientResult& tr, const std::string& path) {
  std::ostringstream os;
  os << "t";
  for (size_t n = 1; n < tr.node_names.size(); ++n) os << "," << tr.node_names[n];
  os << "\n";
  for (size_t k = 0; k < tr.times.size(); ++k) {
    os << detail::fmt_full(tr.times[k]);
    for (size_t n = 1; n < tr.node_names.size(); ++n)
      os << "," << detail::fmt_full(tr.voltages[n][k]);
    os << "\n";
  }
  atomic_write(path, os.str());
}

struct SimArgs {
  std::string design, netlist, state = "P", dump;
  double dt = 1e-12, tstop = 2e-9;
  bool have_dt = false, have_tstop = false;
};

int cmd_simulate(const SimArgs& a) {
  SolverConfig cfg;
  cfg.dt = a.dt;
  cfg.t_stop = a.tstop;
  const TimingPlan timing = default_timing();

  if (!a.design.empty()) {
    const DesignSpec design = design_by_id(a.design);
    const NominalRun run = run_nominal(design, parse_state(a.state), timing, cfg);
    std::cout << "design:   " << design.id << "\n"
              << "state:    " << a.state << "\n"
              << "decision: " << to_string(run.metrics.decision) << "\n"
              << "delay:    " << fmt(run.metrics.delay * 1e12, " ps") << "\n"
              << "power:    " << fmt(run.metrics.power_avg * 1e6, " uW") << "\n"
              << "margin:   " << fmt(run.metrics.sense_margin * 1e3, " mV") << "\n"
              << "i_rd:     " << fmt(run.metrics.i_rd_peak * 1e6, " uA peak") << "\n";
    if (!a.dump.empty()) dump_waves(run.tr, a.dump);
    return kExitOk;
  }

  const Netlist nl = parse_netlist(read_file(a.netlist));
  const FlatCircuit flat = flatten_hierarchy(nl);
  for (const auto& d : validate_circuit(flat))
    std::cerr << "warning: " << d.message << "\n";
  if (!a.have_dt || !a.have_tstop) {
    for (const auto& an : nl.analyses) {
      if (an.type == "tran") {
        if (!a.have_dt) cfg.dt = an.step;
        if (!a.have_tstop) cfg.t_stop = an.stop;
      }
    }
  }
  const TransientResult tr = transient_analysis(flat, cfg);
  if (!a.dump.empty()) dump_waves(tr, a.dump);

  if (tr.find_node("saout") >= 0 && tr.find_node("saoutb") >= 0) {
    const ReadoutMetrics m = extract_all(flat, tr, timing);
    std::cout << "decision: " << to_string(m.decision) << "\n"
              << "power:    " << fmt(m.power_avg * 1e6, " uW") << "\n";
  } else {
    std::cout << "final node voltages at t=" << fmt(cfg.t_stop * 1e9, " ns") << ":\n";
    for (size_t n = 1; n < tr.node_names.size(); ++n)
      std::cout << "  v(" << tr.node_names[n] << ") = " << fmt(tr.voltages[n].back(), " V")
                << "\n";
    if (!tr.supply_current.empty())
      std::cout << "cycle power at 66.7 MHz: " << fmt(extract_power_integrated(tr, 1.0) * 1e6, " uW")
                << "\n";
  }
  return kExitOk;
}

struct McArgs {
  std::string design, state = "P", out = "mc", format = "both";
  int samples = 1000;
  std::uint64_t seed = 1;
  double sigma_tox_rel = 0.02 / 3.0;
  double sigma_vth = 0.010;
  double dt = 1e-12, tstop = 2e-9;
};

int cmd_montecarlo(const McArgs& a) {
  const DesignSpec design = design_by_id(a.design);
  VariationSpec spec;
  spec.samples = a.samples;
  spec.seed = a.seed;
  spec.sigma_tox_rel = a.sigma_tox_rel;
  spec.sigma_vth = a.sigma_vth;
  SolverConfig cfg;
  cfg.dt = a.dt;
  cfg.t_stop = a.tstop;

  const EnsembleResult er =
      run_ensemble(design, parse_state(a.state), spec, default_timing(), cfg);
  const RunReport report = make_report(er, spec);

  if (a.format == "csv" || a.format == "both") atomic_write(a.out + ".csv", samples_csv(er));
  if (a.format == "json" || a.format == "both")
    atomic_write(a.out + ".json", summary_json(report).dump(2) + "\n");

  std::cout << "design " << design.id << " state " << a.state << ": error_count "
            << er.error_count << " / " << a.samples << "\n";
  if (er.solver_failures * 10 > a.samples) {
    std::cerr << "error: " << er.solver_failures << " of " << a.samples
              << " samples failed to converge\n";
    return kExitNumeric;
  }
  return kExitOk;
}

struct SweepArgs {
  std::string out;
  int samples = 100;
  std::uint64_t seed = 1;
  double sigma_tox_rel = 0.02 / 3.0;
  double sigma_vth = 0.010;
};

int cmd_sweep(const SweepArgs& a) {
  VariationSpec spec;
  spec.samples = a.samples;
  spec.seed = a.seed;
  spec.sigma_tox_rel = a.sigma_tox_rel;
  spec.sigma_vth = a.sigma_vth;
  SolverConfig cfg;
  const TimingPlan timing = default_timing();

  struct Row {
    std::string design, state, power, delay, errors;
  };
  std::vector<Row> rows;
  std::ostringstream csv;
  csv << "design,state,power_uw,delay_ps,errors\n";
  for (const auto& id : design_ids()) {
    for (MtjState st : {MtjState::P, MtjState::AP}) {
      Row row;
      row.design = id;
      row.state = to_string(st);
      try {
        const EnsembleResult er = run_ensemble(design_by_id(id), st, spec, timing, cfg);
        const RunReport rep = make_report(er, spec);
        row.power = fmt(rep.power.mean * 1e6);
        row.delay = fmt(rep.delay.mean * 1e12);
        row.errors = std::to_string(er.error_count);
      } catch (const std::exception&) {
        row.power = row.delay = row.errors = "FAIL";
      }
      csv << row.design << "," << row.state << "," << row.power << "," << row.delay << ","
          << row.errors << "\n";
      rows.push_back(std::move(row));
    }
  }

  std::printf("%-10s %-5s %12s %12s %8s\n", "design", "state", "power_uw", "delay_ps", "errors");
  for (const auto& r : rows)
    std::printf("%-10s %-5s %12s %12s %8s\n", r.design.c_str(), r.state.c_str(), r.power.c_str(),
                r.delay.c_str(), r.errors.c_str());
  if (!a.out.empty()) atomic_write(a.out + ".csv", csv.str());
  return kExitOk;
}

struct HistArgs {
  std::string input, quantity = "resistance", state = "P", out = "hist.svg";
  int samples = 10000, bins = 40;
  std::uint64_t seed = 1;
  double sigma_tox_rel = 0.02 / 3.0;
};

int cmd_histogram(const HistArgs& a) {
  std::vector<double> values;
  HistogramOptions opt;
  opt.bins = a.bins;

  if (!a.input.empty()) {
    std::ifstream is(a.input);
    if (!is) {
      std::cerr << "error: cannot open '" << a.input << "'\n";
      return kExitUsage;
    }
    std::string line;
    std::getline(is, line); // header
    std::vector<std::string> cols;
    {
      std::stringstream hs(line);
      std::string c;
      while (std::getline(hs, c, ',')) cols.push_back(c);
    }
    const std::string want = (a.quantity == "margin") ? "margin_v" : "delay_s";
    int col = -1;
    for (size_t i = 0; i < cols.size(); ++i)
      if (cols[i] == want) col = static_cast<int>(i);
    if (col < 0) {
      std::cerr << "error: column '" << want << "' not found in " << a.input << "\n";
      return kExitUsage;
    }
    while (std::getline(is, line)) {
      std::stringstream ls(line);
      std::string cell;
      for (int i = 0; i <= col; ++i) std::getline(ls, cell, ',');
      if (!cell.empty()) values.push_back(std::stod(cell));
    }
    opt.title = a.quantity + " (" + a.input + ")";
    opt.x_label = want;
  } else if (a.quantity == "resistance") {
    const MtjState st = parse_state(a.state);
    MtjParams p;
    for (int i = 0; i < a.samples; ++i) {
      const double z = rng::normal(a.seed, i, 1, 0);
      values.push_back(mtj_resistance(p, st, p.tox0 * (1.0 + a.sigma_tox_rel * z)));
    }
    opt.title = std::string("junction resistance, ") + a.state + " state";
    opt.x_label = "ohm";
  } else {
    std::cerr << "error: --quantity margin|delay requires --input <csv>\n";
    return kExitUsage;
  }

  if (values.empty()) {
    std::cerr << "error: no input values\n";
    return kExitUsage;
  }
  atomic_write(a.out, svg_histogram(values, opt));
  std::cout << "wrote " << a.out << " (" << values.size() << " values)\n";
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"STT-MRAM read-sensing simulator"};
  app.require_subcommand(1);

  SimArgs sim;
  auto* s = app.add_subcommand("simulate", "run one nominal transient");
  auto* sd = s->add_option("--design", sim.design, "built-in design id");
  auto* sn = s->add_option("--netlist", sim.netlist, "netlist file");
  sd->excludes(sn);
  s->add_option("--state", sim.state, "data state P|AP");
  auto* sdt = s->add_option("--dt", sim.dt, "time step [s]");
  auto* sts = s->add_option("--tstop", sim.tstop, "stop time [s]");
  s->add_option("--dump-waves", sim.dump, "write node waveforms CSV");

  McArgs mc;
  auto* m = app.add_subcommand("montecarlo", "run a seeded Monte Carlo ensemble");
  m->add_option("--design", mc.design, "built-in design id")->required();
  m->add_option("--state", mc.state, "data state P|AP");
  m->add_option("--samples", mc.samples, "sample count")->check(CLI::PositiveNumber);
  m->add_option("--seed", mc.seed, "random seed");
  m->add_option("--sigma-tox-rel", mc.sigma_tox_rel, "1-sigma relative tox variation");
  m->add_option("--sigma-vth", mc.sigma_vth, "1-sigma threshold shift [V]");
  m->add_option("--out", mc.out, "output file stem");
  m->add_option("--format", mc.format, "csv|json|both")
      ->check(CLI::IsMember({"csv", "json", "both"}));
  m->add_option("--dt", mc.dt, "time step [s]");
  m->add_option("--tstop", mc.tstop, "stop time [s]");

  SweepArgs sw;
  auto* w = app.add_subcommand("sweep", "compare all designs and states");
  w->add_option("--samples", sw.samples, "samples per design/state")->check(CLI::PositiveNumber);
  w->add_option("--seed", sw.seed, "random seed");
  w->add_option("--sigma-tox-rel", sw.sigma_tox_rel, "1-sigma relative tox variation");
  w->add_option("--sigma-vth", sw.sigma_vth, "1-sigma threshold shift [V]");
  w->add_option("--out", sw.out, "CSV output stem");

  HistArgs hi;
  auto* h = app.add_subcommand("histogram", "render an SVG histogram");
  h->add_option("--input", hi.input, "per-sample CSV from montecarlo");
  h->add_option("--quantity", hi.quantity, "resistance|margin|delay")
      ->check(CLI::IsMember({"resistance", "margin", "delay"}));
  h->add_option("--state", hi.state, "junction state for resistance");
  h->add_option("--samples", hi.samples, "draw count for resistance")->check(CLI::PositiveNumber);
  h->add_option("--seed", hi.seed, "random seed");
  h->add_option("--sigma-tox-rel", hi.sigma_tox_rel, "1-sigma relative tox variation");
  h->add_option("--bins", hi.bins, "bin count")->check(CLI::PositiveNumber);
  h->add_option("--out", hi.out, "SVG output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (s->parsed()) {
      if (sim.design.empty() && sim.netlist.empty()) {
        std::cerr << "error: simulate needs --design or --netlist\n";
        return kExitUsage;
      }
      sim.have_dt = sdt->count() > 0;
      sim.have_tstop = sts->count() > 0;
      return cmd_simulate(sim);
    }
    if (m->parsed()) return cmd_montecarlo(mc);
    if (w->parsed()) return cmd_sweep(sw);
    if (h->parsed()) return cmd_histogram(hi);
  } catch (const SolveError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const BuildError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
