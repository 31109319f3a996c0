#include <catch_amalgamated.hpp>

#include <cstring>
#include <mramsim/netlist.hpp>
#include <mramsim/solver.hpp>

using namespace mramsim;

namespace {
OperatingPoint zero_guess(const FlatCircuit& c) {
  OperatingPoint op;
  op.node_voltages = Eigen::VectorXd::Zero(c.node_count);
  return op;
}
} // namespace

TEST_CASE("stamp: single resistor to ground") {
  const auto c = flatten_hierarchy(parse_netlist("R1 a 0 1k\n"));
  auto [A, z] = stamp_system(c, zero_guess(c), 0.0, 0.0, nullptr);
  REQUIRE(A.rows() == 1);
  CHECK(A(0, 0) == Catch::Approx(1e-3 + 1e-12).epsilon(1e-12));
  CHECK(z(0) == 0.0);
}

TEST_CASE("stamp: capacitor open in DC, companion model in transient") {
  const auto c = flatten_hierarchy(parse_netlist("C1 a 0 10f\n"));
  auto [A_dc, z_dc] = stamp_system(c, zero_guess(c), 0.0, 0.0, nullptr);
  CHECK(A_dc(0, 0) == Catch::Approx(1e-12).epsilon(1e-9)); // gmin only

  OperatingPoint prev = zero_guess(c);
  prev.node_voltages(1) = 0.7;
  const double dt = 1e-12;
  auto [A_tr, z_tr] = stamp_system(c, zero_guess(c), dt, dt, &prev);
  CHECK(A_tr(0, 0) == Catch::Approx(10e-15 / dt + 1e-12).epsilon(1e-9));
  CHECK(z_tr(0) == Catch::Approx(10e-15 / dt * 0.7).epsilon(1e-12));
}

TEST_CASE("stamp: vsource adds a branch equation") {
  const auto c = flatten_hierarchy(parse_netlist("V1 a 0 DC 1\nR1 a 0 1k\n"));
  auto [A, z] = stamp_system(c, zero_guess(c), 0.0, 0.0, nullptr);
  REQUIRE(A.rows() == 2);
  CHECK(A(1, 0) == 1.0);
  CHECK(A(0, 1) == 1.0);
  CHECK(z(1) == 1.0);
}

TEST_CASE("dc: resistive divider midpoint") {
  const auto c = flatten_hierarchy(parse_netlist("V1 in 0 DC 1\nR1 in mid 1k\nR2 mid 0 1k\n"));
  SolverConfig cfg;
  const auto op = dc_operating_point(c, cfg);
  CHECK(op.node_voltages(c.find_node("mid")) == Catch::Approx(0.5).margin(1e-6));
  // source delivers 0.5 mA out of the + terminal
  CHECK(op.source_currents.at("v1") == Catch::Approx(0.5e-3).margin(1e-9));
}

TEST_CASE("dc: diode-connected nmos against a scalar root-find oracle") {
  const auto c = flatten_hierarchy(
      parse_netlist("V1 in 0 DC 1\nR1 in d 1k\nM1 d d 0 0 nmos W=2u L=1u\n"));
  SolverConfig cfg;
  const auto op = dc_operating_point(c, cfg);
  const double v_sim = op.node_voltages(c.find_node("d"));

  // independent bisection on KCL with the same device law
  MosParams p = default_nmos();
  p.w = 2e-6;
  p.l = 1e-6;
  auto f = [&](double v) { return (1.0 - v) / 1000.0 - mos_eval(p, v, v).ids; };
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0 ? lo : hi) = mid;
  }
  const double v_oracle = 0.5 * (lo + hi);
  CHECK(v_sim == Catch::Approx(v_oracle).margin(5e-6));
  CHECK((v_sim > 0.8 && v_sim < 0.99));
}

TEST_CASE("dc: capacitor-only node settles at the gmin-defined value") {
  const auto c = flatten_hierarchy(parse_netlist("V1 a 0 DC 1\nR1 a 0 1k\nC1 a x 1f\n"));
  const auto diags = validate_circuit(c);
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].message.find("weakly connected") != std::string::npos);
  SolverConfig cfg;
  const auto op = dc_operating_point(c, cfg);
  CHECK(std::abs(op.node_voltages(c.find_node("x"))) < 1e-6);
}

TEST_CASE("transient: RC discharge matches the analytic exponential") {
  const auto c = flatten_hierarchy(parse_netlist("C1 a 0 50f ic=1\nR1 a 0 1k\n"));
  SolverConfig cfg;
  cfg.dt = 1e-12;
  cfg.t_stop = 0.3e-9;
  const auto tr = transient_analysis(c, cfg);
  const int a = tr.find_node("a");
  const double tau = 50e-12;

  double max_err = 0.0;
  for (size_t k = 0; k < tr.times.size(); ++k)
    max_err = std::max(max_err, std::abs(tr.voltages[a][k] - std::exp(-tr.times[k] / tau)));
  CHECK(max_err < 0.005);

  // spot value at t = tau
  CHECK(tr.at(a, 50e-12) == Catch::Approx(std::exp(-1.0)).margin(0.005));

  // first-order convergence: halving dt halves the max error
  SolverConfig cfg2 = cfg;
  cfg2.dt = 0.5e-12;
  const auto tr2 = transient_analysis(c, cfg2);
  double max_err2 = 0.0;
  for (size_t k = 0; k < tr2.times.size(); ++k)
    max_err2 = std::max(max_err2, std::abs(tr2.voltages[a][k] - std::exp(-tr2.times[k] / tau)));
  const double ratio = max_err / max_err2;
  CHECK(ratio > 1.8);
  CHECK(ratio < 2.2);
}

TEST_CASE("transient: constant sources stay at the DC solution") {
  const auto c = flatten_hierarchy(parse_netlist("V1 in 0 DC 1\nR1 in mid 1k\nR2 mid 0 1k\nC1 mid 0 10f\n"));
  SolverConfig cfg;
  cfg.dt = 1e-12;
  cfg.t_stop = 0.2e-9;
  const auto tr = transient_analysis(c, cfg);
  const int mid = tr.find_node("mid");
  for (double v : tr.voltages[mid]) CHECK(v == Catch::Approx(0.5).margin(2e-6));
}

TEST_CASE("transient: initial conditions override the DC solution at t=0") {
  const auto c = flatten_hierarchy(parse_netlist("V1 in 0 DC 1\nR1 in mid 1k\nR2 mid 0 1k\nC1 mid 0 10f\n"));
  SolverConfig cfg;
  cfg.dt = 1e-12;
  cfg.t_stop = 0.2e-9;
  const auto tr = transient_analysis(c, cfg, {{"mid", 0.9}});
  const int mid = tr.find_node("mid");
  CHECK(tr.voltages[mid].front() == Catch::Approx(0.9));
  CHECK(tr.voltages[mid].back() == Catch::Approx(0.5).margin(1e-4)); // relaxes back
}

TEST_CASE("transient: cross-coupled inverter pair regenerates, RK4 oracle") {
  // two inverters back to back with explicit output caps, seeded 1 mV
  // apart; device lengths keep the regeneration time constant well above
  // the integration step
  const std::string src =
      "V1 vdd 0 DC 1\n"
      "M1 o1 o2 0 0 nmos W=1u L=0.5u\n"
      "M2 o1 o2 vdd vdd pmos W=2u L=0.5u\n"
      "M3 o2 o1 0 0 nmos W=1u L=0.5u\n"
      "M4 o2 o1 vdd vdd pmos W=2u L=0.5u\n"
      "C1 o1 0 2f ic=0.5005\n"
      "C2 o2 0 2f ic=0.4995\n";
  const auto c = flatten_hierarchy(parse_netlist(src));
  SolverConfig cfg;
  cfg.dt = 1e-12;
  cfg.t_stop = 2e-9;
  const auto tr = transient_analysis(c, cfg);
  const int o1 = tr.find_node("o1");
  const int o2 = tr.find_node("o2");

  // regeneration to the rails with monotone differential growth
  const double final_diff = tr.voltages[o1].back() - tr.voltages[o2].back();
  CHECK(final_diff >= 0.9);
  double prev = 0.0;
  for (size_t k = 0; k < tr.times.size(); ++k) {
    const double d = tr.voltages[o1][k] - tr.voltages[o2][k];
    CHECK(d >= prev - 1e-9);
    prev = d;
  }

  // independent two-node RK4 integration of the same device equations with
  // the full 2x2 capacitance matrix: explicit loads plus gate-rail overlaps
  // on the diagonal, gate-drain overlaps coupling the two nodes
  MosParams nm = default_nmos();
  nm.w = 1e-6;
  nm.l = 0.5e-6;
  MosParams pm = default_pmos();
  pm.w = 2e-6;
  pm.l = 0.5e-6;
  const double cg = 2e-15 + mos_caps(nm).cgs + mos_caps(pm).cgs;
  const double cc = 2.0 * (mos_caps(nm).cgd + mos_caps(pm).cgd);
  const double det = (cg + cc) * (cg + cc) - cc * cc;
  auto deriv = [&](double v1, double v2, double& d1, double& d2) {
    const double i1 = mos_eval(nm, v2, v1).ids + mos_eval(pm, v2 - 1.0, v1 - 1.0).ids;
    const double i2 = mos_eval(nm, v1, v2).ids + mos_eval(pm, v1 - 1.0, v2 - 1.0).ids;
    d1 = (-i1 * (cg + cc) - i2 * cc) / det;
    d2 = (-i2 * (cg + cc) - i1 * cc) / det;
  };
  double v1 = 0.5005, v2 = 0.4995;
  const double h = 0.05e-12;
  double t_cross_oracle = -1.0;
  for (double t = 0.0; t < 2e-9; t += h) {
    double k1a, k1b, k2a, k2b, k3a, k3b, k4a, k4b;
    deriv(v1, v2, k1a, k1b);
    deriv(v1 + 0.5 * h * k1a, v2 + 0.5 * h * k1b, k2a, k2b);
    deriv(v1 + 0.5 * h * k2a, v2 + 0.5 * h * k2b, k3a, k3b);
    deriv(v1 + h * k3a, v2 + h * k3b, k4a, k4b);
    v1 += h / 6.0 * (k1a + 2 * k2a + 2 * k3a + k4a);
    v2 += h / 6.0 * (k1b + 2 * k2b + 2 * k3b + k4b);
    if (t_cross_oracle < 0.0 && v1 - v2 >= 0.5) t_cross_oracle = t;
  }
  CHECK(v1 - v2 >= 0.9);

  double t_cross_sim = -1.0;
  for (size_t k = 0; k < tr.times.size(); ++k)
    if (tr.voltages[o1][k] - tr.voltages[o2][k] >= 0.5) {
      t_cross_sim = tr.times[k];
      break;
    }
  REQUIRE(t_cross_sim >= 0.0);
  REQUIRE(t_cross_oracle >= 0.0);
  CHECK(t_cross_sim == Catch::Approx(t_cross_oracle).margin(10e-12));
}

TEST_CASE("transient: charge conservation in a source-free capacitor network") {
  const auto c = flatten_hierarchy(parse_netlist(
      "C1 a 0 10f ic=1\n"
      "C2 a b 20f\n"
      "C3 b 0 30f\n"));
  SolverConfig cfg;
  cfg.dt = 1e-12;
  cfg.t_stop = 2e-9;
  const auto tr = transient_analysis(c, cfg);
  const int a = tr.find_node("a");
  const int b = tr.find_node("b");
  auto charge = [&](size_t k) {
    const double va = tr.voltages[a][k], vb = tr.voltages[b][k];
    return 10e-15 * va + 20e-15 * (va - vb) + 30e-15 * vb;
  };
  const double q0 = charge(1); // after the first redistribution step
  const double q1 = charge(tr.times.size() - 1);
  CHECK(std::abs(q1 - q0) / std::abs(q0) < 1e-3);
}

TEST_CASE("transient: identical inputs give bit-identical results") {
  const auto c = flatten_hierarchy(parse_netlist(
      "V1 vdd 0 DC 1\n"
      "Vg g 0 PWL(0 0 0.1n 1 0.5n 1 0.51n 0)\n"
      "M1 d g s 0 nmos W=1u L=0.2u\n"
      "R1 vdd d 10k\n"
      "R2 s 0 2k\n"
      "C1 d 0 5f\n"));
  SolverConfig cfg;
  cfg.dt = 1e-12;
  cfg.t_stop = 1e-9;
  const auto t1 = transient_analysis(c, cfg);
  const auto t2 = transient_analysis(c, cfg);
  REQUIRE(t1.times.size() == t2.times.size());
  for (size_t n = 0; n < t1.voltages.size(); ++n)
    REQUIRE(std::memcmp(t1.voltages[n].data(), t2.voltages[n].data(),
                        t1.voltages[n].size() * sizeof(double)) == 0);
}

TEST_CASE("transient rejects bad step configuration") {
  const auto c = flatten_hierarchy(parse_netlist("R1 a 0 1k\nV1 a 0 DC 1\n"));
  SolverConfig cfg;
  cfg.dt = 2e-9;
  cfg.t_stop = 1e-9;
  CHECK_THROWS_AS(transient_analysis(c, cfg), SolveError);
}
