#include <catch_amalgamated.hpp>

#include <mramsim/senseamps.hpp>

using namespace mramsim;

TEST_CASE("default timing matches the clock plan") {
  const auto t = default_timing();
  CHECK(pwl_value(t.wl, 0.5e-9) == 1.0);
  CHECK(pwl_value(t.wl, 1.5e-9) == 0.0);
  CHECK(pwl_value(t.sae, 0.4e-9) == 0.0);
  CHECK(pwl_value(t.sae, 0.6e-9) == 1.0);
  CHECK(pwl_value(t.sae1, 0.7e-9) == 0.0);
  CHECK(pwl_value(t.sae1, 0.8e-9) == 1.0);
  CHECK(t.vc == 0.8);
  CHECK(t.vr == 0.7);
  CHECK(t.vdd == 1.0);
  CHECK(t.wl_fall() == Catch::Approx(1e-9));
  CHECK(t.sae_rise() == Catch::Approx(0.5e-9));
  CHECK(t.sae1_rise() == Catch::Approx(0.75e-9));
}

TEST_CASE("every design builds a valid circuit") {
  for (SenseAmpKind kind :
       {SenseAmpKind::CSenseAmp, SenseAmpKind::VSenseAmp, SenseAmpKind::NVSenseAmp}) {
    for (auto ref : {ReferenceConfig::single(), ReferenceConfig::multi_3s()}) {
      for (MtjState st : {MtjState::P, MtjState::AP}) {
        const auto nl = build_design(kind, ref, default_params(kind, ref.mode), st);
        const auto flat = flatten_hierarchy(nl);
        const auto diags = validate_circuit(flat);
        INFO(to_string(kind) << " ref=" << (ref.mode == RefMode::single_P ? "1" : "3s")
                             << " state=" << to_string(st));
        CHECK(diags.empty());
      }
    }
  }
}

TEST_CASE("reference network resistance equals a single parallel cell") {
  for (auto ref : {ReferenceConfig::single(), ReferenceConfig::multi_3s()}) {
    const auto nl = build_design(SenseAmpKind::VSenseAmp, ref,
                                 default_params(SenseAmpKind::VSenseAmp, ref.mode), MtjState::P);
    const auto flat = flatten_hierarchy(nl);
    double total = 0.0;
    int count = 0;
    for (const auto& d : flat.devices) {
      if (d.kind == ElementKind::mtj && d.name != "jd") {
        total += mtj_resistance(d.mtj, d.state, d.tox);
        ++count;
      }
    }
    CHECK(count == ref.series_count);
    CHECK(total == Catch::Approx(742.0).epsilon(1e-9));
  }
}

TEST_CASE("neutralized kind adds exactly the two coupling caps") {
  const auto v = build_design(SenseAmpKind::VSenseAmp, ReferenceConfig::single(),
                              default_params(SenseAmpKind::VSenseAmp, RefMode::single_P),
                              MtjState::P);
  auto nv_params = default_params(SenseAmpKind::NVSenseAmp, RefMode::single_P);
  const auto nv = build_design(SenseAmpKind::NVSenseAmp, ReferenceConfig::single(), nv_params,
                               MtjState::P);
  CHECK(nv.elements.size() == v.elements.size() + 2);

  // the caps match the clamp overlap capacitance
  MosParams clamp = default_nmos();
  clamp.w = nv_params.clamp_w;
  clamp.l = nv_params.clamp_l;
  const double expect = mos_caps(clamp).cgd;
  int found = 0;
  for (const auto& e : nv.elements) {
    if (e.name == "c1") {
      CHECK(e.nodes == std::vector<std::string>{"saout", "vrb"});
      CHECK(e.params.at("value") == Catch::Approx(expect));
      ++found;
    }
    if (e.name == "c2") {
      CHECK(e.nodes == std::vector<std::string>{"saoutb", "vcb"});
      CHECK(e.params.at("value") == Catch::Approx(expect));
      ++found;
    }
  }
  CHECK(found == 2);
}

TEST_CASE("invalid parameter combinations are rejected") {
  auto p = default_params(SenseAmpKind::CSenseAmp, RefMode::single_P);
  p.neutral_cap_w = 1e-6;
  p.neutral_cap_l = 1e-6;
  CHECK_THROWS_WITH(
      build_design(SenseAmpKind::CSenseAmp, ReferenceConfig::single(), p, MtjState::P),
      Catch::Matchers::ContainsSubstring("only valid on NVSenseAmp"));

  auto q = default_params(SenseAmpKind::NVSenseAmp, RefMode::single_P);
  q.neutral_cap_w = q.clamp_w * 2.0;
  CHECK_THROWS_WITH(
      build_design(SenseAmpKind::NVSenseAmp, ReferenceConfig::single(), q, MtjState::P),
      Catch::Matchers::ContainsSubstring("match the clamp"));

  auto r = default_params(SenseAmpKind::NVSenseAmp, RefMode::single_P);
  r.neutral_cap_w = 0.0;
  r.neutral_cap_l = 0.0;
  CHECK_THROWS_WITH(
      build_design(SenseAmpKind::NVSenseAmp, ReferenceConfig::single(), r, MtjState::P),
      Catch::Matchers::ContainsSubstring("requires neutralization"));
}

TEST_CASE("design catalog") {
  CHECK(design_ids().size() == 5);
  const auto d = design_by_id("nvsa-3s");
  CHECK(d.kind == SenseAmpKind::NVSenseAmp);
  CHECK(d.ref.series_count == 3);
  CHECK_THROWS_WITH(design_by_id("bogus"), Catch::Matchers::ContainsSubstring("valid ids"));
}

TEST_CASE("coupling balance relations") {
  // symmetric capacitances halve the right-hand sides
  auto nb = neutralization_balance(1.0, 0.0, 0.8, 0.7, 1e-15, 1e-15, 1e-15, 1e-15);
  CHECK(nb.rhs1 == Catch::Approx(0.5));
  CHECK(nb.rhs2 == Catch::Approx(0.5));
  CHECK(nb.lhs1 == Catch::Approx(0.2));

  // no neutralization: rhs goes to one
  nb = neutralization_balance(1.0, 0.0, 0.8, 0.7, 1e-15, 1e-15, 0.0, 0.0);
  CHECK(nb.rhs1 == Catch::Approx(1.0));
  CHECK(nb.rhs2 == Catch::Approx(1.0));

  CHECK_THROWS_AS(neutralization_balance(0.5, 0.5, 0.8, 0.7, 1e-15, 1e-15, 1e-15, 1e-15),
                  std::invalid_argument);
}
