#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oscilab/families.hpp"
#include "oscilab/sampled.hpp"

using namespace oscilab;

TEST_CASE("step plateau: value at 0 is s^-delta + C") {
  const StepPlateauParams p{1e-2, 1.0, 1e-4, 2.0};
  const FamilyBuild fb = step_plateau(p, p.eps / 8.0);
  CHECK(fb.f.value_at(0.0) == doctest::Approx(102.0).epsilon(1e-12));
  CHECK(fb.log_scale == 0.0);
  CHECK(fb.notes.at("height") == doctest::Approx(100.0).epsilon(1e-14));
}

TEST_CASE("step plateau: plateau, support, and evenness") {
  const StepPlateauParams p{1e-3, 0.5, 1e-5, 2.0};
  const FamilyBuild fb = step_plateau(p, p.eps / 8.0);
  const auto& xs = fb.f.grid().nodes();
  const auto& vs = fb.f.values();
  const double w = fb.notes.at("mollify_width");
  const double h = p.height();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double ax = std::abs(xs[i]);
    if (ax <= p.s - w) CHECK(vs[i] == doctest::Approx(p.C + h).epsilon(1e-11));
    if (ax >= p.s + p.eps + w) CHECK(vs[i] == doctest::Approx(p.C).epsilon(1e-11));
  }
  // evenness exact at mirrored node pairs
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const std::size_t j = xs.size() - 1 - i;
    CHECK(xs[i] == -xs[j]);
    CHECK(vs[i] == vs[j]);
  }
}

TEST_CASE("step plateau conserves the bump mass through mollification") {
  const StepPlateauParams p{1e-3, 0.5, 1e-5, 2.0};
  const FamilyBuild fb = step_plateau(p, p.eps / 8.0);
  const Interval hull(fb.f.grid().x_min(), fb.f.grid().x_max());
  const double mass = integrate_abs(fb.f, hull, p.C);  // f >= C everywhere
  CHECK(mass == doctest::Approx(fb.notes.at("bump_mass")).epsilon(1e-10));
}

TEST_CASE("step plateau parameter gates") {
  CHECK_THROWS(step_plateau({1e-3, 0.5, 2e-4, 2.0}, 1e-5));   // eps > s/10
  CHECK_THROWS(step_plateau({1e-3, 0.5, 1e-5, 0.5}, 1e-6));   // C <= 1
  CHECK_THROWS(step_plateau({1e-3, 0.5, 1e-5, 2.0}, 1e-5));   // w >= eps/4
}

TEST_CASE("step plateau: delta -> 0 converges to the bounded profile") {
  const StepPlateauParams p{1e-3, 1e-4, 1e-5, 2.0};
  const FamilyBuild fb = step_plateau(p, p.eps / 8.0);
  CHECK(fb.f.value_at(0.0) == doctest::Approx(1.0 + p.C).epsilon(1e-3));
}

TEST_CASE("generators are deterministic") {
  const StepPlateauParams p{1e-3, 0.5, 1e-5, 2.0};
  const FamilyBuild a = step_plateau(p, p.eps / 8.0);
  const FamilyBuild b = step_plateau(p, p.eps / 8.0);
  REQUIRE(a.f.size() == b.f.size());
  for (std::size_t i = 0; i < a.f.size(); ++i) {
    CHECK(a.f.grid().nodes()[i] == b.f.grid().nodes()[i]);
    CHECK(a.f.values()[i] == b.f.values()[i]);
  }
}

TEST_CASE("scaled step plateau") {
  const FamilyBuild fb = step_plateau_scaled(100.0, 0.5, 0.01, 2.0, 0.01 / 8.0);
  CHECK(fb.log_scale == -100.0);
  CHECK(fb.notes.at("height") == doctest::Approx(std::exp(50.0)).epsilon(1e-12));
  CHECK(fb.f.value_at(0.0) == doctest::Approx(std::exp(50.0) + 2.0).epsilon(1e-10));
  CHECK_THROWS(step_plateau_scaled(2000.0, 0.9, 0.01, 2.0, 0.001));  // height overflows
}

TEST_CASE("tail family derives s = e^{-1/t}, delta = sqrt(t)") {
  const FamilyBuild fb = tail_family(0.01, 2.0);
  CHECK(fb.notes.at("delta") == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(fb.notes.at("neg_log_s") == doctest::Approx(100.0).epsilon(1e-14));
  CHECK(fb.notes.at("clamped_s") == 1.0);  // e^{-100} is below the grid floor
  CHECK(fb.notes.at("height") == doctest::Approx(std::exp(10.0)).epsilon(1e-12));

  // dominance ratio t^ell e^{1/sqrt(t)} grows as t -> 0
  const FamilyBuild fb2 = tail_family(0.005, 2.0);
  CHECK(fb2.notes.at("ln_dominance") > fb.notes.at("ln_dominance"));
}

TEST_CASE("tail family equals |x|^-ell beyond t") {
  const double t = 0.25, ell = 2.0;
  const FamilyBuild fb = tail_family(t, ell);
  const auto& xs = fb.f.grid().nodes();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double ax = std::abs(xs[i]);
    // up to mollification bias O(w^2 f'') and the hull-edge extension
    if (ax > 1.5 * t && ax < 0.9 * fb.f.grid().x_max())
      CHECK(fb.f.values()[i] == doctest::Approx(std::pow(ax, -ell)).epsilon(1e-4));
  }
  // inside (s, t): the t-plateau
  CHECK(fb.f.value_at(0.5 * t) == doctest::Approx(std::pow(t, -ell)).epsilon(1e-8));
  CHECK_THROWS(tail_family(1.5, 2.0));
}

TEST_CASE("gradient bounded family: root, closeness, and L1 stability") {
  {
    const FamilyBuild fb = gradient_bounded(1e-3, 0.01, 2.0, 2.0);
    const double b = fb.notes.at("b");
    const double res = fb.notes.at("b_root_residual");
    CHECK(res <= 1e-10 * std::pow(1e-3, -2.0));  // relative to the equation scale
    CHECK((b - 1e-3) / 1e-3 < 0.1);
    CHECK(b > 1e-3);
  }
  // L1 norm bounded along s -> 0 with delta -> 0 (variation < 2x)
  double lo = 1e300, hi = 0.0;
  for (double s : {1e-2, 3e-3, 1e-3, 3e-4}) {
    const double delta = 0.1 * s / 1e-2;
    GridHint hint;
    hint.hull = 1.0;
    const FamilyBuild fb = gradient_bounded(s, delta, 2.0, 2.0, hint);
    const double l1 = fb.notes.at("l1_norm");
    lo = std::min(lo, l1);
    hi = std::max(hi, l1);
  }
  CHECK(hi / lo < 2.0);
  CHECK_THROWS(gradient_bounded(0.5, 3.0, 2.0, 2.0));  // s^-ell < s^-delta: no root
}

TEST_CASE("plateau cascade: positions, sandwich bound, disjointness") {
  const std::vector<double> gamma{2.0, 4.0, 6.0};
  const FamilyBuild fb = plateau_cascade(0.5, 1.0, gamma, 3);
  CHECK(fb.notes.at("a_3") == doctest::Approx(1.0 / 256.0).epsilon(1e-15));
  CHECK(fb.notes.at("a_1") == doctest::Approx(0.25).epsilon(1e-15));

  const auto& xs = fb.f.grid().nodes();
  const auto& vs = fb.f.values();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double bg = std::pow(xs[i], -0.5);
    CHECK(vs[i] >= bg * (1.0 - 1e-9));
    // above: |x|^-beta up to the plateau-interior factor (1 + |I_i|/a_i)^beta
    CHECK(vs[i] <= std::max(std::pow(xs[i], -1.0) * 1.3, bg * (1.0 + 1e-9)));
  }
}

TEST_CASE("plateau cascade: constant gamma is an accepted degenerate control") {
  const std::vector<double> gamma{3.0, 3.0, 3.0};
  const FamilyBuild fb = plateau_cascade(0.5, 1.0, gamma, 3);
  CHECK(fb.notes.at("a_2") == doctest::Approx(0.0625).epsilon(1e-15));
  // decreasing gamma is rejected
  CHECK_THROWS(plateau_cascade(0.5, 1.0, {4.0, 3.0, 2.0}, 3));
  CHECK_THROWS(plateau_cascade(1.5, 2.0, gamma, 3));  // alpha >= 1
}

TEST_CASE("cascade local frame matches the analytic local model") {
  const CascadeFrame fr = cascade_local_frame(0.5, 2.0, 4.0, 2);
  const double la = 4.0 * std::log(2.0);
  CHECK(fr.ln_a == doctest::Approx(la).epsilon(1e-14));
  CHECK(fr.ln_interval == doctest::Approx(4.0 * la).epsilon(1e-14));
  CHECK(fr.plateau_height == doctest::Approx(std::exp(2.0 * la)).epsilon(1e-12));
  CHECK(fr.background == doctest::Approx(std::exp(0.5 * la)).epsilon(1e-12));
  // plateau value at xi = 1/2, background far left
  CHECK(fr.f.value_at(0.5) == doctest::Approx(fr.plateau_height).epsilon(1e-9));
  const double xi = -3.0;
  const double w_rel = std::exp(-3.0 * la);
  const double expect = std::exp(0.5 * (la - std::log1p(xi * w_rel)));
  CHECK(fr.f.value_at(xi) == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("time blow-up profile values") {
  const FamilyBuild fb = time_blowup(0.5, 0.5, 1.0, 0.9);
  CHECK(fb.f.value_at(0.0) == doctest::Approx(std::pow(0.1, -0.5)).epsilon(1e-12));
  CHECK(fb.notes.at("peak") == doctest::Approx(std::pow(0.1, -0.5)).epsilon(1e-12));

  // supported in (-1, 1), == profile on [-1/2, 1/2]
  const auto& xs = fb.f.grid().nodes();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (std::abs(xs[i]) >= 1.0) CHECK(fb.f.values()[i] == 0.0);
  }

  // pointwise limit toward |x|^{-eps1} as t -> T, checked at the node nearest
  // 0.1 (eps2 = 1 puts the gap below 1e-6)
  const FamilyBuild fbl = time_blowup(0.5, 1.0, 1.0, 1.0 - 1e-8);
  const auto& nl = fbl.f.grid().nodes();
  std::size_t ni = 0;
  for (std::size_t i = 0; i < nl.size(); ++i)
    if (std::abs(nl[i] - 0.1) < std::abs(nl[ni] - 0.1)) ni = i;
  const double limit = std::pow(std::abs(nl[ni]), -0.5);
  CHECK(std::abs(fbl.f.values()[ni] - limit) <= 1e-6);
  // with eps2 = 0.5 the gap is tau^{1/2}-sized: verified against the formula
  const FamilyBuild fbh = time_blowup(0.5, 0.5, 1.0, 1.0 - 1e-8);
  const double expect = 1.0 / (std::pow(std::abs(nl[ni]), 0.5) + 1e-4);
  CHECK(fbh.f.values()[ni] == doctest::Approx(expect).epsilon(1e-12));

  CHECK_THROWS(time_blowup(0.5, 0.5, 1.0, 1.5));  // t >= T
}

TEST_CASE("build_family dispatches by kind") {
  FamilySpec spec;
  spec.kind = "step_plateau";
  spec.params = {{"s", 1e-2}, {"delta", 1.0}, {"eps", 1e-4}, {"C", 2.0}};
  const FamilyBuild fb = build_family(spec);
  CHECK(fb.f.value_at(0.0) == doctest::Approx(102.0).epsilon(1e-12));

  FamilySpec tb;
  tb.kind = "time_blowup";
  tb.params = {{"eps2", 0.5}, {"T", 1.0}, {"time", 0.9}};
  CHECK(build_family(tb).notes.at("peak") ==
        doctest::Approx(std::pow(0.1, -0.5)).epsilon(1e-12));

  FamilySpec bad;
  bad.kind = "nope";
  CHECK_THROWS(build_family(bad));
}
