#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "errors.hpp"
#include "jacobi.hpp"
#include "oracles.hpp"
#include "phasefind.hpp"

using namespace qsp;

namespace {

PhaseSequence random_phase_seq(std::uint64_t seed, int n) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-pi, pi);
  std::vector<double> out(n);
  for (double& v : out) v = u(rng);
  return PhaseSequence(out);
}

double matrix_gap(const PhaseSequence& got, const ResponseAbcd& want, int grid) {
  double worst = 0;
  for (double th : oracle::theta_grid(grid))
    worst = std::max(worst, (response_eval(got, th) - want.eval(th)).norm());
  return worst;
}

}  // namespace

TEST_CASE("validate_achievable accepts every realized response") {
  for (int n : {2, 8, 20}) {
    ResponseAbcd r = response_series(random_phase_seq(1000 + n, n));
    AchievabilityReport rep = validate_achievable(r.a, r.c, n);
    CHECK(rep.verdict);
    CHECK(rep.parity_ok);
    CHECK(rep.degree_ok);
    CHECK(rep.margin >= -1e-10);
    CHECK(rep.residual <= 1e-10);
  }
}

TEST_CASE("validate_achievable flags each broken condition") {
  ResponseAbcd r = response_series(random_phase_seq(7, 8));
  // harmonic budget exceeded
  CHECK_FALSE(validate_achievable(r.a, r.c, 6).degree_ok);
  CHECK_FALSE(validate_achievable(r.a, r.c, 6).verdict);
  // pointwise bound violated
  AchievabilityReport big = validate_achievable(TrigSeries({0.0, 1.2}), TrigSeries(), 2);
  CHECK(big.margin < -1e-10);
  CHECK_FALSE(big.verdict);
  // anchor broken
  AchievabilityReport off = validate_achievable(TrigSeries({0.0, 0.9}), TrigSeries(), 2);
  CHECK(off.residual > 1e-10);
  CHECK_FALSE(off.verdict);
  // sine content inside A
  TrigSeries mixed({1.0}, {0.3});
  CHECK_FALSE(validate_achievable(mixed, TrigSeries(), 2).parity_ok);
}

TEST_CASE("rescale divides both series and rejects bad eps") {
  TrigSeries a({0.25, 0.75});
  TrigSeries c({0.0}, {0.5});
  auto [ar, cr] = rescale(a, c, 0.25);
  for (double th : oracle::theta_grid(32)) {
    CHECK(ar.eval(th) == doctest::Approx(a.eval(th) / 1.25).epsilon(1e-14));
    CHECK(cr.eval(th) == doctest::Approx(c.eval(th) / 1.25).epsilon(1e-14));
  }
  CHECK_THROWS_AS(rescale(a, c, -0.1), Error);
  CHECK_THROWS_AS(rescale(a, c, 1.0), Error);
}

TEST_CASE("complete factorizes the unitarity deficit") {
  for (std::uint64_t seed : {21u, 22u, 23u, 24u}) {
    ResponseAbcd r = response_series(random_phase_seq(seed, 12));
    auto [a, c] = rescale(r.a, r.c, 1e-2);
    CompletionResult comp = complete(a, c);
    CHECK(comp.b.is_cosine_type(1e-9));
    CHECK(comp.d.is_sine_type(1e-9));
    CHECK(comp.unitarity_residual < 1e-8);
    // pointwise: B^2 + D^2 == 1 - A^2 - C^2
    for (double th : oracle::theta_grid(256)) {
      double deficit = 1 - a.eval(th) * a.eval(th) - c.eval(th) * c.eval(th);
      double got = comp.b.eval(th) * comp.b.eval(th) + comp.d.eval(th) * comp.d.eval(th);
      CHECK(got == doctest::Approx(deficit).epsilon(1e-7).scale(1.0));
    }
    CHECK(comp.delta == doctest::Approx(std::atan2(comp.b.eval(0), a.eval(0))).epsilon(1e-12));
  }
}

TEST_CASE("complete pins B(0) = 0 when the anchor is exact") {
  ResponseAbcd r = response_series(random_phase_seq(99, 10));
  // realized responses satisfy A(0) = 1 exactly, so the deficit vanishes at 0
  CompletionResult comp = complete(r.a, r.c);
  CHECK(std::abs(comp.b.eval(0.0)) < 1e-12);
  CHECK(comp.unitarity_residual < 1e-8);
}

TEST_CASE("complete handles an exactly unimodular pair") {
  TrigSeries a({0.0, 1.0});
  TrigSeries c({0.0}, {1.0});
  CompletionResult comp = complete(a, c);
  CHECK(comp.b.max_abs_coeff() == 0.0);
  CHECK(comp.d.max_abs_coeff() == 0.0);
  CHECK(comp.delta == 0.0);
}

TEST_CASE("complete rejects pairs that exceed the pointwise bound") {
  CHECK_THROWS_WITH(complete(TrigSeries({0.0, 1.2}), TrigSeries()),
                    doctest::Contains("completion infeasible"));
}

TEST_CASE("anchor_correct restores the unit anchor and moves A only slightly") {
  double eps = 1e-3;
  TruncationPlan plan = choose_truncation(1.0, eps);
  auto [a0, c0] = target_series(plan);
  auto [a1, c1] = rescale(a0, c0, plan.eps_bound);
  CompletionResult comp = complete(a1, c1);
  TrigSeries a2 = anchor_correct(a1, c1, comp);
  CHECK(a2.is_cosine_type(1e-12));
  CHECK(a2.eval(0.0) == doctest::Approx(1.0).epsilon(1e-9));
  double shift = 0;
  for (double th : oracle::theta_grid(512))
    shift = std::max(shift, std::abs(a2.eval(th) - a1.eval(th)));
  CHECK(shift <= 6 * plan.eps_bound);
}

TEST_CASE("layer_strip recovers the response matrix across sizes") {
  for (int n : {2, 4, 8, 16, 32, 64}) {
    ResponseAbcd r = response_series(random_phase_seq(4000 + n, n));
    StripDiagnostics diag;
    PhaseSequence rec = layer_strip(r, &diag);
    REQUIRE(rec.length() == n);
    CHECK(matrix_gap(rec, r, 1000) < 1e-8);
    CHECK(diag.final_residual < 1e-3);
  }
}

TEST_CASE("layer_strip is exact on a hand-built two-stage response") {
  PhaseSequence p({0.3, -1.1});
  ResponseAbcd r = response_series(p);
  PhaseSequence rec = layer_strip(r);
  REQUIRE(rec.length() == 2);
  CHECK(rec.phase(0) == doctest::Approx(0.3).epsilon(1e-10));
  CHECK(rec.phase(1) == doctest::Approx(-1.1).epsilon(1e-10));
}

TEST_CASE("synthesize realizes truncated oscillation targets within the error chain") {
  struct Case {
    double tau, eps;
  };
  for (Case cse : {Case{1.0, 1e-3}, Case{3.0, 1e-6}, Case{1.0, 1e-10}}) {
    TruncationPlan plan = choose_truncation(cse.tau, cse.eps);
    auto [a, c] = target_series(plan);
    double tau = cse.tau;
    SynthesisResult syn =
        synthesize(a, c, plan.eps_bound, [tau](double th) { return -tau * std::sin(th); });
    CHECK(syn.phases.length() == plan.n_queries);
    CHECK(syn.diag.n == plan.n_queries);
    CHECK(syn.diag.unitarity_residual < 1e-6);
    CHECK(syn.diag.gap_final <= 8 * plan.eps_bound);
    CHECK(syn.diag.min_success_prob >= 1 - 16 * plan.eps_bound);
    // the phases really produce the completed tuple
    ResponseAbcd realized = response_series(syn.phases);
    for (double th : oracle::theta_grid(200)) {
      cplx got(realized.a.eval(th), realized.c.eval(th));
      CHECK(std::abs(got - std::polar(1.0, -tau * std::sin(th))) <= 8 * plan.eps_bound + 1e-12);
    }
  }
}

TEST_CASE("synthesize measures gaps against the bare pair when no target is given") {
  ResponseAbcd r = response_series(random_phase_seq(31, 8));
  SynthesisResult syn = synthesize(r.a, r.c, 1e-4);
  CHECK(syn.diag.gap_final <= 8e-4);
  CHECK(syn.phases.length() <= 8);
}

TEST_CASE("synthesize rejects a mismatched target") {
  TruncationPlan plan = choose_truncation(1.0, 1e-3);
  auto [a, c] = target_series(plan);
  CHECK_THROWS_WITH(synthesize(a, c, plan.eps_bound, [](double th) { return 3 * th; }),
                    doctest::Contains("not eps-close"));
}

TEST_CASE("synthesize enforces the stage cap") {
  TrigSeries a({0.9});
  a.set_cos_coeff(40, 1e-3);
  CHECK_THROWS_WITH(synthesize(a, TrigSeries(), 1e-3), doctest::Contains("cap"));
}
