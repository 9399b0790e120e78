#include <doctest.h>

#include <cmath>

#include <belltest/errors.hpp>
#include <belltest/inequality.hpp>
#include <belltest/lhvmodel.hpp>
#include <belltest/rng.hpp>

#include <json.hpp>

using namespace belltest;

namespace {

std::vector<Angle> grid8() {
  std::vector<Angle> a;
  for (int k = 0; k < 8; ++k) a.push_back(Angle::from_degrees(22.5 * k));
  return a;
}

}  // namespace

TEST_CASE("delta_exp on the reference data") {
  const auto ref = builtin_reference_dataset();
  const double v = fit_cosine(ref).visibility;

  const double d0 = delta_exp(ref, v);
  CHECK(d0 > 0.0060);
  CHECK(d0 < 0.0080);

  // exact cosine data: residuals vanish identically
  const auto exact = quantum_dataset(0.7, Angle{}, 500.0, grid8());
  CHECK(delta_exp(exact, 0.7) < 1e-12);

  // scale invariance: built from R/<R>
  CHECK(delta_exp(ref.scaled(7.0), v) == doctest::Approx(d0).epsilon(1e-12));

  // supplying the fitted phase lowers the deviation on this dataset
  const Angle psi = fit_cosine(ref).phase;
  CHECK(delta_exp(ref, v, psi) < d0);

  // the discrete-estimator variant lands in the same window
  const double dd = delta_exp(ref, visibility_discrete(ref));
  CHECK(dd > 0.0060);
  CHECK(dd < 0.0080);

  CHECK_THROWS_AS(delta_exp(ref, 1.2), ValidationError);
  std::vector<DataPoint> bad{{Angle::from_degrees(0), 1, 0},
                             {Angle::from_degrees(30), 1, 0},
                             {Angle::from_degrees(90), 1, 0}};
  CHECK_THROWS_AS(delta_exp(CoincidenceDataset(bad, "b"), 0.5),
                  ValidationError);
}

TEST_CASE("approximate epsilon") {
  const EpsilonSolution e = epsilon_approx(0.9897, 0.31);
  CHECK(e.value == doctest::Approx(0.1820).epsilon(5e-4 / 0.182));
  CHECK(e.method == EpsilonMethod::approximate);
  CHECK(e.residual == 0.0);

  // clamp: visibility below the threshold term gives zero
  CHECK(epsilon_approx(0.5, 0.31).value == 0.0);

  CHECK(epsilon_approx(0.9897, 0.62).value == doctest::Approx(0.366).epsilon(3e-3));

  CHECK_THROWS_AS(epsilon_approx(0.9, 0.0), DomainError);
  CHECK_THROWS_AS(epsilon_approx(0.9, 1.2), DomainError);
}

TEST_CASE("exact epsilon root") {
  const EpsilonSolution e62 = epsilon_exact(0.9897, 0.62);
  CHECK(e62.value == doctest::Approx(0.578).epsilon(1e-3 / 0.578));
  CHECK(e62.method == EpsilonMethod::exact_root);
  CHECK(e62.residual <= 1e-10);

  // The transcendental condition as printed puts this root near 0.214, a
  // long way from the reference claim of 0.1825; pin the actual behavior.
  const EpsilonSolution e31 = epsilon_exact(0.9897, 0.31);
  CHECK(e31.value == doctest::Approx(0.2138).epsilon(5e-3));
  CHECK(e31.residual <= 1e-10);
  CHECK(e31.value - epsilon_approx(0.9897, 0.31).value > 0.02);

  // right side exactly 1 (v equal to the threshold term): root at zero
  const double u = std::numbers::pi * 0.31 / 2.0;
  const double v_thresh = std::sin(u) * std::sin(u) / (u * u);
  CHECK(epsilon_exact(v_thresh, 0.31).value == 0.0);

  // below the threshold: degenerate solution, no violation possible
  const EpsilonSolution degen = epsilon_exact(0.5, 0.31);
  CHECK(degen.value == 0.0);
  CHECK(degen.method == EpsilonMethod::exact_root);

  // very high efficiency pushes the right side beyond the range of the
  // left side (which tops out at pi/2): no root exists
  CHECK_THROWS_AS(epsilon_exact(0.99, 0.95), NumericError);
}

TEST_CASE("exact epsilon condition is monotone on (0, pi/4)") {
  double prev = epsilon_equation_lhs(1e-9);
  CHECK(prev == doctest::Approx(1.0).epsilon(1e-9));
  const double hi = std::numbers::pi / 4.0 - 1e-9;
  for (int i = 1; i <= 10000; ++i) {
    const double e = hi * static_cast<double>(i) / 10000.0;
    const double cur = epsilon_equation_lhs(e);
    CHECK(cur > prev);
    prev = cur;
  }
  CHECK(prev < std::numbers::pi / 2.0);
  CHECK(prev == doctest::Approx(std::numbers::pi / 2.0).epsilon(1e-5));
}

TEST_CASE("solvers agree at small epsilon and diverge beyond") {
  // where both solutions are small the exact root sits just above the
  // low-order value; the gap grows like epsilon^2
  for (double eta : {0.05, 0.1, 0.2, 0.3}) {
    const double u = std::numbers::pi * eta / 2.0;
    const double thresh = std::sin(u) * std::sin(u) / (u * u);
    for (double q : {2e-4, 1e-3}) {
      const double v = thresh + q;  // small positive epsilon_approx
      const EpsilonSolution a = epsilon_approx(v, eta);
      const EpsilonSolution x = epsilon_exact(v, eta);
      REQUIRE(a.value > 0.0);
      REQUIRE(a.value <= 0.03);
      CHECK(std::fabs(x.value - a.value) <= 0.002);
      CHECK(x.value >= a.value);
    }
  }
}

TEST_CASE("deviation bound, approximate form") {
  CHECK(d_eta_approx(0.31, 0.1820) == doctest::Approx(0.0065).epsilon(0.0002 / 0.0065));
  CHECK(d_eta_approx(0.31, 0.0) == 0.0);
  CHECK(d_eta_approx(0.31, 0.1825) == doctest::Approx(0.00654).epsilon(0.0002 / 0.0065));

  CHECK_THROWS_AS(d_eta_approx(0.0, 0.1), DomainError);
  CHECK_THROWS_AS(d_eta_approx(0.31, -0.1), DomainError);

  // the radicand stays positive over the whole physical efficiency range
  for (int i = 1; i <= 100; ++i) {
    const double eta = static_cast<double>(i) / 100.0;
    CHECK(d_eta_approx(eta, 0.1) > 0.0);
  }
}

TEST_CASE("deviation bound, accurate lower form") {
  CHECK(d_eta_lower_bound(0.62, 0.578) == doctest::Approx(0.048).epsilon(1e-3 / 0.048));
  CHECK(d_eta_lower_bound(0.31, 0.1825) == doctest::Approx(0.0052).epsilon(0.0002 / 0.0052));
  CHECK(d_eta_lower_bound(0.31, 0.0) == 0.0);
  CHECK_THROWS_AS(d_eta_lower_bound(0.31, 1.0), DomainError);
}

TEST_CASE("lower bound stays below the approximate form on a dense grid") {
  for (int ei = 0; ei <= 40; ++ei) {
    const double eps = 0.01 + (0.25 - 0.01) * ei / 40.0;
    for (int hi = 0; hi <= 40; ++hi) {
      const double eta = 0.05 + (0.62 - 0.05) * hi / 40.0;
      CHECK(d_eta_lower_bound(eta, eps) <= d_eta_approx(eta, eps) + 1e-15);
    }
  }
}

TEST_CASE("deviation profile") {
  const double eps = 0.1820;
  const DeviationTerms t90 = deviation_terms(Angle::from_degrees(90), 0.31, eps);
  CHECK(t90.gamma == doctest::Approx(0.0330).epsilon(0.0003 / 0.033));
  CHECK(t90.delta == doctest::Approx(0.0184).epsilon(0.0003 / 0.0184));

  const DeviationTerms t0 = deviation_terms(Angle::from_degrees(0), 0.31, eps);
  CHECK(t0.gamma == 0.0);
  CHECK(t0.delta == doctest::Approx(0.00433).epsilon(0.02));

  CHECK(deviation_profile(Angle::from_degrees(40), 0.31, 0.0) == 0.0);

  // even in phi; folding handles angles beyond 90 degrees
  SplitMix64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const double deg = (rng.uniform() - 0.5) * 720.0;
    const double dplus = deviation_profile(Angle::from_degrees(deg), 0.31, eps);
    const double dminus = deviation_profile(Angle::from_degrees(-deg), 0.31, eps);
    CHECK(dplus == doctest::Approx(dminus).epsilon(1e-12));
  }
  CHECK(deviation_profile(Angle::from_degrees(112.5), 0.31, eps) ==
        doctest::Approx(deviation_profile(Angle::from_degrees(67.5), 0.31, eps))
            .epsilon(1e-12));

  // continuity at the clamp threshold |phi| = 90 deg * (1 - eta)
  const double kink_deg = 90.0 * (1.0 - 0.31);
  const double below =
      deviation_profile(Angle::from_degrees(kink_deg - 1e-7), 0.31, eps);
  const double above =
      deviation_profile(Angle::from_degrees(kink_deg + 1e-7), 0.31, eps);
  CHECK(std::fabs(above - below) < 1e-6);
  CHECK(deviation_terms(Angle::from_degrees(kink_deg - 1e-7), 0.31, eps).gamma ==
        0.0);
  CHECK(deviation_terms(Angle::from_degrees(kink_deg + 1e-7), 0.31, eps).gamma >
        0.0);
}

TEST_CASE("effective visibility") {
  CHECK(v_effective(0.9897, 0.31, 0.1820) == doctest::Approx(1.003).epsilon(2e-3));
  CHECK(v_effective(0.9897, 0.31, 0.1825) == doctest::Approx(1.0044).epsilon(5e-4));
  CHECK(v_effective(0.77, 0.5, 0.0) == 0.77);
}

TEST_CASE("model-corrected rate prediction") {
  const CosineFit f = fit_cosine(builtin_reference_dataset());
  const double r90 = predicted_model_rate(f, Angle::from_degrees(90), 0.31, 0.1820);
  CHECK(r90 == doctest::Approx(140.9).epsilon(3.0 / 140.9));

  CHECK(predicted_model_rate(f, Angle::from_degrees(40), 0.31, 0.0) ==
        doctest::Approx(predict_rate(f, Angle::from_degrees(40))).epsilon(1e-12));

  // shift at 0 degrees is <R12> * delta(0)
  const double shift = predicted_model_rate(f, Angle{}, 0.31, 0.1820) -
                       predict_rate(f, Angle{});
  CHECK(shift == doctest::Approx(21.5).epsilon(0.05));
}

TEST_CASE("inequality test verdicts on the reference data") {
  const auto ref = builtin_reference_dataset();

  const InequalityReport lhv3 = run_inequality_test(
      ref, EfficiencyContext(0.62, LhvFamily::LHV3), 0, 1);
  CHECK(lhv3.verdict == Verdict::violated);
  CHECK(lhv3.d_eta_lower_bound_value == doctest::Approx(0.048).epsilon(0.03));
  CHECK_FALSE(lhv3.d_eta_approx_in_validity);
  CHECK_FALSE(lhv3.delta_exp_sigma.has_value());

  const InequalityReport lhv2 = run_inequality_test(
      ref, EfficiencyContext(0.31, LhvFamily::LHV2), 0, 1);
  CHECK(lhv2.verdict == Verdict::satisfied);
  CHECK(lhv2.d_eta_approx_in_validity);
  REQUIRE(lhv2.d_eta_approx_value.has_value());
  CHECK(*lhv2.d_eta_approx_value == doctest::Approx(0.0065).epsilon(0.01));
  CHECK(lhv2.verdict_bound == doctest::Approx(0.0052).epsilon(0.01));
  CHECK(lhv2.delta_exp_value > lhv2.verdict_bound);

  // perfect quantum data violates any bound with positive epsilon
  const auto exact = quantum_dataset(0.9897, Angle{}, 5000.0, grid8());
  const InequalityReport q = run_inequality_test(
      exact, EfficiencyContext(0.31, LhvFamily::LHV2), 0, 1);
  CHECK(q.delta_exp_value < 1e-10);
  CHECK(q.verdict == Verdict::violated);
}

TEST_CASE("resampled uncertainty is reproducible") {
  const auto ref = builtin_reference_dataset();
  const EfficiencyContext ctx(0.31, LhvFamily::LHV2);

  const InequalityReport a = run_inequality_test(ref, ctx, 400, 99);
  const InequalityReport b = run_inequality_test(ref, ctx, 400, 99);
  REQUIRE(a.delta_exp_sigma.has_value());
  CHECK(*a.delta_exp_sigma == *b.delta_exp_sigma);  // bit-for-bit

  const InequalityReport c = run_inequality_test(ref, ctx, 400, 100);
  CHECK(*a.delta_exp_sigma != *c.delta_exp_sigma);

  // the uncertainty has the scale of the per-point relative errors
  CHECK(*a.delta_exp_sigma > 1e-4);
  CHECK(*a.delta_exp_sigma < 5e-3);

  // at 3 sigma the reference data never flips to violated for LHV2
  const InequalityReport big = run_inequality_test(ref, ctx, 2000, 7);
  CHECK(big.verdict != Verdict::violated);
}

TEST_CASE("report serialization carries the fixed field names") {
  const auto rep = run_inequality_test(
      builtin_reference_dataset(), EfficiencyContext(0.62, LhvFamily::LHV3), 10, 5);
  const auto j = report_to_json(rep);
  for (const char* key :
       {"delta_exp", "delta_exp_phase_corrected", "delta_exp_sigma",
        "eps_approx", "eps_exact", "d_eta_approx", "d_eta_lower_bound", "eta",
        "family", "verdict", "fit"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["family"] == "LHV3");
  CHECK(j["eps_exact"]["method"] == "exact_root");
}
