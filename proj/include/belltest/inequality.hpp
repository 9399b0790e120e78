#pragma once

#include <cstdint>
#include <optional>

#include <json.hpp>

#include <belltest/dataset.hpp>
#include <belltest/fit.hpp>

namespace belltest {

enum class EpsilonMethod { approximate, exact_root };

/// Solution of the model-matching condition for the epsilon parameter of the
/// best LHV1-family model at given visibility and efficiency.
struct EpsilonSolution {
  double value = 0.0;  ///< epsilon, in [0, pi/4)
  EpsilonMethod method = EpsilonMethod::approximate;
  /// |imbalance| of the exact equation at the returned value. Zero for the
  /// approximate method; for degenerate exact solutions (no violation
  /// possible, epsilon = 0) it carries the boundary imbalance.
  double residual = 0.0;
};

/// Root-mean-square deviation of the normalized rates from the cosine law:
///   sqrt{ (1/n) sum [ R12(phi_k)/<R12> - 1 - v cos(2 phi_k + psi) ]^2 }
/// with psi = use_phase if supplied, else 0 (the statistic as published has
/// no phase). Requires a uniform grid and 0 <= v <= 1.05.
double delta_exp(const CoincidenceDataset& d, double v,
                 std::optional<Angle> use_phase = std::nullopt);

/// Low-efficiency closed form
///   epsilon = (1/sqrt 2) (V - sin^2(pi eta/2)/(pi eta/2)^2)_+^{1/2},
/// where (.)_+ clamps negative arguments to zero.
EpsilonSolution epsilon_approx(double v, double eta);

/// Exact transcendental condition: the root epsilon in (0, pi/4) of
///   [pi - 2e + sin 2e cos 2e] / {cos 2e [pi - 2e + tan 2e]}
///     = V (pi eta/2)^2 / sin^2(pi eta/2),
/// solved by bracketing bisection to |imbalance| <= 1e-10. The left side
/// increases from 1 at e = 0 to pi/2 at e = pi/4; a right side below 1
/// returns the degenerate epsilon = 0, and a right side at or above pi/2
/// has no root and raises NumericError.
EpsilonSolution epsilon_exact(double v, double eta);

/// Left side of the exact epsilon condition (exposed for monotonicity
/// checks).
double epsilon_equation_lhs(double eps);

/// Low-efficiency closed form of the deviation bound
///   D(eta) = (8 sqrt 2 / 3 pi) sqrt(2/(3 eta) - 1/2
///            - sin^4(pi eta/2)/(pi eta/2)^4) epsilon^3.
/// Valid only for small epsilon (reports flag epsilon > 0.3 as outside
/// validity). Raises DomainError on a negative radicand; use
/// d_eta_lower_bound then.
double d_eta_approx(double eta, double eps);

/// Lower bound of D(eta) accurate at all epsilon:
///   sqrt 2 sin^3(2e) / {3 [(pi - 2e) cos 2e + sin 2e]}
///     * sin^2(pi eta)/(pi eta)^2.
double d_eta_lower_bound(double eta, double eps);

/// Terms of the deviation profile of the best LHV model from the cosine
/// law, delta(phi) = alpha [beta cos 2phi - 1] + gamma(phi), with
///   alpha = 8 eps^3 / (3 pi),
///   beta  = 2 sin^2(pi eta/2)/(pi eta/2)^2,
///   gamma = (2 alpha / eta^2) (eta + (2/pi)|phi| - 1)_+.
/// phi is folded into [0, 90] degrees before evaluation.
struct DeviationTerms {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
};

DeviationTerms deviation_terms(Angle phi, double eta, double eps);
double deviation_profile(Angle phi, double eta, double eps);

/// Effective visibility (V + alpha beta)/(1 - alpha) of the best LHV model.
double v_effective(double v, double eta, double eps);

/// Cosine-law prediction plus the LHV deviation: predict_rate(f, phi)
/// + <R12> * delta(phi).
double predicted_model_rate(const CosineFit& f, Angle phi, double eta,
                            double eps);

enum class Verdict { violated, satisfied, inconclusive };
const char* to_string(Verdict v);

/// Assembled result of the inequality test Delta_exp >= D(eta).
struct InequalityReport {
  double delta_exp_value = 0.0;           ///< psi = 0 statistic (the verdict input)
  double delta_exp_phase_corrected = 0.0; ///< same with the fitted phase
  std::optional<double> delta_exp_sigma;  ///< resampled 1-sigma (if resamples > 0)
  EpsilonSolution eps_approx;
  EpsilonSolution eps_exact;
  std::optional<double> d_eta_approx_value; ///< absent when outside its domain
  bool d_eta_approx_in_validity = false;    ///< epsilon_approx <= 0.3
  double d_eta_lower_bound_value = 0.0;     ///< at the exact-root epsilon
  /// Bound the verdict compares against: the accurate lower bound evaluated
  /// at the approximate epsilon while that solver is in its validity regime
  /// (epsilon <= 0.3), at the exact root otherwise.
  double verdict_bound = 0.0;
  double verdict_epsilon = 0.0;
  double significance_k = 3.0;
  EfficiencyContext context;
  CosineFit fitted;
  Verdict verdict = Verdict::inconclusive;
};

/// Fits the visibility (uniform weights, no exclusions), evaluates the
/// statistic, both epsilon solutions and both bound forms, and derives the
/// verdict at significance_k sigmas. delta_exp_sigma comes from `resamples`
/// Gaussian perturbations of each rate by its sigma, seeded and bit-stable;
/// with resamples = 0 the verdict uses point values.
InequalityReport run_inequality_test(const CoincidenceDataset& d,
                                     const EfficiencyContext& ctx,
                                     std::size_t resamples, std::uint64_t seed,
                                     double significance_k = 3.0);

nlohmann::json report_to_json(const InequalityReport& r);

}  // namespace belltest
