#pragma once

#include <string>

#include <json.hpp>

#include <belltest/fit.hpp>
#include <belltest/inequality.hpp>
#include <belltest/lhvmodel.hpp>

namespace belltest {

/// Everything the consolidated reproduction emits, computed from the bundled
/// reference dataset. Reference values reported by the original analysis are
/// carried alongside for comparison; computed values are never forced to
/// match them.
struct ReproduceReport {
  CosineFit fit_all;
  CosineFit fit_all_weighted;  ///< inverse-variance variant, shown alongside
  CosineFit fit_excl90;
  double predicted_r90_full = 0.0;   ///< cosine prediction at 90 deg, full fit
  double predicted_r90_excl = 0.0;   ///< same, 90-deg point excluded from fit
  VisibilityPair pair;
  double delta_psi0 = 0.0;
  double delta_phase_corrected = 0.0;
  double delta_discrete_v = 0.0;     ///< with the discrete visibility estimator
  EpsilonSolution eps_approx_lhv2, eps_exact_lhv2;
  EpsilonSolution eps_approx_lhv3, eps_exact_lhv3;
  double d_approx_lhv2 = 0.0;
  double d_lower_lhv2 = 0.0;         ///< at the verdict epsilon
  double d_lower_lhv3 = 0.0;         ///< at the exact-root epsilon
  DeviationTerms dev90;
  double v_eff = 0.0;
  double lhv_predicted_r90 = 0.0;
  InequalityReport lhv2, lhv3;
  Verdict lhv4_verdict = Verdict::inconclusive;  ///< by hierarchy from LHV3
};

/// Reference values reported by the original analysis of this dataset.
struct ReferenceValues {
  static constexpr double visibility = 0.9897;
  static constexpr double visibility_excl90 = 0.9966;
  static constexpr double phase_deg = 0.31;
  static constexpr double predicted_r90_full = 51.3;
  static constexpr double predicted_r90_excl = 17.0;
  static constexpr double pair_ratio = 1.0205;
  static constexpr double pair_ratio_sigma = 0.0048;
  static constexpr double delta_exp = 0.0074;
  static constexpr double eps_approx_lhv2 = 0.1820;
  static constexpr double eps_exact_lhv2 = 0.1825;
  static constexpr double eps_exact_lhv3 = 0.578;
  static constexpr double d_approx_lhv2 = 0.0065;
  static constexpr double d_lower_lhv2 = 0.0052;
  static constexpr double d_lower_lhv3 = 0.048;
  static constexpr double gamma_90 = 0.0330;
  static constexpr double delta_90 = 0.0184;
  static constexpr double v_eff = 1.003;
  static constexpr double lhv_predicted_r90 = 140.9;
  static constexpr double eta_lhv2 = 0.31;
  static constexpr double eta_lhv3 = 0.62;
};

ReproduceReport build_reproduce_report(std::size_t resamples = 0,
                                       std::uint64_t seed = 1);

/// Plain-text rendering, 6 significant digits, byte-stable across runs.
std::string reproduce_text(const ReproduceReport& r);

nlohmann::json reproduce_json(const ReproduceReport& r);

}  // namespace belltest
