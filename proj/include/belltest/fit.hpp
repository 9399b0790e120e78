#pragma once

#include <vector>

#include <json.hpp>

#include <belltest/dataset.hpp>

namespace belltest {

enum class Weighting { uniform, inverse_variance };

/// Result of the cosine-law fit R12(phi) = A [1 + V cos(2 phi + psi)].
///
/// The fit is solved exactly in the linear basis {1, cos 2phi, sin 2phi};
/// visibility slightly above 1 is reported as-is, not clamped.
struct CosineFit {
  double mean_rate = 0.0;        ///< A, counts per accumulation window
  double visibility = 0.0;       ///< V
  double visibility_sigma = 0.0; ///< first-order propagated 1-sigma on V
  Angle phase;                   ///< psi
  double phase_sigma_rad = 0.0;
  std::vector<Angle> excluded_angles;
  std::vector<double> residuals; ///< (data - model)/A per non-excluded point
  Weighting weighting = Weighting::uniform;
};

/// Arithmetic mean of the coincidence rates, (1/n) sum R12(phi_k).
double mean_rate(const CoincidenceDataset& d);

/// Discrete visibility estimator 2 sum R12(phi_k) cos 2phi_k / (n <R12>).
/// Requires a uniform angle grid (the formula is the zero-phase Fourier
/// projection, exact only there).
double visibility_discrete(const CoincidenceDataset& d);

/// Least-squares cosine fit over the non-excluded points. Angles in
/// `exclude` are matched modulo pi. At least 3 points must remain.
CosineFit fit_cosine(const CoincidenceDataset& d,
                     const std::vector<Angle>& exclude = {},
                     Weighting weighting = Weighting::uniform);

/// A [1 + V cos(2 phi + psi)] at the fitted parameters.
double predict_rate(const CosineFit& f, Angle phi);

/// The two-estimator visibility cross-check:
///   V_A from the 0/90 degree pair, V_B from the 22.5/67.5 degree pair.
/// Equal under the cosine law with zero phase; their ratio tests it.
struct VisibilityPair {
  double v_a = 0.0;
  double v_b = 0.0;
  double ratio = 0.0;       ///< V_B / V_A
  double ratio_sigma = 0.0; ///< propagated 1-sigma (see visibility_pair)
};

/// Computes the pair from a dataset containing the angles 0, 22.5, 67.5 and
/// 90 degrees (modulo pi). The uncertainty propagates the four rate sigmas
/// through numerator and denominator of each estimator treated as
/// independent quantities (the convention of the published value).
VisibilityPair visibility_pair(const CoincidenceDataset& d);

/// Overall detection efficiency 4 <R12> / (R1 + R2).
double eta_overall(double mean_coincidence, double r1, double r2);

nlohmann::json fit_to_json(const CosineFit& f);

}  // namespace belltest
