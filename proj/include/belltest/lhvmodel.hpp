#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include <belltest/dataset.hpp>

namespace belltest {

/// Hidden-angle density rho(x), x = chi1 - chi2, even and pi-periodic,
/// normalized to integrate to 1/pi over one period.
struct RhoSpec {
  enum class Kind { uniform, lhv4, grid };
  Kind kind = Kind::uniform;
  /// lhv4: rho(x) = (1/pi^2)[1 + (1+epsilon) cos 2x + epsilon cos 4x],
  /// nonnegative exactly on epsilon in [0, 1/3].
  double epsilon = 0.0;
  /// grid: equally spaced samples over [-90, 90] degrees (inclusive ends),
  /// evaluated by linear interpolation with periodic wrap.
  std::vector<double> samples;

  double value(double x_rad) const;
};

/// Detection probability P(x) of one analyzer-detector arm as a function of
/// the angle between photon polarization and analyzer axis. Even,
/// pi-periodic, bounded by [0, 1]. Both parametric forms are artifact
/// choices, configurable because the source analysis never fixes P.
struct DetectionSpec {
  enum class Kind { cos2, window };
  Kind kind = Kind::cos2;
  double eta_d = 1.0;  ///< peak detection probability
  Angle half_width;    ///< window only: accept when |x| <= half_width (mod pi)

  double value(double x_rad) const;
};

/// A (rho, P) pair defining a local hidden-variable model of the two-angle
/// family, plus the family tag it is meant to represent.
struct LhvModel {
  RhoSpec rho;
  DetectionSpec detection;
  LhvFamily family = LhvFamily::LHV1;
  std::string name = "model";
};

struct ValidationCheck {
  std::string name;
  bool passed = false;
  double worst = 0.0;     ///< worst violation magnitude (0 when clean)
  double location = 0.0;  ///< x (radians) where the worst violation occurs
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool passed() const;
  const ValidationCheck* worst_failure() const;
};

/// Checks rho >= 0, evenness of rho and P, 0 <= P <= 1, and the 1/pi
/// normalization (within 1e-8) on a grid of at least 64 points.
ValidationReport validate_model(const LhvModel& m, std::size_t grid_points = 4096);

/// Coincidence probability
///   p12 = integral rho(chi1-chi2) P(chi1-phi1) P(chi2-phi2) dchi1 dchi2
/// over one period in each hidden angle, evaluated as a convolution in
/// x = chi1 - chi2 followed by an average over chi1 (composite quadrature,
/// absolute tolerance 1e-9). Depends on phi1, phi2 only through phi1 - phi2.
double coincidence_probability(const LhvModel& m, Angle phi1, Angle phi2);

/// Single-arm detection probability; independent of the analyzer angle
/// because rho integrates out.
double single_probability(const LhvModel& m, Angle phi);

/// Exact model rates production_rate * p12(phi_k) at the given difference
/// angles; sigma = 0 (exact values).
CoincidenceDataset model_dataset(const LhvModel& m,
                                 const std::vector<Angle>& angles,
                                 double production_rate);

/// Exact cosine-law rates mean * (1 + v cos(2 phi + psi)); sigma = 0.
CoincidenceDataset quantum_dataset(double v, Angle psi, double mean,
                                   const std::vector<Angle>& angles);

/// The lhv4 density value at x (no validation; callers probe any epsilon).
double lhv4_density(double epsilon, double x_rad);

/// Model file (JSON):
///   {"rho": {"kind": "uniform"|"lhv4"|"grid", ...},
///    "detection": {"kind": "cos2"|"window", "eta_d": .., "w_deg": ..},
///    "family": "LHV1"}
LhvModel model_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const LhvModel& m);

}  // namespace belltest
