#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include <belltest/angle.hpp>

namespace belltest {

/// One measured coincidence point: polarizer-difference angle, coincidence
/// rate (counts per accumulation window) and its 1-sigma uncertainty.
struct DataPoint {
  Angle angle;
  double rate = 0.0;
  double sigma = 0.0;
};

/// The measurable record of a polarization-correlation run.
///
/// Invariants enforced at construction:
///  - at least 3 points, angles pairwise distinct modulo pi,
///  - rate >= 0 and sigma >= 0 everywhere.
/// sigma == 0 means "treat as exact" in weighted operations.
class CoincidenceDataset {
 public:
  CoincidenceDataset(std::vector<DataPoint> points, std::string label);

  const std::vector<DataPoint>& points() const { return points_; }
  const std::string& label() const { return label_; }
  std::size_t size() const { return points_.size(); }

  /// True when the canonical angles form the uniform grid {offset + k*pi/n}.
  /// On success *n_out (if given) receives the grid size.
  bool is_uniform_grid(std::size_t* n_out = nullptr) const;

  /// Dataset with every rate multiplied by s (sigmas scaled as well).
  CoincidenceDataset scaled(double s) const;

 private:
  std::vector<DataPoint> points_;
  std::string label_;
};

/// Parses CSV with header `angle_deg,rate,sigma`. Accepts LF or CRLF.
/// Throws ParseError (with line number) on malformed rows and
/// ValidationError when the dataset invariants fail.
CoincidenceDataset load_dataset(std::istream& in, std::string label = "csv");

/// Writes the dataset in the same CSV dialect, shortest exact decimal per
/// value, so that load_dataset(write_csv(d)) == d and output is byte-stable.
void write_csv(const CoincidenceDataset& d, std::ostream& out);
std::string to_csv(const CoincidenceDataset& d);

/// The bundled 8-point reference dataset (coincidence rates vs. angle
/// between polarizers, 22.5-degree grid).
CoincidenceDataset builtin_reference_dataset();

/// Nested families of local hidden-variable models, most general first.
enum class LhvFamily { LHV0, LHV1, LHV2, LHV3, LHV4 };

const char* to_string(LhvFamily f);
LhvFamily family_from_string(const std::string& name);

/// Position in the hierarchy LHV0 > LHV1 > LHV2 > LHV3 > LHV4; larger rank
/// means a more restricted family.
int family_rank(LhvFamily f);

/// The detection efficiency entering the inequality together with the family
/// whose assumptions justify that value (e.g. 0.31 for LHV2, 0.62 for LHV3).
/// Defaults to unit efficiency in the fully general family.
class EfficiencyContext {
 public:
  EfficiencyContext() = default;
  EfficiencyContext(double eta, LhvFamily family);

  double eta() const { return eta_; }
  LhvFamily family() const { return family_; }

 private:
  double eta_ = 1.0;
  LhvFamily family_ = LhvFamily::LHV0;
};

}  // namespace belltest
