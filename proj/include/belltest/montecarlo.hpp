#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <belltest/dataset.hpp>
#include <belltest/lhvmodel.hpp>
#include <belltest/rng.hpp>

namespace belltest {

/// Draws hidden polarization angles (chi1, chi2): chi1 uniform on [0, pi),
/// x = chi1 - chi2 from the density pi*rho(x) on [-pi/2, pi/2] by rejection
/// against its grid-scanned maximum (4096 points, 1.001 safety factor).
class HiddenPairSampler {
 public:
  explicit HiddenPairSampler(const LhvModel& m);

  std::pair<Angle, Angle> sample(SplitMix64& rng) const;

  double rejection_bound() const { return bound_; }

 private:
  const LhvModel* model_;
  double bound_;
};

/// Convenience wrapper constructing the sampler per call.
std::pair<Angle, Angle> sample_hidden_pair(const LhvModel& m, SplitMix64& rng);

enum class NoiseModel {
  bernoulli_counts,  ///< fixed pair count per angle, Bernoulli detection
  poisson_rates      ///< pair count per angle itself Poisson-distributed
};

struct SimulationConfig {
  std::uint64_t pairs_per_angle = 0;
  std::vector<Angle> angles;
  std::uint64_t seed = 0;
  NoiseModel noise = NoiseModel::bernoulli_counts;
};

/// Simulated run output: the coincidence dataset (rate = count,
/// sigma = sqrt(count)) plus the per-angle singles counts that allow an
/// efficiency estimate downstream.
struct SimulationOutput {
  CoincidenceDataset dataset;
  std::vector<std::uint64_t> pairs;      ///< generated pairs per angle
  std::vector<std::uint64_t> singles1;   ///< arm-1 detections per angle
  std::vector<std::uint64_t> singles2;   ///< arm-2 detections per angle
  std::vector<std::uint64_t> coincidences;
  std::uint64_t seed = 0;
};

/// Event-level simulation of the model: per difference angle phi_k the arms
/// are set to phi1 = 0, phi2 = -phi_k; each side detects independently with
/// probability P(chi - phi). Deterministic in (model, config); per-pair
/// substreams make any parallel fan-out reproduce the sequential result
/// bit for bit. Needs at least 3 angles (the output dataset requires it).
SimulationOutput simulate(const LhvModel& m, const SimulationConfig& cfg);

/// Poisson counts around the cosine law mean*(1 + v cos(2 phi + psi)).
CoincidenceDataset simulate_quantum(double v, Angle psi, double mean,
                                    const SimulationConfig& cfg);

}  // namespace belltest
