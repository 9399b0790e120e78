#include <belltest/montecarlo.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

#include <belltest/errors.hpp>

namespace belltest {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kBoundScanPoints = 4096;
constexpr double kBoundSafety = 1.001;
constexpr int kMaxRejectionIters = 100000;

// Stream id 0 within an angle is reserved for per-angle draws (pair-count,
// quantum counts); pair j uses id j + 1.
constexpr std::uint64_t kAngleStream = 0;

}  // namespace

HiddenPairSampler::HiddenPairSampler(const LhvModel& m)
    : model_(&m), bound_(0.0) {
  double max_density = 0.0;
  for (std::size_t i = 0; i <= kBoundScanPoints; ++i) {
    const double x = -kPi / 2.0 + kPi * static_cast<double>(i) /
                                      static_cast<double>(kBoundScanPoints);
    max_density = std::max(max_density, kPi * m.rho.value(x));
  }
  bound_ = max_density * kBoundSafety;
  if (!(bound_ > 0.0)) {
    throw ValidationError("rejection bound is nonpositive; invalid model");
  }
}

std::pair<Angle, Angle> HiddenPairSampler::sample(SplitMix64& rng) const {
  const double chi1 = rng.uniform() * kPi;
  double x = 0.0;
  bool accepted = false;
  for (int i = 0; i < kMaxRejectionIters; ++i) {
    x = (rng.uniform() - 0.5) * kPi;
    if (rng.uniform() * bound_ <= kPi * model_->rho.value(x)) {
      accepted = true;
      break;
    }
  }
  if (!accepted) {
    throw NumericError("rejection sampling failed to accept");
  }
  const Angle a1 = Angle::from_radians(chi1);
  const Angle a2 = Angle::from_radians(chi1 - x).canonical();
  return {a1, a2};
}

std::pair<Angle, Angle> sample_hidden_pair(const LhvModel& m,
                                           SplitMix64& rng) {
  return HiddenPairSampler(m).sample(rng);
}

SimulationOutput simulate(const LhvModel& m, const SimulationConfig& cfg) {
  if (cfg.pairs_per_angle < 1) {
    throw ValidationError("pairs_per_angle must be >= 1");
  }
  if (cfg.angles.size() < 3) {
    throw ValidationError("simulation needs at least 3 angles");
  }
  const HiddenPairSampler sampler(m);

  std::vector<DataPoint> pts;
  std::vector<std::uint64_t> pairs, s1, s2, coins;
  for (std::size_t k = 0; k < cfg.angles.size(); ++k) {
    const double phi1 = 0.0;
    const double phi2 = -cfg.angles[k].radians();

    std::uint64_t n_pairs = cfg.pairs_per_angle;
    if (cfg.noise == NoiseModel::poisson_rates) {
      SplitMix64 angle_rng(substream_key(cfg.seed, k, kAngleStream));
      n_pairs = angle_rng.poisson(static_cast<double>(cfg.pairs_per_angle));
    }

    std::uint64_t n1 = 0, n2 = 0, n12 = 0;
    for (std::uint64_t j = 0; j < n_pairs; ++j) {
      SplitMix64 rng(substream_key(cfg.seed, k, j + 1));
      const auto [chi1, chi2] = sampler.sample(rng);
      const bool det1 =
          rng.uniform() < m.detection.value(chi1.radians() - phi1);
      const bool det2 =
          rng.uniform() < m.detection.value(chi2.radians() - phi2);
      n1 += det1;
      n2 += det2;
      n12 += det1 && det2;
    }
    pairs.push_back(n_pairs);
    s1.push_back(n1);
    s2.push_back(n2);
    coins.push_back(n12);
    pts.push_back({cfg.angles[k], static_cast<double>(n12),
                   std::sqrt(static_cast<double>(n12))});
  }
  return SimulationOutput{
      CoincidenceDataset(std::move(pts), "simulated:" + m.name),
      std::move(pairs), std::move(s1), std::move(s2), std::move(coins),
      cfg.seed};
}

CoincidenceDataset simulate_quantum(double v, Angle psi, double mean,
                                    const SimulationConfig& cfg) {
  if (!(std::fabs(v) <= 1.0)) {
    throw ValidationError("simulate_quantum requires |v| <= 1");
  }
  if (cfg.angles.size() < 3) {
    throw ValidationError("simulation needs at least 3 angles");
  }
  std::vector<DataPoint> pts;
  for (std::size_t k = 0; k < cfg.angles.size(); ++k) {
    const double lambda =
        mean *
        (1.0 + v * std::cos(2.0 * cfg.angles[k].radians() + psi.radians()));
    if (lambda < 0.0) {
      throw DomainError("negative mean rate in simulate_quantum");
    }
    SplitMix64 rng(substream_key(cfg.seed, k, kAngleStream));
    const double count = static_cast<double>(rng.poisson(lambda));
    pts.push_back({cfg.angles[k], count, std::sqrt(count)});
  }
  return CoincidenceDataset(std::move(pts), "simulated:quantum");
}

}  // namespace belltest
