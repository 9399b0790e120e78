#include <belltest/lhvmodel.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

#include <json.hpp>

#include <belltest/errors.hpp>
#include <belltest/numeric.hpp>

namespace belltest {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr double kInnerTol = 1e-11;
constexpr double kOuterTol = 5e-10;
constexpr double kNormTol = 1e-8;
constexpr double kEvenTol = 1e-12;
constexpr double kNonnegTol = 1e-12;

// Fold into [-pi/2, pi/2] (period pi).
double fold_sym(double x) {
  double r = std::fmod(x + kHalfPi, kPi);
  if (r < 0.0) r += kPi;
  return r - kHalfPi;
}

}  // namespace

double lhv4_density(double epsilon, double x_rad) {
  return (1.0 + (1.0 + epsilon) * std::cos(2.0 * x_rad) +
          epsilon * std::cos(4.0 * x_rad)) /
         (kPi * kPi);
}

double RhoSpec::value(double x_rad) const {
  switch (kind) {
    case Kind::uniform:
      return 1.0 / (kPi * kPi);
    case Kind::lhv4:
      return lhv4_density(epsilon, x_rad);
    case Kind::grid: {
      const double x = fold_sym(x_rad);
      const std::size_t n = samples.size();
      const double t = (x + kHalfPi) / kPi * static_cast<double>(n - 1);
      const std::size_t i =
          std::min(static_cast<std::size_t>(t), n - 2);
      const double frac = t - static_cast<double>(i);
      return samples[i] * (1.0 - frac) + samples[i + 1] * frac;
    }
  }
  return 0.0;
}

double DetectionSpec::value(double x_rad) const {
  switch (kind) {
    case Kind::cos2: {
      const double c = std::cos(x_rad);
      return eta_d * c * c;
    }
    case Kind::window:
      return std::fabs(fold_sym(x_rad)) <= half_width.radians() ? eta_d : 0.0;
  }
  return 0.0;
}

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const ValidationCheck& c) { return c.passed; });
}

const ValidationCheck* ValidationReport::worst_failure() const {
  const ValidationCheck* worst = nullptr;
  for (const auto& c : checks) {
    if (!c.passed && (!worst || c.worst > worst->worst)) worst = &c;
  }
  return worst;
}

ValidationReport validate_model(const LhvModel& m, std::size_t grid_points) {
  if (grid_points < 64) {
    throw ValidationError("validation grid needs at least 64 points");
  }
  ValidationReport rep;
  const std::size_t n = grid_points;

  auto scan = [&](auto&& f, auto&& violation) {
    ValidationCheck c;
    c.passed = true;
    for (std::size_t i = 0; i <= n; ++i) {
      const double x = -kHalfPi + kPi * static_cast<double>(i) /
                                      static_cast<double>(n);
      const double v = violation(f(x), f(-x));
      if (v > c.worst) {
        c.worst = v;
        c.location = x;
      }
    }
    return c;
  };

  auto rho = [&](double x) { return m.rho.value(x); };
  auto det = [&](double x) { return m.detection.value(x); };

  {
    auto c = scan(rho, [](double fx, double) {
      return fx < -kNonnegTol ? -fx : 0.0;
    });
    c.name = "rho_nonnegative";
    c.passed = c.worst == 0.0;
    rep.checks.push_back(c);
  }
  {
    auto c = scan(rho, [](double fx, double fmx) {
      const double d = std::fabs(fx - fmx);
      return d > kEvenTol ? d : 0.0;
    });
    c.name = "rho_even";
    c.passed = c.worst == 0.0;
    rep.checks.push_back(c);
  }
  {
    ValidationCheck c{.name = "rho_normalization"};
    const double integral = integrate(rho, -kHalfPi, kHalfPi, 1e-10);
    const double dev = std::fabs(integral - 1.0 / kPi);
    c.worst = dev > kNormTol ? dev : 0.0;
    c.passed = c.worst == 0.0;
    rep.checks.push_back(c);
  }
  {
    auto c = scan(det, [](double fx, double) {
      if (fx < -kNonnegTol) return -fx;
      if (fx > 1.0 + kNonnegTol) return fx - 1.0;
      return 0.0;
    });
    c.name = "detection_bounds";
    c.passed = c.worst == 0.0;
    rep.checks.push_back(c);
  }
  {
    auto c = scan(det, [](double fx, double fmx) {
      const double d = std::fabs(fx - fmx);
      return d > kEvenTol ? d : 0.0;
    });
    c.name = "detection_even";
    c.passed = c.worst == 0.0;
    rep.checks.push_back(c);
  }
  return rep;
}

double coincidence_probability(const LhvModel& m, Angle phi1, Angle phi2) {
  const double p1 = phi1.radians();
  const double p2 = phi2.radians();
  const bool window = m.detection.kind == DetectionSpec::Kind::window;
  const double w = m.detection.half_width.radians();
  const double eta_d = m.detection.eta_d;

  // Convolution over the hidden-angle difference x at fixed chi1. For the
  // window form the detection restricts x to an interval, where the
  // integrand is smooth; integrating over that support keeps the composite
  // rule fast.
  auto inner = [&](double chi1) {
    if (window) {
      const double c = chi1 - p2;
      return eta_d *
             integrate([&](double x) { return m.rho.value(x); }, c - w, c + w,
                       kInnerTol);
    }
    return integrate(
        [&](double x) {
          return m.rho.value(x) * m.detection.value(chi1 - x - p2);
        },
        -kHalfPi, kHalfPi, kInnerTol);
  };

  if (window) {
    return eta_d * integrate(inner, p1 - w, p1 + w, kOuterTol);
  }
  return integrate(
      [&](double chi1) { return m.detection.value(chi1 - p1) * inner(chi1); },
      0.0, kPi, kOuterTol);
}

double single_probability(const LhvModel& m, Angle /*phi*/) {
  // rho integrates out over the unused hidden angle; what remains is the
  // rho normalization times the detection average over one period.
  const double q_rho =
      integrate([&](double x) { return m.rho.value(x); }, -kHalfPi, kHalfPi,
                kInnerTol);
  double det_integral = 0.0;
  if (m.detection.kind == DetectionSpec::Kind::window) {
    det_integral = m.detection.eta_d * 2.0 * m.detection.half_width.radians();
  } else {
    det_integral = integrate([&](double x) { return m.detection.value(x); },
                             0.0, kPi, kInnerTol);
  }
  return q_rho * det_integral;
}

CoincidenceDataset model_dataset(const LhvModel& m,
                                 const std::vector<Angle>& angles,
                                 double production_rate) {
  if (!(production_rate > 0.0)) {
    throw ValidationError("production_rate must be > 0");
  }
  std::vector<DataPoint> pts;
  pts.reserve(angles.size());
  for (Angle a : angles) {
    pts.push_back(
        {a, production_rate * coincidence_probability(m, a, Angle{}), 0.0});
  }
  return CoincidenceDataset(std::move(pts), m.name);
}

CoincidenceDataset quantum_dataset(double v, Angle psi, double mean,
                                   const std::vector<Angle>& angles) {
  if (!(std::fabs(v) <= 1.0)) {
    throw ValidationError("quantum_dataset requires |v| <= 1");
  }
  if (!(mean > 0.0)) throw ValidationError("mean must be > 0");
  std::vector<DataPoint> pts;
  pts.reserve(angles.size());
  for (Angle a : angles) {
    const double rate =
        mean * (1.0 + v * std::cos(2.0 * a.radians() + psi.radians()));
    pts.push_back({a, std::max(rate, 0.0), 0.0});
  }
  return CoincidenceDataset(std::move(pts), "quantum");
}

LhvModel model_from_json(const nlohmann::json& j) {
  LhvModel m;
  try {
    const auto& rho = j.at("rho");
    const std::string rk = rho.at("kind").get<std::string>();
    if (rk == "uniform") {
      m.rho.kind = RhoSpec::Kind::uniform;
    } else if (rk == "lhv4") {
      m.rho.kind = RhoSpec::Kind::lhv4;
      m.rho.epsilon = rho.at("epsilon").get<double>();
    } else if (rk == "grid") {
      m.rho.kind = RhoSpec::Kind::grid;
      m.rho.samples = rho.at("samples").get<std::vector<double>>();
      if (m.rho.samples.size() < 2) {
        throw ValidationError("grid rho needs at least 2 samples");
      }
      if (std::fabs(m.rho.samples.front() - m.rho.samples.back()) >
          1e-9 * std::max(1.0, std::fabs(m.rho.samples.front()))) {
        throw ValidationError(
            "grid rho endpoints cover the same point modulo the period and "
            "must match");
      }
      if (rho.value("renormalize", false)) {
        // The interpolant is piecewise linear, so the trapezoid rule over
        // the knots integrates it exactly; rescale to hit 1/pi.
        const std::size_t n = m.rho.samples.size();
        double integral = 0.5 * (m.rho.samples.front() + m.rho.samples.back());
        for (std::size_t i = 1; i + 1 < n; ++i) integral += m.rho.samples[i];
        integral *= kPi / static_cast<double>(n - 1);
        if (!(integral > 0.0)) {
          throw ValidationError("grid rho integrates to a nonpositive value");
        }
        const double s = 1.0 / (kPi * integral);
        for (double& v : m.rho.samples) v *= s;
      }
    } else {
      throw ValidationError("unknown rho kind '" + rk + "'");
    }

    const auto& det = j.at("detection");
    const std::string dk = det.at("kind").get<std::string>();
    if (dk == "cos2") {
      m.detection.kind = DetectionSpec::Kind::cos2;
    } else if (dk == "window") {
      m.detection.kind = DetectionSpec::Kind::window;
      m.detection.half_width =
          Angle::from_degrees(det.at("w_deg").get<double>());
      if (!(m.detection.half_width.radians() > 0.0 &&
            m.detection.half_width.radians() <= kHalfPi)) {
        throw ValidationError("window half-width must be in (0, 90] degrees");
      }
    } else {
      throw ValidationError("unknown detection kind '" + dk + "'");
    }
    m.detection.eta_d = det.at("eta_d").get<double>();
    if (!(m.detection.eta_d >= 0.0 && m.detection.eta_d <= 1.0)) {
      throw ValidationError("eta_d must be in [0, 1]");
    }

    if (j.contains("family")) {
      m.family = family_from_string(j.at("family").get<std::string>());
    }
    if (j.contains("name")) m.name = j.at("name").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("model file: ") + e.what());
  }
  return m;
}

nlohmann::json model_to_json(const LhvModel& m) {
  nlohmann::json j;
  switch (m.rho.kind) {
    case RhoSpec::Kind::uniform:
      j["rho"] = {{"kind", "uniform"}};
      break;
    case RhoSpec::Kind::lhv4:
      j["rho"] = {{"kind", "lhv4"}, {"epsilon", m.rho.epsilon}};
      break;
    case RhoSpec::Kind::grid:
      j["rho"] = {{"kind", "grid"}, {"samples", m.rho.samples}};
      break;
  }
  if (m.detection.kind == DetectionSpec::Kind::cos2) {
    j["detection"] = {{"kind", "cos2"}, {"eta_d", m.detection.eta_d}};
  } else {
    j["detection"] = {{"kind", "window"},
                      {"eta_d", m.detection.eta_d},
                      {"w_deg", m.detection.half_width.degrees()}};
  }
  j["family"] = to_string(m.family);
  j["name"] = m.name;
  return j;
}

}  // namespace belltest
