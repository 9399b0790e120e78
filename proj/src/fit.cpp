#include <belltest/fit.hpp>

#include <algorithm>
#include <array>
#include <cmath>

#include <json.hpp>

#include <belltest/errors.hpp>

namespace belltest {

namespace {

// Solves the 3x3 system M x = y in place (partial pivoting); also inverts M
// for the covariance propagation. Throws FitError on a singular system.
struct Linear3 {
  std::array<std::array<double, 3>, 3> inv{};
  std::array<double, 3> solution{};
};

Linear3 solve3(std::array<std::array<double, 3>, 3> m,
               std::array<double, 3> y) {
  std::array<std::array<double, 3>, 3> inv{};
  for (int i = 0; i < 3; ++i) inv[i][i] = 1.0;

  double scale = 0.0;
  for (const auto& row : m) {
    for (double v : row) scale = std::max(scale, std::fabs(v));
  }
  if (scale == 0.0) throw FitError("singular normal equations");

  for (int col = 0; col < 3; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 3; ++r) {
      if (std::fabs(m[r][col]) > std::fabs(m[pivot][col])) pivot = r;
    }
    if (std::fabs(m[pivot][col]) < 1e-12 * scale) {
      throw FitError("singular normal equations");
    }
    std::swap(m[pivot], m[col]);
    std::swap(inv[pivot], inv[col]);
    std::swap(y[pivot], y[col]);
    const double d = m[col][col];
    for (int c = 0; c < 3; ++c) {
      m[col][c] /= d;
      inv[col][c] /= d;
    }
    y[col] /= d;
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      const double f = m[r][col];
      for (int c = 0; c < 3; ++c) {
        m[r][c] -= f * m[col][c];
        inv[r][c] -= f * inv[col][c];
      }
      y[r] -= f * y[col];
    }
  }
  return {inv, y};
}

bool is_excluded(Angle a, const std::vector<Angle>& exclude) {
  return std::any_of(exclude.begin(), exclude.end(),
                     [&](Angle e) { return same_polarization(a, e); });
}

}  // namespace

double mean_rate(const CoincidenceDataset& d) {
  double sum = 0.0;
  for (const auto& p : d.points()) sum += p.rate;
  return sum / static_cast<double>(d.size());
}

double visibility_discrete(const CoincidenceDataset& d) {
  if (!d.is_uniform_grid()) {
    throw ValidationError("visibility_discrete requires a uniform angle grid");
  }
  const double m = mean_rate(d);
  double sum = 0.0;
  for (const auto& p : d.points()) {
    sum += p.rate * std::cos(2.0 * p.angle.radians());
  }
  return 2.0 * sum / (static_cast<double>(d.size()) * m);
}

CosineFit fit_cosine(const CoincidenceDataset& d,
                     const std::vector<Angle>& exclude, Weighting weighting) {
  std::vector<const DataPoint*> pts;
  for (const auto& p : d.points()) {
    if (!is_excluded(p.angle, exclude)) pts.push_back(&p);
  }
  if (pts.size() < 3) {
    throw ValidationError("fewer than 3 non-excluded points");
  }

  std::array<std::array<double, 3>, 3> m{};
  std::array<double, 3> y{};
  std::vector<double> weights(pts.size(), 1.0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (weighting == Weighting::inverse_variance) {
      if (pts[i]->sigma <= 0.0) {
        throw ValidationError(
            "inverse-variance weighting requires sigma > 0 on every point");
      }
      weights[i] = 1.0 / (pts[i]->sigma * pts[i]->sigma);
    }
    const double c = std::cos(2.0 * pts[i]->angle.radians());
    const double s = std::sin(2.0 * pts[i]->angle.radians());
    const std::array<double, 3> v{1.0, c, s};
    for (int r = 0; r < 3; ++r) {
      for (int col = 0; col < 3; ++col) m[r][col] += weights[i] * v[r] * v[col];
      y[r] += weights[i] * pts[i]->rate * v[r];
    }
  }

  const Linear3 sol = solve3(m, y);
  const double a = sol.solution[0];
  const double b = sol.solution[1];
  const double c = sol.solution[2];
  if (!(a > 0.0)) throw FitError("nonpositive fitted mean rate");

  CosineFit fit;
  fit.mean_rate = a;
  fit.visibility = std::hypot(b, c) / a;
  fit.phase = Angle::from_radians(std::atan2(-c, b));
  fit.excluded_angles = exclude;
  fit.weighting = weighting;

  // Covariance of (a, b, c): Minv * (sum w^2 sigma^2 v v^T) * Minv.
  std::array<std::array<double, 3>, 3> s_mat{};
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double cc = std::cos(2.0 * pts[i]->angle.radians());
    const double ss = std::sin(2.0 * pts[i]->angle.radians());
    const std::array<double, 3> v{1.0, cc, ss};
    const double w2s2 =
        weights[i] * weights[i] * pts[i]->sigma * pts[i]->sigma;
    for (int r = 0; r < 3; ++r) {
      for (int col = 0; col < 3; ++col) s_mat[r][col] += w2s2 * v[r] * v[col];
    }
  }
  std::array<std::array<double, 3>, 3> cov{};
  for (int r = 0; r < 3; ++r) {
    for (int col = 0; col < 3; ++col) {
      double acc = 0.0;
      for (int k = 0; k < 3; ++k) {
        for (int l = 0; l < 3; ++l) {
          acc += sol.inv[r][k] * s_mat[k][l] * sol.inv[col][l];
        }
      }
      cov[r][col] = acc;
    }
  }
  const double amp = std::hypot(b, c);
  if (amp > 0.0) {
    const std::array<double, 3> gv{-fit.visibility / a, b / (a * amp),
                                   c / (a * amp)};
    const std::array<double, 3> gp{0.0, c / (amp * amp), -b / (amp * amp)};
    double var_v = 0.0;
    double var_p = 0.0;
    for (int r = 0; r < 3; ++r) {
      for (int col = 0; col < 3; ++col) {
        var_v += gv[r] * cov[r][col] * gv[col];
        var_p += gp[r] * cov[r][col] * gp[col];
      }
    }
    fit.visibility_sigma = std::sqrt(std::max(var_v, 0.0));
    fit.phase_sigma_rad = std::sqrt(std::max(var_p, 0.0));
  }

  fit.residuals.reserve(pts.size());
  for (const auto* p : pts) {
    fit.residuals.push_back((p->rate - predict_rate(fit, p->angle)) / a);
  }
  return fit;
}

double predict_rate(const CosineFit& f, Angle phi) {
  return f.mean_rate *
         (1.0 + f.visibility *
                    std::cos(2.0 * phi.radians() + f.phase.radians()));
}

VisibilityPair visibility_pair(const CoincidenceDataset& d) {
  auto find = [&](double deg) -> const DataPoint& {
    const Angle target = Angle::from_degrees(deg);
    for (const auto& p : d.points()) {
      if (same_polarization(p.angle, target)) return p;
    }
    throw ValidationError("dataset is missing the required angle " +
                          std::to_string(deg) + " deg");
  };
  const DataPoint& p0 = find(0.0);
  const DataPoint& p22 = find(22.5);
  const DataPoint& p67 = find(67.5);
  const DataPoint& p90 = find(90.0);

  VisibilityPair out;
  out.v_a = (p0.rate - p90.rate) / (p0.rate + p90.rate);
  out.v_b = std::numbers::sqrt2 * (p22.rate - p67.rate) / (p22.rate + p67.rate);
  out.ratio = out.v_b / out.v_a;

  // Quotient-rule propagation with numerator and denominator treated as
  // independent; this is the convention behind the published uncertainty
  // (the fully correlated propagation gives a noticeably smaller value).
  const double sa = std::hypot(p0.sigma, p90.sigma);
  const double rel_a = std::hypot(sa / (p0.rate - p90.rate),
                                  sa / (p0.rate + p90.rate));
  const double sb = std::hypot(p22.sigma, p67.sigma);
  const double rel_b = std::hypot(sb / (p22.rate - p67.rate),
                                  sb / (p22.rate + p67.rate));
  out.ratio_sigma = std::fabs(out.ratio) * std::hypot(rel_a, rel_b);
  return out;
}

double eta_overall(double mean_coincidence, double r1, double r2) {
  if (!(r1 + r2 > 0.0)) {
    throw DomainError("eta_overall requires r1 + r2 > 0");
  }
  return 4.0 * mean_coincidence / (r1 + r2);
}

nlohmann::json fit_to_json(const CosineFit& f) {
  nlohmann::json j;
  j["mean_rate"] = f.mean_rate;
  j["visibility"] = f.visibility;
  j["visibility_sigma"] = f.visibility_sigma;
  j["phase_deg"] = f.phase.degrees();
  j["phase_sigma_deg"] = f.phase_sigma_rad * 180.0 / std::numbers::pi;
  auto excluded = nlohmann::json::array();
  for (Angle a : f.excluded_angles) excluded.push_back(a.degrees());
  j["excluded_angles_deg"] = excluded;
  j["residuals"] = f.residuals;
  j["weighting"] =
      f.weighting == Weighting::uniform ? "uniform" : "inverse_variance";
  return j;
}

}  // namespace belltest
