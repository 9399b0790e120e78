#include <belltest/inequality.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include <json.hpp>

#include <belltest/errors.hpp>
#include <belltest/numeric.hpp>
#include <belltest/rng.hpp>

namespace belltest {

namespace {

constexpr double kRootTol = 1e-10;
constexpr double kApproxValidityLimit = 0.3;

double half_window(double eta) { return std::numbers::pi * eta / 2.0; }

double sinc_sq(double u) {
  const double s = std::sin(u) / u;
  return s * s;
}

// RMS deviation of rates[]/mean from 1 + v cos(2 phi + psi); shared by the
// public delta_exp and the resampling loop (which must not re-validate
// perturbed rates as a dataset).
double delta_from_arrays(const std::vector<double>& angles_rad,
                         const std::vector<double>& rates, double v,
                         double psi) {
  double mean = 0.0;
  for (double r : rates) mean += r;
  mean /= static_cast<double>(rates.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    const double res =
        rates[i] / mean - 1.0 - v * std::cos(2.0 * angles_rad[i] + psi);
    sum += res * res;
  }
  return std::sqrt(sum / static_cast<double>(rates.size()));
}

// Closed-form uniform-weight cosine fit on raw arrays (same math as
// fit_cosine, stripped of dataset plumbing) for the resampling loop.
double fitted_visibility(const std::vector<double>& angles_rad,
                         const std::vector<double>& rates) {
  double s1 = 0, sc = 0, ss = 0, scc = 0, sss = 0, scs = 0;
  double y1 = 0, yc = 0, ys = 0;
  const double n = static_cast<double>(rates.size());
  for (std::size_t i = 0; i < rates.size(); ++i) {
    const double c = std::cos(2.0 * angles_rad[i]);
    const double s = std::sin(2.0 * angles_rad[i]);
    sc += c; ss += s; scc += c * c; sss += s * s; scs += c * s;
    y1 += rates[i]; yc += rates[i] * c; ys += rates[i] * s;
  }
  s1 = n;
  // Cramer's rule on the 3x3 normal matrix.
  const double det = s1 * (scc * sss - scs * scs) - sc * (sc * sss - scs * ss) +
                     ss * (sc * scs - scc * ss);
  if (std::fabs(det) < 1e-12) throw FitError("singular normal equations");
  const double a =
      (y1 * (scc * sss - scs * scs) - sc * (yc * sss - scs * ys) +
       ss * (yc * scs - scc * ys)) / det;
  const double b =
      (s1 * (yc * sss - ys * scs) - y1 * (sc * sss - scs * ss) +
       ss * (sc * ys - yc * ss)) / det;
  const double c =
      (s1 * (scc * ys - yc * scs) - sc * (sc * ys - yc * ss) +
       y1 * (sc * scs - scc * ss)) / det;
  if (!(a > 0.0)) throw FitError("nonpositive fitted mean rate");
  return std::hypot(b, c) / a;
}

}  // namespace

double delta_exp(const CoincidenceDataset& d, double v,
                 std::optional<Angle> use_phase) {
  if (!d.is_uniform_grid()) {
    throw ValidationError("delta_exp requires a uniform angle grid");
  }
  if (!(v >= 0.0 && v <= 1.05)) {
    throw ValidationError("delta_exp requires 0 <= v <= 1.05");
  }
  std::vector<double> angles, rates;
  for (const auto& p : d.points()) {
    angles.push_back(p.angle.radians());
    rates.push_back(p.rate);
  }
  return delta_from_arrays(angles, rates, v,
                           use_phase ? use_phase->radians() : 0.0);
}

EpsilonSolution epsilon_approx(double v, double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw DomainError("eta must be in (0, 1]");
  }
  const double u = half_window(eta);
  const double q = v - sinc_sq(u);
  EpsilonSolution out;
  out.method = EpsilonMethod::approximate;
  out.value = q > 0.0 ? std::sqrt(q / 2.0) : 0.0;
  out.residual = 0.0;
  return out;
}

double epsilon_equation_lhs(double eps) {
  const double e2 = 2.0 * eps;
  const double num = std::numbers::pi - e2 + std::sin(e2) * std::cos(e2);
  const double den =
      std::cos(e2) * (std::numbers::pi - e2) + std::sin(e2);
  return num / den;
}

EpsilonSolution epsilon_exact(double v, double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw DomainError("eta must be in (0, 1]");
  }
  const double u = half_window(eta);
  const double rhs = v / sinc_sq(u);

  EpsilonSolution out;
  out.method = EpsilonMethod::exact_root;
  if (rhs <= 1.0) {
    // Left side starts at 1: no positive root, no violation possible.
    out.value = 0.0;
    out.residual = std::fabs(1.0 - rhs);
    return out;
  }
  const double hi = std::numbers::pi / 4.0 - 1e-6;
  if (epsilon_equation_lhs(hi) < rhs) {
    // The left side increases only up to pi/2 as eps -> pi/4; beyond that
    // the model-matching condition has no solution.
    throw NumericError(
        "epsilon equation has no root below pi/4 for these (v, eta)");
  }
  out.value = bisect_monotone(epsilon_equation_lhs, 0.0, hi, rhs, kRootTol);
  out.residual = std::fabs(epsilon_equation_lhs(out.value) - rhs);
  return out;
}

double d_eta_approx(double eta, double eps) {
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw DomainError("eta must be in (0, 1]");
  }
  if (!(eps >= 0.0)) throw DomainError("eps must be >= 0");
  const double u = half_window(eta);
  const double s2 = sinc_sq(u);
  const double radicand = 2.0 / (3.0 * eta) - 0.5 - s2 * s2;
  if (radicand < 0.0) {
    throw DomainError(
        "d_eta_approx radicand is negative; use d_eta_lower_bound");
  }
  return 8.0 * std::numbers::sqrt2 / (3.0 * std::numbers::pi) *
         std::sqrt(radicand) * eps * eps * eps;
}

double d_eta_lower_bound(double eta, double eps) {
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw DomainError("eta must be in (0, 1]");
  }
  if (!(eps >= 0.0 && eps < std::numbers::pi / 4.0)) {
    throw DomainError("eps must be in [0, pi/4)");
  }
  const double e2 = 2.0 * eps;
  const double s = std::sin(e2);
  const double num = std::numbers::sqrt2 * s * s * s;
  const double den =
      3.0 * ((std::numbers::pi - e2) * std::cos(e2) + std::sin(e2));
  return num / den * sinc_sq(std::numbers::pi * eta);
}

DeviationTerms deviation_terms(Angle phi, double eta, double eps) {
  const double f = phi.folded().radians();
  DeviationTerms t;
  t.alpha = 8.0 * eps * eps * eps / (3.0 * std::numbers::pi);
  t.beta = 2.0 * sinc_sq(half_window(eta));
  const double clamp = eta + 2.0 / std::numbers::pi * f - 1.0;
  t.gamma = clamp > 0.0 ? 2.0 * t.alpha / (eta * eta) * clamp : 0.0;
  t.delta = t.alpha * (t.beta * std::cos(2.0 * f) - 1.0) + t.gamma;
  return t;
}

double deviation_profile(Angle phi, double eta, double eps) {
  return deviation_terms(phi, eta, eps).delta;
}

double v_effective(double v, double eta, double eps) {
  const DeviationTerms t = deviation_terms(Angle{}, eta, eps);
  if (t.alpha >= 1.0) throw DomainError("v_effective requires alpha < 1");
  return (v + t.alpha * t.beta) / (1.0 - t.alpha);
}

double predicted_model_rate(const CosineFit& f, Angle phi, double eta,
                            double eps) {
  return predict_rate(f, phi) +
         f.mean_rate * deviation_profile(phi, eta, eps);
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::violated: return "violated";
    case Verdict::satisfied: return "satisfied";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

InequalityReport run_inequality_test(const CoincidenceDataset& d,
                                     const EfficiencyContext& ctx,
                                     std::size_t resamples, std::uint64_t seed,
                                     double significance_k) {
  InequalityReport rep;
  rep.context = ctx;
  rep.significance_k = significance_k;
  rep.fitted = fit_cosine(d);
  rep.delta_exp_value = delta_exp(d, rep.fitted.visibility);
  rep.delta_exp_phase_corrected =
      delta_exp(d, rep.fitted.visibility, rep.fitted.phase);

  rep.eps_approx = epsilon_approx(rep.fitted.visibility, ctx.eta());
  rep.eps_exact = epsilon_exact(rep.fitted.visibility, ctx.eta());

  rep.d_eta_approx_in_validity =
      rep.eps_approx.value <= kApproxValidityLimit;
  try {
    rep.d_eta_approx_value = d_eta_approx(ctx.eta(), rep.eps_approx.value);
  } catch (const DomainError&) {
    rep.d_eta_approx_value.reset();
  }
  rep.d_eta_lower_bound_value =
      d_eta_lower_bound(ctx.eta(), rep.eps_exact.value);

  // The verdict compares against the lower-bound form, evaluated at the
  // low-order epsilon while that solution is within its declared validity
  // (the regime the published analysis uses it in) and at the exact root
  // otherwise. The two printed epsilon conditions disagree noticeably even
  // at moderate efficiency, so the regime choice is made explicit here and
  // recorded in the report.
  rep.verdict_epsilon = rep.eps_approx.value <= kApproxValidityLimit
                            ? rep.eps_approx.value
                            : rep.eps_exact.value;
  rep.verdict_bound = d_eta_lower_bound(ctx.eta(), rep.verdict_epsilon);

  if (resamples > 0) {
    std::vector<double> angles, rates;
    for (const auto& p : d.points()) {
      angles.push_back(p.angle.radians());
      rates.push_back(p.rate);
    }
    std::vector<double> deltas(resamples);
    std::vector<double> perturbed(rates.size());
    for (std::size_t r = 0; r < resamples; ++r) {
      SplitMix64 rng(substream_key(seed, r, 0));
      for (std::size_t i = 0; i < rates.size(); ++i) {
        perturbed[i] = rates[i] + d.points()[i].sigma * rng.normal();
      }
      deltas[r] = delta_from_arrays(angles, perturbed,
                                    fitted_visibility(angles, perturbed), 0.0);
    }
    double mean = 0.0;
    for (double v : deltas) mean += v;
    mean /= static_cast<double>(resamples);
    double var = 0.0;
    for (double v : deltas) var += (v - mean) * (v - mean);
    var = resamples > 1 ? var / static_cast<double>(resamples - 1) : 0.0;
    rep.delta_exp_sigma = std::sqrt(var);
  }

  const double band =
      rep.delta_exp_sigma ? significance_k * *rep.delta_exp_sigma : 0.0;
  if (rep.delta_exp_value + band < rep.verdict_bound) {
    rep.verdict = Verdict::violated;
  } else if (rep.delta_exp_value - band >= rep.verdict_bound) {
    rep.verdict = Verdict::satisfied;
  } else {
    rep.verdict = Verdict::inconclusive;
  }
  return rep;
}

nlohmann::json report_to_json(const InequalityReport& r) {
  nlohmann::json j;
  j["delta_exp"] = r.delta_exp_value;
  j["delta_exp_phase_corrected"] = r.delta_exp_phase_corrected;
  j["delta_exp_sigma"] =
      r.delta_exp_sigma ? nlohmann::json(*r.delta_exp_sigma)
                        : nlohmann::json(nullptr);
  auto eps_json = [](const EpsilonSolution& e) {
    return nlohmann::json{
        {"value", e.value},
        {"method", e.method == EpsilonMethod::approximate ? "approximate"
                                                          : "exact_root"},
        {"residual", e.residual}};
  };
  j["eps_approx"] = eps_json(r.eps_approx);
  j["eps_exact"] = eps_json(r.eps_exact);
  j["d_eta_approx"] = r.d_eta_approx_value
                          ? nlohmann::json(*r.d_eta_approx_value)
                          : nlohmann::json(nullptr);
  j["d_eta_approx_in_validity"] = r.d_eta_approx_in_validity;
  j["d_eta_lower_bound"] = r.d_eta_lower_bound_value;
  j["verdict_bound"] = r.verdict_bound;
  j["verdict_epsilon"] = r.verdict_epsilon;
  j["significance_k"] = r.significance_k;
  j["eta"] = r.context.eta();
  j["family"] = to_string(r.context.family());
  j["verdict"] = to_string(r.verdict);
  j["fit"] = fit_to_json(r.fitted);
  return j;
}

}  // namespace belltest
