#include <belltest/report.hpp>

#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace belltest {

namespace {

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

ReproduceReport build_reproduce_report(std::size_t resamples,
                                       std::uint64_t seed) {
  const CoincidenceDataset data = builtin_reference_dataset();
  const Angle a90 = Angle::from_degrees(90.0);

  ReproduceReport r;
  r.fit_all = fit_cosine(data);
  r.fit_all_weighted = fit_cosine(data, {}, Weighting::inverse_variance);
  r.fit_excl90 = fit_cosine(data, {a90});
  r.pair = visibility_pair(data);
  r.lhv2 = run_inequality_test(
      data, EfficiencyContext(ReferenceValues::eta_lhv2, LhvFamily::LHV2),
      resamples, seed);
  r.lhv3 = run_inequality_test(
      data, EfficiencyContext(ReferenceValues::eta_lhv3, LhvFamily::LHV3),
      resamples, seed);

  r.predicted_r90_full = predict_rate(r.fit_all, a90);
  r.predicted_r90_excl = predict_rate(r.fit_excl90, a90);

  r.delta_psi0 = r.lhv2.delta_exp_value;
  r.delta_phase_corrected = r.lhv2.delta_exp_phase_corrected;
  r.delta_discrete_v = delta_exp(data, visibility_discrete(data));

  r.eps_approx_lhv2 = r.lhv2.eps_approx;
  r.eps_exact_lhv2 = r.lhv2.eps_exact;
  r.eps_approx_lhv3 = r.lhv3.eps_approx;
  r.eps_exact_lhv3 = r.lhv3.eps_exact;

  r.d_approx_lhv2 = r.lhv2.d_eta_approx_value.value_or(0.0);
  r.d_lower_lhv2 = r.lhv2.verdict_bound;
  r.d_lower_lhv3 = r.lhv3.d_eta_lower_bound_value;

  r.dev90 = deviation_terms(a90, ReferenceValues::eta_lhv2,
                            r.lhv2.verdict_epsilon);
  r.v_eff = v_effective(r.fit_all.visibility, ReferenceValues::eta_lhv2,
                        r.lhv2.verdict_epsilon);
  r.lhv_predicted_r90 = predicted_model_rate(
      r.fit_all, a90, ReferenceValues::eta_lhv2, r.lhv2.verdict_epsilon);

  // The hierarchy orders the families by restriction; a violated superset
  // bound refutes every more restricted family as well.
  r.lhv4_verdict = r.lhv3.verdict == Verdict::violated ? Verdict::violated
                                                       : Verdict::inconclusive;
  return r;
}

std::string reproduce_text(const ReproduceReport& r) {
  using RV = ReferenceValues;
  std::ostringstream os;
  os << "coincidence-rate analysis of the bundled reference dataset\n";
  os << "\n";
  os << "cosine-law fit  R12(phi) = A [1 + V cos(2 phi + psi)]\n";
  os << "  full dataset       V = " << fmt6(r.fit_all.visibility)
     << "  psi = " << fmt6(r.fit_all.phase.degrees())
     << " deg  A = " << fmt6(r.fit_all.mean_rate) << "   [reference V "
     << fmt6(RV::visibility) << ", psi " << fmt6(RV::phase_deg) << " deg]\n";
  os << "  weighted (1/s^2)   V = " << fmt6(r.fit_all_weighted.visibility)
     << "  psi = " << fmt6(r.fit_all_weighted.phase.degrees())
     << " deg  A = " << fmt6(r.fit_all_weighted.mean_rate) << "\n";
  os << "  90 deg excluded    V = " << fmt6(r.fit_excl90.visibility)
     << "  psi = " << fmt6(r.fit_excl90.phase.degrees())
     << " deg  A = " << fmt6(r.fit_excl90.mean_rate) << "   [reference V "
     << fmt6(RV::visibility_excl90) << "]\n";
  os << "  predicted R12(90 deg)  full fit " << fmt6(r.predicted_r90_full)
     << " [reference " << fmt6(RV::predicted_r90_full) << "]  excluded fit "
     << fmt6(r.predicted_r90_excl) << " [reference "
     << fmt6(RV::predicted_r90_excl) << "]  measured 108\n";
  os << "\n";
  os << "visibility pair\n";
  os << "  V_A = " << fmt6(r.pair.v_a) << "  V_B = " << fmt6(r.pair.v_b)
     << "  V_B/V_A = " << fmt6(r.pair.ratio) << " +- "
     << fmt6(r.pair.ratio_sigma) << "   [reference " << fmt6(RV::pair_ratio)
     << " +- " << fmt6(RV::pair_ratio_sigma) << "]\n";
  os << "\n";
  os << "cosine-law deviation statistic\n";
  os << "  delta_exp (psi = 0)     " << fmt6(r.delta_psi0) << "   [reference "
     << fmt6(RV::delta_exp) << "; see notes]\n";
  os << "  delta_exp (fitted psi)  " << fmt6(r.delta_phase_corrected) << "\n";
  os << "  delta_exp (discrete V)  " << fmt6(r.delta_discrete_v) << "\n";
  os << "\n";
  os << "epsilon of the closest LHV model\n";
  os << "  eta = " << fmt6(RV::eta_lhv2) << "   approx "
     << fmt6(r.eps_approx_lhv2.value) << " [reference "
     << fmt6(RV::eps_approx_lhv2) << "]   exact-root "
     << fmt6(r.eps_exact_lhv2.value) << " [reference "
     << fmt6(RV::eps_exact_lhv2) << "; see notes]\n";
  os << "  eta = " << fmt6(RV::eta_lhv3) << "   approx "
     << fmt6(r.eps_approx_lhv3.value) << "   exact-root "
     << fmt6(r.eps_exact_lhv3.value) << " [reference "
     << fmt6(RV::eps_exact_lhv3) << "]\n";
  os << "\n";
  os << "deviation bound D(eta)\n";
  os << "  eta = " << fmt6(RV::eta_lhv2) << "   approx form "
     << fmt6(r.d_approx_lhv2) << " [reference " << fmt6(RV::d_approx_lhv2)
     << "]   lower bound " << fmt6(r.d_lower_lhv2) << " [reference "
     << fmt6(RV::d_lower_lhv2) << "]\n";
  os << "  eta = " << fmt6(RV::eta_lhv3) << "   lower bound "
     << fmt6(r.d_lower_lhv3) << " [reference " << fmt6(RV::d_lower_lhv3)
     << "]\n";
  os << "\n";
  os << "LHV deviation profile at eta = " << fmt6(RV::eta_lhv2)
     << ", eps = " << fmt6(r.lhv2.verdict_epsilon) << "\n";
  os << "  gamma(90 deg) = " << fmt6(r.dev90.gamma) << "   [reference "
     << fmt6(RV::gamma_90) << "]\n";
  os << "  delta(90 deg) = " << fmt6(r.dev90.delta) << "   [reference "
     << fmt6(RV::delta_90) << "]\n";
  os << "  V_eff = " << fmt6(r.v_eff) << "   [reference " << fmt6(RV::v_eff)
     << "]\n";
  os << "  predicted LHV R12(90 deg) = " << fmt6(r.lhv_predicted_r90)
     << "   [reference " << fmt6(RV::lhv_predicted_r90) << "]\n";
  os << "\n";
  os << "verdicts of Delta_exp >= D(eta), lower-bound form\n";
  os << "  LHV2 (eta = " << fmt6(r.lhv2.context.eta())
     << "): " << to_string(r.lhv2.verdict) << "   (delta "
     << fmt6(r.lhv2.delta_exp_value) << " vs bound "
     << fmt6(r.lhv2.verdict_bound) << ")\n";
  os << "  LHV3 (eta = " << fmt6(r.lhv3.context.eta())
     << "): " << to_string(r.lhv3.verdict) << "   (delta "
     << fmt6(r.lhv3.delta_exp_value) << " vs bound "
     << fmt6(r.lhv3.verdict_bound) << ")\n";
  os << "  LHV4 (subset of LHV3): " << to_string(r.lhv4_verdict) << "\n";
  os << "\n";
  os << "notes\n";
  os << "  reference values are those reported by the original analysis of\n";
  os << "  this dataset; computed values are shown unmodified. The exact\n";
  os << "  epsilon condition as printed does not reproduce the reference\n";
  os << "  0.1825 at eta = 0.31 (its root there is the value shown) and is\n";
  os << "  inconsistent with its own low-efficiency limit; the verdict\n";
  os << "  bound therefore uses the low-order epsilon inside its validity\n";
  os << "  regime (eps <= 0.3) and the exact root outside it.\n";
  return os.str();
}

nlohmann::json reproduce_json(const ReproduceReport& r) {
  using RV = ReferenceValues;
  nlohmann::json j;
  j["fit"] = fit_to_json(r.fit_all);
  j["fit_weighted"] = fit_to_json(r.fit_all_weighted);
  j["fit_excluding_90deg"] = fit_to_json(r.fit_excl90);
  j["predicted_r90_full"] = r.predicted_r90_full;
  j["predicted_r90_excl"] = r.predicted_r90_excl;
  j["visibility_pair"] = {{"v_a", r.pair.v_a},
                          {"v_b", r.pair.v_b},
                          {"ratio", r.pair.ratio},
                          {"ratio_sigma", r.pair.ratio_sigma}};
  j["delta_exp"] = {{"psi0", r.delta_psi0},
                    {"phase_corrected", r.delta_phase_corrected},
                    {"discrete_v", r.delta_discrete_v}};
  j["lhv2"] = report_to_json(r.lhv2);
  j["lhv3"] = report_to_json(r.lhv3);
  j["deviation_90deg"] = {{"alpha", r.dev90.alpha},
                          {"beta", r.dev90.beta},
                          {"gamma", r.dev90.gamma},
                          {"delta", r.dev90.delta}};
  j["v_effective"] = r.v_eff;
  j["lhv_predicted_r90"] = r.lhv_predicted_r90;
  j["lhv4_verdict"] = to_string(r.lhv4_verdict);
  j["reference"] = {{"visibility", RV::visibility},
                    {"visibility_excl90", RV::visibility_excl90},
                    {"phase_deg", RV::phase_deg},
                    {"predicted_r90_full", RV::predicted_r90_full},
                    {"predicted_r90_excl", RV::predicted_r90_excl},
                    {"pair_ratio", RV::pair_ratio},
                    {"pair_ratio_sigma", RV::pair_ratio_sigma},
                    {"delta_exp", RV::delta_exp},
                    {"eps_approx_lhv2", RV::eps_approx_lhv2},
                    {"eps_exact_lhv2", RV::eps_exact_lhv2},
                    {"eps_exact_lhv3", RV::eps_exact_lhv3},
                    {"d_approx_lhv2", RV::d_approx_lhv2},
                    {"d_lower_lhv2", RV::d_lower_lhv2},
                    {"d_lower_lhv3", RV::d_lower_lhv3},
                    {"gamma_90", RV::gamma_90},
                    {"delta_90", RV::delta_90},
                    {"v_eff", RV::v_eff},
                    {"lhv_predicted_r90", RV::lhv_predicted_r90}};
  return j;
}

}  // namespace belltest
