// belltest: command-line front end for polarization-correlation analysis --
// cosine-law fitting, the LHV inequality test, hidden-variable model
// evaluation, and seeded Monte Carlo simulation.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <belltest/dataset.hpp>
#include <belltest/errors.hpp>
#include <belltest/fit.hpp>
#include <belltest/inequality.hpp>
#include <belltest/lhvmodel.hpp>
#include <belltest/montecarlo.hpp>
#include <belltest/report.hpp>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace belltest;

namespace {

constexpr const char* kVersion = "1.0.0";

struct GlobalOpts {
  bool json_out = false;
  bool quiet = false;
  std::string out_dir;
};

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

std::string timestamp_utc() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << content;
}

// Every --out run drops a manifest next to its outputs; equal manifests
// (timestamp aside) imply byte-identical results.
void write_manifest(const GlobalOpts& g, const std::string& command,
                    const json& params, const std::string& input_digest,
                    std::optional<std::uint64_t> seed) {
  if (g.out_dir.empty()) return;
  json m;
  m["command"] = command;
  m["version"] = kVersion;
  m["parameters"] = params;
  m["input_digest"] = input_digest;
  m["seed"] = seed ? json(*seed) : json(nullptr);
  m["timestamp"] = timestamp_utc();
  write_file(fs::path(g.out_dir) / "manifest.json", m.dump(2) + "\n");
}

void prepare_out_dir(const GlobalOpts& g) {
  if (!g.out_dir.empty()) fs::create_directories(g.out_dir);
}

void emit(const GlobalOpts& g, const std::string& text) {
  if (!g.quiet) std::cout << text;
}

struct DatasetInput {
  CoincidenceDataset data;
  std::string digest;
};

DatasetInput load_input(const std::string& path, bool builtin) {
  if (builtin && !path.empty()) {
    throw ValidationError("give an input CSV path or --builtin, not both");
  }
  if (!builtin && path.empty()) {
    throw ValidationError("give an input CSV path or --builtin");
  }
  if (builtin) {
    const auto d = builtin_reference_dataset();
    return {d, fnv1a_hex(to_csv(d))};
  }
  const std::string bytes = read_file(path);
  std::istringstream is(bytes);
  return {load_dataset(is, fs::path(path).filename().string()),
          fnv1a_hex(bytes)};
}

std::vector<Angle> make_angles(const std::vector<double>& degs,
                               std::size_t grid_n) {
  std::vector<Angle> out;
  if (!degs.empty()) {
    for (double d : degs) out.push_back(Angle::from_degrees(d));
    return out;
  }
  for (std::size_t k = 0; k < grid_n; ++k) {
    out.push_back(Angle::from_degrees(180.0 * static_cast<double>(k) /
                                      static_cast<double>(grid_n)));
  }
  return out;
}

// ---------------------------------------------------------------- fit ----

int run_fit(const GlobalOpts& g, const std::string& input, bool builtin,
            const std::vector<double>& exclude_deg,
            const std::string& weighting) {
  const DatasetInput in = load_input(input, builtin);
  std::vector<Angle> exclude;
  for (double d : exclude_deg) exclude.push_back(Angle::from_degrees(d));
  const Weighting w = weighting == "inverse_variance"
                          ? Weighting::inverse_variance
                          : Weighting::uniform;
  const CosineFit fit = fit_cosine(in.data, exclude, w);
  const json jfit = fit_to_json(fit);
  emit(g, jfit.dump(2) + "\n");

  if (!g.out_dir.empty()) {
    prepare_out_dir(g);
    write_file(fs::path(g.out_dir) / "fit.json", jfit.dump(2) + "\n");

    std::ostringstream curve;
    curve << "phi_deg,rate_fit\n";
    for (int d = 0; d <= 180; ++d) {
      curve << d << ','
            << fmt6(predict_rate(fit, Angle::from_degrees(d))) << '\n';
    }
    write_file(fs::path(g.out_dir) / "fit_curve.csv", curve.str());

    std::ostringstream pointcsv;
    pointcsv << "angle_deg,rate,sigma,model,residual\n";
    std::size_t ri = 0;
    for (const auto& p : in.data.points()) {
      const bool excl = std::any_of(
          exclude.begin(), exclude.end(),
          [&](Angle e) { return same_polarization(p.angle, e); });
      pointcsv << fmt6(p.angle.degrees()) << ',' << fmt6(p.rate) << ','
               << fmt6(p.sigma) << ',' << fmt6(predict_rate(fit, p.angle))
               << ',' << (excl ? "excluded" : fmt6(fit.residuals[ri++]))
               << '\n';
    }
    write_file(fs::path(g.out_dir) / "fit_points.csv", pointcsv.str());
    write_manifest(g, "fit",
                   {{"exclude_deg", exclude_deg}, {"weighting", weighting},
                    {"builtin", builtin}},
                   in.digest, std::nullopt);
  }
  return 0;
}

// --------------------------------------------------------- inequality ----

int run_inequality(const GlobalOpts& g, const std::string& input, bool builtin,
                   double eta, const std::string& family,
                   std::size_t resamples, std::uint64_t seed, double k) {
  const DatasetInput in = load_input(input, builtin);
  const EfficiencyContext ctx(eta, family_from_string(family));
  const InequalityReport rep =
      run_inequality_test(in.data, ctx, resamples, seed, k);
  json jrep = report_to_json(rep);
  if (builtin) {
    jrep["delta_exp_reference"] = ReferenceValues::delta_exp;
  }
  emit(g, jrep.dump(2) + "\n");
  if (!g.out_dir.empty()) {
    prepare_out_dir(g);
    write_file(fs::path(g.out_dir) / "inequality.json", jrep.dump(2) + "\n");
    write_manifest(g, "inequality",
                   {{"eta", eta},
                    {"family", family},
                    {"resamples", resamples},
                    {"k", k},
                    {"builtin", builtin}},
                   in.digest, seed);
  }
  return 0;  // the verdict is data, not an error
}

// -------------------------------------------------------------- model ----

int run_model(const GlobalOpts& g, const std::string& model_path,
              const std::vector<double>& angles_deg, std::size_t grid_n,
              double production_rate) {
  const std::string bytes = read_file(model_path);
  const LhvModel model = model_from_json(json::parse(bytes));
  const ValidationReport val = validate_model(model);

  json jval = json::array();
  for (const auto& c : val.checks) {
    jval.push_back({{"name", c.name},
                    {"passed", c.passed},
                    {"worst", c.worst},
                    {"location_rad", c.location}});
  }
  if (!val.passed()) {
    const ValidationCheck* worst = val.worst_failure();
    std::cerr << "model validation failed: " << worst->name << " (worst "
              << fmt6(worst->worst) << " at x = " << fmt6(worst->location)
              << " rad)\n";
    if (!g.quiet) std::cout << jval.dump(2) << "\n";
    return 2;
  }

  const std::vector<Angle> angles = make_angles(angles_deg, grid_n);
  const CoincidenceDataset data = model_dataset(model, angles, production_rate);
  const double p1 = single_probability(model, Angle{});

  json out;
  out["model"] = model_to_json(model);
  out["validation"] = {{"passed", true}, {"checks", jval}};
  out["production_rate"] = production_rate;
  json pts = json::array();
  for (const auto& p : data.points()) {
    pts.push_back({{"angle_deg", p.angle.degrees()},
                   {"p12", p.rate / production_rate},
                   {"rate", p.rate}});
  }
  out["points"] = pts;
  out["p1"] = p1;
  out["p2"] = p1;  // both arms share the same detection function
  emit(g, out.dump(2) + "\n");

  if (!g.out_dir.empty()) {
    prepare_out_dir(g);
    write_file(fs::path(g.out_dir) / "model_dataset.csv", to_csv(data));
    write_file(fs::path(g.out_dir) / "probabilities.json", out.dump(2) + "\n");
    write_manifest(g, "model",
                   {{"angles_deg", angles_deg},
                    {"grid", grid_n},
                    {"production_rate", production_rate}},
                   fnv1a_hex(bytes), std::nullopt);
  }
  return 0;
}

// ----------------------------------------------------------- simulate ----

// JSON form of SimulationConfig:
//   {"pairs_per_angle": N, "angles_deg": [..], "seed": S,
//    "noise": "bernoulli"|"poisson"}
SimulationConfig config_from_json(const json& j) {
  SimulationConfig cfg;
  cfg.pairs_per_angle = j.value("pairs_per_angle", std::uint64_t{100000});
  cfg.seed = j.value("seed", std::uint64_t{1});
  for (double d : j.value("angles_deg", std::vector<double>{})) {
    cfg.angles.push_back(Angle::from_degrees(d));
  }
  if (cfg.angles.empty()) cfg.angles = make_angles({}, 8);
  const std::string noise = j.value("noise", "bernoulli");
  if (noise != "bernoulli" && noise != "poisson") {
    throw ValidationError("noise must be 'bernoulli' or 'poisson'");
  }
  cfg.noise = noise == "poisson" ? NoiseModel::poisson_rates
                                 : NoiseModel::bernoulli_counts;
  return cfg;
}

int run_simulate(const GlobalOpts& g, const std::string& model_path,
                 const std::vector<double>& quantum,
                 const std::string& config_path,
                 const std::vector<double>& angles_deg, std::size_t grid_n,
                 std::uint64_t pairs, bool pairs_set, std::uint64_t seed,
                 bool seed_set, const std::string& noise, bool noise_set) {
  SimulationConfig cfg;
  if (!config_path.empty()) {
    cfg = config_from_json(json::parse(read_file(config_path)));
  } else {
    cfg.angles = make_angles(angles_deg, grid_n);
  }
  // explicit flags override the config file
  if (pairs_set || config_path.empty()) cfg.pairs_per_angle = pairs;
  if (seed_set || config_path.empty()) cfg.seed = seed;
  if (!config_path.empty() && !angles_deg.empty()) {
    cfg.angles = make_angles(angles_deg, grid_n);
  }
  if (noise_set || config_path.empty()) {
    cfg.noise = noise == "poisson" ? NoiseModel::poisson_rates
                                   : NoiseModel::bernoulli_counts;
  }
  const std::uint64_t realized_seed = cfg.seed;
  const std::string effective_noise =
      cfg.noise == NoiseModel::poisson_rates ? "poisson" : "bernoulli";

  json sidecar;
  sidecar["seed"] = realized_seed;
  std::string csv;
  std::string digest = "none";

  if (!model_path.empty()) {
    const std::string bytes = read_file(model_path);
    digest = fnv1a_hex(bytes);
    const LhvModel model = model_from_json(json::parse(bytes));
    const ValidationReport val = validate_model(model);
    if (!val.passed()) {
      std::cerr << "model validation failed: " << val.worst_failure()->name
                << "\n";
      return 2;
    }
    const SimulationOutput out = simulate(model, cfg);
    csv = to_csv(out.dataset);
    sidecar["pairs"] = out.pairs;
    sidecar["singles1"] = out.singles1;
    sidecar["singles2"] = out.singles2;
    sidecar["coincidences"] = out.coincidences;
    double m12 = 0.0, m1 = 0.0, m2 = 0.0;
    for (std::size_t k = 0; k < out.coincidences.size(); ++k) {
      m12 += static_cast<double>(out.coincidences[k]);
      m1 += static_cast<double>(out.singles1[k]);
      m2 += static_cast<double>(out.singles2[k]);
    }
    sidecar["eta_overall_estimate"] =
        m1 + m2 > 0.0 ? json(eta_overall(m12 / out.coincidences.size(),
                                         m1 / out.coincidences.size(),
                                         m2 / out.coincidences.size()))
                      : json(nullptr);
  } else {
    if (quantum.size() != 3) {
      throw ValidationError(
          "--quantum needs V PSI_DEG MEAN (or give a model file)");
    }
    const CoincidenceDataset d = simulate_quantum(
        quantum[0], Angle::from_degrees(quantum[1]), quantum[2], cfg);
    csv = to_csv(d);
    sidecar["pairs"] = json::array();
    sidecar["singles1"] = json::array();
    sidecar["singles2"] = json::array();
  }

  if (g.json_out) {
    json out = sidecar;
    out["csv"] = csv;
    emit(g, out.dump(2) + "\n");
  } else {
    emit(g, csv);
  }
  if (!g.out_dir.empty()) {
    prepare_out_dir(g);
    write_file(fs::path(g.out_dir) / "simulated.csv", csv);
    write_file(fs::path(g.out_dir) / "simulated_meta.json",
               sidecar.dump(2) + "\n");
    write_manifest(g, "simulate",
                   {{"quantum", quantum},
                    {"pairs", cfg.pairs_per_angle},
                    {"noise", effective_noise},
                    {"config", config_path},
                    {"angles_deg", angles_deg},
                    {"grid", grid_n}},
                   digest, realized_seed);
  }
  return 0;
}

// ---------------------------------------------------------- reproduce ----

int run_reproduce(const GlobalOpts& g, std::size_t resamples,
                  std::uint64_t seed) {
  const ReproduceReport rep = build_reproduce_report(resamples, seed);
  const std::string text = reproduce_text(rep);
  const json jrep = reproduce_json(rep);
  emit(g, g.json_out ? jrep.dump(2) + "\n" : text);
  if (!g.out_dir.empty()) {
    prepare_out_dir(g);
    write_file(fs::path(g.out_dir) / "report.txt", text);
    write_file(fs::path(g.out_dir) / "report.json", jrep.dump(2) + "\n");
    write_file(fs::path(g.out_dir) / "reference_dataset.csv",
               to_csv(builtin_reference_dataset()));
    write_manifest(g, "reproduce", {{"resamples", resamples}},
                   fnv1a_hex(to_csv(builtin_reference_dataset())), seed);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polarization-correlation Bell-test analysis"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_flag("--json", g.json_out, "machine-readable output");
  app.add_flag("--quiet", g.quiet, "suppress stdout");
  app.add_option("--out", g.out_dir, "directory for output files");
  app.fallthrough();

  // fit
  std::string fit_input;
  bool fit_builtin = false;
  std::vector<double> fit_exclude;
  std::string fit_weighting = "uniform";
  auto* fit_cmd = app.add_subcommand("fit", "cosine-law fit of a dataset");
  fit_cmd->add_option("input", fit_input, "dataset CSV");
  fit_cmd->add_flag("--builtin", fit_builtin, "use the bundled dataset");
  fit_cmd->add_option("--exclude-deg", fit_exclude,
                      "angles (deg) to exclude from the fit");
  fit_cmd->add_option("--weighting", fit_weighting,
                      "uniform|inverse_variance")
      ->check(CLI::IsMember({"uniform", "inverse_variance"}));

  // inequality
  std::string ineq_input;
  bool ineq_builtin = false;
  double ineq_eta = 0.0;
  std::string ineq_family = "LHV1";
  std::size_t ineq_resamples = 0;
  std::uint64_t ineq_seed = 1;
  double ineq_k = 3.0;
  auto* ineq_cmd =
      app.add_subcommand("inequality", "LHV inequality test on a dataset");
  ineq_cmd->add_option("input", ineq_input, "dataset CSV");
  ineq_cmd->add_flag("--builtin", ineq_builtin, "use the bundled dataset");
  ineq_cmd->add_option("--eta", ineq_eta, "detection efficiency in (0,1]")
      ->required();
  ineq_cmd->add_option("--family", ineq_family, "LHV0..LHV4 label");
  ineq_cmd->add_option("--resamples", ineq_resamples,
                       "Gaussian resamples for the delta_exp uncertainty");
  ineq_cmd->add_option("--seed", ineq_seed, "resampling seed");
  ineq_cmd->add_option("--k", ineq_k, "significance multiplier");

  // model
  std::string model_path;
  std::vector<double> model_angles;
  std::size_t model_grid = 8;
  double model_rate = 10000.0;
  auto* model_cmd =
      app.add_subcommand("model", "evaluate an LHV model file by quadrature");
  model_cmd->add_option("model", model_path, "model JSON file")->required();
  model_cmd->add_option("--angles-deg", model_angles, "difference angles");
  model_cmd->add_option("--grid", model_grid, "uniform grid size");
  model_cmd->add_option("--production-rate", model_rate,
                        "pair production rate");

  // simulate
  std::string sim_model;
  std::vector<double> sim_quantum;
  std::vector<double> sim_angles;
  std::size_t sim_grid = 8;
  std::uint64_t sim_pairs = 100000;
  std::uint64_t sim_seed = 1;
  std::string sim_noise = "bernoulli";
  auto* sim_cmd =
      app.add_subcommand("simulate", "seeded Monte Carlo photon-pair run");
  sim_cmd->add_option("model", sim_model, "model JSON file");
  std::string sim_config;
  sim_cmd->add_option("--config", sim_config,
                      "SimulationConfig JSON file (flags override it)");
  sim_cmd->add_option("--quantum", sim_quantum,
                      "V PSI_DEG MEAN: simulate the cosine law instead")
      ->expected(3);
  sim_cmd->add_option("--angles-deg", sim_angles, "difference angles");
  sim_cmd->add_option("--grid", sim_grid, "uniform grid size");
  sim_cmd->add_option("--pairs", sim_pairs, "photon pairs per angle");
  sim_cmd->add_option("--seed", sim_seed, "RNG seed");
  sim_cmd->add_option("--noise", sim_noise, "bernoulli|poisson")
      ->check(CLI::IsMember({"bernoulli", "poisson"}));

  // reproduce
  std::size_t rep_resamples = 0;
  std::uint64_t rep_seed = 1;
  auto* rep_cmd = app.add_subcommand(
      "reproduce", "consolidated analysis of the bundled dataset");
  rep_cmd->add_option("--resamples", rep_resamples,
                      "resamples for delta_exp uncertainties");
  rep_cmd->add_option("--seed", rep_seed, "resampling seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*fit_cmd) {
      return run_fit(g, fit_input, fit_builtin, fit_exclude, fit_weighting);
    }
    if (*ineq_cmd) {
      return run_inequality(g, ineq_input, ineq_builtin, ineq_eta,
                            ineq_family, ineq_resamples, ineq_seed, ineq_k);
    }
    if (*model_cmd) {
      return run_model(g, model_path, model_angles, model_grid, model_rate);
    }
    if (*sim_cmd) {
      return run_simulate(g, sim_model, sim_quantum, sim_config, sim_angles,
                          sim_grid, sim_pairs, sim_cmd->count("--pairs") > 0,
                          sim_seed, sim_cmd->count("--seed") > 0, sim_noise,
                          sim_cmd->count("--noise") > 0);
    }
    if (*rep_cmd) {
      return run_reproduce(g, rep_resamples, rep_seed);
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
