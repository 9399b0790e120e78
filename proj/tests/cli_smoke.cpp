// End-to-end checks of the installed CLI: exit codes, JSON output, and
// byte-stability. Takes the binary path as argv[1].

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <json.hpp>

#include <sys/wait.h>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string g_cli;
int g_failures = 0;

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  const std::string cmd = g_cli + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) {
    std::perror("popen");
    std::exit(1);
  }
  RunResult r;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

void check(bool ok, const std::string& what) {
  std::printf("  [%s] %s\n", ok ? "ok" : "FAIL", what.c_str());
  if (!ok) ++g_failures;
}

void write(const fs::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary);
  f << content;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: cli_smoke <path-to-belltest>\n");
    return 1;
  }
  g_cli = argv[1];
  const fs::path dir = fs::temp_directory_path() / "belltest_cli_smoke";
  fs::remove_all(dir);
  fs::create_directories(dir);

  // fit on the bundled dataset
  {
    const RunResult r = run("fit --builtin");
    check(r.exit_code == 0, "fit --builtin exits 0");
    const json j = json::parse(r.out, nullptr, false);
    check(!j.is_discarded(), "fit --builtin prints JSON");
    check(std::abs(j["visibility"].get<double>() - 0.9897) <= 0.0005,
          "fit --builtin visibility near 0.9897");

    const RunResult r2 = run("fit --builtin --exclude-deg 90");
    const json j2 = json::parse(r2.out);
    check(std::abs(j2["visibility"].get<double>() - 0.9966) <= 0.0005,
          "fit --builtin --exclude-deg 90 visibility near 0.9966");
  }

  // fit on a constant synthetic dataset
  {
    const fs::path csv = dir / "constant.csv";
    write(csv,
          "angle_deg,rate,sigma\n0,50,1\n22.5,50,1\n45,50,1\n67.5,50,1\n"
          "90,50,1\n112.5,50,1\n135,50,1\n157.5,50,1\n");
    const RunResult r = run("fit " + csv.string());
    const json j = json::parse(r.out);
    check(r.exit_code == 0 && std::abs(j["visibility"].get<double>()) < 1e-9,
          "fit on constant data gives V = 0");
  }

  // validation failures exit 2
  {
    write(dir / "bad.csv", "angle_deg,rate,sigma\n0,1,0\n");
    check(run("fit " + (dir / "bad.csv").string()).exit_code == 2,
          "fit on a 1-point dataset exits 2");
    write(dir / "worse.csv", "angle_deg,rate\n0,1\n");
    check(run("fit " + (dir / "worse.csv").string()).exit_code == 2,
          "fit on a malformed header exits 2");
    check(run("fit --builtin --weighting bogus").exit_code == 2,
          "unknown weighting exits 2");
    write(dir / "zeros.csv",
          "angle_deg,rate,sigma\n0,0,1\n45,0,1\n90,0,1\n135,0,1\n");
    check(run("fit " + (dir / "zeros.csv").string()).exit_code == 3,
          "degenerate fit exits 3");
  }

  // inequality verdicts on the bundled dataset
  {
    const RunResult r62 = run("inequality --builtin --eta 0.62 --family LHV3");
    const json j62 = json::parse(r62.out);
    check(r62.exit_code == 0, "inequality exits 0 regardless of verdict");
    check(j62["verdict"] == "violated", "LHV3 verdict violated");
    check(std::abs(j62["d_eta_lower_bound"].get<double>() - 0.048) <= 0.002,
          "LHV3 lower bound near 0.048");

    const RunResult r31 = run("inequality --builtin --eta 0.31 --family LHV2");
    const json j31 = json::parse(r31.out);
    check(j31["verdict"] == "satisfied", "LHV2 verdict satisfied");
    check(std::abs(j31["d_eta_approx"].get<double>() - 0.0065) <= 0.0002,
          "LHV2 approximate bound near 0.0065");
    check(j31.contains("delta_exp_reference"),
          "builtin run reports the reference delta_exp");
  }

  // model evaluation and its validation gate
  {
    write(dir / "lhv4.json",
          R"({"rho": {"kind": "lhv4", "epsilon": 0.2},
              "detection": {"kind": "cos2", "eta_d": 0.62},
              "family": "LHV4"})");
    const RunResult ok = run("model " + (dir / "lhv4.json").string() +
                             " --out " + (dir / "model_out").string());
    check(ok.exit_code == 0, "valid lhv4 model evaluates");
    const json jm = json::parse(ok.out);
    check(jm["validation"]["passed"] == true, "validation reported as passed");
    check(jm["points"].size() == 8, "default grid has 8 angles");
    check(fs::exists(dir / "model_out" / "model_dataset.csv"),
          "model dataset CSV written");

    write(dir / "bad_model.json",
          R"({"rho": {"kind": "lhv4", "epsilon": 0.5},
              "detection": {"kind": "cos2", "eta_d": 0.62}})");
    check(run("model " + (dir / "bad_model.json").string()).exit_code == 2,
          "lhv4 with epsilon = 0.5 exits 2 at validation");
  }

  // simulation determinism and the simulate -> fit pipeline
  {
    const std::string cmd =
        "simulate --quantum 0.9966 0.31 5000 --pairs 100 --seed 7";
    const RunResult a = run(cmd);
    const RunResult b = run(cmd);
    check(a.exit_code == 0 && a.out == b.out,
          "simulate output byte-identical for a fixed seed");

    const fs::path sim_csv = dir / "sim.csv";
    write(sim_csv, a.out);
    const RunResult f = run("fit " + sim_csv.string());
    check(f.exit_code == 0, "fit consumes simulated CSV");

    write(dir / "lhv4_win.json",
          R"({"rho": {"kind": "lhv4", "epsilon": 0.333},
              "detection": {"kind": "window", "eta_d": 0.62, "w_deg": 45}})");
    const RunResult sim = run("simulate " + (dir / "lhv4_win.json").string() +
                              " --pairs 20000 --seed 3 --out " +
                              (dir / "sim_out").string());
    check(sim.exit_code == 0, "model simulation runs");
    check(fs::exists(dir / "sim_out" / "simulated_meta.json"),
          "simulation sidecar written");
    {
      std::ifstream meta(dir / "sim_out" / "simulated_meta.json");
      const json jm = json::parse(meta);
      check(jm.contains("singles1") && jm.contains("eta_overall_estimate") &&
                jm["eta_overall_estimate"].is_number(),
            "sidecar carries singles and the efficiency estimate");
    }
    const RunResult ineq =
        run("inequality " + (dir / "sim_out" / "simulated.csv").string() +
            " --eta 0.31 --family LHV2");
    check(ineq.exit_code == 0, "inequality consumes simulated model data");

    write(dir / "simcfg.json",
          R"({"pairs_per_angle": 500, "angles_deg": [0, 45, 90, 135],
              "seed": 77, "noise": "bernoulli"})");
    const RunResult cfg_run =
        run("simulate " + (dir / "lhv4_win.json").string() + " --config " +
            (dir / "simcfg.json").string() + " --json --out " +
            (dir / "cfg_out").string());
    const json jc = json::parse(cfg_run.out, nullptr, false);
    check(!jc.is_discarded() && jc["seed"] == 77,
          "simulate accepts a SimulationConfig JSON file");
    {
      std::ifstream mf(dir / "cfg_out" / "manifest.json");
      const json jm = json::parse(mf);
      check(jm["seed"] == 77 && jm["parameters"]["noise"] == "bernoulli",
            "manifest records the effective config values");
    }
  }

  // reproduce: stable, parseable, complete
  {
    const RunResult a = run("reproduce");
    const RunResult b = run("reproduce");
    check(a.exit_code == 0 && a.out == b.out,
          "reproduce output byte-identical across runs");
    check(a.out.find("0.0074") != std::string::npos,
          "reproduce shows the reference deviation value");

    const RunResult j = run("reproduce --json --out " + (dir / "rep").string());
    const json jr = json::parse(j.out, nullptr, false);
    check(!jr.is_discarded() && jr.contains("lhv2") && jr.contains("lhv3"),
          "reproduce --json parses and carries both verdict blocks");
    check(fs::exists(dir / "rep" / "reference_dataset.csv"),
          "reproduce exports the bundled dataset CSV");
    check(fs::exists(dir / "rep" / "manifest.json"), "manifest written");

    std::ifstream csv1(dir / "rep" / "reference_dataset.csv");
    std::string line;
    std::getline(csv1, line);
    check(line == "angle_deg,rate,sigma", "exported CSV carries the header");
  }

  // usage errors
  check(run("inequality --builtin").exit_code == 2,
        "missing required --eta exits 2");
  check(run("frobnicate").exit_code == 2, "unknown subcommand exits 2");

  std::printf("%s\n", g_failures == 0 ? "cli_smoke: all checks passed"
                                      : "cli_smoke: FAILURES");
  return g_failures == 0 ? 0 : 1;
}
