// lab: scenario runner and sampling front end.
#include <chrono>
#include <ctime>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "gibbslab/parallel.hpp"
#include "gibbslab/scenario.hpp"

namespace fs = std::filesystem;
using namespace gibbslab;

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Inline JSON or a path to a JSON file.
Json load_json(const std::string& arg) {
  if (fs::exists(arg)) return Json::parse(read_file(arg));
  return Json::parse(arg);
}

void write_header(const fs::path& out, const std::string& command, std::uint64_t seed) {
  Json h;
  h["command"] = command;
  h["timestamp"] = utc_now();
  h["threads"] = max_threads();
  h["seed"] = seed;
  write_file((out / "run_header.json").string(), h.dump(2) + "\n");
}

Window window_from(const ModelParams& params, const std::string& geometry, const BoundaryCondition& bc,
                   int alphabet) {
  // "16" or "16x16"; every axis must agree
  int side = -1;
  std::size_t pos = 0;
  int axes = 0;
  while (pos <= geometry.size()) {
    const auto next = geometry.find('x', pos);
    const int s = std::stoi(geometry.substr(pos, next == std::string::npos ? std::string::npos : next - pos));
    if (side >= 0 && s != side) throw std::invalid_argument("windows must be cubes");
    side = s;
    ++axes;
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  if (axes != 1 && axes != params.d) throw std::invalid_argument("geometry has the wrong number of axes");
  return Window(params.d, side, bc.geometry, alphabet);
}

}  // namespace

int main(int argc, char** argv) {
  configure_threads_from_env();
  CLI::App app{"lab: exact and sampled experiments on lattice Gibbs measures"};
  app.require_subcommand(1);

  std::string spec_path, out_dir = "lab_out";
  std::uint64_t seed = 0;
  bool seed_given = false;

  std::vector<CLI::App*> scenario_cmds;
  for (const auto& name : scenario_names()) {
    auto* cmd = app.add_subcommand(name, "run the " + name + " scenario");
    cmd->add_option("--spec", spec_path, "experiment spec (JSON file)")->required();
    cmd->add_option("--seed", seed, "run seed (overrides the spec)")->each([&](const std::string&) { seed_given = true; });
    cmd->add_option("--out", out_dir, "output directory");
    scenario_cmds.push_back(cmd);
  }

  std::string sweep_scenario, param;
  std::vector<double> grid;
  auto* sweep = app.add_subcommand("sweep", "run a scenario over a parameter grid");
  sweep->add_option("scenario", sweep_scenario)->required()->check(CLI::IsMember(scenario_names()));
  sweep->add_option("--spec", spec_path)->required();
  sweep->add_option("--param", param)->required()->check(CLI::IsMember({"beta", "n", "epsilon", "lambda"}));
  sweep->add_option("--grid", grid, "grid values")->required()->delimiter(',');
  sweep->add_option("--seed", seed)->each([&](const std::string&) { seed_given = true; });
  sweep->add_option("--out", out_dir);

  std::string model_config, geometry = "8", boundary = "free", kernel = "heat-bath";
  std::uint64_t sweeps = 1000, samples = 100, chains = 1, between = 1;
  auto* sample = app.add_subcommand("sample", "run Glauber chains and store the configurations");
  sample->add_option("--model-config", model_config, "model JSON (inline or file)")->required();
  sample->add_option("--geometry", geometry, "window side, e.g. 16 or 16x16");
  sample->add_option("--boundary", boundary, "plus, minus, free, periodic or symbol:k");
  sample->add_option("--sweeps", sweeps, "burn-in sweeps");
  sample->add_option("--between", between, "sweeps between stored samples");
  sample->add_option("--samples", samples, "stored samples per chain");
  sample->add_option("--chains", chains);
  sample->add_option("--kernel", kernel)->check(CLI::IsMember({"heat-bath", "metropolis"}));
  sample->add_option("--seed", seed);
  sample->add_option("--out", out_dir);

  auto* enumerate = app.add_subcommand("enumerate", "export the exact finite-volume Gibbs measure");
  enumerate->add_option("--model-config", model_config)->required();
  enumerate->add_option("--geometry", geometry);
  enumerate->add_option("--boundary", boundary);
  enumerate->add_option("--out", out_dir);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    const fs::path out(out_dir);
    fs::create_directories(out);

    for (auto* cmd : scenario_cmds) {
      if (!cmd->parsed()) continue;
      const Json spec = Json::parse(read_file(spec_path));
      if (!seed_given) seed = spec.value("seed", std::uint64_t{0});
      const auto r = run_scenario(cmd->get_name(), spec, seed);
      write_file((out / "report.json").string(), r.report.dump(2) + "\n");
      for (const auto& [name, csv] : r.tables) write_file((out / name).string(), csv);
      write_header(out, cmd->get_name(), seed);
      std::cout << cmd->get_name() << " (seed " << seed << ", threads " << max_threads() << ")\n"
                << r.summary << "exit " << r.exit_code << "\n";
      return r.exit_code;
    }

    if (sweep->parsed()) {
      const Json spec = Json::parse(read_file(spec_path));
      if (!seed_given) seed = spec.value("seed", std::uint64_t{0});
      const auto r = run_sweep(sweep_scenario, spec, param, grid, seed);
      write_file((out / "report.json").string(), r.report.dump(2) + "\n");
      write_file((out / "sweep.csv").string(), r.csv);
      write_header(out, "sweep " + sweep_scenario, seed);
      std::cout << sweep_scenario << " sweep over " << param << "\n" << r.summary << "exit " << r.exit_code << "\n";
      return r.exit_code;
    }

    const auto params = parse_model(load_json(model_config));
    const auto pot = make_potential(params);
    const auto bc = parse_boundary(boundary, pot.alphabet());
    const Window w = window_from(params, geometry, bc, pot.alphabet());

    if (sample->parsed()) {
      ChainConfig cfg(w, bc.boundary, pot);
      cfg.burnin = sweeps;
      cfg.between = between;
      cfg.samples = samples;
      cfg.chains = chains;
      cfg.seed = seed;
      cfg.kernel = parse_kernel(kernel);
      const auto set = run_chains(cfg);
      write_file((out / "samples.txt").string(), write_sample_set(set));
      write_header(out, "sample", seed);
      std::cout << "stored " << set.samples.size() << " configurations of " << w.size() << " sites in "
                << (out / "samples.txt").string() << "\n";
      return kExitPass;
    }

    const auto mu = gibbs_kernel(pot, w, bc.boundary);
    write_file((out / "measure.txt").string(), export_measure(mu));
    write_header(out, "enumerate", 0);
    std::cout << mu.probs.size() << " states, log Z = " << format_double(mu.log_z) << "\n";
    return kExitPass;
  } catch (const std::exception& e) {
    std::cerr << "lab: " << e.what() << "\n";
    return kExitUsage;
  }
}
