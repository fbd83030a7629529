// wotsim: run scenarios, sweep deployment modes, validate scenario files and
// reduce recorded traces.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "wot/metrics/export.hpp"
#include "wot/metrics/suite.hpp"

namespace {

using namespace wot;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> loss;
  std::optional<std::string> mode;
  std::optional<std::string> out;
  std::optional<int> rounds;
  bool trace = false;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--seed", seed, "RNG seed");
    cmd.add_option("--loss", loss, "per-frame loss probability for the scenario's loss knob")->check(CLI::Range(0.0, 1.0));
    cmd.add_option("--out", out, "output directory");
    cmd.add_option("--rounds", rounds, "request rounds per client")->check(CLI::NonNegativeNumber);
    cmd.add_flag("--trace", trace, "also write trace.ndjson");
  }

  void apply(metrics::ScenarioConfig& s) const {
    if (seed) s.seed = *seed;
    if (loss) s.set_loss(*loss);
    if (mode) s.mode = sim::parse_mode(*mode);
    if (out) s.output_dir = *out;
    if (rounds) s.workload.rounds = *rounds;
    if (trace) s.write_trace = true;
  }
};

void print_summary(const metrics::RunResult& r) {
  const auto& b = r.bundle;
  std::cout << r.name << " (" << sim::to_string(r.mode) << ", seed " << r.seed << ")\n"
            << "  success rate          " << b.success_rate() << " (" << b.delivered << "/" << b.issued << ")\n"
            << "  server responses/round " << b.server_responses_per_round() << "\n";
  for (const auto& c : b.clients) std::cout << "  " << c.client << " success " << c.success_rate() << "\n";
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multihop CoAP/OSCORE/NDN caching simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  Overrides run_overrides;
  auto* run = app.add_subcommand("run", "run one scenario and export its metrics");
  run->add_option("scenario", scenario_path, "scenario YAML file")->required()->check(CLI::ExistingFile);
  run->add_option("--mode", run_overrides.mode, "deployment mode");
  run_overrides.add_to(*run);

  Overrides suite_overrides;
  std::vector<std::string> suite_modes;
  unsigned jobs = 1;
  auto* suite = app.add_subcommand("suite", "run the scenario once per deployment mode");
  suite->add_option("scenario", scenario_path, "scenario YAML file")->required()->check(CLI::ExistingFile);
  suite->add_option("--modes", suite_modes, "modes to sweep (default: all four)")->delimiter(',');
  suite->add_option("--jobs", jobs, "parallel runs")->check(CLI::PositiveNumber);
  suite_overrides.add_to(*suite);

  auto* validate = app.add_subcommand("validate", "check a scenario file without running it");
  validate->add_option("scenario", scenario_path, "scenario YAML file")->required()->check(CLI::ExistingFile);

  std::string trace_path;
  std::string reduce_out = "out";
  auto* reduce = app.add_subcommand("reduce", "turn a recorded trace.ndjson into metric files");
  reduce->add_option("trace", trace_path, "trace file")->required()->check(CLI::ExistingFile);
  reduce->add_option("--out", reduce_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) {
      auto s = metrics::load_scenario(scenario_path);
      std::cout << scenario_path << ": ok (" << s.name << ", " << sim::to_string(s.mode) << ", "
                << s.topology.build().nodes.size() << " nodes)\n";
    } else if (*run) {
      auto s = metrics::load_scenario(scenario_path);
      run_overrides.apply(s);
      auto result = metrics::run_scenario(s, true);
      print_summary(result);
      std::cout << "  wrote " << s.output_dir.string() << "\n";
    } else if (*suite) {
      auto base = metrics::load_scenario(scenario_path);
      suite_overrides.apply(base);
      std::vector<sim::Mode> modes;
      for (const auto& m : suite_modes) modes.push_back(sim::parse_mode(m));
      if (modes.empty()) modes = sim::all_modes();
      auto report = metrics::run_suite(metrics::mode_sweep(base, modes), jobs, true);
      std::filesystem::create_directories(base.output_dir);
      std::ofstream csv(base.output_dir / "suite.csv");
      if (!csv) throw metrics::ExportError("cannot write " + (base.output_dir / "suite.csv").string());
      csv << report.to_csv();
      std::cout << report.to_table();
    } else if (*reduce) {
      std::ifstream in(trace_path);
      auto bundle = metrics::reduce_ndjson(in);
      metrics::export_bundle(bundle, reduce_out);
      std::cout << trace_path << ": " << bundle.delivered << "/" << bundle.issued << " delivered, wrote " << reduce_out
                << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "wotsim: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
