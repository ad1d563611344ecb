// Command-line front end: run experiments, emit reference inputs, self-test.
//
// Exit codes: 0 success, 1 usage error, 2 config/validation error,
// 3 runtime failure.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "abandit/bandit.hpp"
#include "abandit/error.hpp"
#include "abandit/harness.hpp"
#include "abandit/selftest.hpp"

namespace fs = std::filesystem;
using namespace abandit;

namespace {

constexpr int kUsage = 1;
constexpr int kInvalid = 2;
constexpr int kRuntime = 3;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

int cmd_reference(const fs::path& out_dir) {
  fs::create_directories(out_dir);
  const auto [d1, d2] = make_reference_instances();
  write_text(out_dir / "risky-better.ini", format_instance(d1));
  write_text(out_dir / "safe-better.ini", format_instance(d2));

  harness::ExperimentConfig cfg;
  cfg.robot.refit_period = 5;
  for (const auto* inst : {&d1, &d2}) {
    cfg.instance = *inst;
    cfg.output_dir = "results/" + inst->name();
    const fs::path path = out_dir / ("config-" + inst->name() + ".ini");
    write_text(path, harness::format_config(cfg));
    std::cout << "wrote " << path.string() << "\n";
  }
  return 0;
}

int cmd_run(const fs::path& config, const std::optional<fs::path>& out,
            const std::optional<std::uint64_t>& seed, const std::optional<std::size_t>& trials,
            const std::optional<std::size_t>& horizon, const std::optional<std::size_t>& threads) {
  harness::ExperimentConfig cfg = harness::load_config(config);
  if (const char* env = std::getenv(harness::kOutputDirEnv); env != nullptr && *env != '\0') {
    cfg.output_dir = env;
  }
  if (out) cfg.output_dir = *out;
  if (seed) cfg.master_seed = *seed;
  if (trials) cfg.trials = *trials;
  if (horizon) cfg.horizon = *horizon;
  if (threads) cfg.threads = *threads;
  cfg.validate();

  const auto run = harness::run_experiment(cfg);
  harness::write_outputs(run, cfg.output_dir);
  std::cout << harness::render_report(run.summary);
  std::cout << "\noutputs written to " << cfg.output_dir.string() << "\n";
  return 0;
}

int cmd_selftest() {
  bool ok = true;
  for (const auto& c : run_selftest()) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name;
    if (!c.passed) std::cout << ": " << c.detail;
    std::cout << "\n";
    ok = ok && c.passed;
  }
  return ok ? 0 : kRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Assistive multi-armed bandit simulator"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a paired multi-agent experiment");
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<std::size_t> horizon;
  std::optional<std::size_t> threads;
  run->add_option("--config", config, "Experiment config (INI)")->required();
  run->add_option("--out", out, "Output directory (overrides config)");
  run->add_option("--seed", seed, "Master seed (overrides config)");
  run->add_option("--trials", trials, "Number of trials (overrides config)");
  run->add_option("--horizon", horizon, "Steps per trial (overrides config)");
  run->add_option("--threads", threads, "Worker threads, 0 = all cores");

  auto* reference = app.add_subcommand("reference", "Write the reference instances and configs");
  std::string ref_out = ".";
  reference->add_option("--out", ref_out, "Destination directory");

  auto* selftest = app.add_subcommand("selftest", "Run the built-in analytic checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    if (*run) {
      std::optional<fs::path> out_path;
      if (out) out_path = *out;
      return cmd_run(config, out_path, seed, trials, horizon, threads);
    }
    if (*reference) return cmd_reference(ref_out);
    if (*selftest) return cmd_selftest();
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}
