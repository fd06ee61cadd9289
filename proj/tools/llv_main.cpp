// llv: identify reduced depth surrogates of reference plants, compare predicted
// and measured layer gains, and search minimum-energy injection schedules.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "llv/config.hpp"
#include "llv/experiment.hpp"
#include "llv/parallel.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitStage = 2;

struct Options {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string output_dir;
  std::size_t workers = 0;
};

llv::ExperimentConfig resolve(const Options& opt) {
  llv::ExperimentConfig config;
  if (!opt.config_path.empty()) config = llv::load_config(opt.config_path);
  for (const auto& o : opt.overrides) llv::apply_override(config, o);
  if (const char* env = std::getenv("LLV_OUTPUT_DIR"); env && *env) config.output_dir = env;
  if (!opt.output_dir.empty()) config.output_dir = opt.output_dir;
  config.validate();

  std::size_t workers = 1;
  if (const char* env = std::getenv("LLV_WORKERS"); env && *env) workers = std::stoul(env);
  if (opt.workers > 0) workers = opt.workers;
  llv::set_worker_count(workers);
  return config;
}

void add_common(CLI::App* cmd, Options& opt) {
  cmd->add_option("-c,--config", opt.config_path, "Experiment config (INI)")->check(CLI::ExistingFile);
  cmd->add_option("-s,--set", opt.overrides, "Override a config field, e.g. plant.depth=8")->take_all();
  cmd->add_option("-o,--output-dir", opt.output_dir, "Output directory (overrides config and LLV_OUTPUT_DIR)");
  cmd->add_option("-j,--workers", opt.workers, "Worker threads (overrides LLV_WORKERS)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local linear surrogates of layered residual plants"};
  app.require_subcommand(1);

  Options opt;
  bool dump_config = false;
  auto* gen = app.add_subcommand("gen-data", "Generate and dump prompt bundles");
  auto* gains = app.add_subcommand("gains", "Predicted vs empirical layer gains and agreement");
  auto* control = app.add_subcommand("control", "Minimum-energy schedules vs baselines");
  auto* scaling = app.add_subcommand("scaling", "Agreement across a ladder of plant widths");
  auto* report = app.add_subcommand("report", "Summarize an existing output tree");
  for (auto* cmd : {gen, gains, control, scaling, report}) add_common(cmd, opt);
  app.add_flag("--print-config", dump_config, "Print the resolved config before running");

  CLI11_PARSE(app, argc, argv);

  llv::ExperimentConfig config;
  try {
    config = resolve(opt);
  } catch (const std::exception& e) {
    std::cerr << "error [config]: " << e.what() << '\n';
    return kExitUsage;
  }
  if (dump_config) std::cout << llv::to_ini(config);

  try {
    if (gen->parsed()) llv::cmd_gen_data(config);
    else if (gains->parsed()) llv::cmd_gains(config);
    else if (control->parsed()) llv::cmd_control(config);
    else if (scaling->parsed()) {
      const auto summary = llv::cmd_scaling(config);
      for (const auto& s : summary.per_size)
        std::cout << s.size << " mean_spearman=" << s.mean_spearman << " median_spearman=" << s.median_spearman
                  << " mean_pearson=" << s.mean_pearson << '\n';
    } else if (report->parsed()) {
      std::cout << llv::cmd_report(config);
    }
  } catch (const llv::StageError& e) {
    std::cerr << "error [" << e.stage() << "]: " << e.what() << '\n';
    return kExitStage;
  } catch (const std::exception& e) {
    std::cerr << "error [" << app.get_subcommands().front()->get_name() << "]: " << e.what() << '\n';
    return kExitStage;
  }
  return 0;
}
