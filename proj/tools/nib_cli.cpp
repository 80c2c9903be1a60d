// Command-line front end: run, summarize, stimulus, heatmap.

#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "nib/analysis.hpp"
#include "nib/experiment.hpp"
#include "nib/io.hpp"

namespace fs = std::filesystem;

namespace {

void write_image_csv(const std::vector<double>& img, std::size_t width, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  for (std::size_t p = 0; p < img.size(); ++p) {
    out << nib::format_double(img[p]) << ((p + 1) % width == 0 ? '\n' : ',');
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neurons-in-a-box experiment runner"};
  app.require_subcommand(1);

  std::string config_path, output_dir;
  auto* run = app.add_subcommand("run", "Run an experiment config");
  run->add_option("config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--output-dir", output_dir, "Override output directory (also NIB_OUTPUT_DIR)");

  std::string log_path, report_path;
  auto* summarize = app.add_subcommand("summarize", "Aggregate an episode log");
  summarize->add_option("log", log_path, "episodes.jsonl or its run directory")->required();
  summarize->add_option("-o,--out", report_path, "Write the report here instead of stdout");

  std::string network_path, prefix;
  std::size_t neuron = 0;
  nib::StimulusOptions stim;
  auto* stimulus = app.add_subcommand("stimulus", "Estimate a neuron's preferred stimulus");
  stimulus->add_option("network", network_path, "Network snapshot")->required()->check(CLI::ExistingFile);
  stimulus->add_option("--neuron", neuron, "Target neuron index")->required();
  stimulus->add_option("--samples", stim.samples, "Noise samples per round")->capture_default_str();
  stimulus->add_option("--rounds", stim.rounds, "Refinement rounds")->capture_default_str();
  stimulus->add_option("--settle", stim.settle_steps, "Steps each frame is held")->capture_default_str();
  stimulus->add_option("--seed", stim.seed, "Noise seed")->capture_default_str();
  stimulus->add_option("--out", prefix, "Output prefix (default: stimulus_<neuron>)");

  std::string heat_out;
  auto* heatmap = app.add_subcommand("heatmap", "Export the connection matrix as CSV");
  heatmap->add_option("network", network_path, "Network snapshot")->required()->check(CLI::ExistingFile);
  heatmap->add_option("out", heat_out, "Output CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      auto config = nib::load_config(config_path);
      if (const char* env = std::getenv("NIB_OUTPUT_DIR"); env && *env) config.output_dir = env;
      if (!output_dir.empty()) config.output_dir = output_dir;
      const auto result = nib::run_experiment(config);
      const auto report = nib::summarize(result.records, result.evals, config.environment);
      std::cout << report.dump(2) << '\n';
      std::cerr << "wrote " << result.records.size() << " episode records to "
                << config.output_dir.string() << '\n';
    } else if (*summarize) {
      const auto report = nib::summarize(fs::path(log_path));
      if (report_path.empty()) {
        std::cout << report.dump(2) << '\n';
      } else {
        std::ofstream out(report_path);
        if (!out) throw std::runtime_error("cannot open '" + report_path + "' for writing");
        out << report.dump(2) << '\n';
      }
    } else if (*stimulus) {
      const auto net = nib::load_network(network_path);
      const auto img = nib::preferred_stimulus(net, neuron, stim);
      if (prefix.empty()) prefix = "stimulus_" + std::to_string(neuron);
      write_image_csv(img.stimulating, img.width, prefix + "_stimulating.csv");
      write_image_csv(img.inhibitory, img.width, prefix + "_inhibitory.csv");
      std::cerr << "wrote " << prefix << "_stimulating.csv and " << prefix << "_inhibitory.csv\n";
    } else if (*heatmap) {
      const auto net = nib::load_network(network_path);
      const auto mask = nib::export_connection_heatmap(net, heat_out);
      std::cerr << "wrote " << heat_out << " and " << mask.string() << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
