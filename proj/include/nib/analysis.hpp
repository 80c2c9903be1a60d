#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <json.hpp>

#include "nib/experiment.hpp"
#include "nib/network.hpp"

namespace nib {

struct StimulusImages {
  std::size_t width = 0, height = 0;
  std::vector<double> stimulating;  // row-major, values in [0, 1]
  std::vector<double> inhibitory;
};

struct StimulusOptions {
  std::size_t samples = 1000;
  std::size_t rounds = 5;
  std::size_t settle_steps = 3;  // steps a frame is held before reading activation
  std::uint64_t seed = 0;
};

// Total pre-threshold drive of `neuron` while a frame is held on the input
// layer for `settle_steps` steps from rest, with noise neurons silenced.
double stimulus_activation(const Network& net, std::size_t neuron, std::span<const double> frame,
                           std::size_t settle_steps);

// Estimates the inputs that most excite and most inhibit a neuron. Round 0
// draws uniform noise frames; later rounds draw frames halfway between the
// previous winner and fresh noise. The images are the average of each
// round's winning frame.
// Throws std::out_of_range for a bad neuron index and std::invalid_argument
// when the input layer has no image shape.
StimulusImages preferred_stimulus(const Network& net, std::size_t neuron,
                                  const StimulusOptions& options);

// Median of a non-empty sample.
double median(std::vector<double> v);

// Aggregates an episode log (JSON lines as written by run_experiment). If an
// eval.jsonl sits next to the log its accuracies are folded in too.
// Throws std::runtime_error on unreadable or malformed input.
nlohmann::json summarize(const std::filesystem::path& log);
nlohmann::json summarize(std::span<const EpisodeRecord> records,
                         std::span<const EvalRecord> evals, std::string_view environment);

}  // namespace nib
