#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nib/network.hpp"
#include "nib/strategy.hpp"

namespace nib {

enum class RewardSource { EnvReward, NoveltyFiring, NoveltyFrames };
enum class StdpMode { Off, Plain, Modulated };

std::string_view to_string(RewardSource s);
std::string_view to_string(StdpMode m);

struct LearningConfig {
  // Plain: unmodulated STDP on every micro-step transition. Modulated: STDP on
  // the decision transition only, scaled by the reward signal.
  StdpMode stdp = StdpMode::Plain;
  double stdp_modulation = 1.0;   // m used by plain STDP
  bool direct_reward = true;
  double reward_scale = 1.0;      // multiplies the environment reward
  double reward_baseline = 0.0;   // subtracted after scaling
  // When > 0 the fixed baseline is replaced by a running mean of the scaled
  // reward, updated the same way as the novelty mean below.
  double reward_baseline_decay = 0.0;
  double novelty_scale = 1.0;     // kappa_N
  // When > 0 the novelty signal becomes kappa_N * (N - running mean of N),
  // with the mean tracked as m <- decay * m + (1 - decay) * N.
  double novelty_baseline_decay = 0.0;
  std::size_t consolidate_every = 1;  // episodes between consolidation calls
};

struct EvalConfig {
  std::size_t trials = 0;  // frozen-evaluation episodes after training; 0 disables
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::string environment = "xor";
  RewardSource reward_source = RewardSource::EnvReward;
  std::size_t episodes = 100;
  std::size_t max_steps = 1000;
  std::size_t steps_per_decision = 5;
  // "population" one-hot bins per observation dimension, or "direct" values
  // (image environments always use direct).
  std::string encoding = "population";
  std::size_t encoding_bins = 10;
  bool reset_activity = true;  // clear firing windows at episode start
  NetworkConfig network;       // n_input is derived from the environment
  LearningConfig learning;
  EvalConfig eval;
  std::vector<std::uint64_t> seeds = {0};
  std::filesystem::path output_dir = "runs/experiment";

  // Throws std::invalid_argument on any inconsistency.
  void validate() const;
};

// JSON (de)serialization. Unknown keys are rejected so typos surface.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);
ExperimentConfig load_config(const std::filesystem::path& path);

struct EpisodeRecord {
  std::uint64_t seed = 0;
  std::size_t episode = 0;
  std::size_t steps = 0;
  double total_reward = 0.0;
  double mean_reward = 0.0;  // per step
  double total_novelty = 0.0;
  bool goal_reached = false;
  double wall_ms = 0.0;  // not part of the reproducible log

  bool operator==(const EpisodeRecord&) const = default;
};

struct EvalRecord {
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  double accuracy = 0.0;  // mean reward per trial
  double mean_steps = 0.0;
};

// Per-seed stage selectivity for the pattern streams.
struct StageRecord {
  std::uint64_t seed = 0;
  std::size_t best_neuron = 0;
  double best_difference = 0.0;  // |rate in stage 0 - rate in stage 1|
  double rate_stage0 = 0.0;
  double rate_stage1 = 0.0;
};

struct RunCounters {
  std::size_t weight_updates = 0;          // stdp_update / direct_reward calls
  std::size_t env_reward_updates = 0;      // of which carried the environment reward
};

struct SeedResult {
  std::uint64_t seed = 0;
  std::vector<EpisodeRecord> episodes;
  std::optional<EvalRecord> eval;
  std::optional<StageRecord> stages;
  RunCounters counters;
  Network network;  // final state
};

struct ExperimentResult {
  std::vector<EpisodeRecord> records;  // seeds in config order, episodes ascending
  std::vector<EvalRecord> evals;
  std::vector<StageRecord> stages;
  RunCounters counters;
};

// Called after every training episode with the network state at that point.
using EpisodeObserver = std::function<void(const Network&, const EpisodeRecord&)>;

// Runs one seed entirely in memory.
SeedResult run_seed(const ExperimentConfig& config, std::uint64_t seed,
                    const EpisodeObserver& observer = {});

// Network configuration with the input layer sized for the environment.
NetworkConfig resolved_network_config(const ExperimentConfig& config, std::uint64_t seed);

// Runs every seed (in parallel when OpenMP is available) and persists the
// config echo, episode log, learning curves, eval results and final networks
// under config.output_dir. Throws std::runtime_error on I/O failure.
ExperimentResult run_experiment(const ExperimentConfig& config);

// Frozen evaluation: runs `trials` episodes with every learning path disabled.
EvalRecord evaluate_frozen(const ExperimentConfig& config, Network& net, std::uint64_t seed,
                           std::size_t trials);

nlohmann::json to_json(const EpisodeRecord& r);
EpisodeRecord episode_from_json(const nlohmann::json& j);

}  // namespace nib
