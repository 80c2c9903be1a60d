#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "nib/firing_state.hpp"
#include "nib/matrix.hpp"
#include "nib/random.hpp"
#include "nib/strategy.hpp"

namespace nib {

enum class NeuronRole : std::uint8_t { Input, Noise, Hidden, Output, Reward };

std::string_view to_string(NeuronRole r);
NeuronRole parse_neuron_role(std::string_view name);

struct Position {
  double x = 0.0, y = 0.0, z = 0.0;
  bool operator==(const Position&) const = default;
};

double distance(const Position& a, const Position& b);

// exp(-d / lambda); 1 for every d when lambda is infinite.
double connection_probability(double d, double lambda);

struct NetworkConfig {
  std::size_t n_input = 100;
  std::size_t n_noise = 50;
  std::size_t n_hidden = 600;
  std::size_t n_output = 50;
  bool reward_neuron = false;

  // Image layout of the input layer; 0 x 0 means not an image.
  std::size_t input_width = 0;
  std::size_t input_height = 0;

  double connection_scale = 0.25;  // lambda, box units; infinity gives full connectivity
  double output_distance = 0.8;    // depth of the output plane from the input face
  double firing_threshold = 1.0;
  double noise_rate = 0.05;
  double learning_rate = 0.01;
  double c_max = 4.0;
  double init_strength_scale = 0.5;

  RewardStrategy reward_strategy = RewardStrategy::ActionInputsBothFired;
  MemoryMode memory_mode = MemoryMode::Off;
  std::optional<double> consolidation_threshold;  // tau_A; defaults to 50 * learning_rate
  double consolidation_sigma = 1.0;      // k
  double aging_rate = 1e-4;              // epsilon for uniform aging

  std::uint64_t seed = 0;

  double effective_consolidation_threshold() const noexcept {
    return consolidation_threshold.value_or(50.0 * learning_rate);
  }

  std::size_t neuron_count() const noexcept {
    return n_input + n_noise + n_hidden + n_output + (reward_neuron ? 1 : 0);
  }

  // Throws std::invalid_argument describing the first violated constraint.
  void validate() const;
};

// A spatially embedded network of binary threshold neurons.
//
// Invariants maintained by every mutating operation in this library:
//   - connections(i, i) == 0 and plasticity(i, i) == 0
//   - |connections(i, j)| <= c_max
//   - plasticity in [0, 1]; change accumulator >= 0
//   - column j of connections is zero when j is an Input or Noise neuron
//   - edges(i, j) == 0 implies connections(i, j) == 0 and plasticity(i, j) == 0
class Network {
public:
  Network() = default;

  // Empty network (no connections) with the given roles. Used by tests and by
  // build_topology.
  Network(std::vector<NeuronRole> roles, double firing_threshold, double c_max,
          double noise_rate, std::uint64_t seed);

  std::size_t size() const noexcept { return roles_.size(); }
  NeuronRole role(std::size_t i) const noexcept { return roles_[i]; }
  std::span<const NeuronRole> roles() const noexcept { return roles_; }

  std::span<const std::uint32_t> indices(NeuronRole r) const noexcept {
    return by_role_[static_cast<std::size_t>(r)];
  }
  std::size_t count(NeuronRole r) const noexcept { return indices(r).size(); }
  bool has_reward_neuron() const noexcept { return count(NeuronRole::Reward) > 0; }
  std::uint32_t reward_index() const;

  // Adds (or overwrites) the directed edge i -> j as a fully plastic
  // connection. Rejects self-connections and edges into Input/Noise neurons.
  void connect(std::size_t i, std::size_t j, double strength);

  // Advances one timestep. external_input has one value per Input neuron, in
  // index order; an input neuron fires iff its value exceeds 0.5.
  const FiringState& step(std::span<const double> external_input);

  // Forgets recent activity (both windows) without touching connections.
  void clear_activity();

  const FiringState& current() const noexcept { return current_; }
  const FiringState& previous() const noexcept { return previous_; }
  void set_current(FiringState s);
  void set_previous(FiringState s);

  // Pre-threshold weighted input of each neuron from the last step() call.
  std::span<const double> drive() const noexcept { return drive_; }

  double firing_threshold() const noexcept { return threshold_; }
  double c_max() const noexcept { return c_max_; }
  double noise_rate() const noexcept { return noise_rate_; }
  void set_noise_rate(double p);

  Matrix connections;     // C
  Matrix plasticity;      // P
  Matrix change;          // A, accumulated |dC|
  Mask edges;             // topology; fixed after construction
  std::vector<Position> positions;
  std::size_t input_width = 0;
  std::size_t input_height = 0;

  Rng& rng() noexcept { return rng_; }

private:
  void index_roles();

  std::vector<NeuronRole> roles_;
  std::array<std::vector<std::uint32_t>, 5> by_role_;
  double threshold_ = 1.0;
  double c_max_ = 4.0;
  double noise_rate_ = 0.0;
  FiringState previous_;
  FiringState current_;
  std::vector<double> drive_;
  std::vector<double> input_buffer_;
  Rng rng_;
};

// Places neurons in the unit cube and wires them with distance-dependent
// probability exp(-d / lambda). Neuron indices are laid out as
// [inputs | noise | hidden | outputs | reward].
Network build_topology(const NetworkConfig& config);

// Fraction of output neurons that fired.
double output_firing_fraction(const FiringState& firing, const Network& net);

// min(floor(p * n_actions), n_actions - 1).
int read_action_discrete(const FiringState& firing, const Network& net, int n_actions);

// lo + p * (hi - lo).
double read_action_continuous(const FiringState& firing, const Network& net, double lo, double hi);

}  // namespace nib
