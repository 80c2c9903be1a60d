#include "nib/network.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "nib/kernels.hpp"

namespace nib {

std::string_view to_string(NeuronRole r) {
  switch (r) {
    case NeuronRole::Input: return "input";
    case NeuronRole::Noise: return "noise";
    case NeuronRole::Hidden: return "hidden";
    case NeuronRole::Output: return "output";
    case NeuronRole::Reward: return "reward";
  }
  return "unknown";
}

NeuronRole parse_neuron_role(std::string_view name) {
  for (auto r : {NeuronRole::Input, NeuronRole::Noise, NeuronRole::Hidden, NeuronRole::Output,
                 NeuronRole::Reward})
    if (to_string(r) == name) return r;
  throw std::invalid_argument("unknown neuron role '" + std::string(name) + "'");
}

double distance(const Position& a, const Position& b) {
  const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double connection_probability(double d, double lambda) {
  if (std::isinf(lambda)) return 1.0;
  return std::exp(-d / lambda);
}

void NetworkConfig::validate() const {
  if (neuron_count() == 0) throw std::invalid_argument("network has no neurons");
  if (input_width * input_height != 0 && input_width * input_height != n_input)
    throw std::invalid_argument("input image shape does not match n_input");
  if (!(connection_scale > 0.0)) throw std::invalid_argument("connection_scale must be > 0");
  if (!(output_distance >= 0.0 && output_distance <= 1.0))
    throw std::invalid_argument("output_distance must lie in [0, 1]");
  if (!(firing_threshold > 0.0)) throw std::invalid_argument("firing_threshold must be > 0");
  if (!(noise_rate >= 0.0 && noise_rate <= 1.0))
    throw std::invalid_argument("noise_rate must lie in [0, 1]");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
  if (!(c_max > 0.0)) throw std::invalid_argument("c_max must be > 0");
  if (!(init_strength_scale >= 0.0)) throw std::invalid_argument("init_strength_scale must be >= 0");
  if (!(effective_consolidation_threshold() >= 0.0))
    throw std::invalid_argument("consolidation_threshold must be >= 0");
  if (!(aging_rate >= 0.0)) throw std::invalid_argument("aging_rate must be >= 0");
}

Network::Network(std::vector<NeuronRole> roles, double firing_threshold, double c_max,
                 double noise_rate, std::uint64_t seed)
    : connections(roles.size()),
      plasticity(roles.size()),
      change(roles.size()),
      edges(roles.size()),
      positions(roles.size()),
      roles_(std::move(roles)),
      threshold_(firing_threshold),
      c_max_(c_max),
      noise_rate_(noise_rate),
      previous_(roles_.size()),
      current_(roles_.size()),
      drive_(roles_.size(), 0.0),
      rng_(seed) {
  if (roles_.empty()) throw std::invalid_argument("network has no neurons");
  if (!(firing_threshold > 0.0)) throw std::invalid_argument("firing_threshold must be > 0");
  if (!(c_max > 0.0)) throw std::invalid_argument("c_max must be > 0");
  set_noise_rate(noise_rate);
  index_roles();
  if (count(NeuronRole::Reward) > 1) throw std::invalid_argument("at most one reward neuron");
}

void Network::index_roles() {
  for (auto& v : by_role_) v.clear();
  for (std::size_t i = 0; i < roles_.size(); ++i)
    by_role_[static_cast<std::size_t>(roles_[i])].push_back(static_cast<std::uint32_t>(i));
  input_buffer_.assign(count(NeuronRole::Input), 0.0);
}

std::uint32_t Network::reward_index() const {
  if (!has_reward_neuron()) throw std::logic_error("network has no reward neuron");
  return indices(NeuronRole::Reward).front();
}

void Network::set_noise_rate(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("noise_rate must lie in [0, 1]");
  noise_rate_ = p;
}

void Network::connect(std::size_t i, std::size_t j, double strength) {
  if (i >= size() || j >= size()) throw std::out_of_range("Network::connect");
  if (i == j) throw std::invalid_argument("self-connections are not allowed");
  if (roles_[j] == NeuronRole::Input || roles_[j] == NeuronRole::Noise)
    throw std::invalid_argument("input and noise neurons take no incoming connections");
  edges(i, j) = 1;
  plasticity(i, j) = 1.0;
  connections(i, j) = std::clamp(strength, -c_max_, c_max_);
}

const FiringState& Network::step(std::span<const double> external_input) {
  const auto inputs = indices(NeuronRole::Input);
  if (external_input.size() != inputs.size())
    throw std::invalid_argument("external input has " + std::to_string(external_input.size()) +
                                " values, network has " + std::to_string(inputs.size()) +
                                " input neurons");

  kernels::propagate(connections, current_.bits(), drive_);

  FiringState next(size());
  for (std::size_t j = 0; j < size(); ++j) {
    switch (roles_[j]) {
      case NeuronRole::Input:
      case NeuronRole::Noise:
        break;
      default:
        next.set(j, drive_[j] >= threshold_);
    }
  }
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    drive_[inputs[k]] = external_input[k];
    next.set(inputs[k], external_input[k] > 0.5);
  }
  // Noise draws happen in index order so the stream is reproducible.
  for (auto j : indices(NeuronRole::Noise)) next.set(j, rng_.bernoulli(noise_rate_));

  previous_ = std::move(current_);
  current_ = std::move(next);
  return current_;
}

void Network::clear_activity() {
  previous_.clear();
  current_.clear();
  std::fill(drive_.begin(), drive_.end(), 0.0);
}

void Network::set_current(FiringState s) {
  if (s.size() != size()) throw std::invalid_argument("firing state length mismatch");
  current_ = std::move(s);
}

void Network::set_previous(FiringState s) {
  if (s.size() != size()) throw std::invalid_argument("firing state length mismatch");
  previous_ = std::move(s);
}

Network build_topology(const NetworkConfig& config) {
  config.validate();

  std::vector<NeuronRole> roles;
  roles.reserve(config.neuron_count());
  roles.insert(roles.end(), config.n_input, NeuronRole::Input);
  roles.insert(roles.end(), config.n_noise, NeuronRole::Noise);
  roles.insert(roles.end(), config.n_hidden, NeuronRole::Hidden);
  roles.insert(roles.end(), config.n_output, NeuronRole::Output);
  if (config.reward_neuron) roles.push_back(NeuronRole::Reward);

  Network net(std::move(roles), config.firing_threshold, config.c_max, config.noise_rate,
              config.seed);
  net.input_width = config.input_width;
  net.input_height = config.input_height;
  Rng& rng = net.rng();
  const std::size_t n = net.size();

  // Inputs sit on a regular grid on the x = 0 face.
  const auto inputs = net.indices(NeuronRole::Input);
  if (!inputs.empty()) {
    std::size_t cols = config.input_width;
    if (cols == 0) cols = static_cast<std::size_t>(std::ceil(std::sqrt(double(inputs.size()))));
    const std::size_t rows = (inputs.size() + cols - 1) / cols;
    for (std::size_t k = 0; k < inputs.size(); ++k) {
      const double r = double(k / cols), c = double(k % cols);
      net.positions[inputs[k]] = {0.0, (c + 0.5) / double(cols), (r + 0.5) / double(rows)};
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    switch (net.role(i)) {
      case NeuronRole::Input:
        break;
      case NeuronRole::Output:
        net.positions[i] = {config.output_distance, rng.uniform(), rng.uniform()};
        break;
      default:
        net.positions[i] = {rng.uniform(), rng.uniform(), rng.uniform()};
    }
  }

  const double lambda = config.connection_scale;
  const double s = config.init_strength_scale;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      // Every ordered pair consumes the same draws so the stream does not
      // depend on which pairs are eligible.
      const double u = rng.uniform();
      const double w = rng.uniform(-s, s);
      if (i == j) continue;
      const NeuronRole rj = net.role(j);
      if (rj == NeuronRole::Input || rj == NeuronRole::Noise) continue;
      if (u < connection_probability(distance(net.positions[i], net.positions[j]), lambda)) net.connect(i, j, w);
    }
  }
  return net;
}

double output_firing_fraction(const FiringState& firing, const Network& net) {
  const auto outputs = net.indices(NeuronRole::Output);
  if (outputs.empty()) throw std::logic_error("network has no output neurons");
  if (firing.size() != net.size()) throw std::invalid_argument("firing state length mismatch");
  std::size_t fired = 0;
  for (auto j : outputs) fired += firing[j];
  return double(fired) / double(outputs.size());
}

int read_action_discrete(const FiringState& firing, const Network& net, int n_actions) {
  if (n_actions < 1) throw std::invalid_argument("n_actions must be >= 1");
  const auto outputs = net.indices(NeuronRole::Output);
  if (outputs.empty()) throw std::logic_error("network has no output neurons");
  std::size_t fired = 0;
  for (auto j : outputs) fired += firing[j];
  // Integer arithmetic avoids p * n_actions rounding just below an integer.
  const auto a = static_cast<int>((fired * static_cast<std::size_t>(n_actions)) / outputs.size());
  return std::min(a, n_actions - 1);
}

double read_action_continuous(const FiringState& firing, const Network& net, double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("action range must satisfy lo < hi");
  return lo + output_firing_fraction(firing, net) * (hi - lo);
}

}  // namespace nib
