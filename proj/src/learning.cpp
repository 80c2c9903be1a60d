#include "nib/learning.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nib {

namespace {

void require_same_length(const FiringState& a, const FiringState& b) {
  if (a.size() != b.size()) throw std::invalid_argument("firing states differ in length");
}

}  // namespace

SquareMatrix<int> stdp_predictivity(const FiringState& alpha, const FiringState& beta) {
  require_same_length(alpha, beta);
  const std::size_t n = alpha.size();
  SquareMatrix<int> f0(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) f0(i, j) = int(beta[j]) - (1 - int(alpha[i]));
  return f0;
}

SquareMatrix<int> stdp_cooccurrence(const FiringState& alpha, const FiringState& beta) {
  require_same_length(alpha, beta);
  const std::size_t n = alpha.size();
  SquareMatrix<int> f1(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      f1(i, j) = ((beta[i] & alpha[j]) | (alpha[i] & beta[j])) ? 1 : 0;
  return f1;
}

SquareMatrix<int> StdpUpdate::dense() const {
  SquareMatrix<int> m(n_, 0);
  for (const auto& e : entries_) m(e.pre, e.post) = e.sign;
  return m;
}

StdpUpdate stdp_delta(const FiringState& alpha, const FiringState& beta) {
  require_same_length(alpha, beta);
  return {alpha.size(), kernels::stdp_delta(alpha.bits(), beta.bits())};
}

StdpUpdate stdp_update(Network& net, double gamma, double modulation) {
  if (!(gamma > 0.0)) throw std::invalid_argument("learning rate must be > 0");
  auto delta = stdp_delta(net.previous(), net.current());
  kernels::apply_delta(delta.entries(), modulation * gamma, net.c_max(), net.connections,
                       net.plasticity, net.change);
  return delta;
}

std::size_t direct_reward(Network& net, RewardStrategy strategy, double reward, double gamma) {
  if (!std::isfinite(reward)) throw std::invalid_argument("reward must be finite");
  if (!(gamma > 0.0)) throw std::invalid_argument("learning rate must be > 0");
  if (reward == 0.0) return 0;

  const std::size_t n = net.size();
  const FiringState& alpha = net.previous();
  const FiringState& beta = net.current();
  std::vector<kernels::DeltaEntry> selected;
  auto take = [&](std::size_t i, std::size_t j) {
    if (net.edges(i, j))
      selected.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), 1});
  };

  switch (strategy) {
    case RewardStrategy::AllConnections:
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) take(i, j);
      break;
    case RewardStrategy::OutputsOfFired:
      for (std::size_t i = 0; i < n; ++i)
        if (beta.fired(i))
          for (std::size_t j = 0; j < n; ++j) take(i, j);
      break;
    case RewardStrategy::UsedConnections:
      for (std::size_t i = 0; i < n; ++i) {
        if (!alpha.fired(i)) continue;
        for (std::size_t j = 0; j < n; ++j) {
          const double c = net.connections(i, j);
          if (c != 0.0 && (c > 0.0) == beta.fired(j)) take(i, j);
        }
      }
      break;
    case RewardStrategy::ActionInputs:
      for (std::size_t i = 0; i < n; ++i)
        for (auto j : net.indices(NeuronRole::Output)) take(i, j);
      break;
    case RewardStrategy::ActionInputsBothFired:
      for (std::size_t i = 0; i < n; ++i) {
        if (!alpha.fired(i)) continue;
        for (auto j : net.indices(NeuronRole::Output))
          if (beta.fired(j)) take(i, j);
      }
      break;
  }

  return kernels::apply_delta(selected, reward * gamma, net.c_max(), net.connections,
                              net.plasticity, net.change)
      .changed;
}

void inject_reward_neuron(Network& net, double reward) {
  const std::uint32_t r = net.reward_index();
  double sum = reward;
  const FiringState& pre = net.previous();
  for (std::size_t i = 0; i < net.size(); ++i)
    if (pre.fired(i)) sum += net.connections(i, r);
  FiringState cur = net.current();
  cur.set(r, sum >= net.firing_threshold());
  net.set_current(std::move(cur));
}

double novelty_firing(const Network& net, const StdpUpdate& delta) {
  if (delta.size() != net.size()) throw std::invalid_argument("update size mismatch");
  const double n = double(net.size());
  return kernels::novelty_sum(delta.entries(), net.connections, net.plasticity) / (n * n);
}

double novelty_firing(const Network& net, const FiringState& alpha, const FiringState& beta) {
  return novelty_firing(net, stdp_delta(alpha, beta));
}

double novelty_frames(std::span<const double> frame_a, std::span<const double> frame_b) {
  if (frame_a.size() != frame_b.size()) throw std::invalid_argument("frames differ in length");
  if (frame_a.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t k = 0; k < frame_a.size(); ++k) sum += std::abs(frame_a[k] - frame_b[k]);
  return sum / double(frame_a.size());
}

std::size_t consolidate(Network& net, const ConsolidationParams& params) {
  const std::size_t n = net.size();
  std::size_t changed = 0;
  switch (params.mode) {
    case MemoryMode::Off:
      return 0;
    case MemoryMode::UniformAging:
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          double& p = net.plasticity(i, j);
          if (!net.edges(i, j) || p == 0.0) continue;
          p = std::max(0.0, p - params.aging_rate);
          ++changed;
        }
      return changed;
    case MemoryMode::DecayAccumulation: {
      double sum = 0.0;
      std::size_t count = 0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (net.edges(i, j)) {
            sum += std::abs(net.connections(i, j));
            ++count;
          }
      if (count == 0) return 0;
      const double mean = sum / double(count);
      double sq = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (net.edges(i, j)) {
            const double d = std::abs(net.connections(i, j)) - mean;
            sq += d * d;
          }
      const double var = sq / double(count);
      const double cutoff = mean + params.sigma * std::sqrt(var);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          if (!net.edges(i, j) || net.plasticity(i, j) == 0.0) continue;
          if (net.change(i, j) >= params.threshold && std::abs(net.connections(i, j)) > cutoff) {
            net.plasticity(i, j) = 0.0;
            ++changed;
          }
        }
      return changed;
    }
  }
  return changed;
}

}  // namespace nib
