#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nib/firing_state.hpp"
#include "nib/kernels.hpp"
#include "nib/matrix.hpp"
#include "nib/network.hpp"
#include "nib/strategy.hpp"

namespace nib {

// Predictivity term f0(alpha, beta): F0(i, j) = beta_j - (1 - alpha_i).
// Entries in {-1, 0, 1}. Throws std::invalid_argument on length mismatch.
SquareMatrix<int> stdp_predictivity(const FiringState& alpha, const FiringState& beta);

// Co-occurrence mask f1(alpha, beta): F1(i, j) = (beta_i & alpha_j) | (alpha_i & beta_j).
// Symmetric. Throws std::invalid_argument on length mismatch.
SquareMatrix<int> stdp_cooccurrence(const FiringState& alpha, const FiringState& beta);

// Signed, unscaled STDP update f0 o f1 with the diagonal suppressed, stored
// sparsely (only the nonzero entries).
class StdpUpdate {
public:
  StdpUpdate() = default;
  StdpUpdate(std::size_t n, std::vector<kernels::DeltaEntry> entries)
      : n_(n), entries_(std::move(entries)) {}

  std::size_t size() const noexcept { return n_; }
  std::span<const kernels::DeltaEntry> entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }

  SquareMatrix<int> dense() const;

private:
  std::size_t n_ = 0;
  std::vector<kernels::DeltaEntry> entries_;
};

// Delta for an arbitrary pair of windows.
StdpUpdate stdp_delta(const FiringState& alpha, const FiringState& beta);

// Applies C <- clip(C + modulation * gamma * P o delta) using the network's
// previous (alpha) and current (beta) windows, and accumulates |dC| into the
// change matrix. modulation = 1 is plain STDP; a reward value gives
// reward-modulated STDP (negative values unlearn).
StdpUpdate stdp_update(Network& net, double gamma, double modulation = 1.0);

// Reinforces the subset of connections selected by the strategy by
// reward * gamma * P, using the network's previous window as the presynaptic
// firings and the current window as the action firings. Returns the number of
// connections whose strength moved.
std::size_t direct_reward(Network& net, RewardStrategy strategy, double reward, double gamma);

// Sets the reward neuron's bit in the current window: it fires iff
// reward + sum_i C(i, r) * previous_i >= threshold.
// Throws std::logic_error if the network has no reward neuron.
void inject_reward_neuron(Network& net, double reward);

// Mean over all n^2 entries of |delta * C * P|.
double novelty_firing(const Network& net, const FiringState& alpha, const FiringState& beta);
double novelty_firing(const Network& net, const StdpUpdate& delta);

// Mean absolute elementwise difference between two frames.
double novelty_frames(std::span<const double> frame_a, std::span<const double> frame_b);

struct ConsolidationParams {
  MemoryMode mode = MemoryMode::DecayAccumulation;
  double threshold = 0.5;  // tau_A
  double sigma = 1.0;      // k
  double aging_rate = 1e-4;
};

// Lowers plasticity; never raises it. Returns the number of P entries changed.
std::size_t consolidate(Network& net, const ConsolidationParams& params);

}  // namespace nib
