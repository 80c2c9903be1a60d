#include "nib/strategy.hpp"

#include <array>
#include <stdexcept>
#include <utility>

namespace nib {

namespace {

constexpr std::array<std::pair<RewardStrategy, std::string_view>, 5> kStrategies{{
    {RewardStrategy::AllConnections, "all_connections"},
    {RewardStrategy::OutputsOfFired, "outputs_of_fired"},
    {RewardStrategy::UsedConnections, "used_connections"},
    {RewardStrategy::ActionInputs, "action_inputs"},
    {RewardStrategy::ActionInputsBothFired, "action_inputs_both_fired"},
}};

constexpr std::array<std::pair<MemoryMode, std::string_view>, 3> kModes{{
    {MemoryMode::Off, "off"},
    {MemoryMode::UniformAging, "uniform_aging"},
    {MemoryMode::DecayAccumulation, "decay_accumulation"},
}};

}  // namespace

std::string_view to_string(RewardStrategy s) {
  for (auto& [k, v] : kStrategies)
    if (k == s) return v;
  return "unknown";
}

std::string_view to_string(MemoryMode m) {
  for (auto& [k, v] : kModes)
    if (k == m) return v;
  return "unknown";
}

RewardStrategy parse_reward_strategy(std::string_view name) {
  for (auto& [k, v] : kStrategies)
    if (v == name) return k;
  throw std::invalid_argument("unknown reward strategy '" + std::string(name) + "'");
}

MemoryMode parse_memory_mode(std::string_view name) {
  for (auto& [k, v] : kModes)
    if (v == name) return k;
  throw std::invalid_argument("unknown memory mode '" + std::string(name) + "'");
}

}  // namespace nib
