#pragma once

#include <string>
#include <string_view>

namespace nib {

// Which connections a global reward signal reinforces.
enum class RewardStrategy {
  AllConnections,         // every existing connection
  OutputsOfFired,         // outgoing connections of neurons that just fired
  UsedConnections,        // presynaptic fired and sign agrees with postsynaptic outcome
  ActionInputs,           // every incoming connection of an output neuron
  ActionInputsBothFired,  // incoming connections of output neurons where both ends fired
};

enum class MemoryMode { Off, UniformAging, DecayAccumulation };

std::string_view to_string(RewardStrategy s);
std::string_view to_string(MemoryMode m);

// Both throw std::invalid_argument on unknown names.
RewardStrategy parse_reward_strategy(std::string_view name);
MemoryMode parse_memory_mode(std::string_view name);

}  // namespace nib
