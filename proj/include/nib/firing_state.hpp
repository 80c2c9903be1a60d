#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

namespace nib {

// Binary firing vector for one timestep window. Entries are exactly 0 or 1.
class FiringState {
public:
  FiringState() = default;
  explicit FiringState(std::size_t n) : bits_(n, 0) {}
  FiringState(std::initializer_list<int> bits) {
    bits_.reserve(bits.size());
    for (int b : bits) {
      if (b != 0 && b != 1) throw std::invalid_argument("FiringState: bits must be 0 or 1");
      bits_.push_back(static_cast<std::uint8_t>(b));
    }
  }

  std::size_t size() const noexcept { return bits_.size(); }
  bool fired(std::size_t i) const noexcept { return bits_[i] != 0; }
  std::uint8_t operator[](std::size_t i) const noexcept { return bits_[i]; }
  void set(std::size_t i, bool on) noexcept { bits_[i] = on ? 1 : 0; }
  void clear() noexcept { std::fill(bits_.begin(), bits_.end(), std::uint8_t{0}); }

  std::size_t count() const noexcept {
    std::size_t c = 0;
    for (auto b : bits_) c += b;
    return c;
  }

  std::span<const std::uint8_t> bits() const noexcept { return bits_; }

  bool operator==(const FiringState&) const = default;

private:
  std::vector<std::uint8_t> bits_;
};

}  // namespace nib
