#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nib/environments.hpp"

namespace nib {

// Maps observations to input-layer values.
//
// Population coding normalizes each dimension to [0, 1] with its declared
// bounds and sets exactly one of `bins` inputs per dimension to 1. Direct
// coding copies the (already [0, 1]) values, used for image observations.
class InputEncoder {
public:
  static InputEncoder population(std::size_t dims, std::size_t bins);
  static InputEncoder direct(std::size_t size);

  std::size_t input_size() const noexcept { return direct_ ? dims_ : dims_ * bins_; }
  std::size_t bins() const noexcept { return bins_; }
  bool is_direct() const noexcept { return direct_; }

  void encode(const Observation& obs, std::span<double> out) const;
  std::vector<double> encode(const Observation& obs) const;

  // Bin index of `value` within [low, high].
  static std::size_t bin_of(double value, Bounds bounds, std::size_t bins);

private:
  InputEncoder(std::size_t dims, std::size_t bins, bool direct)
      : dims_(dims), bins_(bins), direct_(direct) {}
  std::size_t dims_;
  std::size_t bins_;
  bool direct_;
};

}  // namespace nib
