#include "nib/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nib {

InputEncoder InputEncoder::population(std::size_t dims, std::size_t bins) {
  if (bins == 0) throw std::invalid_argument("population code needs at least one bin");
  return {dims, bins, false};
}

InputEncoder InputEncoder::direct(std::size_t size) { return {size, 1, true}; }

std::size_t InputEncoder::bin_of(double value, Bounds bounds, std::size_t bins) {
  const double span = bounds.high - bounds.low;
  double u = span > 0.0 ? (value - bounds.low) / span : 0.0;
  u = std::clamp(u, 0.0, 1.0);
  return std::min(static_cast<std::size_t>(std::floor(u * double(bins))), bins - 1);
}

void InputEncoder::encode(const Observation& obs, std::span<double> out) const {
  if (obs.values.size() != dims_) throw std::invalid_argument("observation has wrong dimension");
  if (out.size() != input_size()) throw std::invalid_argument("encoder output has wrong size");
  if (direct_) {
    std::copy(obs.values.begin(), obs.values.end(), out.begin());
    return;
  }
  if (obs.bounds.size() != dims_) throw std::invalid_argument("observation bounds missing");
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t d = 0; d < dims_; ++d)
    out[d * bins_ + bin_of(obs.values[d], obs.bounds[d], bins_)] = 1.0;
}

std::vector<double> InputEncoder::encode(const Observation& obs) const {
  std::vector<double> out(input_size());
  encode(obs, out);
  return out;
}

}  // namespace nib
