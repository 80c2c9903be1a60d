#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace nib {

// Dense square matrix, row-major. Row i holds the outgoing connections of
// presynaptic neuron i; column j the incoming connections of neuron j.
template <typename T>
class SquareMatrix {
public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n, T fill = T{}) : n_(n), data_(n * n, fill) {}

  std::size_t size() const noexcept { return n_; }
  std::size_t elements() const noexcept { return data_.size(); }

  T& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * n_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * n_ + j]; }

  T& at(std::size_t i, std::size_t j) {
    if (i >= n_ || j >= n_) throw std::out_of_range("SquareMatrix::at");
    return data_[i * n_ + j];
  }
  const T& at(std::size_t i, std::size_t j) const {
    if (i >= n_ || j >= n_) throw std::out_of_range("SquareMatrix::at");
    return data_[i * n_ + j];
  }

  std::span<T> row(std::size_t i) noexcept { return {data_.data() + i * n_, n_}; }
  std::span<const T> row(std::size_t i) const noexcept { return {data_.data() + i * n_, n_}; }

  std::span<T> flat() noexcept { return data_; }
  std::span<const T> flat() const noexcept { return data_; }

  bool operator==(const SquareMatrix&) const = default;

private:
  std::size_t n_ = 0;
  std::vector<T> data_;
};

using Matrix = SquareMatrix<double>;
using Mask = SquareMatrix<std::uint8_t>;

}  // namespace nib
