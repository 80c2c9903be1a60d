#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "nib/matrix.hpp"
#include "nib/network.hpp"

namespace nib::test {

// Network of `n` hidden neurons, every off-diagonal edge present with
// strengths drawn from U(-scale, scale) by an engine independent of nib::Rng.
inline Network dense_hidden(std::size_t n, std::uint64_t seed, double scale = 1.0,
                            double c_max = 4.0) {
  Network net(std::vector<NeuronRole>(n, NeuronRole::Hidden), 1.0, c_max, 0.0, seed);
  std::mt19937_64 eng(seed);
  std::uniform_real_distribution<double> w(-scale, scale);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) net.connect(i, j, w(eng));
  return net;
}

inline FiringState random_state(std::size_t n, std::mt19937_64& eng, double p = 0.5) {
  std::bernoulli_distribution b(p);
  FiringState s(n);
  for (std::size_t i = 0; i < n; ++i) s.set(i, b(eng));
  return s;
}

inline FiringState bits_of(std::uint64_t mask, std::size_t n) {
  FiringState s(n);
  for (std::size_t i = 0; i < n; ++i) s.set(i, (mask >> i) & 1u);
  return s;
}

// Entrywise definition of the signed update with the diagonal suppressed.
inline int delta_oracle(const FiringState& a, const FiringState& b, std::size_t i, std::size_t j) {
  if (i == j) return 0;
  const int f0 = int(b[j]) - (1 - int(a[i]));
  const bool f1 = (b[i] && a[j]) || (a[i] && b[j]);
  return f1 ? f0 : 0;
}

}  // namespace nib::test

namespace nib::test {

template <typename T>
std::vector<std::vector<T>> rows_of(const SquareMatrix<T>& m) {
  std::vector<std::vector<T>> out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) out[i].assign(m.row(i).begin(), m.row(i).end());
  return out;
}

}  // namespace nib::test
