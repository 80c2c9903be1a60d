#pragma once

// Inner loops of the simulator. Each kernel has an OpenMP-parallel version in
// nib::kernels and a plain serial version in nib::kernels::reference that
// evaluates the defining formula entry by entry. The reference versions are
// kept for testing and benchmarking; the library itself calls the parallel
// ones.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "nib/matrix.hpp"

namespace nib::kernels {

// One nonzero entry of the signed STDP delta.
struct DeltaEntry {
  std::uint32_t pre;
  std::uint32_t post;
  std::int8_t sign;  // +1 or -1
  bool operator==(const DeltaEntry&) const = default;
};

// Summary of an applied update.
struct ApplyStats {
  std::size_t changed = 0;       // entries whose scaled change was nonzero
  double abs_change_sum = 0.0;   // sum of |scale * P * delta| before clipping
};

// drive[j] = sum_i C(i, j) * fired[i]
void propagate(const Matrix& connections, std::span<const std::uint8_t> fired,
               std::span<double> drive);

// Nonzero entries of f0(alpha, beta) o f1(alpha, beta) with the diagonal
// suppressed, ordered by (pre, post). Only neurons active in either window
// can appear, so the work is quadratic in the active count rather than n.
std::vector<DeltaEntry> stdp_delta(std::span<const std::uint8_t> alpha,
                                   std::span<const std::uint8_t> beta);

// C <- clip(C + scale * P o delta, +-c_max) and A <- A + |scale * P o delta|
// over the given entries. Entries with P == 0 are left bit-identical.
ApplyStats apply_delta(std::span<const DeltaEntry> delta, double scale, double c_max,
                       Matrix& connections, const Matrix& plasticity, Matrix& change);

// sum over delta entries of |sign * C * P|, summed in entry order.
double novelty_sum(std::span<const DeltaEntry> delta, const Matrix& connections,
                   const Matrix& plasticity);

namespace reference {

void propagate(const Matrix& connections, std::span<const std::uint8_t> fired,
               std::span<double> drive);

// Dense n x n delta from the entrywise definition
//   (beta_j - (1 - alpha_i)) * [(beta_i & alpha_j) | (alpha_i & beta_j)], i != j.
SquareMatrix<std::int8_t> stdp_delta_dense(std::span<const std::uint8_t> alpha,
                                           std::span<const std::uint8_t> beta);

std::vector<DeltaEntry> stdp_delta(std::span<const std::uint8_t> alpha,
                                   std::span<const std::uint8_t> beta);

ApplyStats apply_delta(std::span<const DeltaEntry> delta, double scale, double c_max,
                       Matrix& connections, const Matrix& plasticity, Matrix& change);

double novelty_sum(std::span<const DeltaEntry> delta, const Matrix& connections,
                   const Matrix& plasticity);

}  // namespace reference

}  // namespace nib::kernels
