#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nib/kernels.hpp"

namespace nib::kernels::reference {

void propagate(const Matrix& connections, std::span<const std::uint8_t> fired,
               std::span<double> drive) {
  const std::size_t n = connections.size();
  if (fired.size() != n || drive.size() != n)
    throw std::invalid_argument("propagate: dimension mismatch");
  for (std::size_t j = 0; j < n; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (fired[i]) sum += connections(i, j);
    drive[j] = sum;
  }
}

SquareMatrix<std::int8_t> stdp_delta_dense(std::span<const std::uint8_t> alpha,
                                           std::span<const std::uint8_t> beta) {
  if (alpha.size() != beta.size()) throw std::invalid_argument("stdp_delta: length mismatch");
  const std::size_t n = alpha.size();
  SquareMatrix<std::int8_t> out(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const int f0 = int(beta[j]) - (1 - int(alpha[i]));
      const int f1 = (beta[i] && alpha[j]) || (alpha[i] && beta[j]) ? 1 : 0;
      out(i, j) = static_cast<std::int8_t>(f0 * f1);
    }
  }
  return out;
}

std::vector<DeltaEntry> stdp_delta(std::span<const std::uint8_t> alpha,
                                   std::span<const std::uint8_t> beta) {
  const auto dense = stdp_delta_dense(alpha, beta);
  std::vector<DeltaEntry> entries;
  for (std::size_t i = 0; i < dense.size(); ++i)
    for (std::size_t j = 0; j < dense.size(); ++j)
      if (dense(i, j) != 0)
        entries.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), dense(i, j)});
  return entries;
}

ApplyStats apply_delta(std::span<const DeltaEntry> delta, double scale, double c_max,
                       Matrix& connections, const Matrix& plasticity, Matrix& change) {
  ApplyStats stats;
  for (const auto& e : delta) {
    const double p = plasticity(e.pre, e.post);
    if (p == 0.0) continue;
    const double d = scale * p * double(e.sign);
    if (d == 0.0) continue;
    double& c = connections(e.pre, e.post);
    c = std::clamp(c + d, -c_max, c_max);
    change(e.pre, e.post) += std::abs(d);
    ++stats.changed;
    stats.abs_change_sum += std::abs(d);
  }
  return stats;
}

double novelty_sum(std::span<const DeltaEntry> delta, const Matrix& connections,
                   const Matrix& plasticity) {
  double sum = 0.0;
  for (const auto& e : delta)
    sum += std::abs(double(e.sign) * connections(e.pre, e.post) * plasticity(e.pre, e.post));
  return sum;
}

}  // namespace nib::kernels::reference
