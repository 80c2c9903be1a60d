#include "nib/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nib::kernels {

namespace {

// Below these sizes the fork/join cost outweighs the loop.
constexpr std::size_t kParallelColumns = 512;
constexpr std::size_t kParallelRows = 64;
constexpr std::size_t kParallelEntries = 4096;

bool single_thread() {
#ifdef _OPENMP
  return omp_get_max_threads() == 1;
#else
  return true;
#endif
}

std::vector<std::uint32_t> active_indices(std::span<const std::uint8_t> alpha,
                                          std::span<const std::uint8_t> beta) {
  std::vector<std::uint32_t> active;
  for (std::size_t i = 0; i < alpha.size(); ++i)
    if (alpha[i] | beta[i]) active.push_back(static_cast<std::uint32_t>(i));
  return active;
}

}  // namespace

void propagate(const Matrix& connections, std::span<const std::uint8_t> fired,
               std::span<double> drive) {
  const std::size_t n = connections.size();
  if (fired.size() != n || drive.size() != n)
    throw std::invalid_argument("propagate: dimension mismatch");

  std::vector<std::uint32_t> sources;
  for (std::size_t i = 0; i < n; ++i)
    if (fired[i]) sources.push_back(static_cast<std::uint32_t>(i));

  // Columns are split into blocks; inside a block every column accumulates its
  // sources in increasing index order, matching the serial definition bit for
  // bit.
  constexpr std::size_t kBlock = 256;
  const auto blocks = static_cast<std::ptrdiff_t>((n + kBlock - 1) / kBlock);
#pragma omp parallel for schedule(static) if (n >= kParallelColumns)
  for (std::ptrdiff_t b = 0; b < blocks; ++b) {
    const std::size_t j0 = std::size_t(b) * kBlock;
    const std::size_t j1 = std::min(n, j0 + kBlock);
    std::fill(drive.begin() + j0, drive.begin() + j1, 0.0);
    for (auto i : sources) {
      const double* row = connections.row(i).data();
      for (std::size_t j = j0; j < j1; ++j) drive[j] += row[j];
    }
  }
}

std::vector<DeltaEntry> stdp_delta(std::span<const std::uint8_t> alpha,
                                   std::span<const std::uint8_t> beta) {
  if (alpha.size() != beta.size()) throw std::invalid_argument("stdp_delta: length mismatch");
  const auto active = active_indices(alpha, beta);
  const auto m = static_cast<std::ptrdiff_t>(active.size());

  std::vector<std::vector<DeltaEntry>> rows(active.size());
#pragma omp parallel for schedule(dynamic, 8) if (active.size() >= kParallelRows)
  for (std::ptrdiff_t a = 0; a < m; ++a) {
    const std::uint32_t i = active[a];
    const int ai = alpha[i], bi = beta[i];
    auto& out = rows[a];
    for (const std::uint32_t j : active) {
      if (j == i) continue;
      const int aj = alpha[j], bj = beta[j];
      if (!((bi & aj) | (ai & bj))) continue;
      const int f0 = bj - (1 - ai);
      if (f0 != 0) out.push_back({i, j, static_cast<std::int8_t>(f0)});
    }
  }

  std::size_t total = 0;
  for (auto& r : rows) total += r.size();
  std::vector<DeltaEntry> entries;
  entries.reserve(total);
  for (auto& r : rows) entries.insert(entries.end(), r.begin(), r.end());
  return entries;
}

ApplyStats apply_delta(std::span<const DeltaEntry> delta, double scale, double c_max,
                       Matrix& connections, const Matrix& plasticity, Matrix& change) {
  if (delta.size() < kParallelEntries || single_thread())
    return reference::apply_delta(delta, scale, c_max, connections, plasticity, change);

  const auto m = static_cast<std::ptrdiff_t>(delta.size());
  // Entries address distinct (pre, post) cells, so the writes never collide.
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < m; ++k) {
    const auto& e = delta[k];
    const double p = plasticity(e.pre, e.post);
    if (p == 0.0) continue;
    const double d = scale * p * double(e.sign);
    if (d == 0.0) continue;
    double& c = connections(e.pre, e.post);
    c = std::clamp(c + d, -c_max, c_max);
    change(e.pre, e.post) += std::abs(d);
  }

  // Serial pass keeps the reduction order independent of the thread count.
  ApplyStats stats;
  for (const auto& e : delta) {
    const double d = scale * plasticity(e.pre, e.post) * double(e.sign);
    if (d != 0.0) {
      ++stats.changed;
      stats.abs_change_sum += std::abs(d);
    }
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

}  // namespace nib::kernels
