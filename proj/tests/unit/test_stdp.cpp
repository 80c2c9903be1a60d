#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "nib/kernels.hpp"
#include "nib/learning.hpp"

using namespace nib;
using nib::test::rows_of;
using Rows = std::vector<std::vector<int>>;

TEST_CASE("predictivity term on two neurons") {
  CHECK(rows_of(stdp_predictivity({1, 0}, {0, 1})) == Rows{{0, 1}, {-1, 0}});
  CHECK(rows_of(stdp_predictivity({1, 1}, {0, 1})) == Rows{{0, 1}, {0, 1}});
  CHECK(rows_of(stdp_predictivity({0, 0}, {0, 1})) == Rows{{-1, 0}, {-1, 0}});
}

TEST_CASE("co-occurrence mask") {
  const auto f1 = stdp_cooccurrence({0, 0, 1}, {1, 0, 1});
  CHECK(rows_of(f1) == Rows{{0, 0, 1}, {0, 0, 0}, {1, 0, 1}});
  CHECK(rows_of(stdp_cooccurrence({0, 0, 0}, {0, 0, 0})) == Rows{{0, 0, 0}, {0, 0, 0}, {0, 0, 0}});
  CHECK(rows_of(stdp_cooccurrence({1, 1, 1}, {1, 1, 1})) == Rows{{1, 1, 1}, {1, 1, 1}, {1, 1, 1}});
}

TEST_CASE("length mismatch is rejected") {
  CHECK_THROWS_AS(stdp_predictivity({1, 0}, {1, 0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(stdp_cooccurrence({1}, {1, 0}), std::invalid_argument);
  CHECK_THROWS_AS(stdp_delta({1}, {1, 0}), std::invalid_argument);
}

TEST_CASE("three-neuron composite update touches only C[2][0]") {
  const FiringState alpha{0, 0, 1}, beta{1, 0, 1};

  // The raw product keeps the self-connection term; the update drops it.
  const auto f0 = stdp_predictivity(alpha, beta);
  const auto f1 = stdp_cooccurrence(alpha, beta);
  CHECK(rows_of(f0) == Rows{{0, -1, 0}, {0, -1, 0}, {1, 0, 1}});
  CHECK(f0(2, 0) * f1(2, 0) == 1);
  CHECK(f0(2, 2) * f1(2, 2) == 1);
  CHECK(rows_of(stdp_delta(alpha, beta).dense()) == Rows{{0, 0, 0}, {0, 0, 0}, {1, 0, 0}});

  Network net(std::vector<NeuronRole>(3, NeuronRole::Hidden), 1.0, 4.0, 0.0, 1);
  const double ab = 0.11, ac = -0.23, ba = 0.37, bc = -0.41, ca = 0.53, cb = -0.67;
  net.connect(0, 1, ab);
  net.connect(0, 2, ac);
  net.connect(1, 0, ba);
  net.connect(1, 2, bc);
  net.connect(2, 0, ca);
  net.connect(2, 1, cb);
  const Matrix before = net.connections;
  net.set_previous(alpha);
  net.set_current(beta);
  const double gamma = 0.1;
  stdp_update(net, gamma);

  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      if (i == 2 && j == 0) continue;
      CHECK(net.connections(i, j) == before(i, j));
    }
  CHECK(net.connections(2, 0) == doctest::Approx(ca + gamma).epsilon(1e-15));
  CHECK(net.connections(2, 2) == 0.0);
  CHECK(net.change(2, 0) == doctest::Approx(gamma));
}

TEST_CASE("matrix form equals the entrywise definition for every pair up to n = 8") {
  for (std::size_t n = 1; n <= 8; ++n) {
    const std::uint64_t states = std::uint64_t{1} << n;
    std::size_t mismatches = 0;
    for (std::uint64_t a = 0; a < states; ++a)
      for (std::uint64_t b = 0; b < states; ++b) {
        const auto alpha = test::bits_of(a, n), beta = test::bits_of(b, n);
        const auto fast = stdp_delta(alpha, beta).dense();
        const auto dense = kernels::reference::stdp_delta_dense(alpha.bits(), beta.bits());
        const auto f0 = stdp_predictivity(alpha, beta);
        const auto f1 = stdp_cooccurrence(alpha, beta);
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) {
            const int want = test::delta_oracle(alpha, beta, i, j);
            const int composed = i == j ? 0 : f0(i, j) * f1(i, j);
            if (fast(i, j) != want || dense(i, j) != want || composed != want) ++mismatches;
          }
      }
    CHECK_MESSAGE(mismatches == 0, "n = " << n);
  }
}

TEST_CASE("every delta entry is -1, 0 or +1 and respects co-occurrence") {
  std::mt19937_64 eng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 30;
    const auto a = test::random_state(n, eng), b = test::random_state(n, eng);
    const auto delta = stdp_delta(a, b);
    for (const auto& e : delta.entries()) {
      CHECK((e.sign == 1 || e.sign == -1));
      CHECK(e.pre != e.post);
      CHECK(((b[e.post] && a[e.pre]) || (a[e.post] && b[e.pre])));
    }
  }
}

TEST_CASE("clean transitions strengthen forward and weaken backward") {
  std::mt19937_64 eng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 6;
    auto a = test::random_state(n, eng), b = test::random_state(n, eng);
    const std::size_t i = trial % n, j = (trial / n + 1 + i) % n;
    if (i == j) continue;
    a.set(i, true);
    b.set(i, false);
    a.set(j, false);
    b.set(j, true);
    const auto d = stdp_delta(a, b).dense();
    CHECK(d(i, j) == 1);
    CHECK(d(j, i) == -1);
  }
}

TEST_CASE("neurons silent in both windows never receive updates") {
  std::mt19937_64 eng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 12;
    auto a = test::random_state(n, eng, 0.3), b = test::random_state(n, eng, 0.3);
    const auto d = stdp_delta(a, b).dense();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (!a[i] && !b[i] && !a[j] && !b[j]) CHECK(d(i, j) == 0);
  }
}

TEST_CASE("stdp_update matches a scalar loop over random 8-neuron states") {
  std::mt19937_64 eng(17);
  std::uniform_real_distribution<double> p01(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    auto net = test::dense_hidden(8, 100 + trial, 3.9, 4.0);
    for (auto& p : net.plasticity.flat()) p = p == 0.0 ? 0.0 : p01(eng);
    const auto a = test::random_state(8, eng), b = test::random_state(8, eng);
    net.set_previous(a);
    net.set_current(b);
    const double gamma = 0.7, m = trial % 2 ? -1.3 : 2.0;

    Matrix c = net.connections, acc = net.change;
    for (std::size_t i = 0; i < 8; ++i)
      for (std::size_t j = 0; j < 8; ++j) {
        const double dc = m * gamma * net.plasticity(i, j) * test::delta_oracle(a, b, i, j);
        c(i, j) = std::clamp(c(i, j) + dc, -4.0, 4.0);
        acc(i, j) += std::abs(dc);
      }
    stdp_update(net, gamma, m);
    CHECK(net.connections == c);
    CHECK(net.change == acc);
  }
}

TEST_CASE("frozen plasticity leaves strengths bit-identical") {
  std::mt19937_64 eng(19);
  auto net = test::dense_hidden(10, 3);
  for (auto& p : net.plasticity.flat()) p = 0.0;
  const Matrix before = net.connections;
  for (int k = 0; k < 100; ++k) {
    net.set_previous(test::random_state(10, eng));
    net.set_current(test::random_state(10, eng));
    stdp_update(net, 0.5, k % 2 ? 1.0 : -3.0);
    direct_reward(net, static_cast<RewardStrategy>(k % 5), 2.0, 0.5);
  }
  CHECK(net.connections == before);
}

TEST_CASE("modulation scales the change linearly") {
  std::mt19937_64 eng(23);
  for (int trial = 0; trial < 50; ++trial) {
    auto base = test::dense_hidden(9, 200 + trial, 0.5, 100.0);
    base.set_previous(test::random_state(9, eng));
    base.set_current(test::random_state(9, eng));
    auto unit = base, scaled = base;
    const double m = 0.25 * double(trial % 9) - 1.0;
    stdp_update(unit, 0.125, 1.0);
    stdp_update(scaled, 0.125, m);
    for (std::size_t i = 0; i < 9; ++i)
      for (std::size_t j = 0; j < 9; ++j) {
        const double d1 = unit.connections(i, j) - base.connections(i, j);
        const double dm = scaled.connections(i, j) - base.connections(i, j);
        CHECK(dm == doctest::Approx(m * d1).epsilon(1e-12));
      }
  }
}

TEST_CASE("weights stay inside the clip bound") {
  auto net = test::dense_hidden(6, 5, 1.0, 1.5);
  FiringState all{1, 1, 1, 1, 1, 1};
  net.set_previous(all);
  net.set_current(all);
  for (int k = 0; k < 50; ++k) stdp_update(net, 0.3, 1.0);
  for (double c : net.connections.flat()) CHECK(std::abs(c) <= 1.5);
  CHECK(net.connections(0, 1) == 1.5);
}

TEST_CASE("stdp_update rejects a non-positive learning rate") {
  auto net = test::dense_hidden(3, 1);
  CHECK_THROWS_AS(stdp_update(net, 0.0), std::invalid_argument);
}
