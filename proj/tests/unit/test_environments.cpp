#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>

#include "doctest.h"
#include "nib/environments.hpp"
#include "nib/learning.hpp"

using namespace nib;

namespace {

bool within_bounds(const Observation& o) {
  if (o.values.size() != o.bounds.size()) return false;
  for (std::size_t k = 0; k < o.values.size(); ++k)
    if (o.values[k] < o.bounds[k].low || o.values[k] > o.bounds[k].high) return false;
  return true;
}

double random_action(const ActionSpace& s, std::mt19937_64& eng) {
  if (s.kind == ActionSpace::Kind::Discrete) return double(eng() % std::uint64_t(s.n));
  return std::uniform_real_distribution<double>(s.low * 1.5, s.high * 1.5)(eng);
}

const char* kEnvNames[] = {"xor", "mountain_car", "mountain_car_continuous", "pendulum",
                           "patterns", "patterns_control", "runner"};

}  // namespace

// ---------------------------------------------------------------- common

TEST_CASE("every environment enforces the episode protocol") {
  for (auto name : kEnvNames) {
    auto env = make_environment(name, 1, 5);
    CHECK_THROWS_AS(env->step(0), std::logic_error);
    env->reset();
    std::mt19937_64 eng(1);
    while (!env->step(random_action(env->action_space(), eng)).done) {}
    CHECK(env->done());
    CHECK_THROWS_AS(env->step(0), std::logic_error);
    env->reset();
    CHECK_FALSE(env->done());
    CHECK(env->steps() == 0);
  }
}

TEST_CASE("observations stay inside their bounds") {
  for (auto name : kEnvNames) {
    auto env = make_environment(name, 3, 300);
    std::mt19937_64 eng(2);
    for (int ep = 0; ep < 3; ++ep) {
      CHECK(within_bounds(env->reset()));
      CHECK(env->reset().values.size() == env->observation_size());
      while (true) {
        const auto r = env->step(random_action(env->action_space(), eng));
        CHECK_MESSAGE(within_bounds(r.observation), name);
        CHECK(r.step <= 300);
        if (r.done) break;
      }
    }
  }
}

TEST_CASE("environments are deterministic given seed and actions") {
  for (auto name : kEnvNames) {
    auto a = make_environment(name, 9, 200), b = make_environment(name, 9, 200);
    std::mt19937_64 e1(4), e2(4);
    for (int ep = 0; ep < 2; ++ep) {
      CHECK(a->reset().values == b->reset().values);
      while (true) {
        const auto ra = a->step(random_action(a->action_space(), e1));
        const auto rb = b->step(random_action(b->action_space(), e2));
        CHECK(ra.observation.values == rb.observation.values);
        CHECK(ra.reward == rb.reward);
        REQUIRE(ra.done == rb.done);
        if (ra.done) break;
      }
    }
  }
}

TEST_CASE("unknown environment names are rejected") {
  CHECK_THROWS_AS(make_environment("cartpole", 1, 10), std::invalid_argument);
  CHECK_FALSE(is_known_environment("cartpole"));
  for (auto name : kEnvNames) CHECK(is_known_environment(name));
}

// ---------------------------------------------------------------- XOR

TEST_CASE("xor rewards the exclusive-or answer") {
  XorEnv env(1);
  const int cases[][4] = {{1, 0, 1, 1}, {1, 1, 0, 1}, {0, 1, 0, 0}, {0, 0, 0, 1}, {1, 1, 1, 0}};
  for (const auto& c : cases) {
    env.reset();
    env.set_bits(c[0], c[1]);
    const auto r = env.step(c[2]);
    CHECK(r.reward == c[3]);
    CHECK(r.done);
  }
  env.reset();
  CHECK_THROWS_AS(env.step(2), std::invalid_argument);
  CHECK_THROWS_AS(env.step(0.5), std::invalid_argument);
  CHECK_THROWS_AS(env.set_bits(2, 0), std::invalid_argument);
}

TEST_CASE("xor samples all four patterns") {
  XorEnv env(5);
  std::map<std::pair<int, int>, int> seen;
  for (int k = 0; k < 400; ++k) {
    const auto o = env.reset();
    ++seen[{int(o.values[0]), int(o.values[1])}];
  }
  CHECK(seen.size() == 4);
  for (const auto& [k, v] : seen) CHECK(v > 60);
}

// ---------------------------------------------------------- Mountain Car

TEST_CASE("mountain car single step from rest") {
  MountainCarDiscrete env(1);
  env.reset();
  env.set_state(-0.5, 0.0);
  const auto r = env.step(1);
  const double v = -0.0025 * std::cos(-1.5);
  CHECK(env.velocity() == doctest::Approx(v).epsilon(1e-15));
  CHECK(env.position() == doctest::Approx(-0.5 + v).epsilon(1e-15));
  CHECK(r.reward == -1.0);
  CHECK_FALSE(r.done);
  CHECK_THROWS_AS(env.step(3), std::invalid_argument);
}

TEST_CASE("mountain car ends at the goal") {
  MountainCarDiscrete env(1);
  env.reset();
  env.set_state(0.49, 0.02);
  const auto r = env.step(2);
  CHECK(r.done);
  CHECK(r.goal_reached);
}

TEST_CASE("mountain car stops at the left wall") {
  MountainCarDiscrete env(1);
  env.reset();
  env.set_state(-1.19, -0.05);
  env.step(0);
  CHECK(env.position() == -1.2);
  CHECK(env.velocity() == 0.0);
}

TEST_CASE("neutral actions never reach the goal from the valley") {
  MountainCarDiscrete d(1);
  MountainCarContinuous c(1);
  for (Environment* env : {static_cast<Environment*>(&d), static_cast<Environment*>(&c)}) {
    env->reset();
    const double neutral = env == &d ? 1.0 : 0.0;
    if (env == &d) d.set_state(-std::numbers::pi / 6.0, 0.0);
    else c.set_state(-std::numbers::pi / 6.0, 0.0);
    StepResult r;
    std::size_t steps = 0;
    do {
      r = env->step(neutral);
      ++steps;
    } while (!r.done);
    CHECK(steps == 1000);
    CHECK_FALSE(r.goal_reached);
  }
}

TEST_CASE("continuous mountain car force term") {
  MountainCarContinuous env(1);
  env.reset();
  env.set_state(-0.3, 0.0);
  env.step(0.0);
  CHECK(env.velocity() == doctest::Approx(-0.0025 * std::cos(-0.9)).epsilon(1e-15));

  MountainCarContinuous a(1), b(1);
  a.reset();
  b.reset();
  a.set_state(-0.5, 0.01);
  b.set_state(-0.5, 0.01);
  const auto ra = a.step(5.0), rb = b.step(1.0);
  CHECK(a.velocity() == b.velocity());
  CHECK(ra.reward == rb.reward);
  CHECK(ra.reward == doctest::Approx(-0.1));
}

TEST_CASE("continuous mountain car trace under full right power") {
  MountainCarContinuous env(1);
  env.reset();
  env.set_state(-0.5, 0.0);
  double x = -0.5, v = 0.0;
  for (int t = 0; t < 100; ++t) {
    v = std::min(0.07, std::max(-0.07, v + 0.0015 - 0.0025 * std::cos(3.0 * x)));
    x = std::min(0.6, std::max(-1.2, x + v));
    if (x <= -1.2 && v < 0.0) v = 0.0;
    const auto r = env.step(1.0);
    CHECK(env.position() == doctest::Approx(x).epsilon(1e-12));
    if (r.done) break;
  }
}

TEST_CASE("continuous mountain car goal bonus") {
  MountainCarContinuous env(1);
  env.reset();
  env.set_state(0.449, 0.02);
  const auto r = env.step(1.0);
  CHECK(r.goal_reached);
  CHECK(r.reward == doctest::Approx(100.0 - 0.1));
}

// -------------------------------------------------------------- Pendulum

TEST_CASE("pendulum upright fixed point") {
  Pendulum env(1);
  env.reset();
  env.set_state(0.0, 0.0);
  const auto r = env.step(0.0);
  CHECK(r.reward == 0.0);
  CHECK(env.angle() == 0.0);
  CHECK(env.angular_velocity() == 0.0);
}

TEST_CASE("pendulum worst-case reward") {
  const double pi = std::numbers::pi;
  CHECK(pendulum_reward(pi, 8.0, 2.0) == doctest::Approx(-(pi * pi + 6.4 + 0.004)));
  CHECK(pendulum_reward(pi, 8.0, 2.0) == doctest::Approx(-16.2736).epsilon(1e-4));
  CHECK(pendulum_reward(3.0 * pi, 0.0, 0.0) == doctest::Approx(-pi * pi));
}

TEST_CASE("pendulum single step by hand") {
  Pendulum env(1);
  env.reset();
  env.set_state(0.7, -1.25);
  const auto r = env.step(0.0);
  const double th_dot = -1.25 + (15.0 * std::sin(0.7)) * 0.05;
  CHECK(env.angular_velocity() == doctest::Approx(th_dot).epsilon(1e-14));
  CHECK(env.angle() == doctest::Approx(0.7 + th_dot * 0.05).epsilon(1e-14));
  CHECK(r.reward == doctest::Approx(-(0.49 + 0.1 * 1.5625)));

  env.set_state(0.0, 7.99);
  env.step(2.0);
  CHECK(env.angular_velocity() == 8.0);
  CHECK_THROWS_AS(env.step(NAN), std::invalid_argument);
}

TEST_CASE("angle wrapping lands in (-pi, pi]") {
  const double pi = std::numbers::pi;
  CHECK(wrap_angle(pi) == doctest::Approx(pi));
  CHECK(wrap_angle(-pi) == doctest::Approx(pi));
  CHECK(wrap_angle(3.0 * pi / 2.0) == doctest::Approx(-pi / 2.0));
  CHECK(wrap_angle(0.25) == doctest::Approx(0.25));
  for (double t = -20.0; t < 20.0; t += 0.37) {
    const double w = wrap_angle(t);
    CHECK(w > -pi);
    CHECK(w <= pi);
    CHECK(std::cos(w) == doctest::Approx(std::cos(t)));
  }
}

// --------------------------------------------------------- Pattern stream

TEST_CASE("noise-free centred frames equal the glyph") {
  PatternStreamParams p;
  p.noise_amplitude = 0.0;
  p.max_offset = 0;
  PatternStream s(p, 1);
  for (int k = 0; k < 200; ++k) {
    const auto f = s.next_frame();
    CHECK(f == pattern_glyph(s.stage(), p.width, p.height));
  }
  CHECK(pattern_glyph(0, 10, 10) != pattern_glyph(1, 10, 10));
}

TEST_CASE("control stream shows one glyph in both stages") {
  PatternStreamParams p;
  p.noise_amplitude = 0.0;
  p.control = true;
  PatternStream s(p, 2);
  std::set<int> stages;
  std::set<std::vector<double>> frames[2];
  for (int k = 0; k < 2000; ++k) {
    const auto f = s.next_frame();
    stages.insert(s.stage());
    frames[s.stage()].insert(f);
  }
  CHECK(stages.size() == 2);
  CHECK(frames[0] == frames[1]);
}

TEST_CASE("stage durations cover the configured range") {
  PatternStreamParams p;  // 20..60 frames
  PatternStream s(p, 3);
  std::vector<std::size_t> runs;
  int last = -1;
  std::size_t len = 0;
  for (int k = 0; k < 10000; ++k) {
    s.next_frame();
    if (s.stage() != last && last != -1) {
      runs.push_back(len);
      len = 0;
    }
    last = s.stage();
    ++len;
  }
  REQUIRE(runs.size() > 150);
  std::map<std::size_t, int> hist;
  double sum = 0.0;
  for (auto r : runs) {
    ++hist[r];
    sum += double(r);
  }
  CHECK(hist.begin()->first >= 20);
  CHECK(hist.rbegin()->first <= 60);
  // Uniform on 20..60: mean 40, sd sqrt((41^2 - 1) / 12) ~ 11.8.
  const double mean = sum / double(runs.size());
  CHECK(std::abs(mean - 40.0) < 3.0 * 11.83 / std::sqrt(double(runs.size())));
  // Both halves of the range are populated.
  std::size_t low = 0;
  for (auto r : runs) low += r <= 40;
  CHECK(low > runs.size() / 3);
  CHECK(low < 2 * runs.size() / 3);
}

TEST_CASE("pattern stream rejects bad parameters") {
  PatternStreamParams p;
  p.min_duration = 10;
  p.max_duration = 5;
  CHECK_THROWS_AS(PatternStream(p, 1), std::invalid_argument);
}

// ---------------------------------------------------------------- Runner

namespace {

RunnerParams single_obstacle_params() {
  RunnerParams p;
  p.spawn_obstacles = false;
  p.max_steps = 40;
  return p;
}

// Geometric check for a single obstacle starting at `column` with `width`:
// the player is safe iff its height is positive whenever the obstacle covers
// the player column. The obstacle covers it on steps column - px .. column -
// px + width - 1 (the obstacle moves before the collision check).
bool survives(const RunnerParams& p, int column, int width, int jump_step) {
  const int px = int(p.player_column);
  const int arc = int(p.jump_arc.size());
  for (int t = column - px; t < column - px + width; ++t) {
    const int k = t - jump_step;
    const int h = (jump_step >= 1 && k >= 0 && k < arc) ? p.jump_arc[std::size_t(k)] : 0;
    if (h == 0) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("jump timing sweep against a single obstacle") {
  const auto p = single_obstacle_params();
  for (int width = 1; width <= 3; ++width) {
    for (int jump = 1; jump <= 12; ++jump) {
      RunnerEnv env(p, 1);
      env.reset();
      env.set_obstacles({{8, width}});
      bool crashed = false;
      for (int t = 1; t <= 14 && !crashed; ++t) crashed = env.step(t == jump ? 1 : 0).done;
      CHECK_MESSAGE(!crashed == survives(p, 8, width, jump), "width " << width << " jump " << jump);
    }
  }
  // Jumping on the step that brings an adjacent obstacle onto the player.
  RunnerEnv env(p, 1);
  env.reset();
  env.set_obstacles({{int(p.player_column) + 1, 2}});
  CHECK_FALSE(env.step(RunnerEnv::kJump).done);
  CHECK_FALSE(env.step(RunnerEnv::kNone).done);
  CHECK_FALSE(env.step(RunnerEnv::kNone).done);
  CHECK(env.score() == 3);
}

TEST_CASE("never jumping ends in a collision") {
  RunnerParams p;
  RunnerEnv env(p, 4);
  env.reset();
  StepResult r;
  do r = env.step(RunnerEnv::kNone);
  while (!r.done);
  CHECK(env.crashed());
  CHECK_FALSE(r.goal_reached);
  CHECK(r.reward == 0.0);
  CHECK(env.score() + 1 == env.steps());
}

namespace {

std::size_t play_constant(std::uint64_t seed, int action, const RunnerParams& p) {
  RunnerEnv env(p, seed);
  env.reset();
  while (!env.step(action).done) {}
  return env.score();
}

// Best achievable score: the obstacle course does not depend on the actions,
// so it is enough to track every distinct player state reachable so far.
std::size_t best_score(std::uint64_t seed, const RunnerParams& p) {
  RunnerEnv start(p, seed);
  start.reset();
  std::vector<RunnerEnv> frontier{start};
  std::size_t best = 0;
  while (!frontier.empty()) {
    std::map<std::tuple<std::size_t, std::size_t, int>, RunnerEnv> next;
    for (const auto& env : frontier) {
      for (int a : {RunnerEnv::kNone, RunnerEnv::kJump}) {
        RunnerEnv e = env;
        const auto r = e.step(a);
        best = std::max(best, e.score());
        if (r.done) continue;
        next.emplace(std::tuple{e.airborne_steps_left(), e.cooldown_left(), e.player_height()}, e);
      }
    }
    frontier.clear();
    for (auto& [k, e] : next) frontier.push_back(std::move(e));
  }
  return best;
}

}  // namespace

TEST_CASE("always-jump sits between never-jump and the best policy") {
  RunnerParams p;
  p.max_steps = 400;
  double never = 0.0, always = 0.0, best = 0.0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    never += double(play_constant(seed, RunnerEnv::kNone, p));
    always += double(play_constant(seed, RunnerEnv::kJump, p));
    best += double(best_score(seed, p));
  }
  INFO("never " << never / 100 << " always " << always / 100 << " best " << best / 100);
  CHECK(never < always);
  CHECK(always < best);
}

TEST_CASE("the collision frame is the inverted scene") {
  RunnerParams p;
  RunnerEnv env(p, 6);
  auto prev = env.reset().values;
  double max_running = 0.0, crash_novelty = 0.0;
  while (true) {
    const auto r = env.step(RunnerEnv::kNone);
    const double n = novelty_frames(prev, r.observation.values);
    if (r.done) {
      crash_novelty = n;
      std::size_t lit = 0;
      for (double v : r.observation.values) lit += v == 1.0;
      CHECK(lit > r.observation.values.size() / 2);
      break;
    }
    max_running = std::max(max_running, n);
    prev = r.observation.values;
  }
  CHECK(crash_novelty > 0.5);
  CHECK(crash_novelty > 5.0 * max_running);
}

TEST_CASE("runner rejects bad parameters") {
  RunnerParams p;
  p.jump_arc.clear();
  CHECK_THROWS_AS(RunnerEnv(p, 1), std::invalid_argument);
  p = RunnerParams{};
  p.min_gap = 0;
  CHECK_THROWS_AS(RunnerEnv(p, 1), std::invalid_argument);
  p = RunnerParams{};
  p.player_column = 10;
  CHECK_THROWS_AS(RunnerEnv(p, 1), std::invalid_argument);
}
