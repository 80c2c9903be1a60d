#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "nib/random.hpp"

namespace nib {

struct Bounds {
  double low = 0.0;
  double high = 1.0;
};

struct Observation {
  std::vector<double> values;
  std::vector<Bounds> bounds;  // one per value
};

struct StepResult {
  Observation observation;
  double reward = 0.0;
  bool done = false;
  bool goal_reached = false;
  std::size_t step = 0;  // steps taken in this episode, including this one
};

struct ActionSpace {
  enum class Kind { Discrete, Continuous };
  Kind kind = Kind::Discrete;
  int n = 2;          // discrete
  double low = -1.0;  // continuous
  double high = 1.0;
};

// Common episode protocol: reset() starts an episode, step() advances it, and
// stepping a finished (or never started) episode throws std::logic_error.
// Environments are deterministic given their seed and the action sequence.
class Environment {
public:
  virtual ~Environment() = default;

  virtual std::string_view name() const = 0;
  virtual ActionSpace action_space() const = 0;
  virtual std::size_t observation_size() const = 0;
  // True when observations are images that can be fed to the input layer
  // pixel for pixel.
  virtual bool produces_frames() const { return false; }
  virtual std::unique_ptr<Environment> clone() const = 0;

  Observation reset();
  // Discrete actions are passed as their integral value.
  StepResult step(double action);

  bool done() const noexcept { return done_; }
  std::size_t steps() const noexcept { return steps_; }

protected:
  virtual Observation do_reset() = 0;
  virtual StepResult do_step(double action) = 0;

private:
  bool started_ = false;
  bool done_ = false;
  std::size_t steps_ = 0;
};

// ---------------------------------------------------------------- XOR

class XorEnv final : public Environment {
public:
  explicit XorEnv(std::uint64_t seed) : rng_(seed) {}

  std::string_view name() const override { return "xor"; }
  ActionSpace action_space() const override { return {ActionSpace::Kind::Discrete, 2}; }
  std::size_t observation_size() const override { return 2; }
  std::unique_ptr<Environment> clone() const override { return std::make_unique<XorEnv>(*this); }

  int bit(int k) const { return bits_[k]; }
  // Overrides the bits sampled by the last reset.
  void set_bits(int b0, int b1);

protected:
  Observation do_reset() override;
  StepResult do_step(double action) override;

private:
  Observation observe() const;
  Rng rng_;
  int bits_[2] = {0, 0};
};

// ---------------------------------------------------------- Mountain Car

struct MountainCarParams {
  double min_position = -1.2;
  double max_position = 0.6;
  double max_speed = 0.07;
  double gravity = 0.0025;
  double force = 0.001;  // discrete; the continuous variant uses power
  double power = 0.0015;
  double goal_position = 0.5;  // 0.45 for the continuous variant
  std::size_t max_steps = 1000;
};

class MountainCarBase : public Environment {
public:
  std::size_t observation_size() const override { return 2; }

  double position() const noexcept { return x_; }
  double velocity() const noexcept { return v_; }
  void set_state(double x, double v) {
    x_ = x;
    v_ = v;
  }
  const MountainCarParams& params() const noexcept { return params_; }

protected:
  MountainCarBase(MountainCarParams p, std::uint64_t seed) : params_(p), rng_(seed) {}
  Observation do_reset() override;
  // Shared integrator; `push` is the signed force term.
  StepResult advance(double push, double reward);
  Observation observe() const;

  MountainCarParams params_;
  Rng rng_;
  double x_ = 0.0, v_ = 0.0;
};

class MountainCarDiscrete final : public MountainCarBase {
public:
  explicit MountainCarDiscrete(std::uint64_t seed, MountainCarParams p = {}) : MountainCarBase(p, seed) {}
  std::string_view name() const override { return "mountain_car"; }
  ActionSpace action_space() const override { return {ActionSpace::Kind::Discrete, 3}; }
  std::unique_ptr<Environment> clone() const override {
    return std::make_unique<MountainCarDiscrete>(*this);
  }

protected:
  StepResult do_step(double action) override;
};

class MountainCarContinuous final : public MountainCarBase {
public:
  explicit MountainCarContinuous(std::uint64_t seed, MountainCarParams p = continuous_defaults())
      : MountainCarBase(p, seed) {}
  std::string_view name() const override { return "mountain_car_continuous"; }
  ActionSpace action_space() const override {
    return {ActionSpace::Kind::Continuous, 0, -1.0, 1.0};
  }
  std::unique_ptr<Environment> clone() const override {
    return std::make_unique<MountainCarContinuous>(*this);
  }
  static MountainCarParams continuous_defaults() {
    MountainCarParams p;
    p.goal_position = 0.45;
    return p;
  }

protected:
  StepResult do_step(double action) override;
};

// -------------------------------------------------------------- Pendulum

struct PendulumParams {
  double max_speed = 8.0;
  double max_torque = 2.0;
  double dt = 0.05;
  double g = 10.0;
  double m = 1.0;
  double l = 1.0;
  std::size_t max_steps = 1000;
};

// Maps an angle to (-pi, pi].
double wrap_angle(double theta);

// Per-step reward of the pendulum task at the given state and torque.
double pendulum_reward(double theta, double theta_dot, double torque);

class Pendulum final : public Environment {
public:
  explicit Pendulum(std::uint64_t seed, PendulumParams p = {}) : params_(p), rng_(seed) {}

  std::string_view name() const override { return "pendulum"; }
  ActionSpace action_space() const override {
    return {ActionSpace::Kind::Continuous, 0, -params_.max_torque, params_.max_torque};
  }
  std::size_t observation_size() const override { return 2; }
  std::unique_ptr<Environment> clone() const override { return std::make_unique<Pendulum>(*this); }

  double angle() const noexcept { return theta_; }
  double angular_velocity() const noexcept { return theta_dot_; }
  void set_state(double theta, double theta_dot) {
    theta_ = theta;
    theta_dot_ = theta_dot;
  }

protected:
  Observation do_reset() override;
  StepResult do_step(double action) override;

private:
  Observation observe() const;
  PendulumParams params_;
  Rng rng_;
  double theta_ = 0.0, theta_dot_ = 0.0;
};

// --------------------------------------------------------- Pattern stream

struct PatternStreamParams {
  std::size_t width = 10;
  std::size_t height = 10;
  double noise_amplitude = 0.1;
  int max_offset = 2;             // glyph shift in pixels, each axis
  std::size_t min_duration = 20;  // frames per stage, inclusive range
  std::size_t max_duration = 60;
  bool control = false;           // same glyph in both stages
  std::size_t max_steps = 1000;   // episode length when used as an environment
};

// Two fixed glyphs on the frame grid: a filled disk and a ring.
std::vector<double> pattern_glyph(int which, std::size_t width, std::size_t height);

// Alternates between two glyph stages at random durations, shifting the glyph
// and adding pixel noise on every frame.
class PatternStream {
public:
  PatternStream(PatternStreamParams p, std::uint64_t seed);

  std::vector<double> next_frame();
  // Stage (0 or 1) of the most recent frame.
  int stage() const noexcept { return stage_; }
  // Length of the stage the most recent frame belongs to.
  std::size_t stage_length() const noexcept { return stage_length_; }
  const PatternStreamParams& params() const noexcept { return params_; }

  // Renders a glyph at the given offset with the stream's noise.
  std::vector<double> render(int glyph, int dx, int dy);

private:
  void begin_stage(int stage);

  PatternStreamParams params_;
  Rng rng_;
  std::vector<double> glyphs_[2];
  int stage_ = 1;
  std::size_t stage_length_ = 0;
  std::size_t remaining_ = 0;
};

class PatternEnv final : public Environment {
public:
  PatternEnv(PatternStreamParams p, std::uint64_t seed) : stream_(p, seed) {}

  std::string_view name() const override { return "patterns"; }
  ActionSpace action_space() const override { return {ActionSpace::Kind::Discrete, 1}; }
  std::size_t observation_size() const override {
    return stream_.params().width * stream_.params().height;
  }
  bool produces_frames() const override { return true; }
  std::unique_ptr<Environment> clone() const override { return std::make_unique<PatternEnv>(*this); }

  int stage() const noexcept { return stream_.stage(); }

protected:
  Observation do_reset() override;
  StepResult do_step(double action) override;

private:
  Observation frame_observation(std::vector<double> frame) const;
  PatternStream stream_;
};

// ---------------------------------------------------------------- Runner

struct RunnerParams {
  std::size_t width = 10;   // frame columns
  std::size_t height = 10;  // frame rows
  std::size_t player_column = 1;
  std::vector<int> jump_arc = {1, 2, 2, 1};  // player height on each airborne step
  std::size_t landing_cooldown = 1;          // grounded steps after a landing
  std::size_t min_gap = 7;                   // steps between obstacle spawns, inclusive
  std::size_t max_gap = 14;
  std::size_t min_width = 1;
  std::size_t max_width = 2;
  bool spawn_obstacles = true;
  std::size_t max_steps = 1000;
};

struct Obstacle {
  int column = 0;  // leftmost occupied column
  int width = 1;
};

// Side-scrolling obstacle course. Obstacles slide one column left per step;
// landing on a column an obstacle occupies ends the episode. Reward is 1 per
// survived step; the final observation of a collision is the inverted scene.
class RunnerEnv final : public Environment {
public:
  static constexpr int kJump = 1;
  static constexpr int kNone = 0;

  RunnerEnv(RunnerParams p, std::uint64_t seed);

  std::string_view name() const override { return "runner"; }
  ActionSpace action_space() const override { return {ActionSpace::Kind::Discrete, 2}; }
  std::size_t observation_size() const override { return params_.width * params_.height; }
  bool produces_frames() const override { return true; }
  std::unique_ptr<Environment> clone() const override { return std::make_unique<RunnerEnv>(*this); }

  std::size_t score() const noexcept { return score_; }
  int player_height() const noexcept { return height_; }
  std::size_t airborne_steps_left() const noexcept { return air_left_; }
  std::size_t cooldown_left() const noexcept { return cooldown_; }
  const std::vector<Obstacle>& obstacles() const noexcept { return obstacles_; }
  void set_obstacles(std::vector<Obstacle> obs) { obstacles_ = std::move(obs); }
  bool crashed() const noexcept { return crashed_; }
  const RunnerParams& params() const noexcept { return params_; }

protected:
  Observation do_reset() override;
  StepResult do_step(double action) override;

private:
  Observation render() const;
  std::size_t draw_gap();

  RunnerParams params_;
  Rng rng_;
  std::vector<Obstacle> obstacles_;
  std::size_t air_left_ = 0;
  std::size_t cooldown_ = 0;
  int height_ = 0;
  std::size_t until_spawn_ = 0;
  std::size_t score_ = 0;
  bool crashed_ = false;
};

// ---------------------------------------------------------------- factory

// Names: xor, mountain_car, mountain_car_continuous, pendulum, patterns,
// patterns_control, runner. Throws std::invalid_argument otherwise.
std::unique_ptr<Environment> make_environment(std::string_view name, std::uint64_t seed,
                                              std::size_t max_steps);

bool is_known_environment(std::string_view name);

}  // namespace nib
