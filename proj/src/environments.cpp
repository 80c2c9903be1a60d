#include "nib/environments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nib {

Observation Environment::reset() {
  started_ = true;
  done_ = false;
  steps_ = 0;
  return do_reset();
}

StepResult Environment::step(double action) {
  if (!started_) throw std::logic_error(std::string(name()) + ": step before reset");
  if (done_) throw std::logic_error(std::string(name()) + ": step after episode end");
  ++steps_;
  StepResult r = do_step(action);
  r.step = steps_;
  done_ = r.done;
  return r;
}

namespace {

int discrete_action(double action, int n, std::string_view env) {
  const double r = std::round(action);
  if (!std::isfinite(action) || r != action || r < 0 || r >= n)
    throw std::invalid_argument(std::string(env) + ": invalid action " + std::to_string(action));
  return static_cast<int>(r);
}

}  // namespace

// ---------------------------------------------------------------- XOR

void XorEnv::set_bits(int b0, int b1) {
  if ((b0 != 0 && b0 != 1) || (b1 != 0 && b1 != 1)) throw std::invalid_argument("xor: bits must be 0/1");
  bits_[0] = b0;
  bits_[1] = b1;
}

Observation XorEnv::observe() const {
  return {{double(bits_[0]), double(bits_[1])}, {{0.0, 1.0}, {0.0, 1.0}}};
}

Observation XorEnv::do_reset() {
  bits_[0] = rng_.bernoulli(0.5) ? 1 : 0;
  bits_[1] = rng_.bernoulli(0.5) ? 1 : 0;
  return observe();
}

StepResult XorEnv::do_step(double action) {
  const int a = discrete_action(action, 2, name());
  const bool correct = a == (bits_[0] ^ bits_[1]);
  StepResult r;
  r.observation = observe();
  r.reward = correct ? 1.0 : 0.0;
  r.done = true;
  r.goal_reached = correct;
  return r;
}

// ---------------------------------------------------------- Mountain Car

Observation MountainCarBase::observe() const {
  return {{x_, v_},
          {{params_.min_position, params_.max_position}, {-params_.max_speed, params_.max_speed}}};
}

Observation MountainCarBase::do_reset() {
  x_ = rng_.uniform(-0.6, -0.4);
  v_ = 0.0;
  return observe();
}

StepResult MountainCarBase::advance(double push, double reward) {
  v_ += push - params_.gravity * std::cos(3.0 * x_);
  v_ = std::clamp(v_, -params_.max_speed, params_.max_speed);
  x_ += v_;
  x_ = std::clamp(x_, params_.min_position, params_.max_position);
  if (x_ == params_.min_position && v_ < 0.0) v_ = 0.0;

  StepResult r;
  r.goal_reached = x_ >= params_.goal_position;
  r.done = r.goal_reached || steps() >= params_.max_steps;
  r.reward = reward;
  r.observation = observe();
  return r;
}

StepResult MountainCarDiscrete::do_step(double action) {
  const int a = discrete_action(action, 3, name());
  return advance(double(a - 1) * params_.force, -1.0);
}

StepResult MountainCarContinuous::do_step(double action) {
  if (std::isnan(action)) throw std::invalid_argument("mountain_car_continuous: NaN action");
  const double u = std::clamp(action, -1.0, 1.0);
  StepResult r = advance(u * params_.power, -0.1 * u * u);
  if (r.goal_reached) r.reward += 100.0;
  return r;
}

// -------------------------------------------------------------- Pendulum

double wrap_angle(double theta) {
  constexpr double pi = std::numbers::pi;
  double w = std::fmod(theta + pi, 2.0 * pi);
  if (w < 0.0) w += 2.0 * pi;
  w -= pi;  // now in [-pi, pi)
  if (w == -pi) w = pi;
  return w;
}

double pendulum_reward(double theta, double theta_dot, double torque) {
  const double th = wrap_angle(theta);
  return -(th * th + 0.1 * theta_dot * theta_dot + 0.001 * torque * torque);
}

Observation Pendulum::observe() const {
  return {{wrap_angle(theta_), theta_dot_},
          {{-std::numbers::pi, std::numbers::pi}, {-params_.max_speed, params_.max_speed}}};
}

Observation Pendulum::do_reset() {
  theta_ = rng_.uniform(-std::numbers::pi, std::numbers::pi);
  theta_dot_ = rng_.uniform(-1.0, 1.0);
  return observe();
}

StepResult Pendulum::do_step(double action) {
  if (std::isnan(action)) throw std::invalid_argument("pendulum: NaN action");
  const double u = std::clamp(action, -params_.max_torque, params_.max_torque);
  const double reward = pendulum_reward(theta_, theta_dot_, u);
  const auto& p = params_;
  theta_dot_ += (3.0 * p.g / (2.0 * p.l) * std::sin(theta_) + 3.0 / (p.m * p.l * p.l) * u) * p.dt;
  theta_dot_ = std::clamp(theta_dot_, -p.max_speed, p.max_speed);
  theta_ += theta_dot_ * p.dt;

  StepResult r;
  r.reward = reward;
  r.done = steps() >= p.max_steps;
  r.observation = observe();
  return r;
}

// --------------------------------------------------------- Pattern stream

std::vector<double> pattern_glyph(int which, std::size_t width, std::size_t height) {
  std::vector<double> g(width * height, 0.0);
  const double cx = (double(width) - 1.0) / 2.0, cy = (double(height) - 1.0) / 2.0;
  const double scale = double(std::min(width, height)) / 10.0;
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      const double d = std::hypot(double(c) - cx, double(r) - cy) / scale;
      const bool on = which == 0 ? d <= 2.3 : (d >= 2.6 && d <= 3.8);
      g[r * width + c] = on ? 1.0 : 0.0;
    }
  }
  return g;
}

PatternStream::PatternStream(PatternStreamParams p, std::uint64_t seed) : params_(p), rng_(seed) {
  if (p.width == 0 || p.height == 0) throw std::invalid_argument("pattern stream: empty frame");
  if (p.min_duration == 0 || p.min_duration > p.max_duration)
    throw std::invalid_argument("pattern stream: invalid stage duration range");
  glyphs_[0] = pattern_glyph(0, p.width, p.height);
  glyphs_[1] = p.control ? glyphs_[0] : pattern_glyph(1, p.width, p.height);
}

void PatternStream::begin_stage(int stage) {
  stage_ = stage;
  stage_length_ = static_cast<std::size_t>(
      rng_.uniform_int(std::int64_t(params_.min_duration), std::int64_t(params_.max_duration)));
  remaining_ = stage_length_;
}

std::vector<double> PatternStream::render(int glyph, int dx, int dy) {
  const auto w = static_cast<int>(params_.width), h = static_cast<int>(params_.height);
  std::vector<double> frame(params_.width * params_.height, 0.0);
  const auto& g = glyphs_[glyph];
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const int sr = r - dy, sc = c - dx;
      if (sr >= 0 && sr < h && sc >= 0 && sc < w) frame[r * w + c] = g[sr * w + sc];
    }
  }
  if (params_.noise_amplitude > 0.0)
    for (auto& v : frame)
      v = std::clamp(v + rng_.uniform(-params_.noise_amplitude, params_.noise_amplitude), 0.0, 1.0);
  return frame;
}

std::vector<double> PatternStream::next_frame() {
  if (remaining_ == 0) begin_stage(1 - stage_);
  --remaining_;
  const int m = params_.max_offset;
  const int dx = m > 0 ? int(rng_.uniform_int(-m, m)) : 0;
  const int dy = m > 0 ? int(rng_.uniform_int(-m, m)) : 0;
  return render(stage_, dx, dy);
}

Observation PatternEnv::frame_observation(std::vector<double> frame) const {
  Observation o;
  o.bounds.assign(frame.size(), Bounds{0.0, 1.0});
  o.values = std::move(frame);
  return o;
}

Observation PatternEnv::do_reset() { return frame_observation(stream_.next_frame()); }

StepResult PatternEnv::do_step(double) {
  StepResult r;
  r.observation = frame_observation(stream_.next_frame());
  r.done = steps() >= stream_.params().max_steps;
  return r;
}

// ---------------------------------------------------------------- Runner

RunnerEnv::RunnerEnv(RunnerParams p, std::uint64_t seed) : params_(std::move(p)), rng_(seed) {
  if (params_.jump_arc.empty()) throw std::invalid_argument("runner: empty jump arc");
  if (params_.player_column >= params_.width) throw std::invalid_argument("runner: player off screen");
  if (params_.min_gap == 0 || params_.min_gap > params_.max_gap)
    throw std::invalid_argument("runner: invalid gap range");
  if (params_.min_width == 0 || params_.min_width > params_.max_width)
    throw std::invalid_argument("runner: invalid obstacle width range");
  for (int h : params_.jump_arc)
    if (h < 1 || std::size_t(h) >= params_.height) throw std::invalid_argument("runner: invalid jump arc");
}

std::size_t RunnerEnv::draw_gap() {
  return static_cast<std::size_t>(
      rng_.uniform_int(std::int64_t(params_.min_gap), std::int64_t(params_.max_gap)));
}

Observation RunnerEnv::render() const {
  const std::size_t w = params_.width, h = params_.height;
  Observation o;
  o.values.assign(w * h, 0.0);
  o.bounds.assign(w * h, Bounds{0.0, 1.0});
  // Row 0 is the top of the frame; the ground line is the bottom row.
  auto set = [&](std::size_t col, std::size_t level) {
    if (col < w && level < h) o.values[(h - 1 - level) * w + col] = 1.0;
  };
  for (std::size_t c = 0; c < w; ++c) set(c, 0);
  for (const auto& ob : obstacles_)
    for (int c = ob.column; c < ob.column + ob.width; ++c)
      if (c >= 0) set(std::size_t(c), 1);
  set(params_.player_column, std::size_t(height_) + 1);
  if (crashed_)
    for (auto& v : o.values) v = 1.0 - v;
  return o;
}

Observation RunnerEnv::do_reset() {
  obstacles_.clear();
  air_left_ = 0;
  cooldown_ = 0;
  height_ = 0;
  score_ = 0;
  crashed_ = false;
  until_spawn_ = params_.spawn_obstacles ? draw_gap() : 0;
  return render();
}

StepResult RunnerEnv::do_step(double action) {
  const int a = discrete_action(action, 2, name());
  const auto arc_len = params_.jump_arc.size();

  if (a == kJump && air_left_ == 0 && cooldown_ == 0) air_left_ = arc_len;
  height_ = air_left_ > 0 ? params_.jump_arc[arc_len - air_left_] : 0;

  for (auto& ob : obstacles_) --ob.column;
  std::erase_if(obstacles_, [](const Obstacle& ob) { return ob.column + ob.width <= 0; });
  if (params_.spawn_obstacles) {
    if (until_spawn_ > 0) --until_spawn_;
    if (until_spawn_ == 0) {
      const auto width = rng_.uniform_int(std::int64_t(params_.min_width), std::int64_t(params_.max_width));
      obstacles_.push_back({int(params_.width), int(width)});
      until_spawn_ = draw_gap() + std::size_t(width);
    }
  }

  const int px = int(params_.player_column);
  for (const auto& ob : obstacles_)
    if (height_ == 0 && ob.column <= px && px < ob.column + ob.width) crashed_ = true;

  if (air_left_ > 0) {
    if (--air_left_ == 0) cooldown_ = params_.landing_cooldown;
  } else if (cooldown_ > 0) {
    --cooldown_;
  }

  StepResult r;
  if (!crashed_) ++score_;
  r.reward = crashed_ ? 0.0 : 1.0;
  r.goal_reached = !crashed_ && steps() >= params_.max_steps;
  r.done = crashed_ || steps() >= params_.max_steps;
  r.observation = render();
  return r;
}

// ---------------------------------------------------------------- factory

bool is_known_environment(std::string_view name) {
  for (auto n : {"xor", "mountain_car", "mountain_car_continuous", "pendulum", "patterns",
                 "patterns_control", "runner"})
    if (name == n) return true;
  return false;
}

std::unique_ptr<Environment> make_environment(std::string_view name, std::uint64_t seed,
                                              std::size_t max_steps) {
  if (name == "xor") return std::make_unique<XorEnv>(seed);
  if (name == "mountain_car") {
    MountainCarParams p;
    p.max_steps = max_steps;
    return std::make_unique<MountainCarDiscrete>(seed, p);
  }
  if (name == "mountain_car_continuous") {
    auto p = MountainCarContinuous::continuous_defaults();
    p.max_steps = max_steps;
    return std::make_unique<MountainCarContinuous>(seed, p);
  }
  if (name == "pendulum") {
    PendulumParams p;
    p.max_steps = max_steps;
    return std::make_unique<Pendulum>(seed, p);
  }
  if (name == "patterns" || name == "patterns_control") {
    PatternStreamParams p;
    p.max_steps = max_steps;
    p.control = name == "patterns_control";
    return std::make_unique<PatternEnv>(p, seed);
  }
  if (name == "runner") {
    RunnerParams p;
    p.max_steps = max_steps;
    return std::make_unique<RunnerEnv>(p, seed);
  }
  throw std::invalid_argument("unknown environment '" + std::string(name) + "'");
}

}  // namespace nib
