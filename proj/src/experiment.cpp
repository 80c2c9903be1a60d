#include "nib/experiment.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

#include "nib/encoding.hpp"
#include "nib/environments.hpp"
#include "nib/io.hpp"
#include "nib/learning.hpp"

namespace nib {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(RewardSource s) {
  switch (s) {
    case RewardSource::EnvReward: return "env";
    case RewardSource::NoveltyFiring: return "novelty_firing";
    case RewardSource::NoveltyFrames: return "novelty_frames";
  }
  return "unknown";
}

std::string_view to_string(StdpMode m) {
  switch (m) {
    case StdpMode::Off: return "off";
    case StdpMode::Plain: return "plain";
    case StdpMode::Modulated: return "modulated";
  }
  return "unknown";
}

namespace {

RewardSource parse_reward_source(const std::string& s) {
  for (auto v : {RewardSource::EnvReward, RewardSource::NoveltyFiring, RewardSource::NoveltyFrames})
    if (to_string(v) == s) return v;
  throw std::invalid_argument("unknown reward_source '" + s + "'");
}

StdpMode parse_stdp_mode(const std::string& s) {
  for (auto v : {StdpMode::Off, StdpMode::Plain, StdpMode::Modulated})
    if (to_string(v) == s) return v;
  throw std::invalid_argument("unknown stdp mode '" + s + "'");
}

// Visits every key of an object, rejecting keys the handler does not know.
template <typename F>
void for_keys(const json& obj, std::string_view where, F&& handle) {
  if (!obj.is_object()) throw std::invalid_argument(std::string(where) + " must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!handle(it.key(), it.value()))
      throw std::invalid_argument("unknown key '" + it.key() + "' in " + std::string(where));
}

bool frames_environment(std::string_view env) {
  return env == "patterns" || env == "patterns_control" || env == "runner";
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

InputEncoder make_encoder(const ExperimentConfig& c, const Environment& env) {
  if (env.produces_frames() || c.encoding == "direct") return InputEncoder::direct(env.observation_size());
  return InputEncoder::population(env.observation_size(), c.encoding_bins);
}

double choose_action(const Network& net, const ActionSpace& space) {
  if (space.kind == ActionSpace::Kind::Discrete)
    return double(read_action_discrete(net.current(), net, space.n));
  return read_action_continuous(net.current(), net, space.low, space.high);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!is_known_environment(environment))
    throw std::invalid_argument("unknown environment '" + environment + "'");
  if (reward_source == RewardSource::NoveltyFrames && !frames_environment(environment))
    throw std::invalid_argument("novelty_frames needs a frame-producing environment");
  if (max_steps == 0) throw std::invalid_argument("max_steps must be >= 1");
  if (steps_per_decision == 0) throw std::invalid_argument("steps_per_decision must be >= 1");
  if (encoding != "population" && encoding != "direct")
    throw std::invalid_argument("encoding must be 'population' or 'direct'");
  if (encoding_bins == 0) throw std::invalid_argument("encoding_bins must be >= 1");
  if (seeds.empty()) throw std::invalid_argument("at least one seed is required");
  if (learning.consolidate_every == 0) throw std::invalid_argument("consolidate_every must be >= 1");
  if (!std::isfinite(learning.stdp_modulation) || learning.stdp_modulation < 0.0)
    throw std::invalid_argument("stdp_modulation must be finite and >= 0");
  if (!(learning.reward_baseline_decay >= 0.0 && learning.reward_baseline_decay < 1.0))
    throw std::invalid_argument("reward_baseline_decay must lie in [0, 1)");
  if (!(learning.novelty_baseline_decay >= 0.0 && learning.novelty_baseline_decay < 1.0))
    throw std::invalid_argument("novelty_baseline_decay must lie in [0, 1)");
  if (network.n_output == 0) throw std::invalid_argument("experiments need output neurons");
  resolved_network_config(*this, seeds.front()).validate();
}

NetworkConfig resolved_network_config(const ExperimentConfig& c, std::uint64_t seed) {
  NetworkConfig n = c.network;
  const auto env = make_environment(c.environment, 0, c.max_steps);
  if (env->produces_frames()) {
    n.n_input = env->observation_size();
    n.input_width = n.input_height = static_cast<std::size_t>(std::lround(std::sqrt(double(n.n_input))));
    if (n.input_width * n.input_height != n.n_input) n.input_width = n.input_height = 0;
  } else if (c.encoding == "direct") {
    n.n_input = env->observation_size();
    n.input_width = n.input_height = 0;
  } else {
    n.n_input = env->observation_size() * c.encoding_bins;
    n.input_width = n.input_height = 0;
  }
  n.seed = seed;
  return n;
}

// ------------------------------------------------------------------ config io

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  bool c_max_given = false;
  for_keys(j, "config", [&](const std::string& k, const json& v) {
    if (k == "name") c.name = v.get<std::string>();
    else if (k == "environment") c.environment = v.get<std::string>();
    else if (k == "reward_source") c.reward_source = parse_reward_source(v.get<std::string>());
    else if (k == "episodes") c.episodes = v.get<std::size_t>();
    else if (k == "max_steps") c.max_steps = v.get<std::size_t>();
    else if (k == "steps_per_decision") c.steps_per_decision = v.get<std::size_t>();
    else if (k == "encoding") c.encoding = v.get<std::string>();
    else if (k == "encoding_bins") c.encoding_bins = v.get<std::size_t>();
    else if (k == "reset_activity") c.reset_activity = v.get<bool>();
    else if (k == "seeds") c.seeds = v.get<std::vector<std::uint64_t>>();
    else if (k == "output_dir") c.output_dir = v.get<std::string>();
    else if (k == "network") {
      auto& n = c.network;
      for_keys(v, "network", [&](const std::string& nk, const json& nv) {
        if (nk == "n_noise") n.n_noise = nv.get<std::size_t>();
        else if (nk == "n_hidden") n.n_hidden = nv.get<std::size_t>();
        else if (nk == "n_output") n.n_output = nv.get<std::size_t>();
        else if (nk == "reward_neuron") n.reward_neuron = nv.get<bool>();
        else if (nk == "connection_scale") n.connection_scale = nv.get<double>();
        else if (nk == "output_distance") n.output_distance = nv.get<double>();
        else if (nk == "firing_threshold") n.firing_threshold = nv.get<double>();
        else if (nk == "noise_rate") n.noise_rate = nv.get<double>();
        else if (nk == "learning_rate") n.learning_rate = nv.get<double>();
        else if (nk == "c_max") { n.c_max = nv.get<double>(); c_max_given = true; }
        else if (nk == "init_strength_scale") n.init_strength_scale = nv.get<double>();
        else if (nk == "reward_strategy") n.reward_strategy = parse_reward_strategy(nv.get<std::string>());
        else if (nk == "memory_mode") n.memory_mode = parse_memory_mode(nv.get<std::string>());
        else if (nk == "consolidation_threshold") n.consolidation_threshold = nv.get<double>();
        else if (nk == "consolidation_sigma") n.consolidation_sigma = nv.get<double>();
        else if (nk == "aging_rate") n.aging_rate = nv.get<double>();
        else return false;
        return true;
      });
    } else if (k == "learning") {
      auto& l = c.learning;
      for_keys(v, "learning", [&](const std::string& lk, const json& lv) {
        if (lk == "stdp") l.stdp = parse_stdp_mode(lv.get<std::string>());
        else if (lk == "stdp_modulation") l.stdp_modulation = lv.get<double>();
        else if (lk == "direct_reward") l.direct_reward = lv.get<bool>();
        else if (lk == "reward_scale") l.reward_scale = lv.get<double>();
        else if (lk == "reward_baseline") l.reward_baseline = lv.get<double>();
        else if (lk == "reward_baseline_decay") l.reward_baseline_decay = lv.get<double>();
        else if (lk == "novelty_scale") l.novelty_scale = lv.get<double>();
        else if (lk == "novelty_baseline_decay") l.novelty_baseline_decay = lv.get<double>();
        else if (lk == "consolidate_every") l.consolidate_every = lv.get<std::size_t>();
        else return false;
        return true;
      });
    } else if (k == "eval") {
      for_keys(v, "eval", [&](const std::string& ek, const json& ev) {
        if (ek == "trials") c.eval.trials = ev.get<std::size_t>();
        else return false;
        return true;
      });
    } else {
      return false;
    }
    return true;
  });
  if (!c_max_given) c.network.c_max = 4.0 * c.network.firing_threshold;
  c.validate();
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  const auto& n = c.network;
  const auto& l = c.learning;
  json net = {
      {"n_noise", n.n_noise},
      {"n_hidden", n.n_hidden},
      {"n_output", n.n_output},
      {"reward_neuron", n.reward_neuron},
      {"connection_scale", n.connection_scale},
      {"output_distance", n.output_distance},
      {"firing_threshold", n.firing_threshold},
      {"noise_rate", n.noise_rate},
      {"learning_rate", n.learning_rate},
      {"c_max", n.c_max},
      {"init_strength_scale", n.init_strength_scale},
      {"reward_strategy", std::string(to_string(n.reward_strategy))},
      {"memory_mode", std::string(to_string(n.memory_mode))},
      {"consolidation_threshold", n.effective_consolidation_threshold()},
      {"consolidation_sigma", n.consolidation_sigma},
      {"aging_rate", n.aging_rate},
  };
  json learn = {
      {"stdp", std::string(to_string(l.stdp))},
      {"stdp_modulation", l.stdp_modulation},
      {"direct_reward", l.direct_reward},
      {"reward_scale", l.reward_scale},
      {"reward_baseline", l.reward_baseline},
      {"reward_baseline_decay", l.reward_baseline_decay},
      {"novelty_scale", l.novelty_scale},
      {"novelty_baseline_decay", l.novelty_baseline_decay},
      {"consolidate_every", l.consolidate_every},
  };
  return {
      {"name", c.name},
      {"environment", c.environment},
      {"reward_source", std::string(to_string(c.reward_source))},
      {"episodes", c.episodes},
      {"max_steps", c.max_steps},
      {"steps_per_decision", c.steps_per_decision},
      {"encoding", c.encoding},
      {"encoding_bins", c.encoding_bins},
      {"reset_activity", c.reset_activity},
      {"seeds", c.seeds},
      {"output_dir", c.output_dir.generic_string()},
      {"network", net},
      {"learning", learn},
      {"eval", {{"trials", c.eval.trials}}},
  };
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config '" + path.string() + "': " + e.what());
  }
  return config_from_json(j);
}

json to_json(const EpisodeRecord& r) {
  return {{"seed", r.seed},
          {"episode", r.episode},
          {"steps", r.steps},
          {"total_reward", r.total_reward},
          {"mean_reward", r.mean_reward},
          {"total_novelty", r.total_novelty},
          {"goal_reached", r.goal_reached}};
}

EpisodeRecord episode_from_json(const json& j) {
  EpisodeRecord r;
  r.seed = j.at("seed").get<std::uint64_t>();
  r.episode = j.at("episode").get<std::size_t>();
  r.steps = j.at("steps").get<std::size_t>();
  r.total_reward = j.at("total_reward").get<double>();
  r.mean_reward = j.at("mean_reward").get<double>();
  r.total_novelty = j.at("total_novelty").get<double>();
  r.goal_reached = j.at("goal_reached").get<bool>();
  return r;
}

// --------------------------------------------------------------------- loop

namespace {

struct EpisodeOutcome {
  std::size_t steps = 0;
  double total_reward = 0.0;
  double total_novelty = 0.0;
  bool goal_reached = false;
};

class Trainer {
public:
  Trainer(const ExperimentConfig& c, Network& net, RunCounters& counters)
      : c_(c), net_(net), counters_(counters) {}

  // Plays one episode. With learn == false no weight, plasticity or
  // accumulator entry is touched.
  EpisodeOutcome play(Environment& env, const InputEncoder& encoder, bool learn,
                      std::vector<std::array<std::size_t, 2>>* stage_fired,
                      std::array<std::size_t, 2>* stage_steps) {
    EpisodeOutcome out;
    Observation obs = env.reset();
    if (c_.reset_activity) net_.clear_activity();
    std::vector<double> input(encoder.input_size());
    const auto space = env.action_space();
    const double gamma = c_.network.learning_rate;
    const auto* patterns = dynamic_cast<const PatternEnv*>(&env);

    while (true) {
      encoder.encode(obs, input);
      const int stage = patterns ? patterns->stage() : 0;
      for (std::size_t k = 0; k < c_.steps_per_decision; ++k) {
        net_.step(input);
        if (stage_fired) {
          const auto& cur = net_.current();
          for (std::size_t i = 0; i < net_.size(); ++i) (*stage_fired)[i][stage] += cur[i];
          ++(*stage_steps)[stage];
        }
        if (learn && c_.learning.stdp == StdpMode::Plain && k + 1 < c_.steps_per_decision) {
          stdp_update(net_, gamma, c_.learning.stdp_modulation);
          ++counters_.weight_updates;
        }
      }

      const StepResult res = env.step(choose_action(net_, space));
      out.total_reward += res.reward;

      if (learn) {
        StdpUpdate delta;
        if (c_.learning.stdp == StdpMode::Plain) {
          delta = stdp_update(net_, gamma, c_.learning.stdp_modulation);
          ++counters_.weight_updates;
        } else {
          delta = stdp_delta(net_.previous(), net_.current());
        }
        const double firing_novelty = novelty_firing(net_, delta);

        double signal = 0.0;
        bool from_env = false;
        switch (c_.reward_source) {
          case RewardSource::EnvReward:
            signal = reward_signal(res.reward);
            from_env = true;
            out.total_novelty += firing_novelty;
            break;
          case RewardSource::NoveltyFiring:
            signal = novelty_signal(firing_novelty);
            out.total_novelty += firing_novelty;
            break;
          case RewardSource::NoveltyFrames: {
            const double n = novelty_frames(obs.values, res.observation.values);
            signal = novelty_signal(n);
            out.total_novelty += n;
            break;
          }
        }

        if (c_.learning.stdp == StdpMode::Modulated && signal != 0.0) {
          kernels::apply_delta(delta.entries(), signal * gamma, net_.c_max(), net_.connections,
                               net_.plasticity, net_.change);
          ++counters_.weight_updates;
          if (from_env) ++counters_.env_reward_updates;
        }
        if (c_.learning.direct_reward && signal != 0.0) {
          direct_reward(net_, c_.network.reward_strategy, signal, gamma);
          ++counters_.weight_updates;
          if (from_env) ++counters_.env_reward_updates;
        }
      }

      ++out.steps;
      if (res.done) {
        out.goal_reached = res.goal_reached;
        break;
      }
      obs = res.observation;
    }
    return out;
  }

private:
  double reward_signal(double r) {
    const auto& l = c_.learning;
    const double scaled = l.reward_scale * r;
    if (l.reward_baseline_decay <= 0.0) return scaled - l.reward_baseline;
    const double s = scaled - reward_mean_;
    reward_mean_ = l.reward_baseline_decay * reward_mean_ + (1.0 - l.reward_baseline_decay) * scaled;
    return s;
  }

  double novelty_signal(double n) {
    const auto& l = c_.learning;
    if (l.novelty_baseline_decay <= 0.0) return l.novelty_scale * n;
    const double s = l.novelty_scale * (n - novelty_mean_);
    novelty_mean_ = l.novelty_baseline_decay * novelty_mean_ + (1.0 - l.novelty_baseline_decay) * n;
    return s;
  }

  const ExperimentConfig& c_;
  Network& net_;
  RunCounters& counters_;
  double reward_mean_ = 0.0;
  double novelty_mean_ = 0.0;
};

}  // namespace

EvalRecord evaluate_frozen(const ExperimentConfig& config, Network& net, std::uint64_t seed,
                           std::size_t trials) {
  auto env = make_environment(config.environment, mix_seed(seed, 2), config.max_steps);
  const auto encoder = make_encoder(config, *env);
  RunCounters unused;
  Trainer trainer(config, net, unused);
  EvalRecord rec;
  rec.seed = seed;
  rec.trials = trials;
  double reward = 0.0, steps = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto o = trainer.play(*env, encoder, false, nullptr, nullptr);
    reward += o.total_reward;
    steps += double(o.steps);
  }
  if (trials > 0) {
    rec.accuracy = reward / double(trials);
    rec.mean_steps = steps / double(trials);
  }
  return rec;
}

SeedResult run_seed(const ExperimentConfig& config, std::uint64_t seed,
                    const EpisodeObserver& observer) {
  config.validate();
  SeedResult result;
  result.seed = seed;
  result.network = build_topology(resolved_network_config(config, seed));
  Network& net = result.network;

  auto env = make_environment(config.environment, mix_seed(seed, 1), config.max_steps);
  const auto encoder = make_encoder(config, *env);
  if (encoder.input_size() != net.count(NeuronRole::Input))
    throw std::logic_error("encoder and input layer disagree");

  const bool track_stages = dynamic_cast<const PatternEnv*>(env.get()) != nullptr;
  std::vector<std::array<std::size_t, 2>> stage_fired(track_stages ? net.size() : 0, {0, 0});
  std::array<std::size_t, 2> stage_steps{0, 0};

  const auto& nc = config.network;
  const ConsolidationParams consolidation{nc.memory_mode, nc.effective_consolidation_threshold(),
                                          nc.consolidation_sigma, nc.aging_rate};

  Trainer trainer(config, net, result.counters);
  for (std::size_t ep = 0; ep < config.episodes; ++ep) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto o = trainer.play(*env, encoder, true, track_stages ? &stage_fired : nullptr,
                                &stage_steps);
    if (nc.memory_mode != MemoryMode::Off && (ep + 1) % config.learning.consolidate_every == 0)
      consolidate(net, consolidation);
    const auto t1 = std::chrono::steady_clock::now();

    EpisodeRecord r;
    r.seed = seed;
    r.episode = ep;
    r.steps = o.steps;
    r.total_reward = o.total_reward;
    r.mean_reward = o.steps ? o.total_reward / double(o.steps) : 0.0;
    r.total_novelty = o.total_novelty;
    r.goal_reached = o.goal_reached;
    r.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    result.episodes.push_back(r);
    if (observer) observer(net, r);
  }

  if (config.eval.trials > 0) result.eval = evaluate_frozen(config, net, seed, config.eval.trials);

  if (track_stages && stage_steps[0] > 0 && stage_steps[1] > 0) {
    StageRecord s;
    s.seed = seed;
    for (std::size_t i = 0; i < net.size(); ++i) {
      const auto role = net.role(i);
      if (role != NeuronRole::Hidden && role != NeuronRole::Output) continue;
      const double r0 = double(stage_fired[i][0]) / double(stage_steps[0]);
      const double r1 = double(stage_fired[i][1]) / double(stage_steps[1]);
      if (std::abs(r0 - r1) > s.best_difference) {
        s.best_difference = std::abs(r0 - r1);
        s.best_neuron = i;
        s.rate_stage0 = r0;
        s.rate_stage1 = r1;
      }
    }
    result.stages = s;
  }
  return result;
}

namespace {

std::ofstream open_log(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (ec) throw std::runtime_error("cannot create '" + config.output_dir.string() + "': " + ec.message());
  {
    auto out = open_log(config.output_dir / "config.json");
    out << config_to_json(config).dump(2) << '\n';
  }

  std::vector<SeedResult> per_seed(config.seeds.size());
  const auto n_seeds = static_cast<std::ptrdiff_t>(config.seeds.size());
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t s = 0; s < n_seeds; ++s) {
    try {
      per_seed[s] = run_seed(config, config.seeds[s]);
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);

  ExperimentResult result;
  auto episodes = open_log(config.output_dir / "episodes.jsonl");
  auto timing = open_log(config.output_dir / "timing.csv");
  timing << "seed,episode,wall_ms\n";
  for (auto& sr : per_seed) {
    auto curve = open_log(config.output_dir / ("curve_seed" + std::to_string(sr.seed) + ".csv"));
    curve << "episode,steps,reward,novelty,mean_reward,goal_reached\n";
    for (const auto& r : sr.episodes) {
      episodes << to_json(r).dump() << '\n';
      curve << r.episode << ',' << r.steps << ',' << format_double(r.total_reward) << ','
            << format_double(r.total_novelty) << ',' << format_double(r.mean_reward) << ','
            << (r.goal_reached ? 1 : 0) << '\n';
      timing << r.seed << ',' << r.episode << ',' << r.wall_ms << '\n';
      result.records.push_back(r);
    }
    if (sr.eval) result.evals.push_back(*sr.eval);
    if (sr.stages) result.stages.push_back(*sr.stages);
    result.counters.weight_updates += sr.counters.weight_updates;
    result.counters.env_reward_updates += sr.counters.env_reward_updates;

    const std::string tag = "seed" + std::to_string(sr.seed);
    save_network(sr.network, config.output_dir / ("network_" + tag + ".nib"));
    export_connection_heatmap(sr.network, config.output_dir / ("connections_" + tag + ".csv"));
  }
  if (!result.evals.empty()) {
    auto out = open_log(config.output_dir / "eval.jsonl");
    for (const auto& e : result.evals)
      out << json{{"seed", e.seed}, {"trials", e.trials}, {"accuracy", e.accuracy},
                  {"mean_steps", e.mean_steps}}.dump()
          << '\n';
  }
  if (!result.stages.empty()) {
    auto out = open_log(config.output_dir / "stages.jsonl");
    for (const auto& s : result.stages)
      out << json{{"seed", s.seed}, {"best_neuron", s.best_neuron},
                  {"best_difference", s.best_difference}, {"rate_stage0", s.rate_stage0},
                  {"rate_stage1", s.rate_stage1}}.dump()
          << '\n';
  }
  if (!episodes || !timing) throw std::runtime_error("failed writing logs");
  return result;
}

}  // namespace nib
