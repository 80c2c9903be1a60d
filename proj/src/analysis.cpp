#include "nib/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>

#include "nib/kernels.hpp"
#include "nib/random.hpp"

namespace nib {

namespace fs = std::filesystem;
using nlohmann::json;

double stimulus_activation(const Network& net, std::size_t neuron, std::span<const double> frame,
                           std::size_t settle_steps) {
  const auto inputs = net.indices(NeuronRole::Input);
  if (frame.size() != inputs.size()) throw std::invalid_argument("frame size does not match input layer");
  const std::size_t n = net.size();
  std::vector<std::uint8_t> fired(n, 0), next(n, 0);
  std::vector<double> drive(n, 0.0);
  for (std::size_t k = 0; k < inputs.size(); ++k) fired[inputs[k]] = frame[k] > 0.5 ? 1 : 0;

  double activation = 0.0;
  for (std::size_t s = 0; s < settle_steps; ++s) {
    kernels::propagate(net.connections, fired, drive);
    activation += drive[neuron];
    for (std::size_t j = 0; j < n; ++j) {
      switch (net.role(j)) {
        case NeuronRole::Input: next[j] = fired[j]; break;
        case NeuronRole::Noise: next[j] = 0; break;
        default: next[j] = drive[j] >= net.firing_threshold() ? 1 : 0;
      }
    }
    fired.swap(next);
  }
  return activation;
}

StimulusImages preferred_stimulus(const Network& net, std::size_t neuron, const StimulusOptions& opt) {
  if (neuron >= net.size()) throw std::out_of_range("neuron index out of range");
  const std::size_t pixels = net.count(NeuronRole::Input);
  if (net.input_width * net.input_height == 0 || net.input_width * net.input_height != pixels)
    throw std::invalid_argument("network input layer is not an image");
  if (opt.samples == 0 || opt.rounds == 0) throw std::invalid_argument("samples and rounds must be >= 1");

  Rng rng(opt.seed);
  StimulusImages img;
  img.width = net.input_width;
  img.height = net.input_height;
  img.stimulating.assign(pixels, 0.0);
  img.inhibitory.assign(pixels, 0.0);

  std::vector<double> best_hi, best_lo, candidate(pixels);
  for (std::size_t round = 0; round < opt.rounds; ++round) {
    std::vector<double> win_hi, win_lo;
    double act_hi = -INFINITY, act_lo = INFINITY;
    // Round 0 shares one candidate pool between both searches; later rounds
    // perturb each search's own previous winner.
    for (int side = 0; side < (round == 0 ? 1 : 2); ++side) {
      for (std::size_t s = 0; s < opt.samples; ++s) {
        const std::vector<double>* centre = round == 0 ? nullptr : (side == 0 ? &best_hi : &best_lo);
        for (std::size_t p = 0; p < pixels; ++p) {
          const double noise = rng.uniform();
          candidate[p] = centre ? 0.5 * ((*centre)[p] + noise) : noise;
        }
        const double a = stimulus_activation(net, neuron, candidate, opt.settle_steps);
        if ((round == 0 || side == 0) && a > act_hi) {
          act_hi = a;
          win_hi = candidate;
        }
        if ((round == 0 || side == 1) && a < act_lo) {
          act_lo = a;
          win_lo = candidate;
        }
      }
    }
    best_hi = std::move(win_hi);
    best_lo = std::move(win_lo);
    for (std::size_t p = 0; p < pixels; ++p) {
      img.stimulating[p] += best_hi[p];
      img.inhibitory[p] += best_lo[p];
    }
  }
  for (std::size_t p = 0; p < pixels; ++p) {
    img.stimulating[p] /= double(opt.rounds);
    img.inhibitory[p] /= double(opt.rounds);
  }
  return img;
}

double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

namespace {

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / double(v.size());
}

json quartile_block(const std::vector<const EpisodeRecord*>& eps) {
  const std::size_t e = eps.size();
  const std::size_t q = std::max<std::size_t>(1, e / 4);
  std::vector<double> first_steps, last_steps, first_reward, last_reward;
  for (std::size_t k = 0; k < q; ++k) {
    first_steps.push_back(double(eps[k]->steps));
    first_reward.push_back(eps[k]->mean_reward);
    last_steps.push_back(double(eps[e - q + k]->steps));
    last_reward.push_back(eps[e - q + k]->mean_reward);
  }
  const EpisodeRecord* best = eps.front();
  std::size_t goals = 0;
  for (auto* r : eps) {
    goals += r->goal_reached;
    const bool better = r->goal_reached != best->goal_reached
                            ? r->goal_reached
                            : (r->steps != best->steps ? r->steps < best->steps
                                                       : r->mean_reward > best->mean_reward);
    if (better) best = r;
  }
  const double fm = median(first_steps), lm = median(last_steps);
  return {{"episodes", e},
          {"quartile_size", q},
          {"goals", goals},
          {"first_quartile_median_steps", fm},
          {"last_quartile_median_steps", lm},
          {"steps_improved", lm < fm},
          {"first_quartile_mean_reward", mean(first_reward)},
          {"last_quartile_mean_reward", mean(last_reward)},
          {"reward_improved", mean(last_reward) > mean(first_reward)},
          {"best_episode",
           {{"episode", best->episode},
            {"steps", best->steps},
            {"mean_reward", best->mean_reward},
            {"goal_reached", best->goal_reached}}}};
}

}  // namespace

json summarize(std::span<const EpisodeRecord> records, std::span<const EvalRecord> evals,
               std::string_view environment) {
  json report;
  report["environment"] = std::string(environment);
  report["records"] = records.size();

  std::map<std::uint64_t, std::vector<const EpisodeRecord*>> by_seed;
  for (const auto& r : records) by_seed[r.seed].push_back(&r);
  for (auto& [seed, eps] : by_seed)
    std::sort(eps.begin(), eps.end(), [](auto* a, auto* b) { return a->episode < b->episode; });

  json seeds = json::array();
  std::size_t min_len = SIZE_MAX;
  for (auto& [seed, eps] : by_seed) {
    json block = quartile_block(eps);
    block["seed"] = seed;
    seeds.push_back(block);
    min_len = std::min(min_len, eps.size());
  }
  report["per_seed"] = seeds;

  if (!by_seed.empty()) {
    // Pooled quartiles and a moving average over the common episode range.
    const std::size_t q = std::max<std::size_t>(1, min_len / 4);
    std::vector<double> first, last, first_r, last_r;
    for (auto& [seed, eps] : by_seed)
      for (std::size_t k = 0; k < q; ++k) {
        first.push_back(double(eps[k]->steps));
        first_r.push_back(eps[k]->mean_reward);
        last.push_back(double(eps[min_len - q + k]->steps));
        last_r.push_back(eps[min_len - q + k]->mean_reward);
      }
    const std::size_t window = std::min<std::size_t>(10, min_len);
    json curve = json::array();
    for (std::size_t e = window - 1; e < min_len; ++e) {
      double steps = 0.0, reward = 0.0;
      for (auto& [seed, eps] : by_seed)
        for (std::size_t k = e + 1 - window; k <= e; ++k) {
          steps += double(eps[k]->steps);
          reward += eps[k]->mean_reward;
        }
      const double denom = double(window * by_seed.size());
      curve.push_back({{"episode", e}, {"steps", steps / denom}, {"mean_reward", reward / denom}});
    }
    report["overall"] = {{"seeds", by_seed.size()},
                         {"episodes_per_seed", min_len},
                         {"first_quartile_median_steps", median(first)},
                         {"last_quartile_median_steps", median(last)},
                         {"steps_improved", median(last) < median(first)},
                         {"first_quartile_mean_reward", mean(first_r)},
                         {"last_quartile_mean_reward", mean(last_r)},
                         {"reward_improved", mean(last_r) > mean(first_r)},
                         {"moving_average_window", window},
                         {"moving_average", curve}};
  }

  if (!evals.empty()) {
    std::vector<double> acc;
    for (const auto& e : evals) acc.push_back(e.accuracy);
    const double m = mean(acc);
    double ss = 0.0;
    for (double a : acc) ss += (a - m) * (a - m);
    json ev = {{"seeds", acc.size()},
               {"accuracies", acc},
               {"mean_accuracy", m},
               {"variance", acc.size() > 1 ? ss / double(acc.size() - 1) : 0.0}};
    if (environment == "xor") {
      ev["chance"] = 0.5;
      ev["above_chance"] = m - 0.5;
    }
    report["eval"] = ev;
  }
  return report;
}

json summarize(const fs::path& log) {
  fs::path file = log;
  if (fs::is_directory(file)) file /= "episodes.jsonl";
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open log '" + file.string() + "'");

  std::vector<EpisodeRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      records.push_back(episode_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw std::runtime_error(file.string() + ":" + std::to_string(lineno) + ": malformed record (" +
                               e.what() + ")");
    }
  }

  std::vector<EvalRecord> evals;
  const fs::path eval_file = file.parent_path() / "eval.jsonl";
  if (std::ifstream ein(eval_file); ein) {
    lineno = 0;
    while (std::getline(ein, line)) {
      ++lineno;
      if (line.empty()) continue;
      try {
        const auto j = json::parse(line);
        EvalRecord e;
        e.seed = j.at("seed").get<std::uint64_t>();
        e.trials = j.at("trials").get<std::size_t>();
        e.accuracy = j.at("accuracy").get<double>();
        e.mean_steps = j.value("mean_steps", 0.0);
        evals.push_back(e);
      } catch (const std::exception& ex) {
        throw std::runtime_error(eval_file.string() + ":" + std::to_string(lineno) +
                                 ": malformed record (" + ex.what() + ")");
      }
    }
  }

  std::string environment = "unknown";
  if (std::ifstream cin(file.parent_path() / "config.json"); cin) {
    try {
      environment = json::parse(cin).value("environment", environment);
    } catch (const json::exception&) {
    }
  }
  if (records.empty() && evals.empty()) throw std::runtime_error("log '" + file.string() + "' is empty");
  return summarize(records, evals, environment);
}

}  // namespace nib
