//
// Copyright 2026 The LLQFP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Experiment protocol for the ring-lattice LQ game: configuration, repeated
// seeded executions of the mechanism, and the CSV/JSON writers used by the
// command-line tool.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "llqfp/equilibrium.hpp"
#include "llqfp/errors.hpp"
#include "llqfp/format.hpp"
#include "llqfp/game.hpp"
#include "llqfp/network.hpp"
#include "llqfp/perturbation.hpp"
#include "llqfp/privacy.hpp"
#include "llqfp/random.hpp"
#include "llqfp/trunc_laplace.hpp"

#ifndef LLQFP_VERSION
#define LLQFP_VERSION "0.1.0"
#endif

namespace llqfp {

inline constexpr std::string_view kVersion = LLQFP_VERSION;

// Parses a real number, also accepting natural-log products such as "ln2",
// "3ln2", "3*ln(2)" or "0.5*ln 4".
inline double parse_real(std::string_view text, std::string_view what) {
  const auto s = std::string(trim(text));
  const auto pos = s.find("ln");
  if (pos == std::string::npos) return parse_double(s, what);
  std::string coef(trim(std::string_view(s).substr(0, pos)));
  if (!coef.empty() && coef.back() == '*') coef.pop_back();
  std::string arg(trim(std::string_view(s).substr(pos + 2)));
  if (arg.size() >= 2 && arg.front() == '(' && arg.back() == ')') arg = arg.substr(1, arg.size() - 2);
  const double c = coef.empty() ? 1.0 : parse_double(coef, what);
  const double x = parse_double(arg, what);
  if (!(x > 0.0)) throw FormatError("logarithm of a non-positive number for " + std::string(what));
  return c * std::log(x);
}

struct NoiseSetting {
  std::string label;
  NoiseParams noise;
  // Budget the setting claims to meet; always present for planned settings.
  std::optional<double> epsilon;
  std::optional<double> delta;
};

// Flat "key = value" configuration. Lists are comma separated; '#' starts a
// comment. Unknown keys are rejected.
//
//   network          ring | file
//   players, degree, weight      ring lattice n, k, link weight
//   network_file     edge-list CSV (network = file)
//   benefit          marginal benefit b (scalar or one value per player)
//   action_lo, action_hi         action interval, same for every player
//   mu               adjacency radius (payoff-coefficient units)
//   noise            explicit | planned
//   a, lambda        lists of explicit truncation bounds and scales
//   epsilon, delta   lists of budgets (required when planned)
//   labels           one label per noise setting
//   executions, base_seed, bins
//   sweep_epsilon_min, sweep_epsilon_max, sweep_points, sweep_cap, sweep_executions
//
// The noise keys (noise, a, lambda, epsilon, delta, labels) default as a
// group: once any of them is set, the unset ones are empty (noise stays
// "explicit").
class ExperimentConfig {
 public:
  ExperimentConfig() {
    for (const auto& [key, value] : defaults()) values_[key] = value;
  }

  static const std::map<std::string, std::string>& defaults() {
    static const std::map<std::string, std::string> kDefaults = {
        {"network", "ring"},
        {"players", "10"},
        {"degree", "4"},
        {"weight", "0.08"},
        {"network_file", ""},
        {"benefit", "10"},
        {"action_lo", "0"},
        {"action_hi", "100"},
        {"mu", "0.01"},
        {"noise", "explicit"},
        {"a", "0.034, 0.015"},
        {"lambda", "0.013, 0.0045"},
        {"epsilon", "ln2, 3ln2"},
        {"delta", "0.05, 0.15"},
        {"labels", "S1, S2"},
        {"executions", "500"},
        {"base_seed", "0"},
        {"bins", "20"},
        {"sweep_epsilon_min", "0.1"},
        {"sweep_epsilon_max", "3"},
        {"sweep_points", "30"},
        {"sweep_cap", "3"},
        {"sweep_executions", "50"},
    };
    return kDefaults;
  }

  static ExperimentConfig parse(std::istream& in) {
    ExperimentConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      const auto body = trim(line);
      if (body.empty()) continue;
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) {
        throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
      }
      cfg.set(std::string(trim(body.substr(0, eq))), std::string(trim(body.substr(eq + 1))));
    }
    cfg.validate();
    return cfg;
  }

  static ExperimentConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    return parse(in);
  }

  void set(const std::string& key, const std::string& value) {
    if (!defaults().count(key)) throw ConfigError("unknown config key '" + key + "'");
    values_[key] = value;
    if (is_noise_key(key) && !noise_overridden_) {
      noise_overridden_ = true;
      for (const auto* k : kNoiseKeys) {
        if (k != key) values_[k] = std::string(k) == "noise" ? "explicit" : "";
      }
    }
  }

  const std::string& get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
    return it->second;
  }

  // Sorted "key=value" lines of the effective configuration.
  std::string canonical() const {
    std::string out;
    for (const auto& [key, value] : values_) out += key + "=" + value + "\n";
    return out;
  }

  std::uint64_t hash() const { return fnv1a64(canonical()); }

  double real(const std::string& key) const { return wrap(key, [&] { return parse_real(get(key), key); }); }
  std::size_t count(const std::string& key) const {
    return wrap(key, [&] { return parse_size(get(key), key); });
  }
  std::uint64_t base_seed() const { return wrap("base_seed", [&] { return parse_u64(get("base_seed"), "base_seed"); }); }
  std::size_t executions() const { return count("executions"); }

  std::vector<double> reals(const std::string& key) const {
    std::vector<double> out;
    if (trim(get(key)).empty()) return out;
    for (const auto& item : split(get(key), ',')) {
      out.push_back(wrap(key, [&] { return parse_real(item, key); }));
    }
    return out;
  }

  std::vector<std::string> strings(const std::string& key) const {
    if (trim(get(key)).empty()) return {};
    return split(get(key), ',');
  }

  Network build_network() const {
    const auto& kind = get("network");
    try {
      if (kind == "ring") return ring_lattice(count("players"), count("degree"), real("weight"));
      if (kind == "file") return load_edge_list(get("network_file"));
    } catch (const ParameterError& e) {
      throw ConfigError(std::string("network: ") + e.what());
    } catch (const FormatError& e) {
      throw ConfigError(std::string("network: ") + e.what());
    }
    throw ConfigError("network must be 'ring' or 'file', got '" + kind + "'");
  }

  // Throws AssumptionError when the game is not strongly monotone.
  LQGame build_game() const {
    const Network net = build_network();
    const auto n = static_cast<Eigen::Index>(net.size());
    const auto b = reals("benefit");
    Eigen::VectorXd bv(n);
    if (b.size() == 1) {
      bv.setConstant(b[0]);
    } else if (b.size() == net.size()) {
      for (Eigen::Index i = 0; i < n; ++i) bv(i) = b[static_cast<std::size_t>(i)];
    } else {
      throw ConfigError("benefit needs 1 or " + std::to_string(net.size()) + " values");
    }
    try {
      return LQGame(net, bv, ActionBox::uniform(net.size(), real("action_lo"), real("action_hi")));
    } catch (const ParameterError& e) {
      throw ConfigError(std::string("game: ") + e.what());
    }
  }

  std::vector<NoiseSetting> noise_settings() const {
    const auto mode = get("noise");
    const auto a = reals("a");
    const auto lambda = reals("lambda");
    const auto eps = reals("epsilon");
    const auto del = reals("delta");
    auto labels = strings("labels");
    std::size_t count = 0;
    if (mode == "explicit") {
      if (a.empty() || a.size() != lambda.size()) {
        throw ConfigError("explicit noise needs equally long, nonempty a and lambda lists");
      }
      count = a.size();
      if (!eps.empty() && eps.size() != count) throw ConfigError("epsilon list length mismatch");
      if (!del.empty() && del.size() != count) throw ConfigError("delta list length mismatch");
    } else if (mode == "planned") {
      if (!a.empty() || !lambda.empty()) {
        throw ConfigError("planned noise takes epsilon/delta only; clear a and lambda");
      }
      if (eps.empty() || eps.size() != del.size()) {
        throw ConfigError("planned noise needs equally long, nonempty epsilon and delta lists");
      }
      count = eps.size();
    } else {
      throw ConfigError("noise must be 'explicit' or 'planned', got '" + mode + "'");
    }
    if (labels.empty()) {
      for (std::size_t k = 0; k < count; ++k) labels.push_back("S" + std::to_string(k + 1));
    }
    if (labels.size() != count) throw ConfigError("labels list length mismatch");
    std::vector<NoiseSetting> out;
    try {
      for (std::size_t k = 0; k < count; ++k) {
        std::optional<double> e = eps.empty() ? std::nullopt : std::optional(eps[k]);
        std::optional<double> d = del.empty() ? std::nullopt : std::optional(del[k]);
        if (mode == "explicit") {
          out.push_back({labels[k], NoiseParams(a[k], lambda[k]), e, d});
        } else {
          out.push_back({labels[k], plan(PrivacyBudget(*e, *d, real("mu"))), e, d});
        }
      }
    } catch (const ParameterError& e) {
      throw ConfigError(std::string("noise: ") + e.what());
    }
    return out;
  }

  // Checks everything that does not depend on the network being solvable.
  void validate() const {
    if (get("network") != "ring" && get("network") != "file") {
      throw ConfigError("network must be 'ring' or 'file', got '" + get("network") + "'");
    }
    if (executions() < 1) throw ConfigError("executions must be >= 1");
    if (count("bins") < 1) throw ConfigError("bins must be >= 1");
    if (!(real("mu") > 0.0)) throw ConfigError("mu must be > 0");
    if (!(real("action_lo") < real("action_hi"))) throw ConfigError("action_lo must be < action_hi");
    (void)base_seed();
    (void)noise_settings();
    const double lo = real("sweep_epsilon_min");
    const double hi = real("sweep_epsilon_max");
    if (!(lo > 0.0 && lo <= hi)) throw ConfigError("need 0 < sweep_epsilon_min <= sweep_epsilon_max");
    if (count("sweep_points") < 1 || count("sweep_executions") < 1) {
      throw ConfigError("sweep_points and sweep_executions must be >= 1");
    }
    if (!(real("sweep_cap") > 0.0)) throw ConfigError("sweep_cap must be > 0");
  }

 private:
  template <class F>
  static auto wrap(const std::string& key, F&& f) -> decltype(f()) {
    try {
      return f();
    } catch (const FormatError& e) {
      throw ConfigError("config key '" + key + "': " + e.what());
    }
  }

  static constexpr const char* kNoiseKeys[] = {"noise", "a", "lambda", "epsilon", "delta", "labels"};

  static bool is_noise_key(const std::string& key) {
    return std::find(std::begin(kNoiseKeys), std::end(kNoiseKeys), key) != std::end(kNoiseKeys);
  }

  std::map<std::string, std::string> values_;
  bool noise_overridden_ = false;
};

// Everything one execution of the mechanism produces.
struct ExecutionRecord {
  std::uint64_t seed = 0;
  Eigen::VectorXd x_hat;
  double distance = 0.0;
  double gamma_realized = 0.0;
  double gamma_frobenius = 0.0;
  double gamma_worst = 0.0;
  double gamma_worst_tight = 0.0;
  // |x^(D^T) - x^(D)|: gap between the derived and the untransposed system.
  double untransposed_gap = 0.0;
  bool interior = false;
};

struct SettingRun {
  NoiseSetting setting;
  std::vector<ExecutionRecord> records;

  // Executions with |x* - x^*| > gamma_realized.
  std::size_t violations() const {
    return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const auto& r) {
      return r.distance > r.gamma_realized;
    }));
  }
  // Executions with gamma_realized > gamma_worst.
  std::size_t bound_order_violations() const {
    return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const auto& r) {
      return r.gamma_realized > r.gamma_worst;
    }));
  }
};

// Runs f(k) for k in [0, count) on up to `parallel` threads. Results are
// indexed by k, so the outcome does not depend on scheduling; the exception of
// the lowest failing k is rethrown.
template <class T, class F>
std::vector<T> parallel_map(std::size_t count, std::size_t parallel, F&& f) {
  std::vector<T> out(count);
  std::vector<std::exception_ptr> errors(count);
  auto work = [&](std::size_t start, std::size_t stride) {
    for (std::size_t k = start; k < count; k += stride) {
      try {
        out[k] = f(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(parallel, count));
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

// One execution: draw, perturbed solve, distance and bounds. Non-interior
// equilibria abort, since the distance bound assumes interior points.
inline ExecutionRecord run_execution(const LQGame& game, const EquilibriumResult& original,
                                     const NoiseParams& noise, std::uint64_t seed) {
  const auto d = draw(game.network(), noise, seed);
  const auto hat = solve_perturbed_lq_ne(game, d);
  if (!hat.interior) {
    throw AssumptionError("perturbed equilibrium for seed " + std::to_string(seed) +
                          " is not interior to the action box");
  }
  const auto untransposed = solve_perturbed_lq_ne(game, d, PerturbedForm::untransposed);
  const double l_m = game.monotonicity_constant();
  const double xnorm = original.x_star.norm();
  ExecutionRecord r;
  r.seed = seed;
  r.x_hat = hat.x_star;
  r.distance = (original.x_star - hat.x_star).norm();
  r.gamma_realized = gamma_realized(d, original.x_star, l_m);
  r.gamma_frobenius = gamma_realized_frobenius(d, original.x_star, l_m);
  r.gamma_worst = gamma_worst_case(game.network(), noise.a(), xnorm, l_m);
  r.gamma_worst_tight = gamma_worst_case_tight(game.network(), noise.a(), xnorm, l_m);
  r.untransposed_gap = (hat.x_star - untransposed.x_star).norm();
  r.interior = hat.interior;
  return r;
}

inline EquilibriumResult solve_original(const LQGame& game) {
  auto original = solve_lq_ne(game);
  if (!original.interior) {
    throw AssumptionError("original equilibrium is not interior to the action box");
  }
  return original;
}

inline SettingRun run_setting(const LQGame& game, const EquilibriumResult& original,
                              const NoiseSetting& setting, std::uint64_t base_seed,
                              std::size_t executions, std::size_t parallel) {
  SettingRun run{setting, {}};
  run.records = parallel_map<ExecutionRecord>(executions, parallel, [&](std::size_t k) {
    return run_execution(game, original, setting.noise, base_seed + k);
  });
  return run;
}

struct ExperimentRun {
  LQGame game;
  EquilibriumResult original;
  std::vector<SettingRun> settings;
};

// Execution k of every setting uses seed base_seed + k.
inline ExperimentRun run_experiment(const ExperimentConfig& cfg, std::size_t parallel = 1) {
  LQGame game = cfg.build_game();
  auto original = solve_original(game);
  std::vector<SettingRun> runs;
  for (const auto& s : cfg.noise_settings()) {
    runs.push_back(run_setting(game, original, s, cfg.base_seed(), cfg.executions(), parallel));
  }
  return {std::move(game), std::move(original), std::move(runs)};
}

// ---------------------------------------------------------------------------
// Writers. Every file starts with one metadata comment line.

inline void write_metadata(std::ostream& out, std::string_view command, const ExperimentConfig& cfg,
                           int format_version = 1) {
  out << "# llqfp " << kVersion << " command=" << command << " format=" << format_version
      << " config_hash=" << hex64(cfg.hash()) << " base_seed=" << cfg.get("base_seed")
      << " generator=" << kGeneratorId << '\n';
}

inline nlohmann::ordered_json metadata_json(std::string_view command, const ExperimentConfig& cfg) {
  return {{"version", kVersion},
          {"command", command},
          {"format", 1},
          {"config_hash", hex64(cfg.hash())},
          {"base_seed", cfg.base_seed()},
          {"generator", kGeneratorId}};
}

inline void write_exp1_csv(std::ostream& out, const ExperimentConfig& cfg, const ExperimentRun& run) {
  write_metadata(out, "exp1", cfg);
  out << "setting,seed,distance,gamma_realized,gamma_worst,gamma_worst_tight,gamma_frobenius,"
         "relative_distance,untransposed_gap,interior\n";
  const double xnorm = run.original.x_star.norm();
  for (const auto& s : run.settings) {
    for (const auto& r : s.records) {
      out << s.setting.label << ',' << r.seed << ',' << format_double(r.distance) << ','
          << format_double(r.gamma_realized) << ',' << format_double(r.gamma_worst) << ','
          << format_double(r.gamma_worst_tight) << ',' << format_double(r.gamma_frobenius) << ','
          << format_double(r.distance / xnorm) << ',' << format_double(r.untransposed_gap) << ','
          << (r.interior ? 1 : 0) << '\n';
    }
  }
  for (const auto& s : run.settings) {
    out << "# summary setting=" << s.setting.label << " executions=" << s.records.size()
        << " violations=" << s.violations()
        << " bound_order_violations=" << s.bound_order_violations() << '\n';
  }
}

inline nlohmann::ordered_json exp1_summary(const ExperimentConfig& cfg, const ExperimentRun& run) {
  nlohmann::ordered_json settings = nlohmann::ordered_json::array();
  for (const auto& s : run.settings) {
    double max_dist = 0.0;
    double max_ratio = 0.0;
    for (const auto& r : s.records) {
      max_dist = std::max(max_dist, r.distance);
      max_ratio = std::max(max_ratio, r.distance / r.gamma_realized);
    }
    settings.push_back({{"label", s.setting.label},
                        {"a", s.setting.noise.a()},
                        {"lambda", s.setting.noise.lambda()},
                        {"executions", s.records.size()},
                        {"violations", s.violations()},
                        {"bound_order_violations", s.bound_order_violations()},
                        {"max_distance", max_dist},
                        {"max_distance_over_gamma", max_ratio},
                        {"gamma_worst", s.records.empty() ? 0.0 : s.records.front().gamma_worst}});
  }
  return {{"metadata", metadata_json("exp1", cfg)},
          {"x_star_norm", run.original.x_star.norm()},
          {"l_m", run.game.monotonicity_constant()},
          {"settings", std::move(settings)}};
}

struct BiasSummary {
  std::string label;
  Eigen::VectorXd mean_x_hat;
  Eigen::VectorXd bias;  // mean(x^*_i) - x*_i
};

inline std::vector<BiasSummary> bias_summaries(const ExperimentRun& run) {
  std::vector<BiasSummary> out;
  for (const auto& s : run.settings) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(run.original.x_star.size());
    for (const auto& r : s.records) mean += r.x_hat;
    mean /= static_cast<double>(s.records.size());
    out.push_back({s.setting.label, mean, mean - run.original.x_star});
  }
  return out;
}

struct Histogram {
  std::string label;
  std::size_t player = 0;  // 1-based
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::size_t> counts;
};

// Per-player histograms of x^*_i over executions, on bins shared by all
// settings. x*_i sits at the centre of a bin, and bins are at least
// 1e-6 * max(1, |x*_i|) wide so rounding noise is not resolved.
inline std::vector<Histogram> histograms(const ExperimentRun& run, std::size_t bins) {
  if (bins == 0) throw ParameterError("histograms: bins must be >= 1");
  std::vector<Histogram> out;
  const auto n = run.original.x_star.size();
  const double nb = static_cast<double>(bins);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double centre = run.original.x_star(i);
    double lo = centre;
    double hi = centre;
    for (const auto& s : run.settings) {
      for (const auto& r : s.records) {
        lo = std::min(lo, r.x_hat(i));
        hi = std::max(hi, r.x_hat(i));
      }
    }
    const double floor_width = 1e-6 * std::max(1.0, std::abs(centre));
    double width = 0.0;
    double below = 0.0;  // bins below the centre bin
    if (bins == 1) {
      width = std::max(2.0 * std::max(centre - lo, hi - centre), floor_width) * (1.0 + 1e-12);
    } else {
      width = std::max((hi - lo) / (nb - 1.0), floor_width) * (1.0 + 1e-12);
      below = std::ceil((centre - lo) / width - 0.5);
    }
    const double start = centre - (below + 0.5) * width;
    for (const auto& s : run.settings) {
      Histogram h{s.setting.label, static_cast<std::size_t>(i) + 1, start, start + nb * width,
                  std::vector<std::size_t>(bins, 0)};
      for (const auto& r : s.records) {
        const double pos = std::floor((r.x_hat(i) - start) / width);
        const auto k = static_cast<std::size_t>(std::clamp(pos, 0.0, nb - 1.0));
        h.counts[k] += 1;
      }
      out.push_back(std::move(h));
    }
  }
  return out;
}

inline void write_exp2_histogram_csv(std::ostream& out, const ExperimentConfig& cfg,
                                     const ExperimentRun& run) {
  write_metadata(out, "exp2", cfg);
  out << "setting,player,bin,bin_lo,bin_hi,count\n";
  for (const auto& h : histograms(run, cfg.count("bins"))) {
    const double width = (h.hi - h.lo) / static_cast<double>(h.counts.size());
    for (std::size_t k = 0; k < h.counts.size(); ++k) {
      out << h.label << ',' << h.player << ',' << k << ','
          << format_double(h.lo + width * static_cast<double>(k)) << ','
          << format_double(h.lo + width * static_cast<double>(k + 1)) << ',' << h.counts[k] << '\n';
    }
  }
}

inline void write_exp2_bias_csv(std::ostream& out, const ExperimentConfig& cfg,
                                const ExperimentRun& run) {
  write_metadata(out, "exp2", cfg);
  out << "setting,player,x_star,mean_x_hat,bias\n";
  for (const auto& b : bias_summaries(run)) {
    for (Eigen::Index i = 0; i < b.bias.size(); ++i) {
      out << b.label << ',' << i + 1 << ',' << format_double(run.original.x_star(i)) << ','
          << format_double(b.mean_x_hat(i)) << ',' << format_double(b.bias(i)) << '\n';
    }
  }
}

struct PayoffSummary {
  Eigen::VectorXd original;            // f_i(x*)
  std::vector<std::string> labels;
  std::vector<Eigen::VectorXd> mean;   // mean over executions of f_i(x^*)
};

inline PayoffSummary payoff_summary(const ExperimentRun& run) {
  PayoffSummary p;
  p.original = run.game.payoffs(run.original.x_star);
  for (const auto& s : run.settings) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(p.original.size());
    for (const auto& r : s.records) acc += run.game.payoffs(r.x_hat);
    p.labels.push_back(s.setting.label);
    p.mean.push_back(acc / static_cast<double>(s.records.size()));
  }
  return p;
}

inline void write_exp3_csv(std::ostream& out, const ExperimentConfig& cfg, const ExperimentRun& run) {
  write_metadata(out, "exp3", cfg);
  const auto p = payoff_summary(run);
  out << "player,payoff_original";
  for (const auto& l : p.labels) out << ",mean_payoff_" << l;
  out << '\n';
  for (Eigen::Index i = 0; i < p.original.size(); ++i) {
    out << i + 1 << ',' << format_double(p.original(i));
    for (const auto& m : p.mean) out << ',' << format_double(m(i));
    out << '\n';
  }
}

struct SweepPoint {
  double epsilon = 0.0;
  double lambda = 0.0;
  double a = 0.0;
  double mean_relative_distance = 0.0;
  double max_relative_distance = 0.0;
};

// delta = 0 tradeoff sweep: lambda = mu / epsilon (the delta -> 0 limit of
// the scale bound) and a = max(mu, cap * lambda), since the bound on a
// divides by delta.
inline std::vector<SweepPoint> run_sweep(const ExperimentConfig& cfg, std::size_t parallel = 1) {
  const LQGame game = cfg.build_game();
  const auto original = solve_original(game);
  const double mu = cfg.real("mu");
  const double cap = cfg.real("sweep_cap");
  const double lo = cfg.real("sweep_epsilon_min");
  const double hi = cfg.real("sweep_epsilon_max");
  const std::size_t points = cfg.count("sweep_points");
  const std::size_t executions = cfg.count("sweep_executions");
  const double xnorm = original.x_star.norm();
  std::vector<SweepPoint> out;
  for (std::size_t k = 0; k < points; ++k) {
    SweepPoint pt;
    pt.epsilon = points == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1);
    pt.lambda = mu / pt.epsilon;
    pt.a = std::max(mu, cap * pt.lambda);
    const NoiseSetting setting{"sweep", NoiseParams(pt.a, pt.lambda), pt.epsilon, 0.0};
    const auto run = run_setting(game, original, setting, cfg.base_seed(), executions, parallel);
    for (const auto& r : run.records) {
      pt.mean_relative_distance += r.distance / xnorm;
      pt.max_relative_distance = std::max(pt.max_relative_distance, r.distance / xnorm);
    }
    pt.mean_relative_distance /= static_cast<double>(executions);
    out.push_back(pt);
  }
  return out;
}

inline void write_sweep_csv(std::ostream& out, const ExperimentConfig& cfg,
                            const std::vector<SweepPoint>& points) {
  write_metadata(out, "sweep", cfg);
  out << "# deviation: delta=0 sweep uses lambda=mu/epsilon and a=max(mu, sweep_cap*lambda) "
         "(sweep_cap=" << cfg.get("sweep_cap") << ")\n";
  out << "epsilon,lambda,a,mean_relative_distance,max_relative_distance\n";
  for (const auto& p : points) {
    out << format_double(p.epsilon) << ',' << format_double(p.lambda) << ',' << format_double(p.a)
        << ',' << format_double(p.mean_relative_distance) << ','
        << format_double(p.max_relative_distance) << '\n';
  }
}

}  // namespace llqfp
