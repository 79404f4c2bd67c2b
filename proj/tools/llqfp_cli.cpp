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

// llqfp command-line tool.
//
// Exit codes: 0 success, 2 configuration error, 3 assumption or
// precondition failure, 4 property violation detected.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "llqfp/llqfp.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitAssumption = 3;
constexpr int kExitViolation = 4;

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::size_t parallel = 1;
};

llqfp::ExperimentConfig load_config(const GlobalOptions& g) {
  llqfp::ExperimentConfig cfg;
  if (!g.config_path.empty()) cfg = llqfp::ExperimentConfig::load(g.config_path);
  if (g.seed) cfg.set("base_seed", std::to_string(*g.seed));
  cfg.validate();
  return cfg;
}

// Writes `content` to <out>/<name>, or to stdout when no --out was given.
void emit(const GlobalOptions& g, const std::string& name, const std::string& content) {
  if (g.out_dir.empty()) {
    std::cout << content;
    return;
  }
  std::filesystem::create_directories(g.out_dir);
  const auto path = std::filesystem::path(g.out_dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw llqfp::ConfigError("cannot write " + path.string());
  out << content;
  std::cerr << "wrote " << path.string() << '\n';
}

void emit_json(const GlobalOptions& g, const std::string& name, const nlohmann::ordered_json& j) {
  emit(g, name, j.dump(2) + "\n");
}

llqfp::NoiseSetting pick_setting(const std::vector<llqfp::NoiseSetting>& settings,
                                 const std::string& label) {
  if (label.empty()) return settings.front();
  for (const auto& s : settings) {
    if (s.label == label) return s;
  }
  throw llqfp::ConfigError("no noise setting labelled '" + label + "'");
}

struct PlanOptions {
  std::string mu;
  std::string epsilon;
  std::string delta;
};

int cmd_plan(const GlobalOptions& g, const PlanOptions& o) {
  const auto cfg = load_config(g);
  const double mu = o.mu.empty() ? cfg.real("mu") : llqfp::parse_real(o.mu, "mu");
  const double eps = llqfp::parse_real(o.epsilon, "epsilon");
  const double del = llqfp::parse_real(o.delta, "delta");
  const auto net = cfg.build_network();
  const llqfp::PrivacyBudget budget(eps, del, mu, net.group_factor());
  const auto noise = llqfp::plan(budget);
  const auto game = cfg.build_game();
  const auto report = llqfp::audit_worst_case(net, budget, noise, game.b());

  std::cout << "lambda = " << llqfp::format_double(noise.lambda()) << '\n'
            << "a = " << llqfp::format_double(noise.a()) << '\n'
            << "p = " << budget.p << '\n'
            << "delta_required = " << llqfp::format_double(report.max_delta_required)
            << " (budget delta = " << llqfp::format_double(del) << ")\n"
            << "composed guarantee = (" << llqfp::format_double(report.composed_epsilon) << ", "
            << llqfp::format_double(report.composed_delta) << ") over " << report.diff_count()
            << " coordinates\n"
            << "audit: " << (report.pass ? "pass" : "FAIL") << '\n';
  if (!g.out_dir.empty()) emit_json(g, "plan.json", llqfp::to_json(report));
  return report.pass ? kExitOk : kExitViolation;
}

struct SampleOptions {
  std::size_t count = 10;
  std::string setting;
};

int cmd_sample(const GlobalOptions& g, const SampleOptions& o) {
  const auto cfg = load_config(g);
  const auto s = pick_setting(cfg.noise_settings(), o.setting);
  std::ostringstream out;
  llqfp::write_metadata(out, "sample", cfg);
  out << "k,value\n";
  const auto values = llqfp::sample(o.count, s.noise, cfg.base_seed());
  for (std::size_t k = 0; k < values.size(); ++k) {
    out << k << ',' << llqfp::format_double(values[k]) << '\n';
  }
  emit(g, "sample.csv", out.str());
  return kExitOk;
}

int cmd_perturb(const GlobalOptions& g, const std::string& label) {
  const auto cfg = load_config(g);
  const auto s = pick_setting(cfg.noise_settings(), label);
  const auto net = cfg.build_network();
  const auto d = llqfp::draw(net, s.noise, cfg.base_seed());
  std::ostringstream out;
  llqfp::write_draw(out, d);
  emit(g, "draw_" + s.label + ".txt", out.str());
  std::cerr << "min eigenvalue of sym(D^T) = " << llqfp::check_psd(d.d().transpose()) << '\n';
  return kExitOk;
}

template <class Game>
void solve_all(std::ostream& out, const Game& game, std::uint64_t seed, double l_m) {
  llqfp::write_result_header(out, game.size());
  const auto closed = llqfp::solve_affine(game);
  llqfp::write_result_row(out, seed, closed);
  const Eigen::MatrixXd a = game.system_matrix();
  const double lipschitz = llqfp::spectral_norm(a);
  llqfp::ProjectedGradientOptions pg;
  pg.step = l_m / (lipschitz * lipschitz);
  pg.lipschitz = lipschitz;
  pg.modulus = l_m;
  const Eigen::VectorXd x0 = game.box().lo;
  llqfp::write_result_row(out, seed, llqfp::projected_gradient_ne(game, pg, x0));
  llqfp::write_result_row(out, seed, llqfp::best_response_ne(game, x0, 1e-12, 100000));
}

int cmd_solve(const GlobalOptions& g) {
  const auto cfg = load_config(g);
  const auto game = cfg.build_game();
  const double l_m = game.monotonicity_constant();
  std::ostringstream original;
  llqfp::write_metadata(original, "solve", cfg);
  solve_all(original, game, cfg.base_seed(), l_m);
  emit(g, "solve_original.csv", original.str());
  for (const auto& s : cfg.noise_settings()) {
    const llqfp::PerturbedLQGame perturbed(game, llqfp::draw(game.network(), s.noise, cfg.base_seed()));
    std::ostringstream out;
    llqfp::write_metadata(out, "solve", cfg);
    solve_all(out, perturbed, cfg.base_seed(), l_m);
    emit(g, "solve_" + s.label + ".csv", out.str());
  }
  return kExitOk;
}

int cmd_audit(const GlobalOptions& g) {
  const auto cfg = load_config(g);
  const auto game = cfg.build_game();
  const auto& net = game.network();
  nlohmann::ordered_json reports = nlohmann::ordered_json::array();
  bool all_pass = true;
  for (const auto& s : cfg.noise_settings()) {
    if (!s.epsilon || !s.delta) {
      throw llqfp::ConfigError("audit needs epsilon and delta for setting " + s.label);
    }
    const llqfp::PrivacyBudget budget(*s.epsilon, *s.delta, cfg.real("mu"), net.group_factor());
    const auto report = llqfp::audit_worst_case(net, budget, s.noise, game.b());
    auto j = llqfp::to_json(report);
    j["label"] = s.label;
    reports.push_back(std::move(j));
    all_pass = all_pass && report.pass;
    std::cout << s.label << ": a=" << llqfp::format_double(s.noise.a())
              << " lambda=" << llqfp::format_double(s.noise.lambda())
              << " lambda_bound=" << to_string(report.bounds.lambda_status)
              << " a_bound=" << to_string(report.bounds.a_status)
              << " delta_required=" << llqfp::format_double(report.max_delta_required)
              << " delta=" << llqfp::format_double(*s.delta)
              << " -> " << (report.pass ? "pass" : "FAIL") << '\n';
  }
  emit_json(g, "audit.json", {{"metadata", llqfp::metadata_json("audit", cfg)}, {"reports", reports}});
  return all_pass ? kExitOk : kExitViolation;
}

int cmd_exp1(const GlobalOptions& g) {
  const auto cfg = load_config(g);
  const auto run = llqfp::run_experiment(cfg, g.parallel);
  std::ostringstream csv;
  llqfp::write_exp1_csv(csv, cfg, run);
  emit(g, "exp1.csv", csv.str());
  if (!g.out_dir.empty()) emit_json(g, "exp1_summary.json", llqfp::exp1_summary(cfg, run));
  bool ok = true;
  for (const auto& s : run.settings) {
    std::cerr << s.setting.label << ": " << s.violations() << " violations of distance <= gamma in "
              << s.records.size() << " executions\n";
    ok = ok && s.violations() == 0 && s.bound_order_violations() == 0;
  }
  return ok ? kExitOk : kExitViolation;
}

int cmd_exp2(const GlobalOptions& g) {
  const auto cfg = load_config(g);
  const auto run = llqfp::run_experiment(cfg, g.parallel);
  std::ostringstream hist;
  std::ostringstream bias;
  llqfp::write_exp2_histogram_csv(hist, cfg, run);
  llqfp::write_exp2_bias_csv(bias, cfg, run);
  emit(g, "exp2_histogram.csv", hist.str());
  emit(g, "exp2_bias.csv", bias.str());
  if (!g.out_dir.empty()) {
    nlohmann::ordered_json settings = nlohmann::ordered_json::array();
    for (const auto& b : llqfp::bias_summaries(run)) {
      settings.push_back({{"label", b.label},
                          {"bias", std::vector<double>(b.bias.data(), b.bias.data() + b.bias.size())}});
    }
    emit_json(g, "exp2_summary.json", {{"metadata", llqfp::metadata_json("exp2", cfg)},
                                       {"settings", settings}});
  }
  return kExitOk;
}

int cmd_exp3(const GlobalOptions& g) {
  const auto cfg = load_config(g);
  const auto run = llqfp::run_experiment(cfg, g.parallel);
  std::ostringstream csv;
  llqfp::write_exp3_csv(csv, cfg, run);
  emit(g, "exp3.csv", csv.str());
  return kExitOk;
}

int cmd_sweep(const GlobalOptions& g) {
  const auto cfg = load_config(g);
  const auto points = llqfp::run_sweep(cfg, g.parallel);
  std::ostringstream csv;
  llqfp::write_sweep_csv(csv, cfg, points);
  emit(g, "sweep.csv", csv.str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Laplace linear-quadratic functional perturbation for network games"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  std::uint64_t seed = 0;
  app.add_option("--config", g.config_path, "Experiment config file (key = value)");
  auto* seed_opt = app.add_option("--seed", seed, "Base seed (overrides base_seed)");
  app.add_option("--out", g.out_dir, "Output directory (default: stdout)");
  app.add_option("--parallel", g.parallel, "Worker threads for executions")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1024}));

  PlanOptions plan_opt;
  auto* plan = app.add_subcommand("plan", "Plan (a, lambda) for a privacy budget and audit it");
  plan->add_option("--mu", plan_opt.mu, "Adjacency radius (default: config mu)");
  plan->add_option("--epsilon", plan_opt.epsilon, "Epsilon, e.g. 0.69 or ln2")->required();
  plan->add_option("--delta", plan_opt.delta, "Delta in (0, 1/2)")->required();

  SampleOptions sample_opt;
  auto* sample = app.add_subcommand("sample", "Draw truncated Laplace samples");
  sample->add_option("--count", sample_opt.count, "Number of draws");
  sample->add_option("--setting", sample_opt.setting, "Noise setting label");

  std::string perturb_label;
  auto* perturb = app.add_subcommand("perturb", "Draw perturbation coefficients and write the record");
  perturb->add_option("--setting", perturb_label, "Noise setting label");

  auto* solve = app.add_subcommand("solve", "Solve original and perturbed equilibria");
  auto* audit = app.add_subcommand("audit", "Audit the privacy guarantee of each noise setting");
  auto* exp1 = app.add_subcommand("exp1", "Equilibrium distance versus gamma bounds");
  auto* exp2 = app.add_subcommand("exp2", "Distribution and bias of perturbed equilibria");
  auto* exp3 = app.add_subcommand("exp3", "Payoffs at original and perturbed equilibria");
  auto* sweep = app.add_subcommand("sweep", "Accuracy versus epsilon at delta = 0");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  if (seed_opt->count() > 0) g.seed = seed;

  try {
    if (plan->parsed()) return cmd_plan(g, plan_opt);
    if (sample->parsed()) return cmd_sample(g, sample_opt);
    if (perturb->parsed()) return cmd_perturb(g, perturb_label);
    if (solve->parsed()) return cmd_solve(g);
    if (audit->parsed()) return cmd_audit(g);
    if (exp1->parsed()) return cmd_exp1(g);
    if (exp2->parsed()) return cmd_exp2(g);
    if (exp3->parsed()) return cmd_exp3(g);
    if (sweep->parsed()) return cmd_sweep(g);
  } catch (const llqfp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const llqfp::ParameterError& e) {
    std::cerr << "invalid parameter: " << e.what() << '\n';
    return kExitConfig;
  } catch (const llqfp::FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const llqfp::AssumptionError& e) {
    std::cerr << "assumption failed: " << e.what() << '\n';
    return kExitAssumption;
  } catch (const llqfp::DomainError& e) {
    std::cerr << "precondition failed: " << e.what() << '\n';
    return kExitAssumption;
  } catch (const llqfp::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitAssumption;
  }
  return kExitConfig;
}
