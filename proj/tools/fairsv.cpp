// Copyright 2026 The fairsv authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// fairsv command-line front end. Subcommands wire the library into the full
// workflow: synthesize embeddings, train an embedding transformation, score
// trials, evaluate fairness/utility curves, run permutation significance
// tests, inspect score distributions, and sweep the bias weight.
//
// Exit codes: 0 success, 1 data/runtime error, 2 usage error.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fairsv/io.hpp"
#include "fairsv/manifest.hpp"
#include "fairsv/metrics.hpp"
#include "fairsv/scoring.hpp"
#include "fairsv/stats.hpp"
#include "fairsv/synth.hpp"
#include "fairsv/trials.hpp"
#include "fairsv/uai/train.hpp"
#include "fairsv/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Timer {
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  }
};

std::string format_omega(double omega) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%.2f", omega);
  return buf;
}

std::vector<double> make_far_grid(double far_min, double far_max,
                                  double far_step) {
  fairsv::require(far_min > 0 && far_max > far_min && far_step > 0,
                  "invalid FAR grid flags");
  std::vector<double> grid;
  for (double v = far_min; v <= far_max + 1e-9; v += far_step)
    grid.push_back(v);
  return grid;
}

fairsv::uai::TrainConfig load_train_config(const std::string& config_path) {
  fairsv::uai::TrainConfig cfg;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) fairsv::fail("cannot open config '" + config_path + "'");
    json j;
    in >> j;
    cfg = fairsv::uai::config_from_json(j);
  }
  return cfg;
}

void write_json(const json& j, const fs::path& path) {
  std::ofstream out(path);
  if (!out) fairsv::fail("cannot write '" + path.string() + "'");
  out << j.dump(2) << "\n";
}

// --------------------------------------------------------------------------
// synth
// --------------------------------------------------------------------------

struct SynthArgs {
  std::string preset;
  fairsv::synth::SynthConfig cfg;
  std::string out;
  std::uint64_t seed = 0;
};

int run_synth(const SynthArgs& args) {
  Timer timer;
  fairsv::synth::SynthConfig cfg =
      args.preset.empty() ? args.cfg : fairsv::synth::scenario_config(args.preset);
  cfg.seed = args.seed;
  const auto split = fairsv::synth::generate(cfg);
  fs::create_directories(args.out);
  fairsv::save_embeddings(split, fs::path(args.out) / "embeddings.csv");

  fairsv::RunManifest m;
  m.command = "synth";
  m.seed = args.seed;
  m.config = {{"preset", args.preset},
              {"dim", cfg.dim},
              {"speakers_g1", cfg.speakers_g1},
              {"speakers_g2", cfg.speakers_g2},
              {"utts_per_speaker", cfg.utts_per_speaker},
              {"rho_g1", cfg.rho_g1},
              {"rho_g2", cfg.rho_g2},
              {"noise_sigma", cfg.noise_sigma},
              {"group_direction_strength", cfg.group_direction_strength}};
  m.outputs = {"embeddings.csv"};
  m.duration_seconds = timer.seconds();
  fairsv::write_manifest(m, args.out);
  std::cout << "wrote " << split.records.size() << " embeddings (dim "
            << cfg.dim << ") to " << args.out << "\n";
  return 0;
}

// --------------------------------------------------------------------------
// score
// --------------------------------------------------------------------------

struct ScoreArgs {
  std::string data, trials, model, out;
  std::size_t max_per_cell = 2000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

int run_score(const ScoreArgs& args) {
  Timer timer;
  auto split = fairsv::load_embeddings(args.data);
  std::vector<fairsv::Trial> trials;
  bool generated = false;
  if (!args.trials.empty()) {
    trials = fairsv::load_trials(args.trials);
    for (const auto& t : trials) fairsv::validate_trial(split, t);
  } else {
    trials = fairsv::generate_trials(split, args.max_per_cell, args.seed);
    generated = true;
  }
  if (!args.model.empty()) {
    std::ifstream in(args.model);
    if (!in) fairsv::fail("cannot open checkpoint '" + args.model + "'");
    json j;
    in >> j;
    const auto model = fairsv::uai::model_from_json(j);
    split = fairsv::uai::transform_split(model, split);
  }
  const auto scored = fairsv::score_trials(split, trials, args.threads);
  fs::create_directories(args.out);
  fairsv::save_scores(scored, fs::path(args.out) / "scores.csv");
  if (generated)
    fairsv::save_trials(trials, fs::path(args.out) / "trials.csv");

  fairsv::RunManifest m;
  m.command = "score";
  m.seed = args.seed;
  m.config = {{"data", args.data},
              {"trials", args.trials},
              {"model", args.model},
              {"max_per_cell", args.max_per_cell}};
  m.inputs = {args.data};
  if (!args.trials.empty()) m.inputs.push_back(args.trials);
  if (!args.model.empty()) m.inputs.push_back(args.model);
  m.outputs = {"scores.csv"};
  if (generated) m.outputs.push_back("trials.csv");
  m.duration_seconds = timer.seconds();
  fairsv::write_manifest(m, args.out);
  std::cout << "scored " << scored.size() << " trials -> " << args.out << "\n";
  return 0;
}

// --------------------------------------------------------------------------
// train
// --------------------------------------------------------------------------

struct TrainArgs {
  std::string mode, data, config, out;
  double delta = -1.0;  // <0: keep config value
  std::int64_t max_epochs = -1;
  std::int64_t patience = -1;
  std::int64_t batch = -1;
  std::uint64_t seed = 0;
};

int run_train(const TrainArgs& args) {
  Timer timer;
  fairsv::uai::TrainConfig cfg = load_train_config(args.config);
  cfg.mode = fairsv::uai::parse_mode(args.mode);
  cfg.seed = args.seed;
  if (args.delta >= 0) cfg.delta = args.delta;
  if (args.max_epochs > 0) cfg.max_epochs = args.max_epochs;
  if (args.patience > 0) cfg.patience = args.patience;
  if (args.batch > 0) cfg.batch = args.batch;
  cfg.validate();

  const auto split = fairsv::load_embeddings(args.data);
  const auto data = fairsv::uai::make_train_set(split);
  auto model = fairsv::uai::make_model(data.x.cols, data.n_speakers(), cfg);
  auto result = fairsv::uai::train(std::move(model), data, cfg);

  fs::create_directories(args.out);
  write_json(fairsv::uai::model_to_json(result.model),
             fs::path(args.out) / "checkpoint.json");
  fairsv::uai::write_history_csv(result.history,
                                 fs::path(args.out) / "history.csv");

  fairsv::RunManifest m;
  m.command = "train";
  m.seed = args.seed;
  m.config = fairsv::uai::config_to_json(cfg);
  m.config["data"] = args.data;
  m.inputs = {args.data};
  m.outputs = {"checkpoint.json", "history.csv"};
  m.duration_seconds = timer.seconds();
  fairsv::write_manifest(m, args.out);
  std::cout << "trained " << args.mode << ": best val speaker acc "
            << result.best_val_speaker_acc << " at epoch "
            << result.best_epoch << " (" << result.history.size()
            << " epochs)\n";
  return 0;
}

// --------------------------------------------------------------------------
// eval
// --------------------------------------------------------------------------

struct EvalArgs {
  std::string scores_a, scores_b, out;
  std::vector<double> omegas{1.00, 0.75, 0.50, 0.25, 0.00};
  double far_min = 1.0, far_max = 10.0, far_step = 0.25;
};

json eval_system(const std::string& label, const std::string& path,
                 const EvalArgs& args, const std::vector<double>& grid,
                 std::vector<std::string>& outputs) {
  const auto scored = fairsv::load_scores(path);
  const auto partition = fairsv::partition_scores(scored);
  const auto utility =
      fairsv::eer(partition.pooled_genuine, partition.pooled_impostor);

  json au = json::object();
  for (double omega : args.omegas) {
    const auto curve =
        fairsv::fadr_curve(partition, fairsv::FadrParams{omega}, grid);
    au[format_omega(omega)] = fairsv::au_fadr(curve);
    const std::string name =
        "fadr_curve_" + label + "_omega" + format_omega(omega) + ".csv";
    std::ofstream out(fs::path(args.out) / name);
    out << "far_percent,fadr_percent\n";
    for (const auto& p : curve.points)
      out << fairsv::format_real(p.pooled_far_percent) << ','
          << fairsv::format_real(p.fadr_percent) << "\n";
    outputs.push_back(name);
  }
  const auto curves = fairsv::group_error_curves(partition, grid);
  const std::string gname = "group_curves_" + label + ".csv";
  std::ofstream out(fs::path(args.out) / gname);
  out << "far_percent,far_g1,far_g2,frr_g1,frr_g2\n";
  for (const auto& p : curves.points)
    out << fairsv::format_real(p.pooled_far_percent) << ','
        << fairsv::format_real(p.far_g1) << ',' << fairsv::format_real(p.far_g2)
        << ',' << fairsv::format_real(p.frr_g1) << ','
        << fairsv::format_real(p.frr_g2) << "\n";
  outputs.push_back(gname);

  return json{{"scores", path},
              {"eer", utility.eer},
              {"eer_percent", 100.0 * utility.eer},
              {"eer_threshold", utility.tau},
              {"au_fadr", au},
              {"n_genuine", partition.pooled_genuine.size()},
              {"n_impostor", partition.pooled_impostor.size()}};
}

int run_eval(const EvalArgs& args) {
  Timer timer;
  const auto grid = make_far_grid(args.far_min, args.far_max, args.far_step);
  fs::create_directories(args.out);
  std::vector<std::string> outputs;
  json metrics;
  metrics["far_grid_percent"] = grid;
  metrics["systems"]["a"] = eval_system("a", args.scores_a, args, grid, outputs);
  if (!args.scores_b.empty())
    metrics["systems"]["b"] =
        eval_system("b", args.scores_b, args, grid, outputs);
  write_json(metrics, fs::path(args.out) / "metrics.json");
  outputs.push_back("metrics.json");

  fairsv::RunManifest m;
  m.command = "eval";
  m.config = {{"scores_a", args.scores_a}, {"scores_b", args.scores_b},
              {"omegas", args.omegas},     {"far_min", args.far_min},
              {"far_max", args.far_max},   {"far_step", args.far_step}};
  m.inputs = {args.scores_a};
  if (!args.scores_b.empty()) m.inputs.push_back(args.scores_b);
  m.outputs = outputs;
  m.duration_seconds = timer.seconds();
  fairsv::write_manifest(m, args.out);
  std::cout << "eval -> " << args.out << "/metrics.json\n";
  return 0;
}

// --------------------------------------------------------------------------
// permtest
// --------------------------------------------------------------------------

struct PermArgs {
  std::string scores_a, scores_b, stat = "aufadr", out;
  std::size_t n = 10000;
  std::size_t subsample = 100000;
  double omega = 1.0;
  double far_min = 1.0, far_max = 10.0, far_step = 0.25;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

int run_permtest(const PermArgs& args) {
  Timer timer;
  const auto a = fairsv::load_scores(args.scores_a);
  const auto b = fairsv::load_scores(args.scores_b);
  fairsv::PermTestReport report;
  if (args.stat == "aufadr") {
    report = fairsv::perm_test_aufadr(
        a, b, fairsv::FadrParams{args.omega},
        make_far_grid(args.far_min, args.far_max, args.far_step), args.n,
        args.subsample, args.seed, args.threads);
  } else {
    report = fairsv::perm_test_eer(a, b, args.n, args.seed, args.threads);
  }
  fs::create_directories(args.out);
  write_json(json{{"stat", args.stat},
                  {"observed", report.observed_stat},
                  {"p_value", report.p_value},
                  {"n_permutations", report.n_permutations},
                  {"subsample", args.stat == "aufadr" ? args.subsample : 0},
                  {"omega", args.omega},
                  {"seed", report.seed}},
             fs::path(args.out) / "permtest.json");

  fairsv::RunManifest m;
  m.command = "permtest";
  m.seed = args.seed;
  m.config = {{"scores_a", args.scores_a}, {"scores_b", args.scores_b},
              {"stat", args.stat},         {"n", args.n},
              {"subsample", args.subsample}, {"omega", args.omega},
              {"threads", args.threads}};
  m.inputs = {args.scores_a, args.scores_b};
  m.outputs = {"permtest.json"};
  m.duration_seconds = timer.seconds();
  fairsv::write_manifest(m, args.out);
  std::cout << "permtest " << args.stat << ": observed "
            << report.observed_stat << ", p = " << report.p_value << "\n";
  return 0;
}

// --------------------------------------------------------------------------
// kde
// --------------------------------------------------------------------------

struct KdeArgs {
  std::string scores, split = "impostor", out;
  std::size_t grid_size = 512;
};

int run_kde(const KdeArgs& args) {
  Timer timer;
  const auto scored = fairsv::load_scores(args.scores);
  const auto partition = fairsv::partition_scores(scored);
  const bool genuine = args.split == "genuine";
  const auto& g1 = genuine ? partition.genuine_g1 : partition.impostor_g1;
  const auto& g2 = genuine ? partition.genuine_g2 : partition.impostor_g2;
  fairsv::require(g1.size() >= 2 && g2.size() >= 2,
                  "kde: need at least 2 scores per group");

  const auto grid = fairsv::shared_kde_grid(g1, g2, args.grid_size);
  const auto kde_g1 = fairsv::kde_on_grid(g1, grid);
  const auto kde_g2 = fairsv::kde_on_grid(g2, grid);
  const double overlap = fairsv::overlap_percent(kde_g1, kde_g2);

  fs::create_directories(args.out);
  const std::string csv_name = "kde_" + args.split + ".csv";
  {
    std::ofstream out(fs::path(args.out) / csv_name);
    out << "x,density_g1,density_g2\n";
    for (std::size_t i = 0; i < grid.size(); ++i)
      out << fairsv::format_real(grid[i]) << ','
          << fairsv::format_real(kde_g1.density[i]) << ','
          << fairsv::format_real(kde_g2.density[i]) << "\n";
  }
  write_json(json{{"split", args.split},
                  {"overlap_percent", overlap},
                  {"bandwidth_g1", kde_g1.bandwidth},
                  {"bandwidth_g2", kde_g2.bandwidth},
                  {"n_g1", g1.size()},
                  {"n_g2", g2.size()}},
             fs::path(args.out) / "overlap.json");

  fairsv::RunManifest m;
  m.command = "kde";
  m.config = {{"scores", args.scores},
              {"split", args.split},
              {"grid_size", args.grid_size}};
  m.inputs = {args.scores};
  m.outputs = {csv_name, "overlap.json"};
  m.duration_seconds = timer.seconds();
  fairsv::write_manifest(m, args.out);
  std::cout << "kde " << args.split << ": overlap " << overlap << "%\n";
  return 0;
}

// --------------------------------------------------------------------------
// sweep-delta
// --------------------------------------------------------------------------

struct SweepArgs {
  std::string mode = "uai-mtl", data, dev_data, dev_trials, config, out;
  std::vector<double> deltas{10, 30, 50, 70, 100, 150, 200};
  double omega = 1.0;
  double far_min = 1.0, far_max = 10.0, far_step = 0.25;
  std::size_t max_per_cell = 2000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

int run_sweep(const SweepArgs& args) {
  Timer timer;
  fairsv::uai::TrainConfig cfg = load_train_config(args.config);
  cfg.mode = fairsv::uai::parse_mode(args.mode);
  cfg.seed = args.seed;
  cfg.validate();

  const auto train_split = fairsv::load_embeddings(args.data);
  const auto data = fairsv::uai::make_train_set(train_split);
  const auto dev_split = fairsv::load_embeddings(args.dev_data);
  std::vector<fairsv::Trial> dev_trials;
  if (!args.dev_trials.empty()) {
    dev_trials = fairsv::load_trials(args.dev_trials);
    for (const auto& t : dev_trials) fairsv::validate_trial(dev_split, t);
  } else {
    dev_trials = fairsv::generate_trials(dev_split, args.max_per_cell,
                                         args.seed);
  }

  const auto grid = make_far_grid(args.far_min, args.far_max, args.far_step);
  const auto result = fairsv::uai::delta_sweep(
      data, dev_split, dev_trials, cfg, args.deltas,
      fairsv::FadrParams{args.omega}, grid, args.threads);

  fs::create_directories(args.out);
  {
    std::ofstream out(fs::path(args.out) / "sweep.csv");
    out << "delta,speaker_acc,group_acc,eer,au_fadr\n";
    for (const auto& r : result.rows)
      out << fairsv::format_real(r.delta) << ','
          << fairsv::format_real(r.speaker_acc) << ','
          << fairsv::format_real(r.group_acc) << ','
          << fairsv::format_real(r.eer_percent) << ','
          << fairsv::format_real(r.au_fadr) << "\n";
  }
  write_json(fairsv::uai::model_to_json(result.best_model),
             fs::path(args.out) / "best_checkpoint.json");

  fairsv::RunManifest m;
  m.command = "sweep-delta";
  m.seed = args.seed;
  m.config = fairsv::uai::config_to_json(cfg);
  m.config["deltas"] = args.deltas;
  m.config["omega"] = args.omega;
  m.config["data"] = args.data;
  m.config["dev_data"] = args.dev_data;
  m.config["dev_trials"] = args.dev_trials;
  m.inputs = {args.data, args.dev_data};
  if (!args.dev_trials.empty()) m.inputs.push_back(args.dev_trials);
  m.outputs = {"sweep.csv", "best_checkpoint.json"};
  m.duration_seconds = timer.seconds();
  fairsv::write_manifest(m, args.out);
  std::cout << "sweep-delta: best delta "
            << result.rows[result.best_index].delta << " (auFaDR "
            << result.rows[result.best_index].au_fadr << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fairsv: fairness evaluation and bias mitigation for "
               "embedding-based speaker verification"};
  app.set_version_flag("--version", fairsv::kVersion);
  app.require_subcommand(1);

  SynthArgs synth_args;
  auto* synth = app.add_subcommand(
      "synth", "Generate a synthetic embedding dataset");
  synth->add_option("--preset", synth_args.preset,
                    "balanced-unbiased | balanced-biased | imbalanced-biased")
      ->check(CLI::IsMember(
          {"balanced-unbiased", "balanced-biased", "imbalanced-biased"}));
  synth->add_option("--dim", synth_args.cfg.dim, "Embedding dimension");
  synth->add_option("--speakers-g1", synth_args.cfg.speakers_g1);
  synth->add_option("--speakers-g2", synth_args.cfg.speakers_g2);
  synth->add_option("--utts", synth_args.cfg.utts_per_speaker);
  synth->add_option("--rho-g1", synth_args.cfg.rho_g1);
  synth->add_option("--rho-g2", synth_args.cfg.rho_g2);
  synth->add_option("--noise", synth_args.cfg.noise_sigma);
  synth->add_option("--strength", synth_args.cfg.group_direction_strength);
  synth->add_option("--seed", synth_args.seed);
  synth->add_option("--out", synth_args.out, "Output directory")->required();

  ScoreArgs score_args;
  auto* score = app.add_subcommand(
      "score", "Score verification trials with cosine similarity");
  score->add_option("--data", score_args.data, "Embedding CSV")->required();
  score->add_option("--trials", score_args.trials,
                    "Trial CSV (generated when omitted)");
  score->add_option("--model", score_args.model,
                    "Checkpoint; embeddings are transformed before scoring");
  score->add_option("--max-per-cell", score_args.max_per_cell,
                    "Trials per (group, label) cell when generating");
  score->add_option("--seed", score_args.seed);
  score->add_option("--threads", score_args.threads,
                    "Scoring threads (output is identical at any count)");
  score->add_option("--out", score_args.out)->required();

  TrainArgs train_args;
  auto* train = app.add_subcommand(
      "train", "Train an embedding transformation model");
  train->add_option("--mode", train_args.mode,
                    "nldr | uai | at | mtl | uai-at | uai-mtl")
      ->required()
      ->check(CLI::IsMember(
          {"nldr", "uai", "at", "mtl", "uai-at", "uai-mtl"}));
  train->add_option("--data", train_args.data, "Embedding CSV")->required();
  train->add_option("--config", train_args.config, "TrainConfig JSON");
  train->add_option("--delta", train_args.delta, "Discriminator loss weight");
  train->add_option("--max-epochs", train_args.max_epochs);
  train->add_option("--patience", train_args.patience);
  train->add_option("--batch", train_args.batch);
  train->add_option("--seed", train_args.seed);
  train->add_option("--out", train_args.out)->required();

  EvalArgs eval_args;
  auto* eval = app.add_subcommand(
      "eval", "Fairness and utility metrics from score files");
  eval->add_option("--scores-a", eval_args.scores_a)->required();
  eval->add_option("--scores-b", eval_args.scores_b);
  eval->add_option("--omega", eval_args.omegas, "Error discrepancy weights")
      ->delimiter(',');
  eval->add_option("--far-min", eval_args.far_min);
  eval->add_option("--far-max", eval_args.far_max);
  eval->add_option("--far-step", eval_args.far_step);
  eval->add_option("--out", eval_args.out)->required();

  PermArgs perm_args;
  auto* perm = app.add_subcommand(
      "permtest", "Permutation significance test between two systems");
  perm->add_option("--scores-a", perm_args.scores_a)->required();
  perm->add_option("--scores-b", perm_args.scores_b)->required();
  perm->add_option("--stat", perm_args.stat)
      ->check(CLI::IsMember({"aufadr", "eer"}));
  perm->add_option("--n", perm_args.n, "Number of permutations");
  perm->add_option("--subsample", perm_args.subsample,
                   "Trial subsample for the aufadr statistic");
  perm->add_option("--omega", perm_args.omega);
  perm->add_option("--far-min", perm_args.far_min);
  perm->add_option("--far-max", perm_args.far_max);
  perm->add_option("--far-step", perm_args.far_step);
  perm->add_option("--seed", perm_args.seed);
  perm->add_option("--threads", perm_args.threads);
  perm->add_option("--out", perm_args.out)->required();

  KdeArgs kde_args;
  auto* kde = app.add_subcommand(
      "kde", "Per-group score density estimates and their overlap");
  kde->add_option("--scores", kde_args.scores)->required();
  kde->add_option("--split", kde_args.split)
      ->check(CLI::IsMember({"genuine", "impostor"}));
  kde->add_option("--grid-size", kde_args.grid_size);
  kde->add_option("--out", kde_args.out)->required();

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand(
      "sweep-delta", "Train across bias weights and pick the fairest");
  sweep->add_option("--mode", sweep_args.mode)
      ->check(CLI::IsMember(
          {"nldr", "uai", "at", "mtl", "uai-at", "uai-mtl"}));
  sweep->add_option("--data", sweep_args.data, "Training embedding CSV")
      ->required();
  sweep->add_option("--dev-data", sweep_args.dev_data,
                    "Dev verification embedding CSV")
      ->required();
  sweep->add_option("--dev-trials", sweep_args.dev_trials,
                    "Dev trial CSV (generated when omitted)");
  sweep->add_option("--deltas", sweep_args.deltas)->delimiter(',');
  sweep->add_option("--omega", sweep_args.omega);
  sweep->add_option("--far-min", sweep_args.far_min);
  sweep->add_option("--far-max", sweep_args.far_max);
  sweep->add_option("--far-step", sweep_args.far_step);
  sweep->add_option("--max-per-cell", sweep_args.max_per_cell);
  sweep->add_option("--config", sweep_args.config, "TrainConfig JSON");
  sweep->add_option("--seed", sweep_args.seed);
  sweep->add_option("--threads", sweep_args.threads);
  sweep->add_option("--out", sweep_args.out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help/--version
    std::cerr << e.what() << "\n\n" << app.help() << "\n";
    return 2;
  }

  try {
    if (synth->parsed()) return run_synth(synth_args);
    if (score->parsed()) return run_score(score_args);
    if (train->parsed()) return run_train(train_args);
    if (eval->parsed()) return run_eval(eval_args);
    if (perm->parsed()) return run_permtest(perm_args);
    if (kde->parsed()) return run_kde(kde_args);
    if (sweep->parsed()) return run_sweep(sweep_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
