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

#pragma once

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>
#include <vector>

#include "fairsv/metrics.hpp"
#include "fairsv/scoring.hpp"
#include "fairsv/trials.hpp"
#include "fairsv/uai/model.hpp"

// Alternating minimax training. Per primary minibatch: one primary-branch
// update, then secondary_steps_per_primary secondary-branch updates on fresh
// minibatches. Parameter partitions are hard: the primary step touches the
// encoder, predictor, decoder (and discriminator in multi-task placement);
// the secondary step touches the encoder, disentanglers (and discriminator
// in adversarial placement). Everything else stays bitwise frozen.

namespace fairsv::uai {

// ---------------------------------------------------------------------------
// Training data
// ---------------------------------------------------------------------------

/// Embeddings with integer labels. Speaker indices follow the sorted order
/// of `speaker_ids`; any held-out set evaluated against a trained model must
/// be built with the training set's mapping (pass it explicitly).
struct TrainSet {
  nn::Matrix x;
  std::vector<int> speaker;
  std::vector<int> group;  // 0 = G1, 1 = G2
  std::vector<std::string> speaker_ids;

  std::size_t size() const { return x.rows; }
  std::size_t n_speakers() const { return speaker_ids.size(); }
};

inline nn::Matrix embeddings_matrix(const DatasetSplit& split) {
  nn::Matrix x(split.records.size(), split.dim());
  for (std::size_t i = 0; i < split.records.size(); ++i) {
    const auto& v = split.records[i].vector;
    std::copy(v.begin(), v.end(), x.row(i));
  }
  return x;
}

inline TrainSet make_train_set(const DatasetSplit& split) {
  require(!split.records.empty(), "make_train_set: empty dataset");
  TrainSet set;
  set.x = embeddings_matrix(split);
  for (const auto& [spk, _] : split.speaker_index)
    set.speaker_ids.push_back(spk);  // map keys are already sorted
  std::unordered_map<std::string, int> index;
  for (std::size_t i = 0; i < set.speaker_ids.size(); ++i)
    index.emplace(set.speaker_ids[i], static_cast<int>(i));
  for (const auto& r : split.records) {
    set.speaker.push_back(index.at(r.speaker_id));
    set.group.push_back(r.group == Group::G1 ? 0 : 1);
  }
  return set;
}

/// Same embeddings, labelled with a pre-existing speaker mapping (for
/// held-out data evaluated against a trained model). Unknown speakers are
/// rejected.
inline TrainSet make_train_set(const DatasetSplit& split,
                               const std::vector<std::string>& speaker_ids) {
  TrainSet set;
  set.x = embeddings_matrix(split);
  set.speaker_ids = speaker_ids;
  std::unordered_map<std::string, int> index;
  for (std::size_t i = 0; i < speaker_ids.size(); ++i)
    index.emplace(speaker_ids[i], static_cast<int>(i));
  for (const auto& r : split.records) {
    auto it = index.find(r.speaker_id);
    require(it != index.end(),
            "speaker '" + r.speaker_id + "' not in the training mapping");
    set.speaker.push_back(it->second);
    set.group.push_back(r.group == Group::G1 ? 0 : 1);
  }
  return set;
}

inline Batch gather_batch(const TrainSet& data,
                          const std::vector<std::uint32_t>& idx) {
  Batch b;
  b.x = nn::Matrix(idx.size(), data.x.cols);
  b.speaker.resize(idx.size());
  b.group.resize(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const double* src = data.x.row(idx[i]);
    std::copy(src, src + data.x.cols, b.x.row(i));
    b.speaker[i] = data.speaker[idx[i]];
    b.group[i] = data.group[idx[i]];
  }
  return b;
}

// ---------------------------------------------------------------------------
// Optimizers and branch steps
// ---------------------------------------------------------------------------

/// The encoder belongs to both branches, so it carries two independent Adam
/// states (one per learning rate); every other module belongs to exactly one.
struct Optimizers {
  nn::NetOptimizer enc_primary, enc_secondary;
  nn::NetOptimizer predictor, decoder, dis1, dis2, discriminator, probe;
};

inline Optimizers make_optimizers(const UaiModel& m, const TrainConfig& cfg) {
  const auto act = activity_for(cfg.mode);
  const double disc_lr = act.placement == DiscPlacement::PrimaryBranch
                             ? cfg.lr_primary
                             : cfg.lr_secondary;
  return Optimizers{
      nn::NetOptimizer(m.encoder, cfg.lr_primary, cfg.weight_decay),
      nn::NetOptimizer(m.encoder, cfg.lr_secondary, cfg.weight_decay),
      nn::NetOptimizer(m.predictor, cfg.lr_primary, cfg.weight_decay),
      nn::NetOptimizer(m.decoder, cfg.lr_primary, cfg.weight_decay),
      nn::NetOptimizer(m.dis1, cfg.lr_secondary, cfg.weight_decay),
      nn::NetOptimizer(m.dis2, cfg.lr_secondary, cfg.weight_decay),
      nn::NetOptimizer(m.discriminator, disc_lr, cfg.weight_decay),
      nn::NetOptimizer(m.probe, cfg.lr_primary, cfg.weight_decay)};
}

namespace detail {

inline void scale(nn::Matrix& m, double s) {
  for (double& v : m.data) v *= s;
}

inline nn::Matrix scaled(const nn::Matrix& m, double s) {
  nn::Matrix out = m;
  scale(out, s);
  return out;
}

}  // namespace detail

/// Parameter gradients of one branch objective, plus the batch losses.
/// Only the nets the branch updates have non-empty gradients.
struct BranchGradients {
  nn::NetGrads encoder, predictor, decoder, dis1, dis2, discriminator;
  nn::LossReport losses;
};

/// Gradients of the primary objective alpha * pred + beta * recon
/// (+ delta * bias against true labels when the discriminator is
/// multi-task-placed) with respect to the primary parameter set.
inline BranchGradients primary_gradients(const UaiModel& model,
                                         const Batch& batch,
                                         const TrainConfig& cfg,
                                         std::uint64_t dropout_seed) {
  const auto act = activity_for(cfg.mode);
  const detail::PassSelect sel{
      true, act.decoder, false,
      act.placement == DiscPlacement::PrimaryBranch};
  ForwardState fs = detail::run_forward(model, batch, cfg, /*train_flag=*/true,
                                        dropout_seed, sel);

  BranchGradients out;
  out.losses = fs.losses;
  nn::Matrix d_code(fs.code.rows, fs.code.cols);
  nn::Matrix d_nuisance(fs.nuisance.rows, fs.nuisance.cols);
  out.encoder = nn::zero_grads(model.encoder);
  out.predictor = nn::zero_grads(model.predictor);

  auto lv_pred = nn::softmax_xent(fs.pred_trace.output(), batch.speaker);
  nn::add_into(d_code, nn::backward(model.predictor, fs.code, fs.pred_trace,
                                    detail::scaled(lv_pred.grad, cfg.alpha),
                                    out.predictor));

  if (act.decoder) {
    out.decoder = nn::zero_grads(model.decoder);
    auto lv_rec = nn::mse(fs.dec_trace.output(), batch.x);
    nn::Matrix d_in =
        nn::backward(model.decoder, fs.decoder_input, fs.dec_trace,
                     detail::scaled(lv_rec.grad, cfg.beta), out.decoder);
    // Dropout backward: the perturbed code is code .* mask.
    nn::add_into(d_code, nn::hadamard(nn::columns(d_in, 0, model.code_dim()),
                                      fs.mask));
    nn::add_into(d_nuisance,
                 nn::columns(d_in, model.code_dim(), model.nuisance_dim()));
  }

  if (sel.discriminator) {
    out.discriminator = nn::zero_grads(model.discriminator);
    auto lv_bias = nn::softmax_xent(fs.disc_trace.output(), batch.group);
    nn::add_into(d_code, nn::backward(model.discriminator, fs.code,
                                      fs.disc_trace,
                                      detail::scaled(lv_bias.grad, cfg.delta),
                                      out.discriminator));
  }

  nn::backward(model.encoder, batch.x, fs.enc_trace,
               nn::hconcat(d_code, d_nuisance), out.encoder);
  return out;
}

/// One Adam step at lr_primary on the primary branch. Secondary parameters
/// untouched.
inline nn::LossReport primary_step(UaiModel& model, Optimizers& opt,
                                   const Batch& batch, const TrainConfig& cfg,
                                   std::uint64_t step_seed) {
  const auto act = activity_for(cfg.mode);
  const auto grads = primary_gradients(
      model, batch, cfg, derive_seed(step_seed, seed_tag::kDropout));
  opt.enc_primary.step(model.encoder, grads.encoder);
  opt.predictor.step(model.predictor, grads.predictor);
  if (act.decoder) opt.decoder.step(model.decoder, grads.decoder);
  if (act.placement == DiscPlacement::PrimaryBranch)
    opt.discriminator.step(model.discriminator, grads.discriminator);
  return grads.losses;
}

/// Draws labels i.i.d. from the empirical group distribution (the
/// random-label surrogate for maximizing the discriminator loss).
inline std::vector<int> resample_group_labels(std::size_t n, double g2_prob,
                                              std::uint64_t seed) {
  std::vector<int> labels(n);
  Rng rng(seed);
  for (auto& l : labels) l = rng.uniform() < g2_prob ? 1 : 0;
  return labels;
}

/// Gradients of the secondary objective gamma * (dis1 + dis2)
/// (+ delta * bias against the supplied resampled labels when the
/// discriminator is adversarially placed) with respect to the secondary
/// parameter set.
inline BranchGradients secondary_gradients(
    const UaiModel& model, const Batch& batch, const TrainConfig& cfg,
    const std::vector<int>& resampled_labels) {
  const auto act = activity_for(cfg.mode);
  const detail::PassSelect sel{
      false, false, act.disentangler,
      act.placement == DiscPlacement::SecondaryBranch};
  ForwardState fs =
      detail::run_forward(model, batch, cfg, /*train_flag=*/false, 0, sel);

  BranchGradients out;
  out.losses = fs.losses;
  nn::Matrix d_code(fs.code.rows, fs.code.cols);
  nn::Matrix d_nuisance(fs.nuisance.rows, fs.nuisance.cols);
  out.encoder = nn::zero_grads(model.encoder);

  if (act.disentangler) {
    out.dis1 = nn::zero_grads(model.dis1);
    out.dis2 = nn::zero_grads(model.dis2);
    // The codes appear both as disentangler inputs and as regression
    // targets; the encoder gradient needs both paths.
    auto lv1 = nn::mse(fs.dis1_trace.output(), fs.code);
    nn::add_into(d_nuisance,
                 nn::backward(model.dis1, fs.nuisance, fs.dis1_trace,
                              detail::scaled(lv1.grad, cfg.gamma), out.dis1));
    nn::add_into(d_code, detail::scaled(lv1.grad, -cfg.gamma));
    auto lv2 = nn::mse(fs.dis2_trace.output(), fs.nuisance);
    nn::add_into(d_code,
                 nn::backward(model.dis2, fs.code, fs.dis2_trace,
                              detail::scaled(lv2.grad, cfg.gamma), out.dis2));
    nn::add_into(d_nuisance, detail::scaled(lv2.grad, -cfg.gamma));
  }

  if (sel.discriminator) {
    out.discriminator = nn::zero_grads(model.discriminator);
    auto lv_bias = nn::softmax_xent(fs.disc_trace.output(), resampled_labels);
    out.losses.bias = lv_bias.loss;  // the loss actually minimized
    nn::add_into(d_code, nn::backward(model.discriminator, fs.code,
                                      fs.disc_trace,
                                      detail::scaled(lv_bias.grad, cfg.delta),
                                      out.discriminator));
  }

  nn::backward(model.encoder, batch.x, fs.enc_trace,
               nn::hconcat(d_code, d_nuisance), out.encoder);
  return out;
}

/// One Adam step at lr_secondary on the secondary branch: the disentanglers
/// fit their code predictions, the adversarially-placed discriminator fits
/// labels resampled from `g2_prob`, and the encoder moves with them.
/// Predictor and decoder untouched. In plain MTL mode the secondary branch
/// has no live loss, so this is a no-op.
inline nn::LossReport secondary_step(UaiModel& model, Optimizers& opt,
                                     const Batch& batch,
                                     const TrainConfig& cfg, double g2_prob,
                                     std::uint64_t step_seed) {
  require(cfg.mode != Mode::Nldr,
          "secondary_step: NLDR has no secondary branch");
  if (!has_secondary_objective(cfg.mode)) return {};
  const auto act = activity_for(cfg.mode);
  const auto labels = resample_group_labels(
      batch.x.rows, g2_prob, derive_seed(step_seed, seed_tag::kResample));
  const auto grads = secondary_gradients(model, batch, cfg, labels);
  opt.enc_secondary.step(model.encoder, grads.encoder);
  if (act.disentangler) {
    opt.dis1.step(model.dis1, grads.dis1);
    opt.dis2.step(model.dis2, grads.dis2);
  }
  if (act.placement == DiscPlacement::SecondaryBranch)
    opt.discriminator.step(model.discriminator, grads.discriminator);
  return grads.losses;
}

/// One Adam step of the detached probe on true group labels. The gradient
/// stops at the speaker code, so the encoder is unaffected.
inline double probe_step(UaiModel& model, Optimizers& opt, const Batch& batch) {
  const nn::Matrix code = transform(model, batch.x);
  auto trace = nn::forward(model.probe, code);
  auto lv = nn::softmax_xent(trace.output(), batch.group);
  nn::NetGrads g = nn::zero_grads(model.probe);
  nn::backward(model.probe, code, trace, lv.grad, g);
  opt.probe.step(model.probe, g);
  return lv.loss;
}

// ---------------------------------------------------------------------------
// Training loop
// ---------------------------------------------------------------------------

struct EpochStats {
  std::size_t epoch = 0;
  double l_pred = 0.0, l_recon = 0.0;
  double l_dis1 = 0.0, l_dis2 = 0.0, l_bias = 0.0;
  double val_speaker_acc = 0.0;
  double val_group_acc = 0.0;
};

struct TrainResult {
  UaiModel model;  // best-validation checkpoint
  std::vector<EpochStats> history;
  std::size_t best_epoch = 0;
  double best_val_speaker_acc = 0.0;
  std::vector<std::uint32_t> val_indices;  // rows of the training set held out
};

namespace detail {

/// Hands out minibatches from an endlessly reshuffled index stream.
class BatchStream {
 public:
  BatchStream(std::vector<std::uint32_t> idx, std::uint64_t seed)
      : idx_(std::move(idx)), rng_(seed) {
    rng_.shuffle(idx_);
  }

  std::vector<std::uint32_t> next(std::size_t n) {
    std::vector<std::uint32_t> out;
    out.reserve(n);
    while (out.size() < n) {
      if (pos_ == idx_.size()) {
        rng_.shuffle(idx_);
        pos_ = 0;
      }
      out.push_back(idx_[pos_++]);
    }
    return out;
  }

 private:
  std::vector<std::uint32_t> idx_;
  std::size_t pos_ = 0;
  Rng rng_;
};

struct Accuracy {
  double speaker = 0.0;
  double group = 0.0;
};

inline Accuracy evaluate_accuracy(const UaiModel& model, const nn::Matrix& x,
                                  const std::vector<int>& speaker,
                                  const std::vector<int>& group) {
  const nn::Matrix code = transform(model, x);
  const auto act = activity_for(model.mode);
  const nn::DenseNet& group_net =
      act.placement == DiscPlacement::PrimaryBranch ? model.discriminator
                                                    : model.probe;
  Accuracy acc;
  const double n = static_cast<double>(x.rows);
  acc.speaker = static_cast<double>(nn::argmax_correct(
                    nn::forward_eval(model.predictor, code), speaker)) /
                n;
  acc.group = static_cast<double>(nn::argmax_correct(
                  nn::forward_eval(group_net, code), group)) /
              n;
  return acc;
}

}  // namespace detail

/// Trains in the configured mode with early stopping on validation speaker
/// accuracy and returns the best checkpoint. Validation rows are held-out
/// utterances of the training speakers (val_fraction per speaker).
/// Deterministic for a fixed config.
inline TrainResult train(UaiModel model, const TrainSet& data,
                         const TrainConfig& cfg) {
  cfg.validate();
  require(data.size() > 0, "train: empty dataset");
  require(data.n_speakers() >= 2, "train: need at least 2 speakers");
  require(model.input_dim == data.x.cols, "train: input dim mismatch");
  require(cfg.max_epochs >= 1, "train: max_epochs must be >= 1");

  // Per-speaker validation hold-out.
  std::vector<std::vector<std::uint32_t>> rows_by_speaker(data.n_speakers());
  for (std::size_t i = 0; i < data.size(); ++i)
    rows_by_speaker[data.speaker[i]].push_back(
        static_cast<std::uint32_t>(i));
  std::vector<std::uint32_t> train_idx, val_idx;
  Rng val_rng(derive_seed(cfg.seed, seed_tag::kValSplit));
  for (auto& rows : rows_by_speaker) {
    val_rng.shuffle(rows);
    const auto n_val = static_cast<std::size_t>(
        cfg.val_fraction * static_cast<double>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
      (i < n_val ? val_idx : train_idx).push_back(rows[i]);
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(val_idx.begin(), val_idx.end());
  if (val_idx.empty()) val_idx = train_idx;  // degenerate tiny datasets
  const Batch val_batch = gather_batch(data, val_idx);

  double g2_count = 0;
  for (auto i : train_idx) g2_count += data.group[i];
  const double g2_prob = g2_count / static_cast<double>(train_idx.size());

  const bool run_secondary =
      cfg.mode != Mode::Nldr && has_secondary_objective(cfg.mode);
  Optimizers opt = make_optimizers(model, cfg);
  detail::BatchStream secondary_stream(
      train_idx, derive_seed(cfg.seed, seed_tag::kStep, 0xa17));

  TrainResult result;
  result.val_indices = val_idx;
  double best_acc = -1.0;
  std::size_t stale = 0;
  std::uint64_t step_counter = 0;

  for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    Rng epoch_rng(derive_seed(cfg.seed, seed_tag::kEpoch, epoch));
    std::vector<std::uint32_t> order = train_idx;
    epoch_rng.shuffle(order);

    EpochStats stats;
    stats.epoch = epoch;
    std::size_t n_primary = 0, n_secondary = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch) {
      const std::size_t end = std::min(order.size(), start + cfg.batch);
      const std::vector<std::uint32_t> idx(order.begin() + start,
                                           order.begin() + end);
      const Batch batch = gather_batch(data, idx);
      const auto report = primary_step(model, opt, batch, cfg,
                                       derive_seed(cfg.seed, seed_tag::kStep,
                                                   ++step_counter));
      stats.l_pred += report.pred;
      stats.l_recon += report.recon;
      if (activity_for(cfg.mode).placement == DiscPlacement::PrimaryBranch)
        stats.l_bias += report.bias;
      ++n_primary;
      probe_step(model, opt, batch);

      if (run_secondary) {
        for (std::size_t k = 0; k < cfg.secondary_steps_per_primary; ++k) {
          const Batch sec_batch =
              gather_batch(data, secondary_stream.next(idx.size()));
          const auto sec = secondary_step(model, opt, sec_batch, cfg, g2_prob,
                                          derive_seed(cfg.seed, seed_tag::kStep,
                                                      ++step_counter));
          stats.l_dis1 += sec.dis1;
          stats.l_dis2 += sec.dis2;
          if (activity_for(cfg.mode).placement ==
              DiscPlacement::SecondaryBranch)
            stats.l_bias += sec.bias;
          ++n_secondary;
        }
      }
    }
    if (n_primary > 0) {
      stats.l_pred /= static_cast<double>(n_primary);
      stats.l_recon /= static_cast<double>(n_primary);
    }
    if (n_secondary > 0) {
      stats.l_dis1 /= static_cast<double>(n_secondary);
      stats.l_dis2 /= static_cast<double>(n_secondary);
    }
    const auto act = activity_for(cfg.mode);
    if (act.placement == DiscPlacement::PrimaryBranch && n_primary > 0)
      stats.l_bias /= static_cast<double>(n_primary);
    else if (act.placement == DiscPlacement::SecondaryBranch && n_secondary > 0)
      stats.l_bias /= static_cast<double>(n_secondary);

    const auto acc = detail::evaluate_accuracy(model, val_batch.x,
                                               val_batch.speaker,
                                               val_batch.group);
    stats.val_speaker_acc = acc.speaker;
    stats.val_group_acc = acc.group;
    result.history.push_back(stats);

    if (acc.speaker > best_acc) {
      best_acc = acc.speaker;
      result.model = model;
      result.best_epoch = epoch;
      result.best_val_speaker_acc = best_acc;
      stale = 0;
    } else if (++stale >= cfg.patience) {
      break;
    }
  }
  return result;
}

inline void write_history_csv(const std::vector<EpochStats>& history,
                              const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail("cannot open '" + path.string() + "' for writing");
  out << "epoch,l_pred,l_recon,l_dis1,l_dis2,l_bias,val_speaker_acc,"
         "val_group_acc\n";
  for (const auto& s : history) {
    out << s.epoch << ',' << format_real(s.l_pred) << ','
        << format_real(s.l_recon) << ',' << format_real(s.l_dis1) << ','
        << format_real(s.l_dis2) << ',' << format_real(s.l_bias) << ','
        << format_real(s.val_speaker_acc) << ','
        << format_real(s.val_group_acc) << "\n";
  }
}

// ---------------------------------------------------------------------------
// Probing and evaluation helpers
// ---------------------------------------------------------------------------

struct ProbeReport {
  double speaker_acc = 0.0;
  double group_acc = 0.0;
  double majority_rate = 0.0;  // majority-class chance accuracy for groups
};

/// Speaker and group classification accuracy on held-out rows. The group
/// classifier is the model's discriminator when it was fit to true labels
/// (multi-task placement) and the detached probe otherwise, so the number
/// always measures how much group information a true-label classifier can
/// extract from the speaker code.
inline ProbeReport probe_accuracy(const UaiModel& model,
                                  const TrainSet& held_out) {
  require(held_out.size() > 0, "probe_accuracy: empty held-out set");
  const auto acc = detail::evaluate_accuracy(model, held_out.x,
                                             held_out.speaker, held_out.group);
  double g2 = 0;
  for (int g : held_out.group) g2 += g;
  const double frac = g2 / static_cast<double>(held_out.size());
  return ProbeReport{acc.speaker, acc.group, std::max(frac, 1.0 - frac)};
}

/// Group classification accuracy alone, usable on splits whose speakers are
/// unknown to the predictor. Same classifier selection rule as
/// probe_accuracy.
inline double group_accuracy(const UaiModel& model, const nn::Matrix& x,
                             const std::vector<int>& groups) {
  require(x.rows == groups.size() && x.rows > 0,
          "group_accuracy: bad label count");
  const nn::Matrix code = transform(model, x);
  const nn::DenseNet& net =
      activity_for(model.mode).placement == DiscPlacement::PrimaryBranch
          ? model.discriminator
          : model.probe;
  return static_cast<double>(
             nn::argmax_correct(nn::forward_eval(net, code), groups)) /
         static_cast<double>(x.rows);
}

/// Applies the encoder to every record of a split, producing a new split of
/// speaker-code embeddings with the same ids and groups.
inline DatasetSplit transform_split(const UaiModel& model,
                                    const DatasetSplit& split) {
  const nn::Matrix code = transform(model, embeddings_matrix(split));
  std::vector<EmbeddingRecord> records = split.records;
  for (std::size_t i = 0; i < records.size(); ++i) {
    records[i].vector.assign(code.row(i), code.row(i) + code.cols);
  }
  return make_split(std::move(records));
}

// ---------------------------------------------------------------------------
// Bias-weight sweep
// ---------------------------------------------------------------------------

inline std::vector<double> default_delta_sweep() {
  return {10, 30, 50, 70, 100, 150, 200};
}

struct DeltaSweepRow {
  double delta = 0.0;
  double speaker_acc = 0.0;  // on the training-time validation split
  double group_acc = 0.0;
  double eer_percent = 0.0;  // on the dev verification trials
  double au_fadr = 0.0;
};

struct DeltaSweepResult {
  std::vector<DeltaSweepRow> rows;  // in input delta order
  std::size_t best_index = 0;       // max au_fadr, ties to the smaller delta
  UaiModel best_model;
};

/// Trains one model per delta and evaluates each on the dev verification
/// trials. Runs are independent (each with a derived seed), so they may
/// execute in parallel; results are merged in delta order either way.
inline DeltaSweepResult delta_sweep(const TrainSet& data,
                                    const DatasetSplit& dev_split,
                                    const std::vector<Trial>& dev_trials,
                                    const TrainConfig& base_cfg,
                                    const std::vector<double>& deltas,
                                    const FadrParams& params,
                                    const std::vector<double>& far_grid_percent,
                                    unsigned threads = 1) {
  require(!deltas.empty(), "delta_sweep: empty delta list");
  check_far_grid(far_grid_percent);
  DeltaSweepResult result;
  result.rows.resize(deltas.size());
  std::vector<UaiModel> models(deltas.size());

  auto run_one = [&](std::size_t i) {
    TrainConfig cfg = base_cfg;
    cfg.delta = deltas[i];
    cfg.seed = derive_seed(base_cfg.seed, seed_tag::kDeltaRun, i);
    auto trained = train(make_model(data.x.cols, data.n_speakers(), cfg),
                         data, cfg);
    const Batch val = gather_batch(data, trained.val_indices);
    const auto acc = detail::evaluate_accuracy(trained.model, val.x,
                                               val.speaker, val.group);
    const auto scored =
        score_trials(transform_split(trained.model, dev_split), dev_trials);
    const auto partition = partition_scores(scored);
    DeltaSweepRow row;
    row.delta = deltas[i];
    row.speaker_acc = acc.speaker;
    row.group_acc = acc.group;
    row.eer_percent =
        100.0 * eer(partition.pooled_genuine, partition.pooled_impostor).eer;
    row.au_fadr = au_fadr(fadr_curve(partition, params, far_grid_percent));
    result.rows[i] = row;
    models[i] = std::move(trained.model);
  };

  if (threads <= 1) {
    for (std::size_t i = 0; i < deltas.size(); ++i) run_one(i);
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (unsigned t = 0; t < std::min<std::size_t>(threads, deltas.size());
         ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < deltas.size();
             i = next.fetch_add(1))
          run_one(i);
      });
    }
    for (auto& th : pool) th.join();
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < result.rows.size(); ++i) {
    const auto& r = result.rows[i];
    const auto& b = result.rows[best];
    if (r.au_fadr > b.au_fadr ||
        (r.au_fadr == b.au_fadr && r.delta < b.delta)) {
      best = i;
    }
  }
  result.best_index = best;
  result.best_model = std::move(models[best]);
  return result;
}

// ---------------------------------------------------------------------------
// TrainConfig JSON
// ---------------------------------------------------------------------------

inline nlohmann::json config_to_json(const TrainConfig& cfg) {
  return {{"mode", to_string(cfg.mode)},
          {"alpha", cfg.alpha},
          {"beta", cfg.beta},
          {"gamma", cfg.gamma},
          {"delta", cfg.delta},
          {"p_drop", cfg.p_drop},
          {"batch", cfg.batch},
          {"lr_primary", cfg.lr_primary},
          {"lr_secondary", cfg.lr_secondary},
          {"weight_decay", cfg.weight_decay},
          {"secondary_steps_per_primary", cfg.secondary_steps_per_primary},
          {"max_epochs", cfg.max_epochs},
          {"patience", cfg.patience},
          {"val_fraction", cfg.val_fraction},
          {"seed", cfg.seed},
          {"arch",
           {{"code_dim", cfg.arch.code_dim},
            {"nuisance_dim", cfg.arch.nuisance_dim},
            {"encoder_hidden", cfg.arch.encoder_hidden},
            {"decoder_hidden", cfg.arch.decoder_hidden},
            {"predictor_hidden", cfg.arch.predictor_hidden},
            {"disentangler_hidden", cfg.arch.disentangler_hidden},
            {"discriminator_hidden", cfg.arch.discriminator_hidden}}}};
}

inline TrainConfig config_from_json(const nlohmann::json& j) {
  TrainConfig cfg;
  if (j.contains("mode")) cfg.mode = parse_mode(j.at("mode").get<std::string>());
  cfg.alpha = j.value("alpha", cfg.alpha);
  cfg.beta = j.value("beta", cfg.beta);
  cfg.gamma = j.value("gamma", cfg.gamma);
  cfg.delta = j.value("delta", cfg.delta);
  cfg.p_drop = j.value("p_drop", cfg.p_drop);
  cfg.batch = j.value("batch", cfg.batch);
  cfg.lr_primary = j.value("lr_primary", cfg.lr_primary);
  cfg.lr_secondary = j.value("lr_secondary", cfg.lr_secondary);
  cfg.weight_decay = j.value("weight_decay", cfg.weight_decay);
  cfg.secondary_steps_per_primary =
      j.value("secondary_steps_per_primary", cfg.secondary_steps_per_primary);
  cfg.max_epochs = j.value("max_epochs", cfg.max_epochs);
  cfg.patience = j.value("patience", cfg.patience);
  cfg.val_fraction = j.value("val_fraction", cfg.val_fraction);
  cfg.seed = j.value("seed", cfg.seed);
  if (j.contains("arch")) {
    const auto& a = j.at("arch");
    cfg.arch.code_dim = a.value("code_dim", cfg.arch.code_dim);
    cfg.arch.nuisance_dim = a.value("nuisance_dim", cfg.arch.nuisance_dim);
    if (a.contains("encoder_hidden"))
      cfg.arch.encoder_hidden =
          a.at("encoder_hidden").get<std::vector<std::size_t>>();
    if (a.contains("decoder_hidden"))
      cfg.arch.decoder_hidden =
          a.at("decoder_hidden").get<std::vector<std::size_t>>();
    if (a.contains("predictor_hidden"))
      cfg.arch.predictor_hidden =
          a.at("predictor_hidden").get<std::vector<std::size_t>>();
    if (a.contains("disentangler_hidden"))
      cfg.arch.disentangler_hidden =
          a.at("disentangler_hidden").get<std::vector<std::size_t>>();
    if (a.contains("discriminator_hidden"))
      cfg.arch.discriminator_hidden =
          a.at("discriminator_hidden").get<std::vector<std::size_t>>();
  }
  cfg.validate();
  return cfg;
}

}  // namespace fairsv::uai
