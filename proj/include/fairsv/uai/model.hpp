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

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairsv/nn/adam.hpp"
#include "fairsv/nn/checkpoint.hpp"
#include "fairsv/nn/loss.hpp"
#include "fairsv/nn/net.hpp"
#include "fairsv/rng.hpp"
#include "fairsv/version.hpp"

// Embedding transformation model. The encoder splits its output into a
// speaker code (fed to the predictor and, dropout-perturbed, to the decoder)
// and a nuisance code (fed to the decoder). Two disentanglers predict each
// code from the other; a discriminator predicts the demographic group from
// the speaker code, attached to the primary branch (multi-task) or to the
// secondary branch (adversarial) depending on the mode.

namespace fairsv::uai {

enum class Mode : std::uint8_t { Nldr, Uai, At, Mtl, UaiAt, UaiMtl };

inline const char* to_string(Mode m) {
  switch (m) {
    case Mode::Nldr: return "nldr";
    case Mode::Uai: return "uai";
    case Mode::At: return "at";
    case Mode::Mtl: return "mtl";
    case Mode::UaiAt: return "uai-at";
    default: return "uai-mtl";
  }
}

inline Mode parse_mode(std::string_view s) {
  if (s == "nldr") return Mode::Nldr;
  if (s == "uai") return Mode::Uai;
  if (s == "at") return Mode::At;
  if (s == "mtl") return Mode::Mtl;
  if (s == "uai-at") return Mode::UaiAt;
  if (s == "uai-mtl") return Mode::UaiMtl;
  fail("unknown mode '" + std::string(s) +
       "' (expected nldr|uai|at|mtl|uai-at|uai-mtl)");
}

inline const std::vector<Mode>& all_modes() {
  static const std::vector<Mode> modes{Mode::Nldr, Mode::Uai,   Mode::At,
                                       Mode::Mtl,  Mode::UaiAt, Mode::UaiMtl};
  return modes;
}

enum class DiscPlacement : std::uint8_t { None, PrimaryBranch, SecondaryBranch };

/// Which modules train in a given mode, and where the discriminator sits.
struct ModeActivity {
  bool encoder = false;
  bool predictor = false;
  bool decoder = false;
  bool disentangler = false;
  bool discriminator = false;
  DiscPlacement placement = DiscPlacement::None;

  friend bool operator==(const ModeActivity&, const ModeActivity&) = default;
};

inline ModeActivity activity_for(Mode m) {
  switch (m) {
    case Mode::Nldr:
      return {true, true, false, false, false, DiscPlacement::None};
    case Mode::Uai:
      return {true, true, true, true, false, DiscPlacement::None};
    case Mode::Mtl:
      return {true, true, false, false, true, DiscPlacement::PrimaryBranch};
    case Mode::At:
      return {true, true, false, false, true, DiscPlacement::SecondaryBranch};
    case Mode::UaiAt:
      return {true, true, true, true, true, DiscPlacement::SecondaryBranch};
    default:  // UaiMtl
      return {true, true, true, true, true, DiscPlacement::PrimaryBranch};
  }
}

/// True if alternating updates run a secondary branch with live modules.
/// NLDR has no secondary branch at all; plain MTL's secondary branch would
/// contain no trainable loss (the discriminator sits in the primary branch
/// and there are no disentanglers), so training skips it.
inline bool has_secondary_objective(Mode m) {
  const auto a = activity_for(m);
  return a.disentangler || a.placement == DiscPlacement::SecondaryBranch;
}

/// Layer sizes. Defaults follow the reference setup: 512+512 encoder and
/// decoder, 256 then 512 predictor, 128+128 disentanglers, one hidden layer
/// of 64 for the discriminator, with a 128-dim speaker code and a 32-dim
/// nuisance code.
struct Architecture {
  std::size_t code_dim = 128;
  std::size_t nuisance_dim = 32;
  std::vector<std::size_t> encoder_hidden{512, 512};
  std::vector<std::size_t> decoder_hidden{512, 512};
  std::vector<std::size_t> predictor_hidden{256, 512};
  std::vector<std::size_t> disentangler_hidden{128, 128};
  std::vector<std::size_t> discriminator_hidden{64};

  friend bool operator==(const Architecture&, const Architecture&) = default;
};

struct TrainConfig {
  Mode mode = Mode::UaiMtl;
  double alpha = 100.0;  // speaker prediction weight
  double beta = 5.0;     // reconstruction weight
  double gamma = 100.0;  // disentangler weight
  double delta = 50.0;   // discriminator weight
  double p_drop = 0.75;
  std::size_t batch = 128;
  double lr_primary = 1e-3;
  double lr_secondary = 1e-4;
  double weight_decay = 1e-4;
  std::size_t secondary_steps_per_primary = 10;
  std::size_t max_epochs = 200;
  std::size_t patience = 10;
  double val_fraction = 0.2;
  std::uint64_t seed = 0;
  Architecture arch;

  void validate() const {
    require(alpha >= 0 && beta >= 0 && gamma >= 0 && delta >= 0,
            "loss weights must be non-negative");
    require(p_drop >= 0.0 && p_drop < 1.0, "p_drop must be in [0, 1)");
    require(batch >= 1, "batch size must be >= 1");
    require(secondary_steps_per_primary >= 1,
            "secondary_steps_per_primary must be >= 1");
    require(val_fraction >= 0.0 && val_fraction < 1.0,
            "val_fraction must be in [0, 1)");
  }
};

/// All module networks. Inactive modules are still constructed (and stored
/// in checkpoints) but never receive gradient updates; the probe is a
/// detached discriminator-architecture head fit to true group labels for
/// reporting only, so group information in the speaker code stays measurable
/// in adversarial modes without touching the encoder.
struct UaiModel {
  Mode mode = Mode::UaiMtl;
  std::size_t input_dim = 0;
  std::size_t n_speakers = 0;
  Architecture arch;
  nn::DenseNet encoder;
  nn::DenseNet predictor;
  nn::DenseNet decoder;
  nn::DenseNet dis1;  // nuisance code -> speaker code
  nn::DenseNet dis2;  // speaker code -> nuisance code
  nn::DenseNet discriminator;
  nn::DenseNet probe;

  std::size_t code_dim() const { return arch.code_dim; }
  std::size_t nuisance_dim() const { return arch.nuisance_dim; }
};

inline UaiModel make_model(std::size_t input_dim, std::size_t n_speakers,
                           const TrainConfig& cfg) {
  require(input_dim >= 1, "make_model: input_dim must be >= 1");
  require(n_speakers >= 2, "make_model: need at least 2 speakers");
  const auto& a = cfg.arch;
  UaiModel m;
  m.mode = cfg.mode;
  m.input_dim = input_dim;
  m.n_speakers = n_speakers;
  m.arch = a;
  const std::uint64_t s = derive_seed(cfg.seed, seed_tag::kInit);
  m.encoder = nn::make_net(input_dim, a.encoder_hidden,
                           a.code_dim + a.nuisance_dim, derive_seed(s, 1));
  m.predictor =
      nn::make_net(a.code_dim, a.predictor_hidden, n_speakers, derive_seed(s, 2));
  m.decoder = nn::make_net(a.code_dim + a.nuisance_dim, a.decoder_hidden,
                           input_dim, derive_seed(s, 3));
  m.dis1 = nn::make_net(a.nuisance_dim, a.disentangler_hidden, a.code_dim,
                        derive_seed(s, 4));
  m.dis2 = nn::make_net(a.code_dim, a.disentangler_hidden, a.nuisance_dim,
                        derive_seed(s, 5));
  m.discriminator =
      nn::make_net(a.code_dim, a.discriminator_hidden, 2, derive_seed(s, 6));
  m.probe =
      nn::make_net(a.code_dim, a.discriminator_hidden, 2, derive_seed(s, 7));
  return m;
}

/// A minibatch: embeddings with integer speaker and group labels.
struct Batch {
  nn::Matrix x;
  std::vector<int> speaker;
  std::vector<int> group;  // 0 = G1, 1 = G2
};

/// Outputs and traces of one forward pass; inactive-module members stay
/// empty and their losses stay zero.
struct ForwardState {
  nn::ForwardTrace enc_trace;
  nn::Matrix code, nuisance;       // encoder output split
  nn::Matrix mask;                 // dropout mask (training only)
  nn::Matrix code_perturbed;       // dropout-perturbed code fed to the decoder
  nn::Matrix decoder_input;
  nn::ForwardTrace pred_trace, dec_trace, dis1_trace, dis2_trace, disc_trace;
  nn::LossReport losses;
};

namespace detail {

struct PassSelect {
  bool predictor = false;
  bool decoder = false;
  bool disentangler = false;
  bool discriminator = false;
};

inline ForwardState run_forward(const UaiModel& model, const Batch& batch,
                                const TrainConfig& cfg, bool train_flag,
                                std::uint64_t dropout_seed,
                                const PassSelect& sel) {
  require(batch.x.cols == model.input_dim,
          "forward_pass: batch width " + std::to_string(batch.x.cols) +
              " != input dim " + std::to_string(model.input_dim));
  require(batch.x.rows == batch.speaker.size() &&
              batch.x.rows == batch.group.size(),
          "forward_pass: label counts do not match the batch");
  ForwardState fs;
  fs.enc_trace = nn::forward(model.encoder, batch.x);
  const nn::Matrix& enc_out = fs.enc_trace.output();
  fs.code = nn::columns(enc_out, 0, model.code_dim());
  fs.nuisance = nn::columns(enc_out, model.code_dim(), model.nuisance_dim());

  if (sel.predictor) {
    fs.pred_trace = nn::forward(model.predictor, fs.code);
    fs.losses.pred =
        nn::softmax_xent(fs.pred_trace.output(), batch.speaker).loss;
  }
  if (sel.decoder) {
    if (train_flag) {
      fs.mask = nn::dropout_mask(fs.code.rows, fs.code.cols, cfg.p_drop,
                                 dropout_seed);
      fs.code_perturbed = nn::hadamard(fs.code, fs.mask);
    } else {
      fs.code_perturbed = fs.code;
    }
    fs.decoder_input = nn::hconcat(fs.code_perturbed, fs.nuisance);
    fs.dec_trace = nn::forward(model.decoder, fs.decoder_input);
    fs.losses.recon = nn::mse(fs.dec_trace.output(), batch.x).loss;
  }
  if (sel.disentangler) {
    fs.dis1_trace = nn::forward(model.dis1, fs.nuisance);
    fs.losses.dis1 = nn::mse(fs.dis1_trace.output(), fs.code).loss;
    fs.dis2_trace = nn::forward(model.dis2, fs.code);
    fs.losses.dis2 = nn::mse(fs.dis2_trace.output(), fs.nuisance).loss;
  }
  if (sel.discriminator) {
    fs.disc_trace = nn::forward(model.discriminator, fs.code);
    fs.losses.bias =
        nn::softmax_xent(fs.disc_trace.output(), batch.group).loss;
  }
  fs.losses.primary = cfg.alpha * fs.losses.pred + cfg.beta * fs.losses.recon;
  fs.losses.secondary = fs.losses.dis1 + fs.losses.dis2;
  return fs;
}

}  // namespace detail

/// Forward pass through every module active in the configured mode. With
/// train_flag the speaker code is dropout-perturbed before reconstruction;
/// without it the decoder sees the code unchanged.
inline ForwardState forward_pass(const UaiModel& model, const Batch& batch,
                                 const TrainConfig& cfg, bool train_flag,
                                 std::uint64_t dropout_seed) {
  const auto act = activity_for(cfg.mode);
  return detail::run_forward(
      model, batch, cfg, train_flag, dropout_seed,
      {act.predictor, act.decoder, act.disentangler, act.discriminator});
}

/// Applies the trained encoder: returns the speaker code for each row,
/// dropout disabled.
inline nn::Matrix transform(const UaiModel& model, const nn::Matrix& x) {
  require(x.cols == model.input_dim, "transform: input dim mismatch");
  const nn::Matrix enc_out = nn::forward_eval(model.encoder, x);
  return nn::columns(enc_out, 0, model.code_dim());
}

// ---------------------------------------------------------------------------
// Checkpoint I/O
// ---------------------------------------------------------------------------

inline nlohmann::json model_to_json(const UaiModel& m) {
  return {
      {"format", "fairsv-checkpoint"},
      {"format_version", 1},
      {"tool_version", kVersion},
      {"mode", to_string(m.mode)},
      {"input_dim", m.input_dim},
      {"n_speakers", m.n_speakers},
      {"arch",
       {{"code_dim", m.arch.code_dim},
        {"nuisance_dim", m.arch.nuisance_dim},
        {"encoder_hidden", m.arch.encoder_hidden},
        {"decoder_hidden", m.arch.decoder_hidden},
        {"predictor_hidden", m.arch.predictor_hidden},
        {"disentangler_hidden", m.arch.disentangler_hidden},
        {"discriminator_hidden", m.arch.discriminator_hidden}}},
      {"modules",
       {{"encoder", nn::net_to_json(m.encoder)},
        {"predictor", nn::net_to_json(m.predictor)},
        {"decoder", nn::net_to_json(m.decoder)},
        {"dis1", nn::net_to_json(m.dis1)},
        {"dis2", nn::net_to_json(m.dis2)},
        {"discriminator", nn::net_to_json(m.discriminator)},
        {"probe", nn::net_to_json(m.probe)}}},
  };
}

inline UaiModel model_from_json(const nlohmann::json& j) {
  require(j.value("format", "") == "fairsv-checkpoint",
          "checkpoint: unrecognized format tag");
  require(j.value("format_version", 0) == 1,
          "checkpoint: unsupported format_version");
  UaiModel m;
  m.mode = parse_mode(j.at("mode").get<std::string>());
  m.input_dim = j.at("input_dim").get<std::size_t>();
  m.n_speakers = j.at("n_speakers").get<std::size_t>();
  const auto& aj = j.at("arch");
  m.arch.code_dim = aj.at("code_dim").get<std::size_t>();
  m.arch.nuisance_dim = aj.at("nuisance_dim").get<std::size_t>();
  m.arch.encoder_hidden = aj.at("encoder_hidden").get<std::vector<std::size_t>>();
  m.arch.decoder_hidden = aj.at("decoder_hidden").get<std::vector<std::size_t>>();
  m.arch.predictor_hidden =
      aj.at("predictor_hidden").get<std::vector<std::size_t>>();
  m.arch.disentangler_hidden =
      aj.at("disentangler_hidden").get<std::vector<std::size_t>>();
  m.arch.discriminator_hidden =
      aj.at("discriminator_hidden").get<std::vector<std::size_t>>();
  const auto& mj = j.at("modules");
  m.encoder = nn::net_from_json(mj.at("encoder"));
  m.predictor = nn::net_from_json(mj.at("predictor"));
  m.decoder = nn::net_from_json(mj.at("decoder"));
  m.dis1 = nn::net_from_json(mj.at("dis1"));
  m.dis2 = nn::net_from_json(mj.at("dis2"));
  m.discriminator = nn::net_from_json(mj.at("discriminator"));
  m.probe = nn::net_from_json(mj.at("probe"));
  return m;
}

}  // namespace fairsv::uai
