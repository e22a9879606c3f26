// Run configuration: INI-style sections, unknown keys rejected.
//
//   [encoder]   kind dim vocab_size window seed segment_length
//   [model]     feature_dim ffnn_hidden ffnn_layers dropout max_span_width
//               prune_ratio max_antecedents seed
//   [weights]   preset coref singleton entity_type info_status
//   [train]     steps task_learning_rate encoder_learning_rate weight_decay
//               clip_norm seed eval_every
//   [inference] threshold emit_info_status
//   [metrics]   keep_singletons mention_mode
#pragma once

#include "coref/evaluation.hpp"
#include "coref/inference.hpp"
#include "coref/training.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace coref {

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// baseline, sg, sg_ent, sg_ent_infs.
TaskWeights preset_weights(std::string_view name);

struct RunConfig {
  TrainConfig train;
  /// Unset: 0.5 when the singleton head was trained, otherwise no singletons.
  std::optional<double> threshold;
  bool emit_info_status = false;
  EvaluationOptions metrics;
};

RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::string& path);
/// Full snapshot; parse_run_config(write_run_config(c)) == c.
std::string write_run_config(const RunConfig& cfg);

/// Decode settings for a model trained with `weights`.
DecodeOptions decode_options(const RunConfig& cfg, const TaskWeights& weights);

}  // namespace coref
