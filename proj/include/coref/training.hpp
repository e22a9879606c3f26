// Single-document optimization loop, checkpoints and the finite-difference
// gradient check.
#pragma once

#include "coref/evaluation.hpp"
#include "coref/inference.hpp"
#include "coref/model.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace coref {

/// Non-finite loss or gradient during training.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Checkpoint that does not fit the requested model.
struct IncompatibleCheckpoint : DataError {
  using DataError::DataError;
};

struct TrainConfig {
  ModelConfig model;
  TaskWeights weights;
  int steps = 14500;
  double task_learning_rate = 3e-4;
  double encoder_learning_rate = 1e-3;
  double weight_decay = 0.01;  // encoder and coreference groups only
  double clip_norm = 1.0;      // global gradient norm; <= 0 disables
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::uint64_t seed = 1;
  int eval_every = 0;  // 0 = evaluate on dev only at the end
  /// Run the forward pass without the auxiliary heads. Only meaningful when
  /// every auxiliary weight is 0.
  bool coreference_only = false;

  bool operator==(const TrainConfig&) const;
};

void validate(const TrainConfig& cfg);

/// Adam moments per parameter; AdamW update for the encoder and coreference
/// groups, plain Adam for the auxiliary group.
class GroupedAdam {
 public:
  struct Moments {
    Matrix m, v;
  };

  GroupedAdam() = default;
  explicit GroupedAdam(const ParameterStore& store);

  void step(ParameterStore& store, const TrainConfig& cfg);

  long steps_taken() const { return t_; }
  std::vector<Moments>& moments() { return moments_; }
  const std::vector<Moments>& moments() const { return moments_; }
  void set_steps_taken(long t) { t_ = t; }

 private:
  std::vector<Moments> moments_;
  long t_ = 0;
};

/// Scales all gradients so their global L2 norm is at most max_norm. Returns the norm before clipping.
double clip_gradients(ParameterStore& store, double max_norm);

struct StepRecord {
  long step = 0;
  std::string doc_key;
  double total = 0.0;
  TaskLosses losses;
  double grad_norm = 0.0;
};

struct DevRecord {
  long step = 0;
  EvaluationReport report;
};

/// One metrics-log line. Loss columns appear only for tasks with weight > 0.
std::string log_line(const StepRecord& r, const TaskWeights& w);
std::string log_line(const DevRecord& r);

class Trainer {
 public:
  Trainer(const TrainConfig& cfg, std::vector<Document> corpus);

  /// One optimization step on the next document of the shuffled epoch.
  StepRecord step();
  long steps_done() const { return step_; }

  CorefModel& model() { return *model_; }
  const CorefModel& model() const { return *model_; }
  const TrainConfig& config() const { return cfg_; }

  /// Full training state: parameters, optimizer moments, RNG, epoch position.
  void save(const std::string& path) const;
  std::string serialize() const;
  /// Restores a state written by save(); the corpus must be the one trained on.
  /// `steps` replaces the stored step budget.
  static Trainer resume(const std::string& path, std::vector<Document> corpus, std::optional<int> steps = {});
  static Trainer deserialize(std::string_view bytes, std::vector<Document> corpus, std::optional<int> steps = {});

 private:
  Trainer(const TrainConfig& cfg, std::vector<Document> corpus, std::unique_ptr<CorefModel> model);
  void next_epoch();

  TrainConfig cfg_;
  std::vector<Document> corpus_;
  std::unique_ptr<CorefModel> model_;
  GroupedAdam optimizer_;
  std::mt19937_64 rng_;
  std::vector<int> order_;
  std::size_t position_ = 0;
  long epoch_ = 0;
  long step_ = 0;
};

struct TrainResult {
  std::vector<StepRecord> steps;
  std::vector<DevRecord> dev;
  /// Parameter values with the best dev average F1 (the final ones without dev data).
  std::string best_checkpoint;
  long best_step = 0;
};

struct TrainHooks {
  std::function<void(const StepRecord&)> on_step;
  std::function<void(const DevRecord&)> on_dev;
};

/// Runs the remaining steps of `trainer` up to its configured step count.
TrainResult train(Trainer& trainer, const std::vector<Document>& dev = {}, const TrainHooks& hooks = {});

/// Predictions of `model` for every document.
std::vector<Document> predict_documents(CorefModel& model, const std::vector<Document>& docs,
                                        const DecodeOptions& opts);

// ---- Model checkpoints --------------------------------------------------------

/// Reads a model from a file written by Trainer::save.
std::unique_ptr<CorefModel> load_model(const std::string& path, TrainConfig* config = nullptr);
std::unique_ptr<CorefModel> load_model_bytes(std::string_view bytes, TrainConfig* config = nullptr);

// ---- Gradient check -------------------------------------------------------------

struct GradientCheckResult {
  double max_relative_error = 0.0;
  /// ||analytic - numeric|| / (||analytic|| + ||numeric||) per parameter group.
  std::map<ParamGroup, double> group_error;
  std::map<ParamGroup, double> analytic_norm;
  Eigen::Index checked = 0;
};

/// Central differences of the total loss for every parameter entry, with the
/// pruning and shortlist decisions of the unperturbed pass held fixed.
GradientCheckResult gradient_check(CorefModel& model, const Document& doc, const TaskWeights& weights,
                                   double step = 1e-5);

}  // namespace coref
