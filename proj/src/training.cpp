#include "coref/training.hpp"

#include "json.hpp"

#include <cmath>
#include <cstring>
#include <numeric>
#include <sstream>

namespace coref {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'C', 'M', 'T', 'L', 'C', 'K', 'P', '1'};

json config_json(const TrainConfig& c) {
  const auto& m = c.model;
  return {
      {"encoder",
       {{"kind", std::string(to_string(m.encoder.kind))},
        {"dim", m.encoder.dim},
        {"vocab_size", m.encoder.vocab_size},
        {"window", m.encoder.window},
        {"seed", m.encoder.seed},
        {"segment_length", m.encoder.segment_length}}},
      {"model",
       {{"feature_dim", m.scorer.feature_dim},
        {"ffnn_hidden", m.scorer.ffnn_hidden},
        {"ffnn_layers", m.scorer.ffnn_layers},
        {"dropout", m.scorer.dropout},
        {"max_span_width", m.max_span_width},
        {"prune_ratio", m.prune_ratio},
        {"max_antecedents", m.max_antecedents},
        {"seed", m.seed}}},
      {"weights",
       {{"coref", c.weights.coref},
        {"singleton", c.weights.singleton},
        {"entity_type", c.weights.entity_type},
        {"info_status", c.weights.info_status}}},
      {"train",
       {{"steps", c.steps},
        {"task_learning_rate", c.task_learning_rate},
        {"encoder_learning_rate", c.encoder_learning_rate},
        {"weight_decay", c.weight_decay},
        {"clip_norm", c.clip_norm},
        {"adam_beta1", c.adam_beta1},
        {"adam_beta2", c.adam_beta2},
        {"adam_epsilon", c.adam_epsilon},
        {"seed", c.seed},
        {"eval_every", c.eval_every},
        {"coreference_only", c.coreference_only}}},
  };
}

TrainConfig config_from_json(const json& j) {
  TrainConfig c;
  auto& m = c.model;
  const auto& e = j.at("encoder");
  m.encoder.kind = parse_encoder_kind(e.at("kind").get<std::string>());
  e.at("dim").get_to(m.encoder.dim);
  e.at("vocab_size").get_to(m.encoder.vocab_size);
  e.at("window").get_to(m.encoder.window);
  e.at("seed").get_to(m.encoder.seed);
  e.at("segment_length").get_to(m.encoder.segment_length);
  const auto& mo = j.at("model");
  mo.at("feature_dim").get_to(m.scorer.feature_dim);
  mo.at("ffnn_hidden").get_to(m.scorer.ffnn_hidden);
  mo.at("ffnn_layers").get_to(m.scorer.ffnn_layers);
  mo.at("dropout").get_to(m.scorer.dropout);
  mo.at("max_span_width").get_to(m.max_span_width);
  mo.at("prune_ratio").get_to(m.prune_ratio);
  mo.at("max_antecedents").get_to(m.max_antecedents);
  mo.at("seed").get_to(m.seed);
  const auto& w = j.at("weights");
  w.at("coref").get_to(c.weights.coref);
  w.at("singleton").get_to(c.weights.singleton);
  w.at("entity_type").get_to(c.weights.entity_type);
  w.at("info_status").get_to(c.weights.info_status);
  const auto& t = j.at("train");
  t.at("steps").get_to(c.steps);
  t.at("task_learning_rate").get_to(c.task_learning_rate);
  t.at("encoder_learning_rate").get_to(c.encoder_learning_rate);
  t.at("weight_decay").get_to(c.weight_decay);
  t.at("clip_norm").get_to(c.clip_norm);
  t.at("adam_beta1").get_to(c.adam_beta1);
  t.at("adam_beta2").get_to(c.adam_beta2);
  t.at("adam_epsilon").get_to(c.adam_epsilon);
  t.at("seed").get_to(c.seed);
  t.at("eval_every").get_to(c.eval_every);
  t.at("coreference_only").get_to(c.coreference_only);
  return c;
}

struct TensorBlob {
  json manifest = json::array();
  std::string data;

  void add(const std::string& name, const Matrix& m, std::string_view group) {
    manifest.push_back({{"name", name},
                        {"shape", {m.rows(), m.cols()}},
                        {"dtype", "float64"},
                        {"group", std::string(group)},
                        {"offset", data.size()}});
    const auto bytes = static_cast<std::size_t>(m.size()) * sizeof(double);
    const auto at = data.size();
    data.resize(at + bytes);
    if (bytes > 0) std::memcpy(data.data() + at, m.data(), bytes);
  }
};

struct ParsedCheckpoint {
  json header;
  std::map<std::string, Matrix> tensors;
};

ParsedCheckpoint parse_checkpoint(std::string_view bytes) {
  if (bytes.size() < sizeof(kMagic) + 8 || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0)
    throw DataError("not a checkpoint file");
  std::uint64_t header_size = 0;
  std::memcpy(&header_size, bytes.data() + sizeof(kMagic), 8);
  const std::size_t body = sizeof(kMagic) + 8;
  if (bytes.size() < body + header_size) throw DataError("truncated checkpoint header");
  ParsedCheckpoint out;
  try {
    out.header = json::parse(bytes.substr(body, header_size));
  } catch (const json::exception& e) {
    throw DataError(std::string("corrupt checkpoint manifest: ") + e.what());
  }
  const std::string_view data = bytes.substr(body + header_size);
  for (const auto& t : out.header.at("tensors")) {
    if (t.at("dtype") != "float64") throw DataError("unsupported tensor dtype " + t.at("dtype").dump());
    const auto rows = t.at("shape")[0].get<Eigen::Index>(), cols = t.at("shape")[1].get<Eigen::Index>();
    const auto offset = t.at("offset").get<std::size_t>();
    const auto size = static_cast<std::size_t>(rows * cols) * sizeof(double);
    if (offset + size > data.size()) throw DataError("truncated checkpoint tensor " + t.at("name").get<std::string>());
    Matrix m(rows, cols);
    if (size > 0) std::memcpy(m.data(), data.data() + offset, size);
    out.tensors.emplace(t.at("name").get<std::string>(), std::move(m));
  }
  return out;
}

std::unique_ptr<CorefModel> model_from(const ParsedCheckpoint& ck, TrainConfig& cfg) {
  cfg = config_from_json(ck.header.at("config"));
  auto model = std::make_unique<CorefModel>(cfg.model,
                                            Vocabulary::from_tokens(ck.header.at("vocabulary").get<std::vector<std::string>>()),
                                            ck.header.at("genres").get<std::vector<std::string>>());
  for (auto& p : model->parameters()) {
    auto it = ck.tensors.find(p.name);
    if (it == ck.tensors.end()) throw IncompatibleCheckpoint("checkpoint lacks parameter " + p.name);
    if (it->second.rows() != p.value.rows() || it->second.cols() != p.value.cols())
      throw IncompatibleCheckpoint("parameter " + p.name + " has shape " + std::to_string(it->second.rows()) + "x" +
                                   std::to_string(it->second.cols()) + " in the checkpoint but the model expects " +
                                   std::to_string(p.value.rows()) + "x" + std::to_string(p.value.cols()));
    p.value = it->second;
  }
  return model;
}

bool finite(double x) { return std::isfinite(x); }

}  // namespace

bool TrainConfig::operator==(const TrainConfig& o) const { return config_json(*this) == config_json(o); }

void validate(const TrainConfig& cfg) {
  validate(cfg.model);
  validate(cfg.weights);
  if (cfg.steps <= 0) throw std::invalid_argument("steps must be positive");
  if (!(cfg.task_learning_rate > 0.0) || !(cfg.encoder_learning_rate > 0.0))
    throw std::invalid_argument("learning rates must be positive");
  if (cfg.weight_decay < 0.0) throw std::invalid_argument("weight_decay must be >= 0");
  if (cfg.eval_every < 0) throw std::invalid_argument("eval_every must be >= 0");
  if (cfg.coreference_only && cfg.weights.any_auxiliary())
    throw std::invalid_argument("coreference_only requires all auxiliary weights to be 0");
}

// ---- Optimizer ------------------------------------------------------------------

GroupedAdam::GroupedAdam(const ParameterStore& store) {
  for (const auto& p : store)
    moments_.push_back({Matrix::Zero(p.value.rows(), p.value.cols()), Matrix::Zero(p.value.rows(), p.value.cols())});
}

void GroupedAdam::step(ParameterStore& store, const TrainConfig& cfg) {
  ++t_;
  const double b1 = cfg.adam_beta1, b2 = cfg.adam_beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  std::size_t i = 0;
  for (auto& p : store) {
    auto& [m, v] = moments_[i++];
    m = b1 * m + (1.0 - b1) * p.grad;
    v = b2 * v + (1.0 - b2) * p.grad.cwiseProduct(p.grad);
    const double lr = p.group == ParamGroup::Encoder ? cfg.encoder_learning_rate : cfg.task_learning_rate;
    const double decay = p.group == ParamGroup::Auxiliary ? 0.0 : cfg.weight_decay;
    Matrix update = (m / c1).array() / ((v / c2).array().sqrt() + cfg.adam_epsilon);
    if (decay > 0.0) update += decay * p.value;
    p.value -= lr * update;
  }
}

double clip_gradients(ParameterStore& store, double max_norm) {
  double sq = 0.0;
  for (const auto& p : store) sq += p.grad.squaredNorm();
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double s = max_norm / norm;
    for (auto& p : store) p.grad *= s;
  }
  return norm;
}

// ---- Logging ------------------------------------------------------------------------

std::string log_line(const StepRecord& r, const TaskWeights& w) {
  json j = {{"step", r.step}, {"doc_key", r.doc_key}, {"loss", r.total}, {"coref", r.losses.coref}};
  if (w.singleton > 0.0) j["singleton"] = r.losses.singleton;
  if (w.entity_type > 0.0) j["entity_type"] = r.losses.entity_type;
  if (w.info_status > 0.0) j["info_status"] = r.losses.info_status;
  j["grad_norm"] = r.grad_norm;
  return j.dump();
}

std::string log_line(const DevRecord& r) {
  json report = json::parse(r.report.to_json());
  return json{{"step", r.step}, {"dev", report}}.dump();
}

// ---- Trainer --------------------------------------------------------------------------

Trainer::Trainer(const TrainConfig& cfg, std::vector<Document> corpus)
    : Trainer(cfg, corpus,
              std::make_unique<CorefModel>(cfg.model, Vocabulary::build(corpus, cfg.model.encoder.vocab_size),
                                           collect_genres(corpus))) {}

Trainer::Trainer(const TrainConfig& cfg, std::vector<Document> corpus, std::unique_ptr<CorefModel> model)
    : cfg_(cfg), corpus_(std::move(corpus)), model_(std::move(model)), rng_(cfg.seed) {
  validate(cfg_);
  if (corpus_.empty()) throw DataError("training corpus is empty");
  for (const auto& d : corpus_) {
    const auto problems = check_invariants(d);
    if (!problems.empty()) throw DataError(d.doc_key + ": " + problems.front());
  }
  optimizer_ = GroupedAdam(model_->parameters());
}

void Trainer::next_epoch() {
  order_.resize(corpus_.size());
  std::iota(order_.begin(), order_.end(), 0);
  std::shuffle(order_.begin(), order_.end(), rng_);
  position_ = 0;
  ++epoch_;
}

StepRecord Trainer::step() {
  if (position_ >= order_.size()) next_epoch();
  const Document& doc = corpus_[static_cast<std::size_t>(order_[position_++])];
  auto& store = model_->parameters();
  store.zero_grad();

  ad::Tape tape;
  ForwardOptions opts;
  opts.weights = cfg_.weights;
  opts.auxiliary = !cfg_.coreference_only;
  opts.rng = &rng_;
  auto fwd = model_->forward(tape, doc, opts);

  StepRecord rec;
  rec.step = step_ + 1;
  rec.doc_key = doc.doc_key;
  rec.total = fwd.total.scalar();
  rec.losses = fwd.losses;
  if (!finite(rec.total))
    throw NumericError("non-finite loss at step " + std::to_string(rec.step) + " on document " + doc.doc_key);
  tape.backward(fwd.total);
  rec.grad_norm = clip_gradients(store, cfg_.clip_norm);
  if (!finite(rec.grad_norm))
    throw NumericError("non-finite gradient at step " + std::to_string(rec.step) + " on document " + doc.doc_key);
  optimizer_.step(store, cfg_);
  ++step_;
  return rec;
}

std::string Trainer::serialize() const {
  TensorBlob blob;
  const auto& store = model_->parameters();
  for (const auto& p : store) blob.add(p.name, p.value, to_string(p.group));
  std::size_t i = 0;
  for (const auto& p : store) {
    const auto& mom = optimizer_.moments()[i++];
    blob.add("adam.m/" + p.name, mom.m, to_string(p.group));
    blob.add("adam.v/" + p.name, mom.v, to_string(p.group));
  }
  std::ostringstream rng_state;
  rng_state << rng_;
  json header = {{"format", 1},
                 {"config", config_json(cfg_)},
                 {"vocabulary", model_->vocabulary().tokens()},
                 {"genres", model_->genres()},
                 {"step", step_},
                 {"epoch", epoch_},
                 {"position", position_},
                 {"order", order_},
                 {"rng", rng_state.str()},
                 {"adam_steps", optimizer_.steps_taken()},
                 {"tensors", blob.manifest}};
  const std::string text = header.dump();
  const std::uint64_t size = text.size();
  std::string out(kMagic, sizeof(kMagic));
  out.append(reinterpret_cast<const char*>(&size), 8);
  out += text;
  out += blob.data;
  return out;
}

void Trainer::save(const std::string& path) const { write_file(path, serialize()); }

Trainer Trainer::deserialize(std::string_view bytes, std::vector<Document> corpus, std::optional<int> steps) {
  const auto ck = parse_checkpoint(bytes);
  TrainConfig cfg;
  auto model = model_from(ck, cfg);
  if (steps) cfg.steps = *steps;
  Trainer t(cfg, std::move(corpus), std::move(model));
  const auto& h = ck.header;
  h.at("step").get_to(t.step_);
  h.at("epoch").get_to(t.epoch_);
  h.at("position").get_to(t.position_);
  h.at("order").get_to(t.order_);
  for (int k : t.order_)
    if (k < 0 || k >= static_cast<int>(t.corpus_.size()))
      throw IncompatibleCheckpoint("checkpoint was trained on a larger corpus");
  std::istringstream rng_state(h.at("rng").get<std::string>());
  rng_state >> t.rng_;
  t.optimizer_.set_steps_taken(h.at("adam_steps").get<long>());
  std::size_t i = 0;
  for (const auto& p : t.model_->parameters()) {
    auto& mom = t.optimizer_.moments()[i++];
    mom.m = ck.tensors.at("adam.m/" + p.name);
    mom.v = ck.tensors.at("adam.v/" + p.name);
  }
  return t;
}

Trainer Trainer::resume(const std::string& path, std::vector<Document> corpus, std::optional<int> steps) {
  return deserialize(read_file(path), std::move(corpus), steps);
}

std::unique_ptr<CorefModel> load_model_bytes(std::string_view bytes, TrainConfig* config) {
  TrainConfig cfg;
  auto model = model_from(parse_checkpoint(bytes), cfg);
  if (config) *config = cfg;
  return model;
}

std::unique_ptr<CorefModel> load_model(const std::string& path, TrainConfig* config) {
  return load_model_bytes(read_file(path), config);
}

std::vector<Document> predict_documents(CorefModel& model, const std::vector<Document>& docs,
                                        const DecodeOptions& opts) {
  std::vector<Document> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(to_document(predict(model, d, opts), d));
  return out;
}

TrainResult train(Trainer& trainer, const std::vector<Document>& dev, const TrainHooks& hooks) {
  TrainResult result;
  const auto& cfg = trainer.config();
  double best = -1.0;
  DecodeOptions decode;
  if (cfg.weights.singleton <= 0.0) decode.singleton_threshold = 2.0;
  while (trainer.steps_done() < cfg.steps) {
    auto rec = trainer.step();
    if (hooks.on_step) hooks.on_step(rec);
    result.steps.push_back(std::move(rec));
    const long s = trainer.steps_done();
    const bool last = s == cfg.steps;
    if (dev.empty() || !(last || (cfg.eval_every > 0 && s % cfg.eval_every == 0))) continue;
    DevRecord d{s, evaluate(dev, predict_documents(trainer.model(), dev, decode), {})};
    if (hooks.on_dev) hooks.on_dev(d);
    if (d.report.avg_f1 > best) {
      best = d.report.avg_f1;
      result.best_step = s;
      result.best_checkpoint = trainer.serialize();
    }
    result.dev.push_back(std::move(d));
  }
  if (dev.empty()) {
    result.best_step = trainer.steps_done();
    result.best_checkpoint = trainer.serialize();
  }
  return result;
}

// ---- Gradient check --------------------------------------------------------------

GradientCheckResult gradient_check(CorefModel& model, const Document& doc, const TaskWeights& weights, double h) {
  auto& store = model.parameters();
  ForwardOptions opts;
  opts.weights = weights;
  opts.auxiliary = true;

  store.zero_grad();
  ForwardStructure structure;
  {
    ad::Tape tape;
    auto fwd = model.forward(tape, doc, opts);
    tape.backward(fwd.total);
    structure = fwd.structure;
  }
  opts.structure = &structure;
  auto loss_at = [&] {
    ad::Tape tape;
    return model.forward(tape, doc, opts).total.scalar();
  };

  std::map<ParamGroup, double> diff_sq, analytic_sq, numeric_sq;
  GradientCheckResult out;
  for (auto& p : store) {
    const Matrix analytic = p.grad;
    for (Eigen::Index k = 0; k < p.value.size(); ++k) {
      double& x = p.value.data()[k];
      const double saved = x;
      x = saved + h;
      const double up = loss_at();
      x = saved - h;
      const double down = loss_at();
      x = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double a = analytic.data()[k];
      diff_sq[p.group] += (a - numeric) * (a - numeric);
      analytic_sq[p.group] += a * a;
      numeric_sq[p.group] += numeric * numeric;
      ++out.checked;
    }
  }
  for (const auto& [group, d] : diff_sq) {
    const double denom = std::sqrt(analytic_sq[group]) + std::sqrt(numeric_sq[group]);
    const double err = denom > 0.0 ? std::sqrt(d) / denom : 0.0;
    out.group_error[group] = err;
    out.analytic_norm[group] = std::sqrt(analytic_sq[group]);
    out.max_relative_error = std::max(out.max_relative_error, err);
  }
  return out;
}

}  // namespace coref
