#include "coref/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <iomanip>
#include <map>
#include <set>
#include <sstream>

namespace coref {
namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>, std::less<>> kKnownKeys = {
    {"encoder", {"kind", "dim", "vocab_size", "window", "seed", "segment_length"}},
    {"model",
     {"feature_dim", "ffnn_hidden", "ffnn_layers", "dropout", "max_span_width", "prune_ratio", "max_antecedents",
      "seed"}},
    {"weights", {"preset", "coref", "singleton", "entity_type", "info_status"}},
    {"train",
     {"steps", "task_learning_rate", "encoder_learning_rate", "weight_decay", "clip_norm", "seed", "eval_every"}},
    {"inference", {"threshold", "emit_info_status"}},
    {"metrics", {"keep_singletons", "mention_mode"}},
};

template <typename T>
void read(const pt::ptree& tree, const std::string& key, T& out) {
  auto v = tree.get_optional<std::string>(key);
  if (!v) return;
  std::istringstream in(*v);
  T parsed{};
  if constexpr (std::is_same_v<T, bool>) {
    if (*v == "true" || *v == "1") parsed = true;
    else if (*v == "false" || *v == "0") parsed = false;
    else throw ConfigError(key + ": expected true or false, got '" + *v + "'");
  } else {
    in >> parsed;
    if (in.fail() || !(in >> std::ws).eof()) throw ConfigError(key + ": cannot parse '" + *v + "'");
  }
  out = parsed;
}

std::string fmt(double x) {
  std::ostringstream out;
  out << std::setprecision(17) << x;
  return out.str();
}

}  // namespace

TaskWeights preset_weights(std::string_view name) {
  if (name == "baseline") return {1.0, 0.0, 0.0, 0.0};
  if (name == "sg") return {0.5, 0.5, 0.0, 0.0};
  if (name == "sg_ent") return {0.4, 0.2, 0.2, 0.0};
  if (name == "sg_ent_infs") return {0.55, 0.15, 0.15, 0.15};
  throw ConfigError("unknown preset '" + std::string(name) + "' (expected baseline, sg, sg_ent or sg_ent_infs)");
}

RunConfig parse_run_config(std::string_view text) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    auto known = kKnownKeys.find(section);
    if (known == kKnownKeys.end()) {
      if (!body.data().empty()) throw ConfigError("config: key '" + section + "' outside any section");
      throw ConfigError("config: unknown section [" + section + "]");
    }
    for (const auto& [key, value] : body)
      if (!known->second.contains(key)) throw ConfigError("config: unknown key '" + key + "' in [" + section + "]");
  }

  RunConfig cfg;
  auto& t = cfg.train;
  auto& m = t.model;
  const auto empty = pt::ptree();
  auto section = [&](const char* name) -> const pt::ptree& {
    auto it = tree.find(name);
    return it == tree.not_found() ? empty : it->second;
  };

  const auto& enc = section("encoder");
  std::string kind = std::string(to_string(m.encoder.kind));
  read(enc, "kind", kind);
  try {
    m.encoder.kind = parse_encoder_kind(kind);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  read(enc, "dim", m.encoder.dim);
  read(enc, "vocab_size", m.encoder.vocab_size);
  read(enc, "window", m.encoder.window);
  read(enc, "seed", m.encoder.seed);
  read(enc, "segment_length", m.encoder.segment_length);

  const auto& mo = section("model");
  read(mo, "feature_dim", m.scorer.feature_dim);
  read(mo, "ffnn_hidden", m.scorer.ffnn_hidden);
  read(mo, "ffnn_layers", m.scorer.ffnn_layers);
  read(mo, "dropout", m.scorer.dropout);
  read(mo, "max_span_width", m.max_span_width);
  read(mo, "prune_ratio", m.prune_ratio);
  read(mo, "max_antecedents", m.max_antecedents);
  read(mo, "seed", m.seed);

  const auto& w = section("weights");
  if (auto preset = w.get_optional<std::string>("preset")) t.weights = preset_weights(*preset);
  read(w, "coref", t.weights.coref);
  read(w, "singleton", t.weights.singleton);
  read(w, "entity_type", t.weights.entity_type);
  read(w, "info_status", t.weights.info_status);

  const auto& tr = section("train");
  read(tr, "steps", t.steps);
  read(tr, "task_learning_rate", t.task_learning_rate);
  read(tr, "encoder_learning_rate", t.encoder_learning_rate);
  read(tr, "weight_decay", t.weight_decay);
  read(tr, "clip_norm", t.clip_norm);
  read(tr, "seed", t.seed);
  read(tr, "eval_every", t.eval_every);

  const auto& inf = section("inference");
  if (inf.get_optional<std::string>("threshold")) {
    double tau = 0.5;
    read(inf, "threshold", tau);
    cfg.threshold = tau;
  }
  read(inf, "emit_info_status", cfg.emit_info_status);

  const auto& me = section("metrics");
  read(me, "keep_singletons", cfg.metrics.keep_singletons);
  if (auto mode = me.get_optional<std::string>("mention_mode")) {
    try {
      cfg.metrics.mention_mode = parse_mention_mode(*mode);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }

  try {
    validate(t);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) { return parse_run_config(read_file(path)); }

std::string write_run_config(const RunConfig& cfg) {
  const auto& t = cfg.train;
  const auto& m = t.model;
  std::ostringstream out;
  out << "[encoder]\n"
      << "kind = " << to_string(m.encoder.kind) << "\n"
      << "dim = " << m.encoder.dim << "\n"
      << "vocab_size = " << m.encoder.vocab_size << "\n"
      << "window = " << m.encoder.window << "\n"
      << "seed = " << m.encoder.seed << "\n"
      << "segment_length = " << m.encoder.segment_length << "\n\n"
      << "[model]\n"
      << "feature_dim = " << m.scorer.feature_dim << "\n"
      << "ffnn_hidden = " << m.scorer.ffnn_hidden << "\n"
      << "ffnn_layers = " << m.scorer.ffnn_layers << "\n"
      << "dropout = " << fmt(m.scorer.dropout) << "\n"
      << "max_span_width = " << m.max_span_width << "\n"
      << "prune_ratio = " << fmt(m.prune_ratio) << "\n"
      << "max_antecedents = " << m.max_antecedents << "\n"
      << "seed = " << m.seed << "\n\n"
      << "[weights]\n"
      << "coref = " << fmt(t.weights.coref) << "\n"
      << "singleton = " << fmt(t.weights.singleton) << "\n"
      << "entity_type = " << fmt(t.weights.entity_type) << "\n"
      << "info_status = " << fmt(t.weights.info_status) << "\n\n"
      << "[train]\n"
      << "steps = " << t.steps << "\n"
      << "task_learning_rate = " << fmt(t.task_learning_rate) << "\n"
      << "encoder_learning_rate = " << fmt(t.encoder_learning_rate) << "\n"
      << "weight_decay = " << fmt(t.weight_decay) << "\n"
      << "clip_norm = " << fmt(t.clip_norm) << "\n"
      << "seed = " << t.seed << "\n"
      << "eval_every = " << t.eval_every << "\n\n"
      << "[inference]\n";
  if (cfg.threshold) out << "threshold = " << fmt(*cfg.threshold) << "\n";
  out << "emit_info_status = " << (cfg.emit_info_status ? "true" : "false") << "\n\n"
      << "[metrics]\n"
      << "keep_singletons = " << (cfg.metrics.keep_singletons ? "true" : "false") << "\n"
      << "mention_mode = " << to_string(cfg.metrics.mention_mode) << "\n";
  return out.str();
}

DecodeOptions decode_options(const RunConfig& cfg, const TaskWeights& weights) {
  DecodeOptions d;
  d.singleton_threshold = cfg.threshold.value_or(weights.singleton > 0.0 ? 0.5 : 2.0);
  d.emit_info_status = cfg.emit_info_status;
  return d;
}

}  // namespace coref
