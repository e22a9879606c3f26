// coref_mtl: train, predict, score, analyze-errors, synth.
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 numeric failure.

#include "coref/config.hpp"
#include "coref/corpus.hpp"
#include "coref/error_analysis.hpp"
#include "coref/evaluation.hpp"
#include "coref/inference.hpp"
#include "coref/synthetic.hpp"
#include "coref/training.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace coref;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string config;
  std::string preset;
  std::optional<std::uint64_t> seed;
};

RunConfig run_config(const Common& c) {
  RunConfig cfg = c.config.empty() ? RunConfig{} : load_run_config(c.config);
  if (!c.preset.empty()) cfg.train.weights = preset_weights(c.preset);
  if (c.seed) {
    cfg.train.seed = *c.seed;
    cfg.train.model.seed = *c.seed;
    cfg.train.model.encoder.seed = *c.seed;
  }
  return cfg;
}

std::vector<Document> load_all(const std::vector<std::string>& paths, const std::string& sidecar) {
  std::vector<Document> docs;
  for (const auto& p : paths) {
    auto part = load_documents(p, sidecar);
    docs.insert(docs.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return docs;
}

std::string describe_mismatch(const ModelConfig& a, const ModelConfig& b) {
  std::string out;
  auto check = [&](const char* name, auto x, auto y) {
    if (x != y) out += std::string(" ") + name + " (checkpoint " + std::to_string(x) + ", config " + std::to_string(y) + ")";
  };
  check("dim", a.encoder.dim, b.encoder.dim);
  check("vocab_size", a.encoder.vocab_size, b.encoder.vocab_size);
  check("window", a.encoder.window, b.encoder.window);
  check("feature_dim", a.scorer.feature_dim, b.scorer.feature_dim);
  check("ffnn_hidden", a.scorer.ffnn_hidden, b.scorer.ffnn_hidden);
  check("ffnn_layers", a.scorer.ffnn_layers, b.scorer.ffnn_layers);
  check("max_span_width", a.max_span_width, b.max_span_width);
  check("max_antecedents", a.max_antecedents, b.max_antecedents);
  check("prune_ratio", a.prune_ratio, b.prune_ratio);
  if (a.encoder.kind != b.encoder.kind) out += " encoder kind";
  return out;
}

int cmd_train(const Common& common, const std::vector<std::string>& train_files, const std::vector<std::string>& dev_files,
              const std::string& sidecar, const std::string& out_dir, std::optional<int> steps, const std::string& resume) {
  auto cfg = run_config(common);
  if (steps) cfg.train.steps = *steps;
  validate(cfg.train);
  const auto corpus = load_all(train_files, sidecar);
  const auto dev = load_all(dev_files, sidecar);
  fs::create_directories(out_dir);

  Trainer trainer = resume.empty() ? Trainer(cfg.train, corpus) : Trainer::resume(resume, corpus, steps);
  // A resumed run keeps the configuration stored in its checkpoint.
  cfg.train = trainer.config();
  write_file((fs::path(out_dir) / "config.ini").string(), write_run_config(cfg));

  std::ofstream log(fs::path(out_dir) / "metrics.jsonl", resume.empty() ? std::ios::trunc : std::ios::app);
  TrainHooks hooks;
  hooks.on_step = [&](const StepRecord& r) { log << log_line(r, cfg.train.weights) << '\n'; };
  hooks.on_dev = [&](const DevRecord& r) {
    log << log_line(r) << '\n';
    std::cerr << "step " << r.step << " dev avg F1 " << r.report.avg_f1 << '\n';
  };
  auto result = train(trainer, dev, hooks);
  trainer.save((fs::path(out_dir) / "checkpoint.bin").string());
  write_file((fs::path(out_dir) / "best.bin").string(), result.best_checkpoint);
  std::cout << "trained " << trainer.steps_done() << " steps; best checkpoint at step " << result.best_step << '\n';
  return kOk;
}

int cmd_predict(const Common& common, const std::string& checkpoint, const std::string& input, const std::string& sidecar,
                const std::string& output, const std::string& conll_out, std::optional<double> threshold,
                bool no_singletons, bool emit_status) {
  TrainConfig trained;
  auto model = load_model(checkpoint, &trained);
  RunConfig cfg;
  if (!common.config.empty()) {
    cfg = load_run_config(common.config);
    const auto diff = describe_mismatch(trained.model, cfg.train.model);
    if (!diff.empty()) throw IncompatibleCheckpoint("checkpoint " + checkpoint + " does not match the config:" + diff);
  }
  if (threshold) cfg.threshold = threshold;
  if (no_singletons) cfg.threshold = 2.0;
  if (emit_status) cfg.emit_info_status = true;
  const auto decode = decode_options(cfg, trained.weights);

  const auto docs = load_documents(input, sidecar);
  const auto preds = predict_documents(*model, docs, decode);
  write_file(output, write_jsonl(preds));
  if (!conll_out.empty()) write_file(conll_out, write_conll(preds, decode.singleton_threshold <= 1.0));
  std::cout << "predicted " << preds.size() << " documents\n";
  return kOk;
}

int cmd_score(const Common& common, const std::string& key, const std::string& response, bool keep_singletons,
              const std::string& mention_mode, const std::string& json_out) {
  RunConfig cfg = common.config.empty() ? RunConfig{} : load_run_config(common.config);
  EvaluationOptions opts = cfg.metrics;
  if (keep_singletons) opts.keep_singletons = true;
  if (!mention_mode.empty()) opts.mention_mode = parse_mention_mode(mention_mode);
  const auto report = evaluate(load_documents(key), load_documents(response), opts);
  std::cout << report.to_text() << report.to_json() << '\n';
  if (!json_out.empty()) write_file(json_out, report.to_json() + "\n");
  return kOk;
}

int cmd_analyze(const std::string& gold, const std::string& a, const std::string& b, const std::string& name_a,
                const std::string& name_b, const std::string& json_out) {
  const auto c = contrast(load_documents(gold), load_documents(a), load_documents(b));
  std::cout << c.to_text(name_a, name_b) << c.to_json() << '\n';
  if (!json_out.empty()) write_file(json_out, c.to_json() + "\n");
  return kOk;
}

int cmd_synth(const SyntheticConfig& cfg, const std::string& out, const std::string& sidecar_out) {
  const auto docs = synthetic_corpus(cfg);
  const bool jsonl = out.ends_with(".jsonl");
  // With a sidecar the singletons travel there, as in the released corpora.
  write_file(out, jsonl ? write_jsonl(docs) : write_conll(docs, sidecar_out.empty()));
  if (!sidecar_out.empty()) {
    std::vector<SidecarRow> rows;
    for (const auto& d : docs) {
      auto r = sidecar_rows(d);
      rows.insert(rows.end(), r.begin(), r.end());
    }
    write_file(sidecar_out, write_sidecar(rows));
  }
  std::cout << "wrote " << docs.size() << " documents\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Span-ranking coreference with auxiliary mention tasks"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "INI run configuration")->check(CLI::ExistingFile);
    sub->add_option("--preset", common.preset, "task weight preset: baseline, sg, sg_ent, sg_ent_infs");
    sub->add_option("--seed", common.seed, "seed for training, initialization and shuffling");
  };

  auto* train = app.add_subcommand("train", "train a model");
  std::vector<std::string> train_files, dev_files;
  std::string sidecar, out_dir, resume;
  std::optional<int> steps;
  add_common(train);
  train->add_option("--train", train_files, "training corpus (CoNLL or JSONL)")->required();
  train->add_option("--dev", dev_files, "dev corpus for checkpoint selection");
  train->add_option("--sidecar", sidecar, "mention sidecar TSV");
  train->add_option("--out", out_dir, "output directory")->required();
  train->add_option("--steps", steps, "override the configured step count");
  train->add_option("--resume", resume, "continue from a checkpoint.bin");

  auto* predict = app.add_subcommand("predict", "predict clusters, singletons and mention types");
  std::string checkpoint, input, output, conll_out;
  std::optional<double> threshold;
  bool no_singletons = false, emit_status = false;
  add_common(predict);
  predict->add_option("--checkpoint", checkpoint, "checkpoint file")->required();
  predict->add_option("--input", input, "documents (CoNLL or JSONL)")->required();
  predict->add_option("--sidecar", sidecar, "mention sidecar TSV");
  predict->add_option("--output", output, "JSONL predictions")->required();
  predict->add_option("--conll", conll_out, "also write CoNLL");
  predict->add_option("--threshold", threshold, "singleton probability threshold");
  predict->add_flag("--no-singletons", no_singletons, "emit no singleton mentions");
  predict->add_flag("--emit-info-status", emit_status, "attach predicted information status");

  auto* score = app.add_subcommand("score", "score a response against a key");
  std::string key, response, mention_mode, json_out;
  bool keep_singletons = false;
  score->add_option("--config", common.config, "INI run configuration")->check(CLI::ExistingFile);
  score->add_option("key", key, "key file")->required();
  score->add_option("response", response, "response file")->required();
  score->add_flag("--keep-singletons", keep_singletons, "score size-1 clusters");
  score->add_option("--mention-mode", mention_mode, "markable detection: coreferent or all")
      ->check(CLI::IsMember({"coreferent", "all"}));
  score->add_option("--json", json_out, "write the report record to a file");

  auto* analyze = app.add_subcommand("analyze-errors", "contrast the errors of two systems");
  std::string gold, pred_a, pred_b, name_a = "A", name_b = "B";
  analyze->add_option("gold", gold, "gold file")->required();
  analyze->add_option("pred_a", pred_a, "first system")->required();
  analyze->add_option("pred_b", pred_b, "second system")->required();
  analyze->add_option("--name-a", name_a, "label of the first system");
  analyze->add_option("--name-b", name_b, "label of the second system");
  analyze->add_option("--json", json_out, "write the record to a file");

  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  SyntheticConfig syn;
  std::string synth_out, synth_sidecar;
  synth->add_option("--out", synth_out, "output file (.conll or .jsonl)")->required();
  synth->add_option("--sidecar", synth_sidecar, "also write the mention sidecar");
  synth->add_option("--documents", syn.documents, "number of documents");
  synth->add_option("--singleton-fraction", syn.singleton_fraction, "share of singleton mentions");
  synth->add_option("--distractor-rate", syn.distractor_rate, "share of sentences with a distractor phrase");
  synth->add_option("--seed", syn.seed, "generator seed");
  synth->add_option("--key-prefix", syn.key_prefix, "document key prefix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*train) return cmd_train(common, train_files, dev_files, sidecar, out_dir, steps, resume);
    if (*predict)
      return cmd_predict(common, checkpoint, input, sidecar, output, conll_out, threshold, no_singletons, emit_status);
    if (*score) return cmd_score(common, key, response, keep_singletons, mention_mode, json_out);
    if (*analyze) return cmd_analyze(gold, pred_a, pred_b, name_a, name_b, json_out);
    if (*synth) return cmd_synth(syn, synth_out, synth_sidecar);
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const CapabilityError& e) {
    std::cerr << "encoder unavailable: " << e.what() << '\n';
    return kData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}
