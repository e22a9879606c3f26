#include "coref/model.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace coref {

bool ModelConfig::operator==(const ModelConfig& o) const {
  return encoder.kind == o.encoder.kind && encoder.dim == o.encoder.dim && encoder.vocab_size == o.encoder.vocab_size &&
         encoder.window == o.encoder.window && encoder.seed == o.encoder.seed &&
         encoder.segment_length == o.encoder.segment_length && scorer.ffnn_hidden == o.scorer.ffnn_hidden &&
         scorer.ffnn_layers == o.scorer.ffnn_layers && scorer.feature_dim == o.scorer.feature_dim &&
         scorer.dropout == o.scorer.dropout && max_span_width == o.max_span_width && prune_ratio == o.prune_ratio &&
         max_antecedents == o.max_antecedents && seed == o.seed;
}

void validate(const ModelConfig& cfg) {
  validate(cfg.encoder);
  if (cfg.scorer.ffnn_hidden <= 0 || cfg.scorer.ffnn_layers < 0 || cfg.scorer.feature_dim <= 0)
    throw std::invalid_argument("ffnn_hidden and feature_dim must be positive, ffnn_layers >= 0");
  if (cfg.scorer.dropout < 0.0 || cfg.scorer.dropout >= 1.0) throw std::invalid_argument("dropout must be in [0, 1)");
  if (cfg.max_span_width < 1) throw std::invalid_argument("max_span_width must be >= 1");
  if (!(cfg.prune_ratio > 0.0)) throw std::invalid_argument("prune_ratio must be positive");
  if (cfg.max_antecedents < 1) throw std::invalid_argument("max_antecedents must be >= 1");
}

std::vector<std::string> collect_genres(const std::vector<Document>& docs) {
  std::set<std::string> seen;
  for (const auto& d : docs) seen.insert(d.genre);
  std::vector<std::string> out{"<unk>"};
  out.insert(out.end(), seen.begin(), seen.end());
  return out;
}

CorefModel::CorefModel(const ModelConfig& cfg, Vocabulary vocab, std::vector<std::string> genres)
    : cfg_(cfg), genres_(std::move(genres)) {
  validate(cfg_);
  if (genres_.empty() || genres_.front() != "<unk>") genres_.insert(genres_.begin(), "<unk>");
  encoder_ = Encoder(cfg_.encoder, std::move(vocab), store_);
  std::mt19937_64 rng(cfg_.seed);
  const int d = cfg_.encoder.dim;
  span_encoder_ = SpanEncoder(store_, d, cfg_.scorer.feature_dim, rng);
  const int span_dim = span_encoder_.output_dim();
  unary_ = UnaryScorer(store_, span_dim, cfg_.scorer, rng);
  pair_ = PairScorer(store_, span_dim, static_cast<int>(genres_.size()), cfg_.scorer, rng);
  heads_ = AuxiliaryHeads(store_, span_dim, cfg_.scorer, rng);
}

int CorefModel::genre_id(const std::string& genre) const {
  auto it = std::find(genres_.begin(), genres_.end(), genre);
  return it == genres_.end() ? 0 : static_cast<int>(it - genres_.begin());
}

ForwardResult CorefModel::forward(ad::Tape& tape, const Document& doc, const ForwardOptions& opts) {
  ForwardResult out;
  const double drop = opts.rng ? cfg_.scorer.dropout : 0.0;
  ad::Var tokens = ad::dropout(encoder_.encode(tape, store_, doc), drop, opts.rng);

  out.candidates = enumerate_spans(doc, cfg_.max_span_width);
  ad::Var spans = span_encoder_.represent(tape, store_, tokens, out.candidates);
  spans = ad::dropout(spans, drop, opts.rng);
  auto unary = unary_.apply(tape, store_, spans, drop, opts.rng);

  if (opts.structure) {
    out.structure.kept = opts.structure->kept;
  } else {
    std::vector<double> scores(unary.combined.value().data(), unary.combined.value().data() + unary.combined.rows());
    std::vector<Span> bounds;
    for (const auto& c : out.candidates) bounds.push_back(c.span);
    out.structure.kept = prune_spans(scores, bounds, doc.token_count(), cfg_.prune_ratio);
  }
  const auto& kept = out.structure.kept;
  ad::IndexList kept_idx(kept.begin(), kept.end());
  for (int k : kept) out.kept_spans.push_back(out.candidates[k].span);
  ad::Var kept_spans = ad::gather_rows(spans, kept_idx);
  ad::Var kept_scores = ad::gather_rows(unary.combined, kept_idx);
  out.kept_mention_scores.assign(kept_scores.value().data(), kept_scores.value().data() + kept_scores.rows());

  if (opts.structure) {
    out.structure.shortlists = opts.structure->shortlists;
  } else {
    out.structure.shortlists =
        pair_.coarse(store_, kept_spans.value(), kept_scores.value().col(0), cfg_.max_antecedents).shortlists;
  }
  const auto& shortlists = out.structure.shortlists;

  PairContext ctx;
  ctx.genre = genre_id(doc.genre);
  for (const auto& s : out.kept_spans)
    ctx.speakers.push_back(s.start < static_cast<int>(doc.speakers.size()) ? doc.speakers[s.start] : "-");
  ad::IndexList anaphors, antecedents;
  for (std::size_t i = 0; i < shortlists.size(); ++i)
    for (int j : shortlists[i]) {
      anaphors.push_back(static_cast<ad::Index>(i));
      antecedents.push_back(j);
    }

  const auto layout = antecedent_layout(shortlists, out.kept_spans, doc.gold_clusters);
  if (anaphors.empty()) {
    out.coref = tape.constant(Matrix::Zero(1, 1));
  } else {
    ad::Var pair_scores =
        pair_.full(tape, store_, kept_spans, kept_scores, anaphors, antecedents, ctx, drop, opts.rng);
    out.coref = coref_loss(pair_scores, layout, static_cast<Eigen::Index>(kept.size()));
    std::size_t p = 0;
    for (std::size_t i = 0; i < shortlists.size(); ++i) {
      AntecedentScoreRow row{static_cast<int>(i), shortlists[i], {}};
      for (std::size_t c = 0; c < shortlists[i].size(); ++c, ++p)
        row.scores.push_back(pair_scores.value()(static_cast<Eigen::Index>(p), 0));
      out.rows.push_back(std::move(row));
    }
  }
  if (out.rows.empty())
    for (std::size_t i = 0; i < shortlists.size(); ++i) out.rows.push_back(AntecedentScoreRow{static_cast<int>(i), {}, {}});
  out.losses.coref = out.coref.scalar();

  if (opts.auxiliary) {
    out.labels = assign_aux_labels(out.kept_spans, doc);
    if (kept.empty()) {
      out.aux = AuxLossVars{tape.constant(Matrix::Zero(1, 1)), tape.constant(Matrix::Zero(1, 1)),
                            tape.constant(Matrix::Zero(1, 1))};
      out.logits = HeadLogits{Matrix(0, kSingletonClasses), Matrix(0, kNumEntityTypes), Matrix(0, kNumInfoStatuses)};
    } else {
      auto logits = heads_.apply(tape, store_, kept_spans, ad::gather_rows(unary.mention, kept_idx));
      out.aux = aux_loss(logits, out.labels);
      out.logits = HeadLogits{logits.singleton.value(), logits.entity_type.value(), logits.info_status.value()};
    }
    out.losses.singleton = out.aux.singleton.scalar();
    out.losses.entity_type = out.aux.entity_type.scalar();
    out.losses.info_status = out.aux.info_status.scalar();
    out.total = total_loss(out.coref, &out.aux, opts.weights);
  } else {
    out.total = total_loss(out.coref, nullptr, opts.weights);
  }
  return out;
}

}  // namespace coref
