#include "coref/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace coref {

UnaryScorer::UnaryScorer(ParameterStore& store, int span_dim, const ScorerConfig& cfg, std::mt19937_64& rng) {
  markable_ = Ffnn(store, "unary.markable", span_dim, cfg.ffnn_hidden, cfg.ffnn_layers, 1, ParamGroup::Coreference, rng);
  mention_ = Ffnn(store, "unary.mention", span_dim, cfg.ffnn_hidden, cfg.ffnn_layers, 1, ParamGroup::Coreference, rng);
  beta1_ = store.add("unary.beta1", Matrix::Constant(1, 1, 0.5), ParamGroup::Coreference);
  beta2_ = store.add("unary.beta2", Matrix::Constant(1, 1, 0.5), ParamGroup::Coreference);
}

UnaryScorer::Output UnaryScorer::apply(ad::Tape& tape, ParameterStore& store, ad::Var spans, double dropout,
                                       std::mt19937_64* rng) const {
  Output out;
  out.markable = markable_.apply(tape, store, spans, dropout, rng);
  out.mention = mention_.apply(tape, store, spans, dropout, rng);
  out.combined = ad::add(ad::scale(out.markable, tape.parameter(store.at(beta1_))),
                         ad::scale(out.mention, tape.parameter(store.at(beta2_))));
  return out;
}

namespace {

Matrix stack_rows(const std::vector<SpanRepresentation>& reps) {
  const Eigen::Index dim = reps.empty() ? 0 : reps.front().g.size();
  Matrix g(static_cast<Eigen::Index>(reps.size()), dim);
  for (std::size_t i = 0; i < reps.size(); ++i) g.row(static_cast<Eigen::Index>(i)) = reps[i].g.transpose();
  return g;
}

}  // namespace

std::vector<UnaryScore> unary_scores(const std::vector<SpanRepresentation>& reps, const UnaryScorer& scorer,
                                     ParameterStore& store) {
  if (reps.empty()) return {};
  ad::Tape tape;
  auto out = scorer.apply(tape, store, tape.constant(stack_rows(reps)));
  const double b1 = store.at(scorer.beta1_index()).value(0, 0);
  const double b2 = store.at(scorer.beta2_index()).value(0, 0);
  std::vector<UnaryScore> scores;
  for (std::size_t i = 0; i < reps.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    scores.push_back(UnaryScore{out.markable.value()(r, 0), out.mention.value()(r, 0), out.combined.value()(r, 0), b1, b2});
  }
  return scores;
}

std::vector<int> prune_spans(const std::vector<double>& scores, const std::vector<Span>& spans, int token_count,
                             double ratio) {
  if (!(ratio > 0.0)) throw std::invalid_argument("prune ratio must be positive");
  if (scores.size() != spans.size()) throw std::invalid_argument("prune_spans: one score per span");
  const auto budget = static_cast<std::size_t>(std::ceil(ratio * token_count - 1e-9));
  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return scores[a] > scores[b]; });
  order.resize(std::min(order.size(), budget));

  std::vector<int> kept;
  for (int i : order) {
    const bool crossing =
        std::any_of(kept.begin(), kept.end(), [&](int k) { return spans[i].crosses(spans[k]); });
    if (!crossing) kept.push_back(i);
  }
  std::sort(kept.begin(), kept.end(), [&](int a, int b) { return spans[a] < spans[b] || (spans[a] == spans[b] && a < b); });
  return kept;
}

std::vector<int> prune_spans(const std::vector<UnaryScore>& scores, const std::vector<Span>& spans, int token_count,
                             double ratio) {
  std::vector<double> combined;
  combined.reserve(scores.size());
  for (const auto& s : scores) combined.push_back(s.combined);
  return prune_spans(combined, spans, token_count, ratio);
}

bool same_speaker(const std::string& a, const std::string& b) {
  if (a.empty() || b.empty() || a == "-" || b == "-") return false;
  return a == b;
}

int distance_bucket(int anaphor, int antecedent) { return width_bucket(anaphor - antecedent); }

PairScorer::PairScorer(ParameterStore& store, int span_dim, int num_genres, const ScorerConfig& cfg,
                       std::mt19937_64& rng)
    : num_genres_(std::max(num_genres, 1)) {
  const int f = cfg.feature_dim;
  bilinear_ = store.add("coarse.bilinear", glorot(span_dim, span_dim, rng), ParamGroup::Coreference);
  distance_ = store.add("pair.distance_embedding", glorot(kNumWidthBuckets, f, rng), ParamGroup::Coreference);
  speaker_ = store.add("pair.speaker_embedding", glorot(2, f, rng), ParamGroup::Coreference);
  genre_ = store.add("pair.genre_embedding", glorot(num_genres_, f, rng), ParamGroup::Coreference);
  ffnn_ = Ffnn(store, "pair.ffnn", 3 * span_dim + 3 * f, cfg.ffnn_hidden, cfg.ffnn_layers, 1, ParamGroup::Coreference,
               rng);
}

CoarseResult PairScorer::coarse(const ParameterStore& store, const Matrix& spans, const Vector& mention_scores,
                                int k) const {
  const Eigen::Index n = spans.rows();
  CoarseResult out;
  out.scores = spans * store.at(bilinear_).value * spans.transpose();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j >= i)
        out.scores(i, j) = -std::numeric_limits<double>::infinity();
      else
        out.scores(i, j) += mention_scores(i) + mention_scores(j);
    }
  out.shortlists.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<int> cands(static_cast<std::size_t>(i));
    std::iota(cands.begin(), cands.end(), 0);
    // Best first; ties go to the nearer antecedent.
    std::sort(cands.begin(), cands.end(), [&](int a, int b) {
      if (out.scores(i, a) != out.scores(i, b)) return out.scores(i, a) > out.scores(i, b);
      return a > b;
    });
    if (static_cast<int>(cands.size()) > k) cands.resize(static_cast<std::size_t>(std::max(k, 0)));
    std::sort(cands.begin(), cands.end());
    out.shortlists[static_cast<std::size_t>(i)] = std::move(cands);
  }
  return out;
}

ad::Var PairScorer::pairwise(ad::Tape& tape, ParameterStore& store, ad::Var spans, const ad::IndexList& anaphors,
                             const ad::IndexList& antecedents, const PairContext& ctx, double dropout,
                             std::mt19937_64* rng) const {
  ad::IndexList dist, speaker, genre(anaphors.size(), std::clamp(ctx.genre, 0, num_genres_ - 1));
  for (std::size_t p = 0; p < anaphors.size(); ++p) {
    dist.push_back(distance_bucket(static_cast<int>(anaphors[p]), static_cast<int>(antecedents[p])));
    speaker.push_back(same_speaker(ctx.speakers[anaphors[p]], ctx.speakers[antecedents[p]]) ? 1 : 0);
  }
  ad::Var gi = ad::gather_rows(spans, anaphors);
  ad::Var gj = ad::gather_rows(spans, antecedents);
  ad::Var projected = ad::gather_rows(ad::matmul(spans, tape.parameter(store.at(bilinear_))), anaphors);
  ad::Var bilinear = ad::row_sum(ad::mul(projected, gj));
  ad::Var phi = ad::hcat({ad::gather_rows(tape.parameter(store.at(distance_)), std::move(dist)),
                          ad::gather_rows(tape.parameter(store.at(speaker_)), std::move(speaker)),
                          ad::gather_rows(tape.parameter(store.at(genre_)), std::move(genre))});
  ad::Var input = ad::hcat({gi, gj, ad::mul(gi, gj), phi});
  return ad::add(bilinear, ffnn_.apply(tape, store, input, dropout, rng));
}

ad::Var PairScorer::full(ad::Tape& tape, ParameterStore& store, ad::Var spans, ad::Var mention_scores,
                         const ad::IndexList& anaphors, const ad::IndexList& antecedents, const PairContext& ctx,
                         double dropout, std::mt19937_64* rng) const {
  ad::Var unary = ad::add(ad::gather_rows(mention_scores, anaphors), ad::gather_rows(mention_scores, antecedents));
  return ad::add(unary, pairwise(tape, store, spans, anaphors, antecedents, ctx, dropout, rng));
}

CoarseResult coarse_scores(const std::vector<SpanRepresentation>& reps, const std::vector<UnaryScore>& unary,
                           const PairScorer& scorer, const ParameterStore& store, int k) {
  Vector sm(static_cast<Eigen::Index>(unary.size()));
  for (std::size_t i = 0; i < unary.size(); ++i) sm(static_cast<Eigen::Index>(i)) = unary[i].combined;
  return scorer.coarse(store, stack_rows(reps), sm, k);
}

AntecedentScoreRow full_scores(int i, const std::vector<int>& shortlist, const std::vector<SpanRepresentation>& reps,
                               const std::vector<UnaryScore>& unary, const PairContext& ctx, const PairScorer& scorer,
                               ParameterStore& store) {
  AntecedentScoreRow row;
  row.span = i;
  row.candidates = shortlist;
  if (shortlist.empty()) return row;
  ad::Tape tape;
  Matrix sm(static_cast<Eigen::Index>(unary.size()), 1);
  for (std::size_t s = 0; s < unary.size(); ++s) sm(static_cast<Eigen::Index>(s), 0) = unary[s].combined;
  ad::IndexList anaphors(shortlist.size(), i), antecedents(shortlist.begin(), shortlist.end());
  ad::Var scores =
      scorer.full(tape, store, tape.constant(stack_rows(reps)), tape.constant(sm), anaphors, antecedents, ctx);
  for (Eigen::Index p = 0; p < scores.rows(); ++p) row.scores.push_back(scores.value()(p, 0));
  return row;
}

}  // namespace coref
