// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (0 when all pass). Criterion names given as
// arguments restrict the run to those criteria.

#include "support.hpp"

#include "coref/config.hpp"
#include "coref/error_analysis.hpp"
#include "coref/evaluation.hpp"
#include "coref/inference.hpp"
#include "coref/synthetic.hpp"
#include "coref/training.hpp"

#include "json.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>

using namespace coref;
using namespace testing_support;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail << "first failure: " << what << "; ";
    pass = pass && ok;
  }
};

// Tolerances and limits.
constexpr double kOracleTolerance = 1e-9;
constexpr int kOracleCases = 1000;
constexpr double kOracleSeconds = 10.0;
constexpr double kReferenceTolerance = 5e-5;  // agreement to 4 decimal places
constexpr int kParameterDraws = 100;
constexpr double kGradientTolerance = 1e-4;
constexpr double kGradientSeconds = 60.0;
constexpr int kRecoverySteps = 100;
constexpr int kOverfitSteps = 2000;
constexpr double kOverfitAvgF1 = 0.90;
constexpr double kOverfitMentionF1 = 0.95;
constexpr double kOverfitSeconds = 15.0 * 60.0;

// ---- 1. metric oracle ---------------------------------------------------------

void metric_oracle(Outcome& out) {
  const std::vector<Cluster> key = {{{0, 0}, {1, 1}, {2, 2}}};
  const std::vector<Cluster> resp = {{{0, 0}, {1, 1}}, {{2, 2}}};
  out.require(std::abs(score_muc(key, resp).f1 - 2.0 / 3.0) < kOracleTolerance, "worked example MUC 2/3");
  out.require(std::abs(score_b_cubed(key, resp).f1 - 5.0 / 7.0) < kOracleTolerance, "worked example B3 5/7");
  const auto ceaf = score_ceaf_phi4(key, resp);
  out.require(std::abs(ceaf.recall - 0.8) < kOracleTolerance && std::abs(ceaf.precision - 0.4) < kOracleTolerance &&
                  std::abs(ceaf.f1 - 1.6 / 3.0) < kOracleTolerance,
              "worked example CEAF 0.533");

  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> size(1, 8);
  double worst = 0.0;
  const auto t0 = Clock::now();
  for (int trial = 0; trial < kOracleCases; ++trial) {
    std::vector<Span> universe;
    const int n = size(rng);
    // mentions of varying width, some nested
    for (int i = 0; i < n; ++i) universe.push_back({i, i + (i % 3 == 2 ? 1 : 0)});
    const auto k = random_partition(universe, 0.8, rng);
    const auto r = random_partition(universe, 0.8, rng);
    auto diff = [&](const Prf& got, const OraclePrf& want) {
      worst = std::max({worst, std::abs(got.precision - want.p), std::abs(got.recall - want.r),
                        std::abs(got.f1 - want.f)});
    };
    diff(score_muc(k, r), oracle_muc(k, r));
    diff(score_b_cubed(k, r), oracle_b3(k, r));
    diff(score_ceaf_phi4(k, r), oracle_ceaf(k, r));
  }
  const double elapsed = seconds_since(t0);
  out.require(worst <= kOracleTolerance, "random partitions within 1e-9");
  out.require(elapsed < kOracleSeconds, "1000 cases under 10 s");
  out.detail << kOracleCases << " cases, max deviation " << worst << ", " << std::fixed << std::setprecision(2)
             << elapsed << " s";
}

// ---- 2. reference scorer ---------------------------------------------------------

void reference_scorer(Outcome& out) {
  const auto ref = nlohmann::json::parse(read_file(fixture("reference_scores.json")));
  double worst = 0.0;
  int compared = 0;
  for (int p = 1; p <= 5; ++p) {
    const std::string name = "pair" + std::to_string(p);
    const auto key = parse_conll(read_file(fixture(name + "_key.conll")));
    const auto resp = parse_conll(read_file(fixture(name + "_response.conll")));
    for (bool keep : {false, true}) {
      EvaluationOptions opts;
      opts.keep_singletons = keep;
      const auto report = evaluate(key, resp, opts);
      const auto& r = ref[name][keep ? "keep_singletons" : "drop_singletons"];
      for (const auto& [metric, prf] : {std::pair{"muc", report.muc}, {"b3", report.b3}, {"ceaf_phi4", report.ceaf_phi4}}) {
        for (const auto& [field, value] : {std::pair{"recall", prf.recall}, {"precision", prf.precision}, {"f1", prf.f1}}) {
          const double d = std::abs(value - r[metric][field].get<double>());
          worst = std::max(worst, d);
          ++compared;
          if (d >= kReferenceTolerance) out.require(false, name + " " + metric + " " + field);
        }
      }
    }
  }
  out.detail << compared << " values over 5 pairs, max deviation " << worst;
}

// ---- 3. structural invariants ------------------------------------------------------

double logsumexp(const std::vector<double>& xs) {
  const double m = *std::max_element(xs.begin(), xs.end());
  double s = 0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

void structural(Outcome& out) {
  // (a) the dummy antecedent scores exactly zero: the loss on the tape equals an
  // explicit softmax with a literal 0 in the epsilon slot, and decoding picks
  // epsilon exactly when every candidate is <= 0.
  const auto doc = two_sentence_doc();
  auto cfg = tiny_model(6);
  cfg.prune_ratio = 1.0;
  CorefModel model(cfg, Vocabulary::build({doc}, 50), collect_genres({doc}));
  std::mt19937_64 rng(77);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::map<Span, int> chain;
  for (int c = 0; c < static_cast<int>(doc.gold_clusters.size()); ++c)
    for (const auto& s : doc.gold_clusters[c]) chain[s] = c;
  double worst_loss = 0.0;
  for (int draw = 0; draw < kParameterDraws; ++draw) {
    for (auto& p : model.parameters()) p.value = p.value.unaryExpr([&](double) { return normal(rng); });
    ad::Tape tape;
    ForwardOptions opts;
    opts.weights = {1, 0, 0, 0};
    auto fwd = model.forward(tape, doc, opts);
    double expected = 0.0;
    const auto links = decode_antecedents(fwd.rows);
    for (std::size_t i = 0; i < fwd.rows.size(); ++i) {
      const auto& row = fwd.rows[i];
      std::vector<double> all{0.0}, gold;
      double best = 0.0;
      std::optional<int> pick;
      for (std::size_t c = 0; c < row.candidates.size(); ++c) {
        all.push_back(row.scores[c]);
        auto a = chain.find(fwd.kept_spans[i]), b = chain.find(fwd.kept_spans[row.candidates[c]]);
        if (a != chain.end() && b != chain.end() && a->second == b->second) gold.push_back(row.scores[c]);
        if (row.scores[c] > best || (row.scores[c] == best && pick && row.candidates[c] > *pick)) {
          best = row.scores[c];
          pick = row.candidates[c];
        }
      }
      if (gold.empty()) gold.push_back(0.0);
      expected += logsumexp(all) - logsumexp(gold);
      out.require(links[i].antecedent == pick, "decode against an explicit zero epsilon");
    }
    worst_loss = std::max(worst_loss, std::abs(expected - fwd.losses.coref) / std::max(1.0, std::abs(expected)));
  }
  out.require(AntecedentScoreRow::epsilon_score() == 0.0, "epsilon constant");
  out.require(worst_loss < 1e-12, "loss with literal zero epsilon");

  // (b) pruning: subset, position order, no partial crossing, budget, and the
  // greedy rule recomputed independently.
  int pruning_cases = 0;
  for (int trial = 0; trial < 500; ++trial, ++pruning_cases) {
    std::uniform_int_distribution<int> tok(1, 15);
    const int T = tok(rng);
    std::vector<Span> spans;
    for (int i = 0; i < T; ++i)
      for (int j = i; j < std::min(T, i + 4); ++j)
        if (std::uniform_real_distribution<double>(0, 1)(rng) < 0.7) spans.push_back({i, j});
    std::vector<double> scores;
    for (std::size_t i = 0; i < spans.size(); ++i) scores.push_back(normal(rng));
    const double ratio = std::uniform_real_distribution<double>(0.05, 1.5)(rng);
    const auto kept = prune_spans(scores, spans, T, ratio);
    const auto budget = static_cast<std::size_t>(std::ceil(ratio * T - 1e-9));
    out.require(kept.size() <= budget, "prune budget");
    std::set<int> uniq(kept.begin(), kept.end());
    out.require(uniq.size() == kept.size(), "prune distinct");
    for (int k : kept) out.require(k >= 0 && k < static_cast<int>(spans.size()), "prune subset");
    for (std::size_t a = 1; a < kept.size(); ++a) out.require(spans[kept[a - 1]] <= spans[kept[a]], "prune order");
    for (int a : kept)
      for (int b : kept) out.require(!spans[a].crosses(spans[b]), "prune crossing");
    // oracle: best-first walk over the top-budget spans
    std::vector<int> order(spans.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) { return scores[x] > scores[y]; });
    order.resize(std::min(order.size(), budget));
    std::set<int> expected;
    for (int i : order) {
      bool ok = true;
      for (int e : expected) ok = ok && !spans[i].crosses(spans[e]);
      if (ok) expected.insert(i);
    }
    out.require(std::set<int>(kept.begin(), kept.end()) == expected, "prune greedy rule");
  }

  // (c) decoded clusters are the transitive closure of the argmax links.
  int closure_cases = 0;
  for (int trial = 0; trial < 1000; ++trial, ++closure_cases) {
    const int n = std::uniform_int_distribution<int>(1, 10)(rng);
    std::vector<Span> spans;
    for (int i = 0; i < n; ++i) spans.push_back({3 * i, 3 * i + 1});
    std::vector<AntecedentScoreRow> rows;
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i) {
      AntecedentScoreRow row{i, {}, {}};
      double best = 0.0;
      int arg = -1;
      for (int j = 0; j < i; ++j) {
        if (std::uniform_real_distribution<double>(0, 1)(rng) < 0.3) continue;
        row.candidates.push_back(j);
        row.scores.push_back(normal(rng) - 0.5);
        if (row.scores.back() > best) {
          best = row.scores.back();
          arg = j;
        }
      }
      if (arg >= 0) edges.emplace_back(i, arg);
      rows.push_back(row);
    }
    const auto result = build_clusters(spans, decode_antecedents(rows), HeadLogits{}, DecodeOptions{});
    std::set<std::set<Span>> got, want;
    for (const auto& c : result.clusters) got.insert(std::set<Span>(c.begin(), c.end()));
    for (const auto& comp : closure_components(n, edges)) {
      if (comp.size() < 2) continue;
      std::set<Span> s;
      for (int i : comp) s.insert(spans[i]);
      want.insert(s);
    }
    out.require(got == want, "decode equals transitive closure");
    std::set<Span> seen;
    for (const auto& c : result.clusters)
      for (const auto& s : c) out.require(seen.insert(s).second, "clusters disjoint");
  }
  out.detail << kParameterDraws << " parameter draws (max loss deviation " << worst_loss << "), " << pruning_cases
             << " pruning cases, " << closure_cases << " closure cases";
}

// ---- 4. gradient check ---------------------------------------------------------------

void gradient(Outcome& out) {
  const auto doc = two_sentence_doc();
  auto cfg = tiny_model(4);
  CorefModel model(cfg, Vocabulary::build({doc}, 50), collect_genres({doc}));
  const TaskWeights w{0.55, 0.15, 0.15, 0.15};
  const auto t0 = Clock::now();
  const auto r = gradient_check(model, doc, w);
  const double elapsed = seconds_since(t0);
  out.require(r.max_relative_error < kGradientTolerance, "max relative error < 1e-4");
  out.require(elapsed < kGradientSeconds, "under 60 s");
  for (const auto& [group, norm] : r.analytic_norm) out.require(norm > 0.0, "nonzero gradient in every group");
  out.detail << "d=" << cfg.encoder.dim << ", " << r.checked << " entries, max relative error " << r.max_relative_error
             << " (";
  for (const auto& [group, e] : r.group_error) out.detail << to_string(group) << " " << e << " ";
  out.detail << "), " << std::fixed << std::setprecision(2) << elapsed << " s";
}

// ---- 5. baseline recovery ----------------------------------------------------------------

TrainConfig small_train(const TaskWeights& w, int steps, std::uint64_t seed) {
  TrainConfig cfg;
  cfg.model.encoder.dim = 32;
  cfg.model.encoder.vocab_size = 500;
  cfg.model.scorer.feature_dim = 8;
  cfg.model.scorer.ffnn_hidden = 64;
  cfg.model.scorer.ffnn_layers = 1;
  cfg.model.max_span_width = 3;
  cfg.model.prune_ratio = 1.0;
  cfg.model.max_antecedents = 20;
  cfg.model.seed = seed;
  cfg.model.encoder.seed = seed;
  cfg.weights = w;
  cfg.steps = steps;
  cfg.task_learning_rate = 3e-3;
  cfg.encoder_learning_rate = 3e-3;
  cfg.seed = seed;
  return cfg;
}

void baseline_recovery(Outcome& out) {
  SyntheticConfig s;
  s.documents = 10;
  const auto corpus = synthetic_corpus(s);
  auto with_heads = small_train({1, 0, 0, 0}, kRecoverySteps, 4);
  auto without = with_heads;
  without.coreference_only = true;
  Trainer a(with_heads, corpus), b(without, corpus);
  int identical = 0;
  for (int i = 0; i < kRecoverySteps; ++i) {
    const double la = a.step().total, lb = b.step().total;
    if (std::memcmp(&la, &lb, sizeof(double)) == 0) ++identical;
  }
  out.require(identical == kRecoverySteps, "bitwise identical losses");
  // Parameters outside the auxiliary heads must also agree bit for bit.
  bool params_equal = true;
  for (const auto& p : b.model().parameters())
    params_equal = params_equal && a.model().parameters().get(p.name).value == p.value;
  out.require(params_equal, "identical parameters");
  out.detail << identical << "/" << kRecoverySteps << " steps bitwise identical";
}

// ---- 6. overfit --------------------------------------------------------------------------

EvaluationReport in_sample(CorefModel& model, const std::vector<Document>& docs, const TaskWeights& w, MentionMode mode) {
  RunConfig rc;
  const auto preds = predict_documents(model, docs, decode_options(rc, w));
  EvaluationOptions opts;
  opts.mention_mode = mode;
  return evaluate(docs, preds, opts);
}

void overfit(Outcome& out) {
  const auto corpus = synthetic_corpus(SyntheticConfig{});
  const auto w = preset_weights("sg_ent");
  auto cfg = small_train(w, kOverfitSteps, 1);
  const auto t0 = Clock::now();
  Trainer t(cfg, corpus);
  double first = 0.0, last = 0.0;
  for (int i = 0; i < kOverfitSteps; ++i) {
    const auto r = t.step();
    if (i < static_cast<int>(corpus.size())) first += r.losses.coref;
    if (i >= kOverfitSteps - static_cast<int>(corpus.size())) last += r.losses.coref;
  }
  const auto report = in_sample(t.model(), corpus, w, MentionMode::All);
  const double elapsed = seconds_since(t0);
  out.require(report.avg_f1 >= kOverfitAvgF1, "avg F1 >= 0.90");
  out.require(report.markable_detection.f1 >= kOverfitMentionF1, "all-mention F1 >= 0.95");
  out.require(elapsed < kOverfitSeconds, "under 15 min");
  out.detail << std::fixed << std::setprecision(4) << corpus.size() << " docs, d=" << cfg.model.encoder.dim << ", "
             << kOverfitSteps << " steps: avg F1 " << report.avg_f1 << " (MUC " << report.muc.f1 << ", B3 "
             << report.b3.f1 << ", CEAF " << report.ceaf_phi4.f1 << "), all-mention F1 " << report.markable_detection.f1
             << ", coref loss first/last epoch " << first << "/" << last << ", " << std::setprecision(1) << elapsed
             << " s";
}

// ---- 7. multi-task direction --------------------------------------------------------------

void mtl_direction(Outcome& out) {
  constexpr int kSteps = 1200;
  const TaskWeights baseline{1, 0, 0, 0};
  const TaskWeights singleton{1, 0.2, 0, 0};
  out.detail << std::fixed << std::setprecision(4) << "held-out all-mention recall baseline/sg:";
  for (std::uint64_t seed : {11, 12, 13}) {
    SyntheticConfig train_cfg;
    train_cfg.singleton_fraction = 0.4;
    train_cfg.distractor_rate = 0.6;
    train_cfg.seed = seed;
    SyntheticConfig test_cfg = train_cfg;
    test_cfg.seed = seed + 1000;
    test_cfg.key_prefix = "syn/heldout";
    const auto train_docs = synthetic_corpus(train_cfg);
    const auto test_docs = synthetic_corpus(test_cfg);

    double recall[2];
    int k = 0;
    for (const auto& w : {baseline, singleton}) {
      Trainer t(small_train(w, kSteps, seed), train_docs);
      for (int i = 0; i < kSteps; ++i) t.step();
      recall[k++] = in_sample(t.model(), test_docs, w, MentionMode::All).markable_detection.recall;
    }
    out.require(recall[1] > recall[0], "seed " + std::to_string(seed));
    out.detail << " seed " << seed << " " << recall[0] << "/" << recall[1];
  }
}

// ---- 8. round trips -----------------------------------------------------------------------

void round_trips(Outcome& out) {
  int files = 0, docs = 0;
  for (const auto* name : {"pair1_key", "pair1_response", "pair2_key", "pair2_response", "pair3_key", "pair3_response",
                           "pair4_key", "pair4_response", "pair5_key", "pair5_response", "errors_gold", "errors_a",
                           "errors_b"}) {
    const auto parsed = parse_conll(read_file(fixture(std::string(name) + ".conll")));
    const auto again = parse_conll(write_conll(parsed, true));
    out.require(again == parsed, std::string(name) + " CoNLL round trip");
    ++files;
    docs += static_cast<int>(parsed.size());
  }
  // sidecar layer: written, read back and merged, once and twice
  const auto corpus = synthetic_corpus(SyntheticConfig{});
  std::vector<SidecarRow> rows;
  for (const auto& d : corpus) {
    auto r = sidecar_rows(d);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  const auto read_back = parse_sidecar(write_sidecar(rows));
  out.require(read_back == rows, "sidecar text round trip");
  const auto bare = parse_conll(write_conll(corpus, false));
  const auto once = merge_sidecar(bare, read_back);
  const auto twice = merge_sidecar(once, read_back);
  out.require(once == twice, "merge idempotence");
  out.require(once == corpus, "CoNLL plus sidecar restores the corpus");
  out.detail << files << " fixture files (" << docs << " documents), " << rows.size() << " sidecar rows";
}

// ---- 9. error analysis ----------------------------------------------------------------------

void error_analysis(Outcome& out) {
  const auto gold = parse_conll(read_file(fixture("errors_gold.conll")));
  const auto a = parse_conll(read_file(fixture("errors_a.conll")));
  const auto b = parse_conll(read_file(fixture("errors_b.conll")));
  for (const auto* sys : {&a, &b}) {
    const auto self = contrast(gold, *sys, *sys);
    out.require(self.a_only.empty() && self.b_only.empty() && self.a_avoided_by_b.total() == 0 &&
                    self.b_avoided_by_a.total() == 0,
                "contrast(A, A) empty");
  }
  const auto t = contrast(gold, a, b);
  using E = ErrorClass;
  // hand enumeration: A misses "Harrow"<-"Harrow" and links "He" to the garden;
  // B misses "I"<-"I" and links the non-mention "big" to "old"; both link "teachers" to "May".
  std::array<int, kNumErrorClasses> a_by_b{}, b_by_a{};
  a_by_b[static_cast<int>(E::Pronoun3rd)] = 1;
  a_by_b[static_cast<int>(E::ProperNoun)] = 1;
  b_by_a[static_cast<int>(E::Pronoun1st2nd)] = 1;
  b_by_a[static_cast<int>(E::Other)] = 1;
  out.require(t.a_avoided_by_b.counts == a_by_b, "A errors avoided by B");
  out.require(t.b_avoided_by_a.counts == b_by_a, "B errors avoided by A");
  out.require(t.a_avoided_by_b.percentages()[static_cast<int>(E::ProperNoun)] == 50.0, "percentages");
  const auto text = t.to_text("e2e", "MTL");
  for (const auto* row : {"Pronouns", "1st & 2nd", "3rd person", "Definiteness", "Definite nouns", "Indefinite nouns",
                          "Proper nouns", "Others"})
    out.require(text.find(row) != std::string::npos, std::string("table row ") + row);

  const auto& doc = gold[0];
  const auto school = classify_anaphor(doc, {6, 7});
  const auto harrow = classify_anaphor(doc, {2, 2});
  out.require(doc.tokens()[6] == "The" && doc.tokens()[7] == "school" && school == E::DefiniteNoun,
              "\"the school\" is a definite noun");
  out.require(doc.tokens()[2] == "Harrow" && harrow == E::ProperNoun, "\"Harrow\" is a proper noun");
  out.detail << "A avoided by B " << t.a_avoided_by_b.total() << ", B avoided by A " << t.b_avoided_by_a.total()
             << "; the school -> " << to_string(school) << ", Harrow -> " << to_string(harrow);
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"metric_oracle", metric_oracle},
      {"reference_scorer_agreement", reference_scorer},
      {"structural_invariants", structural},
      {"gradient_check", gradient},
      {"baseline_recovery", baseline_recovery},
      {"overfit", overfit},
      {"mtl_directional", mtl_direction},
      {"format_round_trips", round_trips},
      {"error_analysis", error_analysis},
  };
  std::set<std::string> only(argv + 1, argv + argc);
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    if (!only.empty() && !only.contains(name)) continue;
    Outcome o;
    try {
      fn(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail.str() << std::endl;
    failed += o.pass ? 0 : 1;
  }
  return failed;
}
