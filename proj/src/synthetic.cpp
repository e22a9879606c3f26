#include "coref/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>

namespace coref {
namespace {

struct Entity {
  std::vector<std::string> words;  // first-mention surface form
  EntityType type;
  std::string subject_pronoun, object_pronoun;
};

struct Noun {
  std::string word;
  EntityType type;
};

const std::vector<Entity> kMale = {{{"John"}, EntityType::Person, "he", "him"},
                                   {{"Peter"}, EntityType::Person, "he", "him"},
                                   {{"Harry"}, EntityType::Person, "he", "him"},
                                   {{"George"}, EntityType::Person, "he", "him"},
                                   {{"the", "farmer"}, EntityType::Person, "he", "him"},
                                   {{"the", "doctor"}, EntityType::Person, "he", "him"}};
const std::vector<Entity> kFemale = {{{"Mary"}, EntityType::Person, "she", "her"},
                                     {{"Anna"}, EntityType::Person, "she", "her"},
                                     {{"Susan"}, EntityType::Person, "she", "her"},
                                     {{"Emma"}, EntityType::Person, "she", "her"},
                                     {{"the", "teacher"}, EntityType::Person, "she", "her"},
                                     {{"the", "manager"}, EntityType::Person, "she", "her"}};
const std::vector<Entity> kThings = {{{"Acme"}, EntityType::Organization, "it", "it"},
                                     {{"Globex"}, EntityType::Organization, "it", "it"},
                                     {{"the", "firm"}, EntityType::Organization, "it", "it"},
                                     {{"the", "cat"}, EntityType::Animal, "it", "it"}};
const std::vector<Noun> kNouns = {{"letter", EntityType::Object}, {"garden", EntityType::Place},
                                  {"dog", EntityType::Animal},    {"meeting", EntityType::Event},
                                  {"week", EntityType::Time},     {"idea", EntityType::Abstract},
                                  {"tree", EntityType::Plant},    {"water", EntityType::Substance},
                                  {"book", EntityType::Object},   {"company", EntityType::Organization}};
const std::vector<std::string> kPlaces = {"Harrow", "Oxford", "Berlin", "Paris"};
const std::vector<std::string> kVerbs = {"saw", "visited", "liked", "called", "helped", "found", "met", "praised"};
const std::vector<std::vector<std::string>> kDistractors = {
    {"in", "the", "end"}, {"by", "the", "way"}, {"at", "the", "moment"}, {"on", "the", "whole"}};

template <typename T>
const T& pick(const std::vector<T>& xs, std::mt19937_64& rng) {
  return xs[std::uniform_int_distribution<std::size_t>(0, xs.size() - 1)(rng)];
}

}  // namespace

std::vector<Document> synthetic_corpus(const SyntheticConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  std::bernoulli_distribution coin(0.5);
  std::bernoulli_distribution use_pronoun(0.6);
  std::bernoulli_distribution distractor(cfg.distractor_rate);
  std::vector<Document> docs;

  for (int d = 0; d < cfg.documents; ++d) {
    // Chains with distinguishable pronouns: one per pronoun family.
    std::vector<Entity> entities;
    std::vector<const std::vector<Entity>*> pools = {&kMale, &kFemale, &kThings};
    std::shuffle(pools.begin(), pools.end(), rng);
    for (int c = 0; c < cfg.chains_per_document; ++c) entities.push_back(pick(*pools[c % pools.size()], rng));

    // -1 marks a singleton slot, otherwise the chain index.
    std::vector<int> slots;
    std::uniform_int_distribution<int> length(cfg.min_chain_length, cfg.max_chain_length);
    for (int c = 0; c < cfg.chains_per_document; ++c) slots.insert(slots.end(), length(rng), c);
    const double frac = std::clamp(cfg.singleton_fraction, 0.0, 0.9);
    const int singles = static_cast<int>(std::lround(static_cast<double>(slots.size()) * frac / (1.0 - frac)));
    slots.insert(slots.end(), singles, -1);
    std::shuffle(slots.begin(), slots.end(), rng);
    if (slots.size() % 2 == 1) slots.push_back(-1);

    Document doc;
    std::ostringstream key;
    key << cfg.key_prefix << std::setw(3) << std::setfill('0') << d << "_0";
    doc.doc_key = key.str();
    doc.genre = "syn";
    doc.gold_clusters.assign(entities.size(), {});
    std::vector<int> seen(entities.size(), 0);
    int token = 0;

    auto add_mention = [&](std::vector<std::string>& sent, std::vector<std::string> words, EntityType type,
                           InfoStatus status, std::optional<int> chain) {
      const Span span{token + static_cast<int>(sent.size()), token + static_cast<int>(sent.size() + words.size()) - 1};
      sent.insert(sent.end(), words.begin(), words.end());
      doc.gold_mentions.push_back({span, type, status, chain});
      if (chain) doc.gold_clusters[*chain].push_back(span);
    };
    auto realize = [&](std::vector<std::string>& sent, int slot, bool subject) {
      if (slot < 0) {
        if (coin(rng) && coin(rng)) {
          add_mention(sent, {pick(kPlaces, rng)}, EntityType::Place, InfoStatus::AccessibleCommonground, std::nullopt);
        } else {
          const auto& n = pick(kNouns, rng);
          const bool definite = coin(rng);
          add_mention(sent, {definite ? "the" : "a", n.word}, n.type,
                      definite ? InfoStatus::AccessibleInferrable : InfoStatus::New, std::nullopt);
        }
        return;
      }
      const Entity& e = entities[slot];
      const bool first = seen[slot]++ == 0;
      std::vector<std::string> words = e.words;
      if (!first && use_pronoun(rng)) words = {subject ? e.subject_pronoun : e.object_pronoun};
      add_mention(sent, words, e.type, first ? InfoStatus::New : InfoStatus::GivenActive, slot);
    };

    for (std::size_t s = 0; s < slots.size(); s += 2) {
      std::vector<std::string> sent;
      realize(sent, slots[s], true);
      sent.push_back(pick(kVerbs, rng));
      realize(sent, slots[s + 1], false);
      if (distractor(rng)) {
        const auto& phrase = pick(kDistractors, rng);
        sent.insert(sent.end(), phrase.begin(), phrase.end());
      }
      sent.push_back(".");
      token += static_cast<int>(sent.size());
      doc.sentences.push_back(std::move(sent));
    }
    // Clusters in order of first mention, the order the readers produce.
    std::vector<int> order(doc.gold_clusters.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return doc.gold_clusters[a].front() < doc.gold_clusters[b].front(); });
    std::vector<int> rank(order.size());
    std::vector<Cluster> sorted;
    for (std::size_t r = 0; r < order.size(); ++r) {
      rank[order[r]] = static_cast<int>(r);
      sorted.push_back(doc.gold_clusters[order[r]]);
    }
    doc.gold_clusters = std::move(sorted);
    for (auto& m : doc.gold_mentions)
      if (m.cluster_id) m.cluster_id = rank[*m.cluster_id];
    doc.speakers.assign(static_cast<std::size_t>(token), "-");
    std::sort(doc.gold_mentions.begin(), doc.gold_mentions.end(),
              [](const Mention& a, const Mention& b) { return a.span < b.span; });
    docs.push_back(std::move(doc));
  }
  return docs;
}

}  // namespace coref
