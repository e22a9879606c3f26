// Synthetic corpora with planted coreference chains, typed singleton mentions
// and non-mention distractor phrases ("the way", "in the end").
#pragma once

#include "coref/corpus.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace coref {

struct SyntheticConfig {
  int documents = 20;
  int chains_per_document = 2;
  int min_chain_length = 2;
  int max_chain_length = 4;
  /// Share of mentions that are singletons.
  double singleton_fraction = 0.4;
  /// Probability that a sentence carries a distractor phrase.
  double distractor_rate = 0.5;
  std::uint64_t seed = 1;
  std::string key_prefix = "syn/doc";
};

std::vector<Document> synthetic_corpus(const SyntheticConfig& cfg);

}  // namespace coref
