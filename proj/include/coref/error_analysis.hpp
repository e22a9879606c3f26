// Mention-level resolution errors grouped into six anaphor classes, and the
// contrast of two systems' errors against the same gold corpus.
#pragma once

#include "coref/corpus.hpp"
#include "coref/inference.hpp"

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace coref {

enum class ErrorClass { Pronoun1st2nd, Pronoun3rd, DefiniteNoun, IndefiniteNoun, ProperNoun, Other };
inline constexpr int kNumErrorClasses = 6;

enum class ErrorKind { MissingLink, WrongLink, SpuriousLink };

std::string_view to_string(ErrorClass c);
std::string_view to_string(ErrorKind k);

struct ErrorRecord {
  std::string doc_key;
  Span anaphor;
  ErrorClass error_class = ErrorClass::Other;
  ErrorKind kind = ErrorKind::MissingLink;

  bool operator==(const ErrorRecord&) const = default;
};

/// Surface rule cascade over the span's tokens:
///   1st/2nd person pronoun -> 3rd person pronoun -> definite (the/this/that/
///   these/those, possessive) -> indefinite (a/an/some, bare plural) ->
///   capitalized head not at sentence start -> other.
ErrorClass classify_anaphor(const Document& doc, const Span& span);

/// The anaphor of a predicted cluster is any member but the first.
///  - wrong-link: a gold mention whose earlier predicted cluster-mates are all
///    outside its gold chain;
///  - spurious-link: the same for a span that is not a gold mention;
///  - missing-link: a non-first member of a gold chain whose predicted cluster
///    holds no earlier member of that chain (and no wrong-link was recorded there).
std::vector<ErrorRecord> extract_errors(const Document& gold, const PredictionResult& pred);

struct ErrorTable {
  std::array<int, kNumErrorClasses> counts{};
  int total() const;
  /// Share of the total per class, in percent (0 for an empty table).
  std::array<double, kNumErrorClasses> percentages() const;
};

struct Contrast {
  std::vector<ErrorRecord> a_only;  // errors of A that B avoids
  std::vector<ErrorRecord> b_only;  // errors of B that A avoids
  ErrorTable a_avoided_by_b;
  ErrorTable b_avoided_by_a;

  std::string to_text(std::string_view name_a = "A", std::string_view name_b = "B") const;
  std::string to_json() const;
};

/// Set difference on (doc_key, anaphor, kind). Predictions are matched to gold
/// documents by doc_key; a missing prediction counts as an empty one.
Contrast contrast(const std::vector<Document>& gold, const std::vector<Document>& pred_a,
                  const std::vector<Document>& pred_b);

}  // namespace coref
