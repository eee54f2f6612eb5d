#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "disfl/corpus.hpp"

namespace disfl {

enum class FilterVariant {
  // A partial word with a later completion, plus at least one of the
  // auxiliary conditions.
  PaperComposite,
  // At least one partial word.
  SimpleSinglePartial,
};

enum class Condition {
  HasPartialWithCompletion,
  ShortTranscript,
  AnotherPartial,
  HasHesitation,
  HasRepetition,
};

inline constexpr std::array<Condition, 5> kAllConditions = {
    Condition::HasPartialWithCompletion, Condition::ShortTranscript, Condition::AnotherPartial,
    Condition::HasHesitation, Condition::HasRepetition};

const char* to_string(Condition c);
const char* to_string(FilterVariant v);

struct FilterRule {
  FilterVariant variant = FilterVariant::PaperComposite;
  std::size_t max_words = 4;
  // Whether partial words count toward max_words alongside ordinary words.
  bool count_partials_as_words = true;
};

// Bit set over Condition.
class ConditionSet {
 public:
  void insert(Condition c) { bits_ |= bit(c); }
  bool contains(Condition c) const { return (bits_ & bit(c)) != 0; }
  bool empty() const { return bits_ == 0; }
  std::size_t size() const;
  std::vector<Condition> to_vector() const;
  bool operator==(const ConditionSet&) const = default;

 private:
  static unsigned bit(Condition c) { return 1u << static_cast<unsigned>(c); }
  unsigned bits_ = 0;
};

struct Evidence {
  Condition condition;
  std::vector<std::size_t> token_indices;
  bool operator==(const Evidence&) const = default;
};

struct FilterVerdict {
  bool accepted = false;
  ConditionSet matched;
  std::vector<Evidence> evidence;
};

struct CompletionMatch {
  std::size_t partial_index;
  std::size_t completion_index;
  bool operator==(const CompletionMatch&) const = default;
};

// First (i, j), ordered by i then j, where token i is a PartialWord and
// token j > i is a Word starting with the partial's text (ignoring case).
std::optional<CompletionMatch> has_partial_with_completion(const Transcript& t);

struct Repetition {
  std::size_t ngram = 0;               // 1, 2 or 3
  std::vector<std::size_t> first;      // token indices of the first occurrence
  std::vector<std::size_t> second;     // token indices of the repeat
};

// Immediate repetition of a word n-gram (n <= 3). Only Word tokens take part;
// anything else between them is skipped. The earliest start wins, then the
// shortest n-gram.
std::optional<Repetition> detect_repetition(const Transcript& t);

// Number of tokens that count toward FilterRule::max_words.
std::size_t word_count(const Transcript& t, const FilterRule& rule);

FilterVerdict apply_filter(const Transcript& t, const FilterRule& rule = {});

struct FilterSummary {
  std::size_t total = 0;
  std::size_t accepted = 0;
  std::array<std::size_t, 5> condition_counts{};  // indexed by Condition

  double acceptance_rate() const { return total ? static_cast<double>(accepted) / total : 0.0; }
  std::size_t count(Condition c) const { return condition_counts[static_cast<std::size_t>(c)]; }
  void add(const FilterVerdict& v);
  std::string to_json() const;
};

struct FilterOutcome {
  Manifest accepted;
  Manifest rejected;
  FilterSummary summary;
};

FilterOutcome filter_manifest(const Manifest& m, const FilterRule& rule = {});

}  // namespace disfl
