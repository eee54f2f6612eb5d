#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "disfl/corpus.hpp"

namespace disfl {

// How partial words are written into training transcripts, given "p- play":
//   Delete          play
//   ReplaceWithTag  <pw> play
//   AppendTag       p<pw> play
//   FirstLetterTag  p<pw> play   (only the first letter of the partial is kept)
enum class StrategyKind { Delete, ReplaceWithTag, AppendTag, FirstLetterTag };

const char* to_string(StrategyKind kind);
// Accepts delete, replace-tag, append-tag, first-letter-tag; "absent" is an
// alias for delete (a model that never saw partial words emits no tags).
StrategyKind parse_strategy(std::string_view name);

struct PartialWordStrategy {
  StrategyKind kind = StrategyKind::ReplaceWithTag;
  // Must be a single tag of the form "<name>".
  std::string tag_text = "<pw>";

  // Throws InvalidArgument when tag_text is not a well-formed tag.
  void validate() const;
};

struct NormalizeOptions {
  HesitationLexicon lexicon;
  // Keep hesitations as plain words instead of dropping them.
  bool keep_hesitations = false;
};

// Plain words only: no partial words, no tags, no tag_text.
struct NormalizedTranscript {
  std::vector<std::string> words;

  std::string str() const;
  bool operator==(const NormalizedTranscript&) const = default;
};

Transcript transform(const Transcript& t, const PartialWordStrategy& s);

// Strips partial-word content from a decoded hypothesis or rendered reference.
// For ReplaceWithTag the tag is cut out of whatever token carries it. For
// AppendTag and FirstLetterTag the tag takes every non-space character to its
// left with it. Tags, trailing-hyphen items and (unless kept) hesitations are
// removed for every strategy.
NormalizedTranscript postprocess(std::string_view text, const PartialWordStrategy& s,
                                 const NormalizeOptions& opts = {});

NormalizedTranscript normalize_reference(const Transcript& t, const NormalizeOptions& opts = {});

}  // namespace disfl
