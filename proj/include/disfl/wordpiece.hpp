#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "disfl/corpus.hpp"

namespace disfl {

// U+2581, prefixed to the first piece of every word when a vocabulary uses
// word-boundary marking.
inline constexpr std::string_view kWordBoundary = "\xE2\x96\x81";

struct WordpieceVocab {
  std::map<std::string, double> entries;  // piece -> natural-log probability
  std::set<std::string> specials;         // atomic symbols, also present in entries
  std::string boundary_marker;            // empty or kWordBoundary

  std::size_t size() const { return entries.size(); }
  bool contains(const std::string& piece) const { return entries.count(piece) > 0; }
  void add_special(const std::string& symbol, double log_prob);
};

struct Segmentation {
  std::vector<std::string> pieces;
  double score = 0.0;
  // Index into pieces where each input word begins.
  std::vector<std::size_t> word_starts;

  // Rebuilds the input words (boundary markers dropped).
  std::vector<std::string> words(std::string_view boundary_marker) const;
};

// Maximum-probability segmentation under the unigram model. Words equal to a
// special become one piece; specials embedded in a word (such as "p<pw>") are
// cut out and kept whole. Pieces that contain a special as a proper substring
// are never used. Ties go to fewer pieces, then to the lexicographically
// smallest piece sequence.
//
// Throws Error(UncoverableCharacter) when some character has no piece.
Segmentation segment(std::span<const std::string> words, const WordpieceVocab& vocab);
Segmentation segment(std::string_view text, const WordpieceVocab& vocab);

// Precomputed lookup for segmenting many utterances against one vocabulary.
// Holds a reference: the vocabulary must outlive the segmenter.
class Segmenter {
 public:
  explicit Segmenter(const WordpieceVocab& vocab);

  Segmentation operator()(std::span<const std::string> words) const;

 private:
  void segment_chunk(std::string_view chunk, std::string_view word, std::size_t word_offset,
                     Segmentation& out) const;

  const WordpieceVocab& vocab_;
  std::unordered_map<std::string, double> usable_;
  std::vector<std::string> specials_by_length_;
  std::size_t max_piece_chars_ = 0;
};

// The word sequence a training transcript contributes to the wordpiece model:
// words, partials (with their hyphen), tagged partials, and tags that are
// vocabulary specials. Hesitations and other tags are dropped.
std::vector<std::string> training_words(const Transcript& t, const std::set<std::string>& specials);

// Frequency-based vocabulary: every character seen, the boundary marker, the
// specials, then the most frequent multi-character substrings until
// target_size entries. Log-probabilities are relative frequencies.
WordpieceVocab build_char_fallback_vocab(const Manifest& corpus, std::size_t target_size,
                                         const std::set<std::string>& specials = {"<pw>"},
                                         std::string boundary_marker = std::string(kWordBoundary),
                                         std::size_t max_piece_chars = 8);

// "piece<TAB>log_prob[<TAB>special]" lines, sorted by piece.
void write_vocab(const WordpieceVocab& v, std::ostream& out);
WordpieceVocab read_vocab(std::istream& in);

}  // namespace disfl
