#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace disfl {

// Kinds of whitespace-delimited items in an annotated transcript.
//
//   twelve      Word
//   tw-         PartialWord   (text "tw"; trailing hyphens are markup)
//   uh, <uh>    Hesitation    (lexicon entry, bare or in tag syntax)
//   <noise>     OtherTag      (text "noise")
//   tw<pw>      TaggedPartial (a partial word fused with a tag; text is the
//                              whole surface form "tw<pw>")
enum class TokenKind { Word, PartialWord, Hesitation, OtherTag, TaggedPartial };

const char* to_string(TokenKind kind);

struct Token {
  TokenKind kind = TokenKind::Word;
  std::string text;

  bool operator==(const Token&) const = default;
};

class HesitationLexicon {
 public:
  // uh, um, hmm, er
  HesitationLexicon();
  explicit HesitationLexicon(const std::vector<std::string>& entries);

  // Case-insensitive. The tag name "hesitation" always matches.
  bool contains(std::string_view item) const;

  std::vector<std::string> entries() const;

 private:
  std::set<std::string> lowered_;
};

struct Transcript {
  std::vector<Token> tokens;
  std::string raw;

  std::size_t count(TokenKind kind) const;
};

Transcript parse_transcript(std::string_view raw, const HesitationLexicon& lexicon = {});

std::string render_token(const Token& token);
std::string render_transcript(const Transcript& t);
std::string render_tokens(const std::vector<Token>& tokens);

// Builds a Transcript whose raw field is the rendering of tokens.
Transcript make_transcript(std::vector<Token> tokens);

// Checks the token invariants (non-empty text, no whitespace, no stray tag
// delimiters, hesitation text in the lexicon, words not shadowed by another
// kind). Well-formed transcripts survive render/parse unchanged.
bool is_well_formed(const Token& token, const HesitationLexicon& lexicon = {});
bool is_well_formed(const Transcript& t, const HesitationLexicon& lexicon = {});

struct UtteranceRecord {
  std::string utterance_id;
  std::string speaker_id;
  std::string audio_ref;
  double duration_sec = 0.0;
  Transcript transcript;
  // Unknown fields, kept as serialized JSON values so they survive a rewrite.
  std::map<std::string, std::string> extra;

  bool operator==(const UtteranceRecord& o) const;
};

struct Manifest {
  std::string name;
  std::vector<UtteranceRecord> records;

  std::size_t size() const { return records.size(); }
  double total_duration_sec() const;
  double total_hours() const { return total_duration_sec() / 3600.0; }
  std::set<std::string> speakers() const;
};

// Streaming reader for line-delimited JSON manifests. Blank lines are
// skipped; duplicate utterance ids are rejected as they are seen.
class ManifestReader {
 public:
  explicit ManifestReader(std::istream& in, HesitationLexicon lexicon = {});

  std::optional<UtteranceRecord> next();
  std::size_t line_number() const { return line_no_; }

 private:
  std::istream& in_;
  HesitationLexicon lexicon_;
  std::size_t line_no_ = 0;
  std::unordered_set<std::string> seen_;
};

UtteranceRecord parse_record_line(std::string_view line, const HesitationLexicon& lexicon = {});
std::string format_record_line(const UtteranceRecord& record);

Manifest read_manifest(std::istream& in, std::string name = {},
                       const HesitationLexicon& lexicon = {});
Manifest read_manifest_file(const std::string& path, const HesitationLexicon& lexicon = {});

void write_record(std::ostream& out, const UtteranceRecord& record);
void write_manifest(const Manifest& m, std::ostream& out);
void write_manifest_file(const Manifest& m, const std::string& path);

}  // namespace disfl
