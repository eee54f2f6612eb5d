#include "disfl/corpus.hpp"

#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "disfl/error.hpp"
#include "disfl/text.hpp"
#include "json.hpp"

namespace disfl {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidUtf8: return "InvalidUtf8";
    case ErrorCode::MalformedTag: return "MalformedTag";
    case ErrorCode::EmptyPartial: return "EmptyPartial";
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::BadDuration: return "BadDuration";
    case ErrorCode::UncoverableCharacter: return "UncoverableCharacter";
    case ErrorCode::TargetTooSmall: return "TargetTooSmall";
    case ErrorCode::EmptyReference: return "EmptyReference";
    case ErrorCode::UnknownUtteranceId: return "UnknownUtteranceId";
    case ErrorCode::ZeroBaseline: return "ZeroBaseline";
    case ErrorCode::IdCollision: return "IdCollision";
    case ErrorCode::MissingBaseline: return "MissingBaseline";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
  }
  return "?";
}

const char* to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::Word: return "Word";
    case TokenKind::PartialWord: return "PartialWord";
    case TokenKind::Hesitation: return "Hesitation";
    case TokenKind::OtherTag: return "OtherTag";
    case TokenKind::TaggedPartial: return "TaggedPartial";
  }
  return "?";
}

HesitationLexicon::HesitationLexicon() : HesitationLexicon({"uh", "um", "hmm", "er"}) {}

HesitationLexicon::HesitationLexicon(const std::vector<std::string>& entries) {
  for (const auto& e : entries)
    if (!e.empty()) lowered_.insert(text::ascii_lower(e));
}

bool HesitationLexicon::contains(std::string_view item) const {
  auto lowered = text::ascii_lower(item);
  return lowered == "hesitation" || lowered_.count(lowered) > 0;
}

std::vector<std::string> HesitationLexicon::entries() const {
  return {lowered_.begin(), lowered_.end()};
}

std::size_t Transcript::count(TokenKind kind) const {
  std::size_t n = 0;
  for (const auto& t : tokens)
    if (t.kind == kind) ++n;
  return n;
}

namespace {

bool has_delimiter(std::string_view s) {
  return s.find_first_of("<>") != std::string_view::npos;
}

bool has_space(std::string_view s) {
  for (char c : s)
    if (text::is_space(c)) return true;
  return false;
}

bool plain(std::string_view s) { return !s.empty() && !has_delimiter(s) && !has_space(s); }

// "<name>" -> name, or nullopt when item is not exactly one tag.
std::optional<std::string_view> tag_name(std::string_view item) {
  if (item.size() < 3 || item.front() != '<' || item.back() != '>') return std::nullopt;
  auto name = item.substr(1, item.size() - 2);
  if (has_delimiter(name)) return std::nullopt;
  return name;
}

// "prefix<name>" with both parts plain.
bool is_tagged_partial(std::string_view item) {
  auto open = item.find('<');
  if (open == 0 || open == std::string_view::npos) return false;
  return plain(item.substr(0, open)) && tag_name(item.substr(open)).has_value();
}

Token classify(std::string_view item, const HesitationLexicon& lexicon) {
  if (has_delimiter(item)) {
    if (item.front() == '<') {
      auto name = tag_name(item);
      if (!name)
        throw Error(ErrorCode::MalformedTag, "malformed tag '" + std::string(item) + "'");
      if (lexicon.contains(*name)) return {TokenKind::Hesitation, std::string(*name)};
      return {TokenKind::OtherTag, std::string(*name)};
    }
    if (!is_tagged_partial(item))
      throw Error(ErrorCode::MalformedTag, "malformed tag '" + std::string(item) + "'");
    return {TokenKind::TaggedPartial, std::string(item)};
  }
  if (item.back() == '-') {
    auto end = item.find_last_not_of('-');
    if (end == std::string_view::npos)
      throw Error(ErrorCode::EmptyPartial, "partial word without prefix: '" + std::string(item) + "'");
    return {TokenKind::PartialWord, std::string(item.substr(0, end + 1))};
  }
  if (lexicon.contains(item)) return {TokenKind::Hesitation, std::string(item)};
  return {TokenKind::Word, std::string(item)};
}

}  // namespace

Transcript parse_transcript(std::string_view raw, const HesitationLexicon& lexicon) {
  if (!text::valid_utf8(raw)) throw Error(ErrorCode::InvalidUtf8, "transcript is not valid UTF-8");
  Transcript t;
  t.raw = std::string(raw);
  for (auto item : text::split_ws(raw)) t.tokens.push_back(classify(item, lexicon));
  return t;
}

std::string render_token(const Token& token) {
  switch (token.kind) {
    case TokenKind::PartialWord: return token.text + "-";
    case TokenKind::Hesitation:
    case TokenKind::OtherTag: return "<" + token.text + ">";
    case TokenKind::Word:
    case TokenKind::TaggedPartial: return token.text;
  }
  return token.text;
}

std::string render_tokens(const std::vector<Token>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += render_token(tokens[i]);
  }
  return out;
}

std::string render_transcript(const Transcript& t) { return render_tokens(t.tokens); }

Transcript make_transcript(std::vector<Token> tokens) {
  Transcript t;
  t.raw = render_tokens(tokens);
  t.tokens = std::move(tokens);
  return t;
}

bool is_well_formed(const Token& token, const HesitationLexicon& lexicon) {
  const auto& s = token.text;
  switch (token.kind) {
    case TokenKind::Word:
      return plain(s) && s.back() != '-' && !lexicon.contains(s);
    case TokenKind::PartialWord:
      return plain(s) && s.back() != '-';
    case TokenKind::Hesitation:
      return plain(s) && lexicon.contains(s);
    case TokenKind::OtherTag:
      return plain(s) && !lexicon.contains(s);
    case TokenKind::TaggedPartial:
      return !has_space(s) && is_tagged_partial(s);
  }
  return false;
}

bool is_well_formed(const Transcript& t, const HesitationLexicon& lexicon) {
  if (!text::valid_utf8(t.raw)) return false;
  for (const auto& tok : t.tokens)
    if (!text::valid_utf8(tok.text) || !is_well_formed(tok, lexicon)) return false;
  return true;
}

bool UtteranceRecord::operator==(const UtteranceRecord& o) const {
  return utterance_id == o.utterance_id && speaker_id == o.speaker_id &&
         audio_ref == o.audio_ref && duration_sec == o.duration_sec &&
         transcript.tokens == o.transcript.tokens && transcript.raw == o.transcript.raw &&
         extra == o.extra;
}

double Manifest::total_duration_sec() const {
  double total = 0.0;
  for (const auto& r : records) total += r.duration_sec;
  return total;
}

std::set<std::string> Manifest::speakers() const {
  std::set<std::string> out;
  for (const auto& r : records) out.insert(r.speaker_id);
  return out;
}

// ---------------------------------------------------------------------------
// Manifest I/O

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr const char* kFields[] = {"utterance_id", "speaker_id", "audio_ref", "duration_sec",
                                   "transcript"};

bool known_field(const std::string& key) {
  for (const char* f : kFields)
    if (key == f) return true;
  return false;
}

const json& require(const json& obj, const char* field) {
  auto it = obj.find(field);
  if (it == obj.end() || it->is_null())
    throw Error(ErrorCode::MissingField, std::string("missing field '") + field + "'");
  return *it;
}

std::string require_string(const json& obj, const char* field) {
  const auto& v = require(obj, field);
  if (!v.is_string())
    throw Error(ErrorCode::MalformedRecord, std::string("field '") + field + "' must be a string");
  return v.get<std::string>();
}

}  // namespace

UtteranceRecord parse_record_line(std::string_view line, const HesitationLexicon& lexicon) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::MalformedRecord, std::string("invalid JSON: ") + e.what());
  }
  if (!obj.is_object()) throw Error(ErrorCode::MalformedRecord, "record is not a JSON object");

  UtteranceRecord r;
  r.utterance_id = require_string(obj, "utterance_id");
  if (r.utterance_id.empty()) throw Error(ErrorCode::MalformedRecord, "empty utterance_id");
  r.speaker_id = require_string(obj, "speaker_id");
  r.audio_ref = require_string(obj, "audio_ref");

  const auto& dur = require(obj, "duration_sec");
  if (!dur.is_number())
    throw Error(ErrorCode::BadDuration, "duration_sec is not a number in '" + r.utterance_id + "'");
  r.duration_sec = dur.get<double>();
  if (!(r.duration_sec >= 0.0) || r.duration_sec == std::numeric_limits<double>::infinity())
    throw Error(ErrorCode::BadDuration, "negative or non-finite duration in '" + r.utterance_id + "'");

  r.transcript = parse_transcript(require_string(obj, "transcript"), lexicon);

  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!known_field(it.key())) r.extra.emplace(it.key(), it.value().dump());
  return r;
}

std::string format_record_line(const UtteranceRecord& record) {
  ordered_json obj;
  obj["utterance_id"] = record.utterance_id;
  obj["speaker_id"] = record.speaker_id;
  obj["audio_ref"] = record.audio_ref;
  obj["duration_sec"] = record.duration_sec;
  obj["transcript"] = record.transcript.raw;
  for (const auto& [key, value] : record.extra) obj[key] = ordered_json::parse(value);
  return obj.dump();
}

ManifestReader::ManifestReader(std::istream& in, HesitationLexicon lexicon)
    : in_(in), lexicon_(std::move(lexicon)) {}

std::optional<UtteranceRecord> ManifestReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    if (text::split_ws(line).empty()) continue;
    UtteranceRecord r;
    try {
      r = parse_record_line(line, lexicon_);
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(line_no_) + ": " + e.what());
    }
    if (!seen_.insert(r.utterance_id).second)
      throw Error(ErrorCode::DuplicateId, "line " + std::to_string(line_no_) +
                                              ": duplicate utterance_id '" + r.utterance_id + "'");
    return r;
  }
  if (in_.bad()) throw Error(ErrorCode::Io, "read failure");
  return std::nullopt;
}

Manifest read_manifest(std::istream& in, std::string name, const HesitationLexicon& lexicon) {
  Manifest m;
  m.name = std::move(name);
  ManifestReader reader(in, lexicon);
  while (auto r = reader.next()) m.records.push_back(std::move(*r));
  return m;
}

Manifest read_manifest_file(const std::string& path, const HesitationLexicon& lexicon) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  auto name = path;
  if (auto slash = name.find_last_of('/'); slash != std::string::npos) name = name.substr(slash + 1);
  if (auto dot = name.find('.'); dot != std::string::npos && dot > 0) name = name.substr(0, dot);
  return read_manifest(in, name, lexicon);
}

void write_record(std::ostream& out, const UtteranceRecord& record) {
  out << format_record_line(record) << '\n';
  if (!out) throw Error(ErrorCode::Io, "write failure");
}

void write_manifest(const Manifest& m, std::ostream& out) {
  for (const auto& r : m.records) write_record(out, r);
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "write failure");
}

void write_manifest_file(const Manifest& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
  write_manifest(m, out);
}

}  // namespace disfl
