#include "disfl/transforms.hpp"

#include "disfl/error.hpp"
#include "disfl/text.hpp"

namespace disfl {

const char* to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::Delete: return "delete";
    case StrategyKind::ReplaceWithTag: return "replace-tag";
    case StrategyKind::AppendTag: return "append-tag";
    case StrategyKind::FirstLetterTag: return "first-letter-tag";
  }
  return "?";
}

StrategyKind parse_strategy(std::string_view name) {
  if (name == "delete" || name == "absent") return StrategyKind::Delete;
  if (name == "replace-tag") return StrategyKind::ReplaceWithTag;
  if (name == "append-tag") return StrategyKind::AppendTag;
  if (name == "first-letter-tag") return StrategyKind::FirstLetterTag;
  throw Error(ErrorCode::InvalidArgument, "unknown strategy '" + std::string(name) + "'");
}

void PartialWordStrategy::validate() const {
  const auto& tag = tag_text;
  bool ok = tag.size() >= 3 && tag.front() == '<' && tag.back() == '>' &&
            tag.find_first_of("<>", 1) == tag.size() - 1;
  for (char c : tag) ok = ok && !text::is_space(c);
  if (!ok) throw Error(ErrorCode::InvalidArgument, "tag must look like <name>, got '" + tag + "'");
}

std::string NormalizedTranscript::str() const { return text::join(words); }

Transcript transform(const Transcript& t, const PartialWordStrategy& s) {
  s.validate();
  std::vector<Token> out;
  out.reserve(t.tokens.size());
  const auto tag_name = s.tag_text.substr(1, s.tag_text.size() - 2);
  for (const auto& tok : t.tokens) {
    if (tok.kind != TokenKind::PartialWord) {
      out.push_back(tok);
      continue;
    }
    switch (s.kind) {
      case StrategyKind::Delete:
        break;
      case StrategyKind::ReplaceWithTag:
        out.push_back({TokenKind::OtherTag, tag_name});
        break;
      case StrategyKind::AppendTag:
        out.push_back({TokenKind::TaggedPartial, tok.text + s.tag_text});
        break;
      case StrategyKind::FirstLetterTag:
        // the parser never yields an empty partial
        out.push_back({TokenKind::TaggedPartial, std::string(text::first_codepoint(tok.text)) + s.tag_text});
        break;
    }
  }
  return make_transcript(std::move(out));
}

namespace {

void erase_all(std::string& s, std::string_view needle) {
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle))
    s.erase(pos, needle.size());
}

bool is_tag(std::string_view item) {
  return item.size() >= 3 && item.front() == '<' && item.back() == '>' &&
         item.find_first_of("<>", 1) == item.size() - 1;
}

}  // namespace

NormalizedTranscript postprocess(std::string_view text, const PartialWordStrategy& s,
                                 const NormalizeOptions& opts) {
  NormalizedTranscript out;
  for (auto item : text::split_ws(text)) {
    std::string tok(item);
    if (tok.find(s.tag_text) != std::string::npos) {
      if (s.kind == StrategyKind::AppendTag || s.kind == StrategyKind::FirstLetterTag) {
        tok = tok.substr(tok.rfind(s.tag_text) + s.tag_text.size());
      } else {
        erase_all(tok, s.tag_text);
      }
    }
    if (tok.empty() || tok.back() == '-') continue;
    if (is_tag(tok)) {
      auto name = tok.substr(1, tok.size() - 2);
      if (opts.keep_hesitations && opts.lexicon.contains(name)) out.words.push_back(std::move(name));
      continue;
    }
    if (!opts.keep_hesitations && opts.lexicon.contains(tok)) continue;
    out.words.push_back(std::move(tok));
  }
  return out;
}

NormalizedTranscript normalize_reference(const Transcript& t, const NormalizeOptions& opts) {
  NormalizedTranscript out;
  for (const auto& tok : t.tokens) {
    if (tok.kind == TokenKind::Word ||
        (tok.kind == TokenKind::Hesitation && opts.keep_hesitations))
      out.words.push_back(tok.text);
  }
  return out;
}

}  // namespace disfl
