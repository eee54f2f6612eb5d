#include "disfl/filter.hpp"

#include "disfl/error.hpp"
#include "disfl/text.hpp"
#include "json.hpp"

namespace disfl {

const char* to_string(Condition c) {
  switch (c) {
    case Condition::HasPartialWithCompletion: return "HasPartialWithCompletion";
    case Condition::ShortTranscript: return "ShortTranscript";
    case Condition::AnotherPartial: return "AnotherPartial";
    case Condition::HasHesitation: return "HasHesitation";
    case Condition::HasRepetition: return "HasRepetition";
  }
  return "?";
}

const char* to_string(FilterVariant v) {
  return v == FilterVariant::PaperComposite ? "paper-composite" : "simple-single-partial";
}

std::size_t ConditionSet::size() const {
  std::size_t n = 0;
  for (auto c : kAllConditions) n += contains(c);
  return n;
}

std::vector<Condition> ConditionSet::to_vector() const {
  std::vector<Condition> out;
  for (auto c : kAllConditions)
    if (contains(c)) out.push_back(c);
  return out;
}

std::optional<CompletionMatch> has_partial_with_completion(const Transcript& t) {
  const auto& toks = t.tokens;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (toks[i].kind != TokenKind::PartialWord) continue;
    for (std::size_t j = i + 1; j < toks.size(); ++j)
      if (toks[j].kind == TokenKind::Word && text::istarts_with(toks[j].text, toks[i].text))
        return CompletionMatch{i, j};
  }
  return std::nullopt;
}

std::optional<Repetition> detect_repetition(const Transcript& t) {
  std::vector<std::size_t> pos;  // token index of each Word
  std::vector<std::string> words;
  for (std::size_t i = 0; i < t.tokens.size(); ++i) {
    if (t.tokens[i].kind != TokenKind::Word) continue;
    pos.push_back(i);
    words.push_back(text::ascii_lower(t.tokens[i].text));
  }
  for (std::size_t k = 0; k < words.size(); ++k) {
    for (std::size_t n = 1; n <= 3 && k + 2 * n <= words.size(); ++n) {
      bool same = true;
      for (std::size_t m = 0; m < n && same; ++m) same = words[k + m] == words[k + n + m];
      if (!same) continue;
      Repetition rep;
      rep.ngram = n;
      for (std::size_t m = 0; m < n; ++m) {
        rep.first.push_back(pos[k + m]);
        rep.second.push_back(pos[k + n + m]);
      }
      return rep;
    }
  }
  return std::nullopt;
}

static bool counts_as_word(TokenKind kind, const FilterRule& rule) {
  if (kind == TokenKind::Word) return true;
  return rule.count_partials_as_words &&
         (kind == TokenKind::PartialWord || kind == TokenKind::TaggedPartial);
}

std::size_t word_count(const Transcript& t, const FilterRule& rule) {
  std::size_t n = 0;
  for (const auto& tok : t.tokens) n += counts_as_word(tok.kind, rule);
  return n;
}

FilterVerdict apply_filter(const Transcript& t, const FilterRule& rule) {
  if (rule.max_words < 1) throw Error(ErrorCode::InvalidArgument, "max_words must be at least 1");
  FilterVerdict v;
  const auto& toks = t.tokens;

  if (auto m = has_partial_with_completion(t)) {
    v.matched.insert(Condition::HasPartialWithCompletion);
    v.evidence.push_back({Condition::HasPartialWithCompletion, {m->partial_index, m->completion_index}});
  }

  std::vector<std::size_t> counted, partials, hesitations;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (counts_as_word(toks[i].kind, rule)) counted.push_back(i);
    if (toks[i].kind == TokenKind::PartialWord) partials.push_back(i);
    if (toks[i].kind == TokenKind::Hesitation) hesitations.push_back(i);
  }
  if (counted.size() <= rule.max_words) {
    v.matched.insert(Condition::ShortTranscript);
    v.evidence.push_back({Condition::ShortTranscript, counted});
  }
  if (partials.size() >= 2) {
    v.matched.insert(Condition::AnotherPartial);
    v.evidence.push_back({Condition::AnotherPartial, partials});
  }
  if (!hesitations.empty()) {
    v.matched.insert(Condition::HasHesitation);
    v.evidence.push_back({Condition::HasHesitation, hesitations});
  }
  if (auto rep = detect_repetition(t)) {
    v.matched.insert(Condition::HasRepetition);
    auto idx = rep->first;
    idx.insert(idx.end(), rep->second.begin(), rep->second.end());
    v.evidence.push_back({Condition::HasRepetition, std::move(idx)});
  }

  if (rule.variant == FilterVariant::PaperComposite) {
    v.accepted = v.matched.contains(Condition::HasPartialWithCompletion) && v.matched.size() >= 2;
  } else {
    v.accepted = !partials.empty();
  }
  return v;
}

void FilterSummary::add(const FilterVerdict& v) {
  ++total;
  accepted += v.accepted;
  for (auto c : v.matched.to_vector()) ++condition_counts[static_cast<std::size_t>(c)];
}

std::string FilterSummary::to_json() const {
  nlohmann::ordered_json j;
  j["total"] = total;
  j["accepted"] = accepted;
  j["rejected"] = total - accepted;
  j["acceptance_rate"] = acceptance_rate();
  auto& conds = j["conditions"];
  conds = nlohmann::ordered_json::object();
  for (auto c : kAllConditions) conds[to_string(c)] = count(c);
  return j.dump(2);
}

FilterOutcome filter_manifest(const Manifest& m, const FilterRule& rule) {
  FilterOutcome out;
  out.accepted.name = m.name + "-accepted";
  out.rejected.name = m.name + "-rejected";
  for (const auto& r : m.records) {
    auto v = apply_filter(r.transcript, rule);
    out.summary.add(v);
    (v.accepted ? out.accepted : out.rejected).records.push_back(r);
  }
  return out;
}

}  // namespace disfl
