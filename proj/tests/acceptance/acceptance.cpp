// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "disfl/dataset.hpp"
#include "disfl/error.hpp"
#include "disfl/filter.hpp"
#include "disfl/metrics.hpp"
#include "disfl/report.hpp"
#include "disfl/transforms.hpp"
#include "disfl/wordpiece.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace disfl;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<PublishedRow> load(const char* name) {
  std::ifstream in(std::string(DISFL_FIXTURE_DIR) + "/" + name);
  if (!in) throw std::runtime_error(std::string("cannot open fixture ") + name);
  return read_published_rows(in);
}

const PublishedRow* find_row(const std::vector<PublishedRow>& rows, int row, const std::string& test) {
  for (const auto& r : rows)
    if (r.row == row && r.test == test) return &r;
  return nullptr;
}

std::string bytes(const Manifest& m) {
  std::ostringstream os;
  write_manifest(m, os);
  return os.str();
}

// ---------------------------------------------------------------------------

Outcome strategy_table_consistency() {
  Outcome o;
  auto rows = load("strategies.tsv");
  o.require(rows.size() == 15, "expected 15 rows");
  auto found = check_table_consistency(rows, 0.6);
  std::size_t mismatches = 0, share_flags = 0;
  for (const auto& d : found) {
    if (d.kind == DiscrepancyKind::WerrMismatch || d.kind == DiscrepancyKind::MissingBaseline)
      ++mismatches;
    if (d.kind == DiscrepancyKind::ShareSum) ++share_flags;
  }
  o.require(mismatches == 0, std::to_string(mismatches) + " WERR mismatches");

  auto recomputed = [&](int row, const char* test) {
    return werr(*find_row(rows, row, test)->nwer, *find_row(rows, 1, test)->nwer);
  };
  struct Expect {
    int row;
    const char* test;
    const char* value;
  } expect[] = {{3, "disfluencies", "22.5"}, {3, "stutter", "17.9"}, {2, "disfluencies", "21.2"},
                {2, "stutter", "14.0"}};
  for (const auto& e : expect) {
    auto got = fmt("%.1f", recomputed(e.row, e.test));
    o.require(got == e.value, "row " + std::to_string(e.row) + " " + e.test + " recomputes to " + got);
  }
  if (o.ok)
    o.detail = "0 WERR mismatches; row 3 recomputes 22.5/17.9, row 2 21.2/14.0; " +
               std::to_string(share_flags) + " S+I+D row(s) outside [99,101] flagged";
  return o;
}

Outcome fraction_table_consistency() {
  Outcome o;
  auto rows = load("fractions.tsv");
  auto found = check_table_consistency(rows, 0.6);
  o.require(found.empty(), std::to_string(found.size()) + " discrepancies");
  auto best = best_werr_per_test(rows, "fractions");
  o.require(best.count("disfluencies") && best.count("stutter"), "missing test sets");
  if (!o.ok) return o;
  const auto& d = best.at("disfluencies");
  const auto& s = best.at("stutter");
  o.require(fmt("%.1f", d.werr) == "22.5" && fmt("%.1f", s.werr) == "16.4",
            "best WERR " + fmt("%.1f", d.werr) + " / " + fmt("%.1f", s.werr));
  o.require(d.model == s.model && d.model.rfind("#5 ", 0) == 0, "best rows differ: " + d.model);
  if (o.ok) o.detail = "best " + d.model + ": WERR 22.5 / 16.4";
  return o;
}

Outcome oversampling_share() {
  Outcome o;
  // 23000 x 360 s = 2300 h ordinary, 4700 x 36 s = 47 h disfluent.
  Manifest ordinary, disfl;
  ordinary.name = "ordinary";
  disfl.name = "disfluencies";
  for (int i = 0; i < 23000; ++i) {
    UtteranceRecord r;
    r.utterance_id = "o" + std::to_string(i);
    r.speaker_id = "os" + std::to_string(i % 2000);
    r.duration_sec = 360.0;
    ordinary.records.push_back(std::move(r));
  }
  for (int i = 0; i < 4700; ++i) {
    UtteranceRecord r;
    r.utterance_id = "d" + std::to_string(i);
    r.speaker_id = "ds" + std::to_string(i % 300);
    r.duration_sec = 36.0;
    r.transcript = parse_transcript("alarm on tw- on twelve");
    disfl.records.push_back(std::move(r));
  }
  MixSpec spec;
  spec.disfluencies_fraction = 0.25;
  spec.seed = 1;
  auto mix = build_mix(ordinary, disfl, spec);
  double share = mix.report.disfluent_share_duration_pct();
  o.require(std::abs(share - 0.51) <= 0.05, "share " + fmt("%.3f", share) + "%");
  o.detail = fmt("%.2f h ordinary", mix.report.ordinary_sec / 3600) +
             fmt(" + %.2f h disfluent", mix.report.disfluent_sec / 3600) +
             fmt(" -> share %.3f%%", share);
  return o;
}

Outcome strategy_equivalence() {
  Outcome o;
  gen::TranscriptGen g(20240601);
  const StrategyKind kinds[] = {StrategyKind::Delete, StrategyKind::ReplaceWithTag,
                                StrategyKind::AppendTag, StrategyKind::FirstLetterTag};
  std::size_t failures = 0, checks = 0;
  for (int i = 0; i < 10000; ++i) {
    auto t = make_transcript(g.tokens(14));
    auto want = normalize_reference(t);
    for (auto k : kinds) {
      PartialWordStrategy s{k};
      ++checks;
      if (postprocess(render_transcript(transform(t, s)), s) != want) {
        if (!failures) o.detail = "first failure: '" + t.raw + "' under " + to_string(k);
        ++failures;
      }
    }
  }
  o.ok = failures == 0;
  if (o.ok) o.detail = std::to_string(checks) + " transcript/strategy pairs, 0 failures";
  return o;
}

Outcome alignment_oracle() {
  Outcome o;
  std::mt19937_64 rng(5000);
  static const char* alphabet[] = {"a", "b", "c", "d", "e"};
  std::uniform_int_distribution<std::size_t> len(0, 8);
  std::uniform_int_distribution<int> letter(0, 4);
  for (int i = 0; i < 5000 && o.ok; ++i) {
    std::vector<std::string> a(len(rng)), b(len(rng));
    for (auto& w : a) w = alphabet[letter(rng)];
    for (auto& w : b) w = alphabet[letter(rng)];
    auto res = align(a, b);
    const auto& c = res.counts;
    o.require(c.errors() == oracle::edit_distance(a, b), "distance differs on pair " + std::to_string(i));
    o.require(c.match + c.sub + c.del == a.size(), "reference length identity fails");
    o.require(c.match + c.sub + c.ins == b.size(), "hypothesis length identity fails");
  }
  if (o.ok) o.detail = "5000 pairs agree; both length identities hold";
  return o;
}

Outcome filter_oracle() {
  Outcome o;
  gen::TranscriptGen g(500);
  std::size_t accepted = 0;
  for (int i = 0; i < 500; ++i) {
    auto raw = g.raw(9);
    // Plant a partial/completion pair in half the samples so both verdicts occur.
    if (i % 2) raw = g.prefix() + "- " + raw;
    auto got = apply_filter(parse_transcript(raw));
    auto want = oracle::reference_filter(raw);
    accepted += want.accepted;
    bool same = got.accepted == want.accepted &&
                got.matched.contains(Condition::HasPartialWithCompletion) == want.completion &&
                got.matched.contains(Condition::ShortTranscript) == want.short_transcript &&
                got.matched.contains(Condition::AnotherPartial) == want.another_partial &&
                got.matched.contains(Condition::HasHesitation) == want.hesitation &&
                got.matched.contains(Condition::HasRepetition) == want.repetition;
    o.require(same, "disagreement on '" + raw + "'");
  }
  o.require(accepted > 50 && accepted < 450, "degenerate sample: " + std::to_string(accepted) + " accepted");

  auto v = apply_filter(parse_transcript("alarm on tw- on twelve"));
  ConditionSet expected;
  expected.insert(Condition::HasPartialWithCompletion);
  expected.insert(Condition::HasRepetition);
  o.require(v.accepted && v.matched == expected, "worked example not accepted with the expected conditions");
  if (o.ok)
    o.detail = "500/500 agree (" + std::to_string(accepted) +
               " accepted); example -> {HasPartialWithCompletion, HasRepetition}";
  return o;
}

Outcome viterbi_optimality() {
  Outcome o;
  std::mt19937_64 rng(2000);
  const std::vector<std::string> alphabet = {"a", "b", "c", "é", "d"};
  std::uniform_int_distribution<std::size_t> text_len(1, 10), letter(0, 4), piece_len(1, 3),
      vocab_n(1, 20);
  std::uniform_int_distribution<int> quarter(-16, -1);
  std::size_t segmentable = 0;
  for (int i = 0; i < 2000 && o.ok; ++i) {
    std::string word;
    for (auto n = text_len(rng); n > 0; --n) word += alphabet[letter(rng)];
    WordpieceVocab v;
    // Most single characters are present so that most instances are coverable.
    for (const auto& ch : alphabet)
      if (std::bernoulli_distribution(0.85)(rng)) v.entries[ch] = quarter(rng) * 0.25;
    for (auto n = vocab_n(rng); v.entries.size() < n;) {
      std::string p;
      for (auto k = piece_len(rng); k > 0; --k) p += alphabet[letter(rng)];
      v.entries[p] = quarter(rng) * 0.25;
    }
    auto want = oracle::segment_word(word, v.entries);
    if (!want.ok) {
      bool threw = false;
      try {
        segment(word, v);
      } catch (const Error& e) {
        threw = e.code() == ErrorCode::UncoverableCharacter;
      }
      o.require(threw, "expected UncoverableCharacter for '" + word + "'");
      continue;
    }
    ++segmentable;
    auto got = segment(word, v);
    std::string joined;
    for (const auto& p : got.pieces) joined += p;
    o.require(std::abs(got.score - want.score) < 1e-9, "score differs on '" + word + "'");
    o.require(got.pieces == want.pieces, "tie-break differs on '" + word + "'");
    o.require(joined == word, "lossless reconstruction fails on '" + word + "'");
  }

  // Adversarial inputs for the tag: pieces that straddle it, repeated and
  // nested occurrences.
  WordpieceVocab adv;
  for (const char* p : {"x", "p", "w", "<", ">", "p<", "<p", "w>", "<pw", "pw>", "x<pw", "<pw>x",
                        "<pw><pw>", "pw"})
    adv.entries[p] = -1.0;
  adv.entries["\xE2\x96\x81"] = -1.0;
  adv.boundary_marker = std::string(kWordBoundary);
  adv.add_special("<pw>", -5.0);
  std::uniform_int_distribution<int> adv_letter(0, 5);
  const char* adv_alpha[] = {"x", "p", "w", "<", ">", "<pw>"};
  for (int i = 0; i < 2000 && o.ok; ++i) {
    std::vector<std::string> words(1 + i % 3);
    std::size_t tags = 0;
    for (auto& w : words)
      for (auto n = text_len(rng); n > 0; --n) w += adv_alpha[adv_letter(rng)];
    for (const auto& w : words)
      for (auto pos = w.find("<pw>"); pos != std::string::npos; pos = w.find("<pw>", pos + 4)) ++tags;
    auto seg = segment(words, adv);
    std::size_t tag_pieces = 0;
    for (const auto& p : seg.pieces) {
      if (p == "<pw>") ++tag_pieces;
      else o.require(p.find("<pw>") == std::string::npos, "piece '" + p + "' swallows the tag");
    }
    o.require(tag_pieces == tags, "tag count changed for '" + words[0] + "'");
    o.require(seg.words(adv.boundary_marker) == words, "lossless reconstruction fails (adversarial)");
  }
  if (o.ok)
    o.detail = "2000 instances (" + std::to_string(segmentable) +
               " segmentable) match enumeration; lossless; tag atomic on 2000 adversarial inputs";
  return o;
}

Outcome dataset_properties() {
  Outcome o;
  std::mt19937_64 rng(100);
  auto corpus = [&](std::size_t n, std::size_t speakers, const std::string& prefix) {
    Manifest m;
    m.name = prefix;
    std::uniform_int_distribution<std::size_t> spk(0, speakers - 1);
    std::uniform_real_distribution<double> dur(0.5, 15.0);
    for (std::size_t i = 0; i < n; ++i) {
      UtteranceRecord r;
      r.utterance_id = prefix + std::to_string(i);
      r.speaker_id = "spk" + std::to_string(spk(rng));
      r.audio_ref = r.utterance_id + ".flac";
      r.duration_sec = std::round(dur(rng) * 100) / 100;
      r.transcript = parse_transcript(i % 4 ? "play music" : "p- play music");
      m.records.push_back(std::move(r));
    }
    return m;
  };

  std::size_t overlaps = 0;
  for (int k = 0; k < 100; ++k) {
    std::uniform_int_distribution<std::size_t> n(50, 2000), s(2, 300);
    auto m = corpus(n(rng), s(rng), "c" + std::to_string(k) + "-");
    SplitSpec spec;
    spec.seed = rng();
    auto parts = speaker_disjoint_split(m, spec);
    auto a = parts.train.speakers(), b = parts.dev.speakers(), c = parts.test.speakers();
    for (const auto& x : a) overlaps += b.count(x) + c.count(x);
    for (const auto& x : b) overlaps += c.count(x);
    o.require(parts.train.size() + parts.dev.size() + parts.test.size() == m.size(),
              "split lost records");
  }
  o.require(overlaps == 0, std::to_string(overlaps) + " speaker overlaps");

  auto disfl = corpus(4000, 120, "d");
  std::set<std::string> prev;
  for (double f : {0.1, 0.25, 0.5, 1.0}) {
    std::set<std::string> cur;
    for (const auto& r : take_fraction(disfl, f, 42).records) cur.insert(r.utterance_id);
    o.require(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()),
              "fraction " + fmt("%.2f", f) + " is not a superset of the previous one");
    prev = std::move(cur);
  }

  auto ordinary = corpus(6000, 400, "o");
  auto pipeline = [&] {
    SplitSpec spec;
    spec.seed = 7;
    auto parts = speaker_disjoint_split(ordinary, spec);
    MixSpec ms;
    ms.disfluencies_fraction = 0.25;
    ms.seed = 7;
    auto mix = build_mix(parts.train, disfl, ms);
    return bytes(parts.train) + bytes(parts.dev) + bytes(parts.test) + bytes(mix.mixed) +
           mix.report.to_json();
  };
  o.require(pipeline() == pipeline(), "two runs produced different bytes");
  if (o.ok) o.detail = "100 corpora, 0 speaker overlaps; fractions nested; runs byte-identical";
  return o;
}

struct Criterion {
  const char* name;
  double limit_sec;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {"strategy table WERR consistency", 1, strategy_table_consistency},
      {"fraction table best reduction", 1, fraction_table_consistency},
      {"oversampling share", 1, oversampling_share},
      {"strategy equivalence", 10, strategy_equivalence},
      {"alignment oracle", 30, alignment_oracle},
      {"filter oracle", 5, filter_oracle},
      {"Viterbi optimality", 30, viterbi_optimality},
      {"dataset builder properties", 30, dataset_properties},
  };
  int failed = 0, index = 0;
  for (const auto& c : criteria) {
    ++index;
    Outcome o;
    auto start = std::chrono::steady_clock::now();
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.ok && secs >= c.limit_sec) {
      o.ok = false;
      o.detail = "took " + fmt("%.2f s", secs) + ", limit " + fmt("%.0f s", c.limit_sec);
    }
    failed += !o.ok;
    std::printf("%s  %d. %s (%.3f s < %.0f s): %s\n", o.ok ? "PASS" : "FAIL", index, c.name, secs,
                c.limit_sec, o.detail.c_str());
  }
  std::printf("%d/%d criteria passed\n", index - failed, index);
  return failed ? 1 : 0;
}
