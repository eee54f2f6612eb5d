#include <sstream>

#include "disfl/corpus.hpp"
#include "disfl/error.hpp"
#include "doctest.h"
#include "generators.hpp"

using namespace disfl;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::Io;
}

UtteranceRecord rec(std::string id, std::string spk, double dur, std::string text) {
  UtteranceRecord r;
  r.utterance_id = std::move(id);
  r.speaker_id = std::move(spk);
  r.audio_ref = "audio/" + r.utterance_id + ".wav";
  r.duration_sec = dur;
  r.transcript = parse_transcript(text);
  return r;
}

}  // namespace

TEST_CASE("parse classifies each item") {
  auto t = parse_transcript("alarm on tw- on twelve");
  REQUIRE(t.tokens.size() == 5);
  CHECK(t.tokens[2] == Token{TokenKind::PartialWord, "tw"});
  CHECK(t.count(TokenKind::Word) == 4);
  CHECK(t.raw == "alarm on tw- on twelve");

  auto u = parse_transcript("Um <uh> <noise> p<pw> <HESITATION> x--");
  REQUIRE(u.tokens.size() == 6);
  CHECK(u.tokens[0] == Token{TokenKind::Hesitation, "Um"});
  CHECK(u.tokens[1] == Token{TokenKind::Hesitation, "uh"});
  CHECK(u.tokens[2] == Token{TokenKind::OtherTag, "noise"});
  CHECK(u.tokens[3] == Token{TokenKind::TaggedPartial, "p<pw>"});
  CHECK(u.tokens[4].kind == TokenKind::Hesitation);
  CHECK(u.tokens[5] == Token{TokenKind::PartialWord, "x"});
}

TEST_CASE("empty and blank transcripts have no tokens") {
  CHECK(parse_transcript("").tokens.empty());
  CHECK(parse_transcript(" \t ").tokens.empty());
}

TEST_CASE("custom lexicon") {
  HesitationLexicon lex({"ähm", "EH"});
  CHECK(lex.contains("eh"));
  CHECK(lex.contains("<hesitation>") == false);
  CHECK(lex.contains("Hesitation"));
  CHECK_FALSE(lex.contains("uh"));
  auto t = parse_transcript("eh uh", lex);
  CHECK(t.tokens[0].kind == TokenKind::Hesitation);
  CHECK(t.tokens[1].kind == TokenKind::Word);
}

TEST_CASE("parse errors") {
  CHECK(code_of([] { parse_transcript("a <noise b"); }) == ErrorCode::MalformedTag);
  CHECK(code_of([] { parse_transcript("a noise> b"); }) == ErrorCode::MalformedTag);
  CHECK(code_of([] { parse_transcript("<a<b>>"); }) == ErrorCode::MalformedTag);
  CHECK(code_of([] { parse_transcript("<>"); }) == ErrorCode::MalformedTag);
  CHECK(code_of([] { parse_transcript("a - b"); }) == ErrorCode::EmptyPartial);
  CHECK(code_of([] { parse_transcript("a \xC3\x28 b"); }) == ErrorCode::InvalidUtf8);
}

TEST_CASE("render and parse round-trip on generated transcripts") {
  gen::TranscriptGen g(7);
  for (int i = 0; i < 1000; ++i) {
    auto toks = g.tokens(12, true);
    auto t = make_transcript(toks);
    REQUIRE(is_well_formed(t));
    auto back = parse_transcript(render_transcript(t));
    REQUIRE(back.tokens == toks);
    CHECK(render_transcript(back) == t.raw);
  }
}

TEST_CASE("raw surface variants parse to well-formed transcripts") {
  gen::TranscriptGen g(8);
  for (int i = 0; i < 500; ++i) {
    auto t = parse_transcript(g.raw(10));
    CHECK(is_well_formed(t));
    CHECK(parse_transcript(render_transcript(t)).tokens == t.tokens);
  }
}

TEST_CASE("manifest round-trip keeps unknown fields and bytes") {
  const std::string text =
      R"({"utterance_id":"u1","speaker_id":"s1","audio_ref":"a/u1.wav","duration_sec":1.25,"transcript":"p- play <uh> music","locale":"en-US","meta":{"k":[1,2]}})"
      "\n"
      "\n"
      R"({"utterance_id":"u2","speaker_id":"s2","audio_ref":"a/u2.wav","duration_sec":0,"transcript":""})"
      "\n";
  std::istringstream in(text);
  auto m = read_manifest(in, "m");
  REQUIRE(m.size() == 2);
  CHECK(m.records[0].extra.at("locale") == "\"en-US\"");
  CHECK(m.records[0].transcript.count(TokenKind::PartialWord) == 1);
  CHECK(m.total_duration_sec() == doctest::Approx(1.25));

  std::ostringstream a, b;
  write_manifest(m, a);
  std::istringstream again(a.str());
  auto m2 = read_manifest(again);
  write_manifest(m2, b);
  CHECK(a.str() == b.str());
  CHECK(m2.records == m.records);
  CHECK(a.str().find("\"meta\":{\"k\":[1,2]}") != std::string::npos);
}

TEST_CASE("record errors") {
  CHECK(code_of([] {
          parse_record_line(R"({"utterance_id":"u","audio_ref":"a","duration_sec":1,"transcript":"x"})");
        }) == ErrorCode::MissingField);
  try {
    parse_record_line(R"({"utterance_id":"u","audio_ref":"a","duration_sec":1,"transcript":"x"})");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("speaker_id") != std::string::npos);
  }
  CHECK(code_of([] {
          parse_record_line(R"({"utterance_id":"u","speaker_id":"s","audio_ref":"a","duration_sec":-1,"transcript":"x"})");
        }) == ErrorCode::BadDuration);
  CHECK(code_of([] {
          parse_record_line(R"({"utterance_id":"u","speaker_id":"s","audio_ref":"a","duration_sec":"1","transcript":"x"})");
        }) == ErrorCode::BadDuration);
  CHECK(code_of([] { parse_record_line("{not json"); }) == ErrorCode::MalformedRecord);
  CHECK(code_of([] {
          parse_record_line(R"({"utterance_id":3,"speaker_id":"s","audio_ref":"a","duration_sec":1,"transcript":"x"})");
        }) == ErrorCode::MalformedRecord);
  CHECK(code_of([] {
          parse_record_line(R"({"utterance_id":"u","speaker_id":"s","audio_ref":"a","duration_sec":1,"transcript":"<x"})");
        }) == ErrorCode::MalformedTag);

  std::istringstream dup(
      R"({"utterance_id":"u","speaker_id":"s","audio_ref":"a","duration_sec":1,"transcript":"x"})"
      "\n"
      R"({"utterance_id":"u","speaker_id":"t","audio_ref":"b","duration_sec":2,"transcript":"y"})"
      "\n");
  ManifestReader reader(dup);
  CHECK(reader.next().has_value());
  CHECK(code_of([&] { reader.next(); }) == ErrorCode::DuplicateId);
}

TEST_CASE("duration accounting over many records") {
  Manifest m;
  double expected = 0.0;
  for (int i = 0; i < 10000; ++i) {
    double d = 0.5 + (i % 37) * 0.25;
    expected += d;
    m.records.push_back(rec("u" + std::to_string(i), "s" + std::to_string(i % 101), d, "a b"));
  }
  std::ostringstream out;
  write_manifest(m, out);
  std::istringstream in(out.str());
  auto back = read_manifest(in);
  CHECK(back.size() == 10000);
  CHECK(back.total_duration_sec() == doctest::Approx(expected).epsilon(1e-12));
  CHECK(back.total_hours() == doctest::Approx(expected / 3600.0));
  CHECK(back.speakers().size() == 101);
}
