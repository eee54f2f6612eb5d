#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "disfl/corpus.hpp"
#include "disfl/dataset.hpp"
#include "disfl/error.hpp"
#include "disfl/filter.hpp"
#include "disfl/metrics.hpp"
#include "disfl/transforms.hpp"
#include "disfl/wordpiece.hpp"

#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)

namespace py = pybind11;
using namespace disfl;

namespace {

NormalizedTranscript words_of(const std::vector<std::string>& words) { return {words}; }

void corpus_bindings(py::module_& m) {
  py::enum_<TokenKind>(m, "TokenKind")
      .value("Word", TokenKind::Word)
      .value("PartialWord", TokenKind::PartialWord)
      .value("Hesitation", TokenKind::Hesitation)
      .value("OtherTag", TokenKind::OtherTag)
      .value("TaggedPartial", TokenKind::TaggedPartial);

  py::class_<Token>(m, "Token")
      .def(py::init<TokenKind, std::string>(), py::arg("kind"), py::arg("text"))
      .def_readwrite("kind", &Token::kind)
      .def_readwrite("text", &Token::text)
      .def(py::self == py::self)
      .def("__repr__", [](const Token& t) {
        return std::string("Token(") + to_string(t.kind) + ", '" + t.text + "')";
      });

  py::class_<HesitationLexicon>(m, "HesitationLexicon")
      .def(py::init<>())
      .def(py::init<const std::vector<std::string>&>())
      .def("__contains__", &HesitationLexicon::contains)
      .def("entries", &HesitationLexicon::entries);

  py::class_<Transcript>(m, "Transcript")
      .def_readonly("tokens", &Transcript::tokens)
      .def_readonly("raw", &Transcript::raw)
      .def("__len__", [](const Transcript& t) { return t.tokens.size(); });

  m.def("parse_transcript", &parse_transcript, py::arg("raw"),
        py::arg("lexicon") = HesitationLexicon{});
  m.def("render_transcript", &render_transcript);
  m.def("make_transcript", &make_transcript);

  py::class_<UtteranceRecord>(m, "UtteranceRecord")
      .def_readonly("utterance_id", &UtteranceRecord::utterance_id)
      .def_readonly("speaker_id", &UtteranceRecord::speaker_id)
      .def_readonly("audio_ref", &UtteranceRecord::audio_ref)
      .def_readonly("duration_sec", &UtteranceRecord::duration_sec)
      .def_readonly("transcript", &UtteranceRecord::transcript);

  py::class_<Manifest>(m, "Manifest")
      .def_readonly("name", &Manifest::name)
      .def_readonly("records", &Manifest::records)
      .def("__len__", &Manifest::size)
      .def("total_hours", &Manifest::total_hours);

  m.def("read_manifest", &read_manifest_file, py::arg("path"),
        py::arg("lexicon") = HesitationLexicon{});
  m.def("write_manifest", &write_manifest_file, py::arg("manifest"), py::arg("path"));
}

void filter_bindings(py::module_& m) {
  py::enum_<FilterVariant>(m, "FilterVariant")
      .value("PaperComposite", FilterVariant::PaperComposite)
      .value("SimpleSinglePartial", FilterVariant::SimpleSinglePartial);
  py::enum_<Condition>(m, "Condition")
      .value("HasPartialWithCompletion", Condition::HasPartialWithCompletion)
      .value("ShortTranscript", Condition::ShortTranscript)
      .value("AnotherPartial", Condition::AnotherPartial)
      .value("HasHesitation", Condition::HasHesitation)
      .value("HasRepetition", Condition::HasRepetition);

  py::class_<FilterRule>(m, "FilterRule")
      .def(py::init<>())
      .def_readwrite("variant", &FilterRule::variant)
      .def_readwrite("max_words", &FilterRule::max_words)
      .def_readwrite("count_partials_as_words", &FilterRule::count_partials_as_words);

  py::class_<FilterVerdict>(m, "FilterVerdict")
      .def_readonly("accepted", &FilterVerdict::accepted)
      .def_property_readonly("matched", [](const FilterVerdict& v) { return v.matched.to_vector(); });

  m.def("apply_filter", &apply_filter, py::arg("transcript"), py::arg("rule") = FilterRule{});
  m.def("has_partial_with_completion", [](const Transcript& t) -> std::optional<std::pair<size_t, size_t>> {
    if (auto c = has_partial_with_completion(t)) return std::make_pair(c->partial_index, c->completion_index);
    return std::nullopt;
  });
  m.def("detect_repetition", [](const Transcript& t) -> std::optional<std::vector<std::size_t>> {
    if (auto r = detect_repetition(t)) {
      auto idx = r->first;
      idx.insert(idx.end(), r->second.begin(), r->second.end());
      return idx;
    }
    return std::nullopt;
  });
}

void transform_bindings(py::module_& m) {
  py::enum_<StrategyKind>(m, "StrategyKind")
      .value("Delete", StrategyKind::Delete)
      .value("ReplaceWithTag", StrategyKind::ReplaceWithTag)
      .value("AppendTag", StrategyKind::AppendTag)
      .value("FirstLetterTag", StrategyKind::FirstLetterTag);

  py::class_<PartialWordStrategy>(m, "PartialWordStrategy")
      .def(py::init([](StrategyKind kind, std::string tag) {
             PartialWordStrategy s{kind, std::move(tag)};
             s.validate();
             return s;
           }),
           py::arg("kind"), py::arg("tag_text") = "<pw>")
      .def_readonly("kind", &PartialWordStrategy::kind)
      .def_readonly("tag_text", &PartialWordStrategy::tag_text);

  m.def("transform", &transform);
  m.def(
      "postprocess",
      [](const std::string& text, const PartialWordStrategy& s, bool keep_hesitations) {
        NormalizeOptions o;
        o.keep_hesitations = keep_hesitations;
        return postprocess(text, s, o).words;
      },
      py::arg("text"), py::arg("strategy"), py::arg("keep_hesitations") = false);
  m.def(
      "normalize_reference",
      [](const Transcript& t, bool keep_hesitations) {
        NormalizeOptions o;
        o.keep_hesitations = keep_hesitations;
        return normalize_reference(t, o).words;
      },
      py::arg("transcript"), py::arg("keep_hesitations") = false);
}

void wordpiece_bindings(py::module_& m) {
  py::class_<WordpieceVocab>(m, "WordpieceVocab")
      .def(py::init<>())
      .def_readwrite("entries", &WordpieceVocab::entries)
      .def_readwrite("specials", &WordpieceVocab::specials)
      .def_readwrite("boundary_marker", &WordpieceVocab::boundary_marker)
      .def("add_special", &WordpieceVocab::add_special)
      .def("__len__", &WordpieceVocab::size);

  py::class_<Segmentation>(m, "Segmentation")
      .def_readonly("pieces", &Segmentation::pieces)
      .def_readonly("score", &Segmentation::score)
      .def_readonly("word_starts", &Segmentation::word_starts);

  m.def("segment", py::overload_cast<std::string_view, const WordpieceVocab&>(&segment));
  m.def("build_vocab", &build_char_fallback_vocab, py::arg("corpus"), py::arg("target_size"),
        py::arg("specials") = std::set<std::string>{"<pw>"},
        py::arg("boundary_marker") = std::string(kWordBoundary), py::arg("max_piece_chars") = 8);
}

void metrics_bindings(py::module_& m) {
  py::class_<EditCounts>(m, "EditCounts")
      .def_readonly("match", &EditCounts::match)
      .def_readonly("sub", &EditCounts::sub)
      .def_readonly("ins", &EditCounts::ins)
      .def_readonly("del_", &EditCounts::del)
      .def("errors", &EditCounts::errors);

  py::class_<WerReport>(m, "WerReport")
      .def_readonly("wer", &WerReport::wer)
      .def_readonly("ref_words", &WerReport::ref_words)
      .def_readonly("counts", &WerReport::counts)
      .def_readonly("s_share", &WerReport::s_share)
      .def_readonly("i_share", &WerReport::i_share)
      .def_readonly("d_share", &WerReport::d_share)
      .def_property_readonly("err_total", &WerReport::err_total)
      .def("to_json", &WerReport::to_json);

  m.def("align", [](const std::vector<std::string>& ref, const std::vector<std::string>& hyp) {
    auto a = align(ref, hyp);
    std::vector<std::tuple<std::string, std::string, std::string>> ops;
    for (const auto& p : a.ops) ops.emplace_back(to_string(p.op), p.ref, p.hyp);
    return std::make_pair(ops, a.counts);
  });
  m.def("score_pair", [](const std::vector<std::string>& ref, const std::vector<std::string>& hyp) {
    return score_pair(words_of(ref), words_of(hyp));
  });
  m.def("werr", &werr, py::arg("model_wer"), py::arg("baseline_wer"));
  m.def("relative_metrics", [](double model, double baseline, double baseline_ordinary) {
    auto r = relative_metrics(model, baseline, baseline_ordinary);
    return std::make_pair(r.nwer, r.werr);
  });
}

void dataset_bindings(py::module_& m) {
  m.def("take_fraction", &take_fraction, py::arg("manifest"), py::arg("fraction"), py::arg("seed"));
  m.def(
      "speaker_disjoint_split",
      [](const Manifest& mf, double train, double dev, double test, std::uint64_t seed) {
        auto r = speaker_disjoint_split(mf, SplitSpec{train, dev, test, seed});
        return py::make_tuple(r.train, r.dev, r.test);
      },
      py::arg("manifest"), py::arg("train"), py::arg("dev"), py::arg("test"), py::arg("seed"));

  py::class_<MixReport>(m, "MixReport")
      .def_readonly("ordinary_utterances", &MixReport::ordinary_utterances)
      .def_readonly("disfluent_utterances", &MixReport::disfluent_utterances)
      .def_readonly("ordinary_sec", &MixReport::ordinary_sec)
      .def_readonly("disfluent_sec", &MixReport::disfluent_sec)
      .def("disfluent_share_duration_pct", &MixReport::disfluent_share_duration_pct)
      .def("to_json", &MixReport::to_json);

  m.def(
      "build_mix",
      [](const Manifest& ordinary, const Manifest& disfl, double fraction, std::uint64_t seed,
         const PartialWordStrategy& s) {
        auto r = build_mix(ordinary, disfl, MixSpec{fraction, seed, s});
        return py::make_tuple(r.mixed, r.report);
      },
      py::arg("ordinary"), py::arg("disfluencies"), py::arg("fraction"), py::arg("seed"),
      py::arg("strategy"));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Disfluency-aware ASR corpus preparation and scoring";

  py::register_exception<Error>(m, "Error", PyExc_ValueError);

  corpus_bindings(m);
  filter_bindings(m);
  transform_bindings(m);
  wordpiece_bindings(m);
  metrics_bindings(m);
  dataset_bindings(m);

#ifdef VERSION_INFO
  m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
  m.attr("__version__") = "dev";
#endif
}
