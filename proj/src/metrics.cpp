#include "disfl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "disfl/error.hpp"
#include "disfl/text.hpp"
#include "json.hpp"

namespace disfl {

const char* to_string(EditOp op) {
  switch (op) {
    case EditOp::Match: return "match";
    case EditOp::Substitute: return "sub";
    case EditOp::Delete: return "del";
    case EditOp::Insert: return "ins";
  }
  return "?";
}

EditCounts& EditCounts::operator+=(const EditCounts& o) {
  match += o.match;
  sub += o.sub;
  ins += o.ins;
  del += o.del;
  return *this;
}

namespace {

// (n+1) x (m+1) cost table, row-major.
std::vector<std::size_t> cost_table(std::span<const std::string> ref, std::span<const std::string> hyp) {
  const std::size_t n = ref.size(), m = hyp.size(), w = m + 1;
  std::vector<std::size_t> d((n + 1) * w);
  for (std::size_t j = 0; j <= m; ++j) d[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    d[i * w] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      std::size_t diag = d[(i - 1) * w + j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      d[i * w + j] = std::min({diag, d[(i - 1) * w + j] + 1, d[i * w + j - 1] + 1});
    }
  }
  return d;
}

}  // namespace

std::size_t edit_distance(std::span<const std::string> a, std::span<const std::string> b) {
  return cost_table(a, b).back();
}

AlignmentResult align(std::span<const std::string> ref, std::span<const std::string> hyp) {
  const auto d = cost_table(ref, hyp);
  const std::size_t w = hyp.size() + 1;
  AlignmentResult out;
  std::size_t i = ref.size(), j = hyp.size();
  while (i > 0 || j > 0) {
    const std::size_t here = d[i * w + j];
    if (i > 0 && j > 0 && ref[i - 1] == hyp[j - 1] && d[(i - 1) * w + j - 1] == here) {
      out.ops.push_back({EditOp::Match, ref[i - 1], hyp[j - 1]});
      ++out.counts.match;
      --i, --j;
    } else if (i > 0 && j > 0 && d[(i - 1) * w + j - 1] + 1 == here) {
      out.ops.push_back({EditOp::Substitute, ref[i - 1], hyp[j - 1]});
      ++out.counts.sub;
      --i, --j;
    } else if (i > 0 && d[(i - 1) * w + j] + 1 == here) {
      out.ops.push_back({EditOp::Delete, ref[i - 1], {}});
      ++out.counts.del;
      --i;
    } else {
      out.ops.push_back({EditOp::Insert, {}, hyp[j - 1]});
      ++out.counts.ins;
      --j;
    }
  }
  std::reverse(out.ops.begin(), out.ops.end());
  return out;
}

AlignmentResult align(const NormalizedTranscript& ref, const NormalizedTranscript& hyp) {
  return align(std::span<const std::string>(ref.words), std::span<const std::string>(hyp.words));
}

WerReport WerReport::from_counts(const EditCounts& counts, std::size_t ref_words) {
  if (ref_words == 0) throw Error(ErrorCode::EmptyReference, "WER is undefined for an empty reference");
  WerReport r;
  r.ref_words = ref_words;
  r.counts = counts;
  r.wer = static_cast<double>(counts.errors()) / static_cast<double>(ref_words);
  if (auto e = static_cast<double>(counts.errors()); e > 0) {
    r.s_share = 100.0 * static_cast<double>(counts.sub) / e;
    r.i_share = 100.0 * static_cast<double>(counts.ins) / e;
    r.d_share = 100.0 * static_cast<double>(counts.del) / e;
  }
  return r;
}

static std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string WerReport::to_text() const {
  std::ostringstream os;
  auto share = [](const std::optional<double>& s) { return s ? fmt("%.1f", *s) : std::string("-"); };
  os << "utterances  " << utterances << '\n'
     << "ref_words   " << ref_words << '\n'
     << "errors      " << err_total() << "  (sub " << counts.sub << ", ins " << counts.ins
     << ", del " << counts.del << ")\n"
     << "WER         " << fmt("%.2f", 100.0 * wer) << "%\n"
     << "S/I/D (%)   " << share(s_share) << " / " << share(i_share) << " / " << share(d_share) << '\n';
  if (missing_hypotheses) os << "missing     " << missing_hypotheses << '\n';
  if (empty_references) os << "empty refs  " << empty_references << '\n';
  return os.str();
}

std::string WerReport::to_json() const {
  nlohmann::ordered_json j;
  j["wer"] = wer;
  j["ref_words"] = ref_words;
  j["err_total"] = err_total();
  j["sub"] = counts.sub;
  j["ins"] = counts.ins;
  j["del"] = counts.del;
  j["match"] = counts.match;
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::ordered_json(*v) : nullptr; };
  j["s_share"] = opt(s_share);
  j["i_share"] = opt(i_share);
  j["d_share"] = opt(d_share);
  j["utterances"] = utterances;
  j["missing_hypotheses"] = missing_hypotheses;
  j["empty_references"] = empty_references;
  return j.dump();
}

WerReport score_pair(const NormalizedTranscript& ref, const NormalizedTranscript& hyp) {
  auto r = WerReport::from_counts(align(ref, hyp).counts, ref.words.size());
  r.utterances = 1;
  return r;
}

HypothesisTable read_hypotheses(std::istream& in) {
  HypothesisTable table;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::split_ws(line).empty()) continue;
    std::string id, hyp;
    if (auto tab = line.find('\t'); tab != std::string::npos) {
      id = line.substr(0, tab);
      hyp = line.substr(tab + 1);
    } else {
      id = line;
    }
    if (!text::valid_utf8(hyp) || !text::valid_utf8(id))
      throw Error(ErrorCode::InvalidUtf8, "hypothesis line " + std::to_string(line_no) + " is not UTF-8");
    if (!seen.insert(id).second)
      throw Error(ErrorCode::DuplicateId,
                  "hypothesis line " + std::to_string(line_no) + ": duplicate id '" + id + "'");
    table.rows.emplace_back(std::move(id), std::move(hyp));
  }
  return table;
}

CorpusScore score_corpus_detailed(const Manifest& refs, const HypothesisTable& hyps,
                                  const ScoreOptions& opts) {
  std::unordered_map<std::string, const std::string*> by_id;
  for (const auto& r : refs.records) by_id.emplace(r.utterance_id, nullptr);
  for (const auto& [id, hyp] : hyps.rows) {
    auto it = by_id.find(id);
    if (it == by_id.end())
      throw Error(ErrorCode::UnknownUtteranceId, "hypothesis for unknown utterance '" + id + "'");
    it->second = &hyp;
  }

  auto fold = [&](NormalizedTranscript t) {
    if (opts.case_fold)
      for (auto& w : t.words) w = text::ascii_lower(w);
    return t;
  };

  CorpusScore out;
  EditCounts pooled;
  std::size_t ref_words = 0;
  for (const auto& r : refs.records) {
    const std::string* hyp_text = by_id.at(r.utterance_id);
    auto ref = fold(normalize_reference(r.transcript, opts.normalize));
    auto hyp = hyp_text ? fold(postprocess(*hyp_text, opts.strategy, opts.normalize))
                        : NormalizedTranscript{};
    UtteranceScore u;
    u.utterance_id = r.utterance_id;
    u.ref_words = ref.words.size();
    u.counts = align(ref, hyp).counts;
    u.missing_hypothesis = hyp_text == nullptr;
    pooled += u.counts;
    ref_words += u.ref_words;
    out.utterances.push_back(std::move(u));
  }

  out.total = WerReport::from_counts(pooled, ref_words);
  out.total.utterances = refs.records.size();
  for (const auto& u : out.utterances) {
    out.total.missing_hypotheses += u.missing_hypothesis;
    out.total.empty_references += u.ref_words == 0;
  }
  return out;
}

WerReport score_corpus(const Manifest& refs, const HypothesisTable& hyps, const ScoreOptions& opts) {
  return score_corpus_detailed(refs, hyps, opts).total;
}

double werr(double model_wer, double baseline_wer) {
  if (!(baseline_wer > 0.0)) throw Error(ErrorCode::ZeroBaseline, "baseline WER must be positive");
  return 100.0 * (baseline_wer - model_wer) / baseline_wer;
}

RelativeMetrics relative_metrics(double model_wer, double baseline_wer, double baseline_ordinary_wer) {
  if (!(baseline_ordinary_wer > 0.0))
    throw Error(ErrorCode::ZeroBaseline, "baseline WER on the normalizing test must be positive");
  return {model_wer / baseline_ordinary_wer, werr(model_wer, baseline_wer)};
}

RelativeMetrics relative_metrics(const WerReport& model, const WerReport& baseline,
                                 const WerReport& baseline_ordinary) {
  return relative_metrics(model.wer, baseline.wer, baseline_ordinary.wer);
}

// ---------------------------------------------------------------------------
// Published tables

const char* to_string(DiscrepancyKind kind) {
  switch (kind) {
    case DiscrepancyKind::WerrMismatch: return "werr-mismatch";
    case DiscrepancyKind::ShareSum: return "share-sum";
    case DiscrepancyKind::MissingBaseline: return "missing-baseline";
  }
  return "?";
}

std::vector<PublishedRow> read_published_rows(std::istream& in) {
  std::string line;
  std::vector<std::string> header;
  std::vector<PublishedRow> rows;
  std::size_t line_no = 0;

  auto split_tabs = [](const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
      auto tab = s.find('\t', start);
      out.push_back(s.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    return out;
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto cells = split_tabs(line);
    if (header.empty()) {
      header = cells;
      for (const char* required : {"table", "row", "test", "role"})
        if (std::find(header.begin(), header.end(), required) == header.end())
          throw Error(ErrorCode::MissingField, std::string("fixture header lacks '") + required + "'");
      continue;
    }
    auto bad = [&](const std::string& why) {
      return Error(ErrorCode::MalformedRecord, "fixture line " + std::to_string(line_no) + ": " + why);
    };
    if (cells.size() != header.size()) throw bad("expected " + std::to_string(header.size()) + " columns");

    PublishedRow r;
    for (std::size_t c = 0; c < header.size(); ++c) {
      const auto& key = header[c];
      const auto& v = cells[c];
      auto number = [&]() -> std::optional<double> {
        if (v.empty() || v == "-") return std::nullopt;
        try {
          std::size_t used = 0;
          double x = std::stod(v, &used);
          if (used != v.size()) throw bad("bad number '" + v + "'");
          return x;
        } catch (const std::logic_error&) {
          throw bad("bad number '" + v + "'");
        }
      };
      if (key == "table") r.table = v;
      else if (key == "row") r.row = static_cast<int>(number().value_or(0));
      else if (key == "train") r.train = v;
      else if (key == "partial") r.partial = v;
      else if (key == "test") r.test = v;
      else if (key == "role") {
        if (v != "baseline" && v != "model") throw bad("role must be baseline or model");
        r.baseline = v == "baseline";
      }
      else if (key == "nwer") r.nwer = number();
      else if (key == "werr") r.werr = number();
      else if (key == "s") r.s = number();
      else if (key == "i") r.i = number();
      else if (key == "d") r.d = number();
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<Discrepancy> check_table_consistency(const std::vector<PublishedRow>& rows,
                                                 double tolerance_pp) {
  std::vector<Discrepancy> out;
  std::map<std::pair<std::string, std::string>, const PublishedRow*> baselines;
  for (const auto& r : rows)
    if (r.baseline) baselines.emplace(std::make_pair(r.table, r.test), &r);

  for (const auto& r : rows) {
    if (r.werr) {
      auto it = baselines.find({r.table, r.test});
      const PublishedRow* base = it == baselines.end() ? nullptr : it->second;
      std::optional<double> recomputed;
      if (r.baseline) {
        recomputed = 0.0;
      } else if (r.nwer) {
        if (!base || !base->nwer) {
          out.push_back({DiscrepancyKind::MissingBaseline, r.table, r.row, r.test, *r.werr, 0.0});
        } else {
          recomputed = werr(*r.nwer, *base->nwer);
        }
      }
      if (recomputed && std::abs(*r.werr - *recomputed) > tolerance_pp)
        out.push_back({DiscrepancyKind::WerrMismatch, r.table, r.row, r.test, *r.werr, *recomputed});
    }
    if (r.s && r.i && r.d) {
      double sum = *r.s + *r.i + *r.d;
      if (sum < 99.0 || sum > 101.0)
        out.push_back({DiscrepancyKind::ShareSum, r.table, r.row, r.test, sum, 100.0});
    }
  }
  return out;
}

}  // namespace disfl
