#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "disfl/corpus.hpp"
#include "disfl/transforms.hpp"

namespace disfl {

enum class EditOp { Match, Substitute, Delete, Insert };

const char* to_string(EditOp op);

struct AlignedPair {
  EditOp op;
  std::string ref;  // empty for Insert
  std::string hyp;  // empty for Delete
};

struct EditCounts {
  std::size_t match = 0;
  std::size_t sub = 0;
  std::size_t ins = 0;
  std::size_t del = 0;

  std::size_t errors() const { return sub + ins + del; }
  EditCounts& operator+=(const EditCounts& o);
  bool operator==(const EditCounts&) const = default;
};

struct AlignmentResult {
  std::vector<AlignedPair> ops;
  EditCounts counts;
};

// Minimum word edit distance with unit costs. Among equal-cost alignments the
// backtrace (from the end) prefers Match, then Substitute, Delete, Insert.
AlignmentResult align(std::span<const std::string> ref, std::span<const std::string> hyp);
AlignmentResult align(const NormalizedTranscript& ref, const NormalizedTranscript& hyp);

std::size_t edit_distance(std::span<const std::string> a, std::span<const std::string> b);

struct WerReport {
  std::size_t ref_words = 0;
  EditCounts counts;
  double wer = 0.0;
  // Percent of all errors; absent when there are no errors.
  std::optional<double> s_share, i_share, d_share;
  std::size_t utterances = 0;
  std::size_t missing_hypotheses = 0;
  std::size_t empty_references = 0;

  std::size_t err_total() const { return counts.errors(); }

  // Throws EmptyReference when ref_words is zero.
  static WerReport from_counts(const EditCounts& counts, std::size_t ref_words);

  std::string to_text() const;
  std::string to_json() const;
};

WerReport score_pair(const NormalizedTranscript& ref, const NormalizedTranscript& hyp);

struct ScoreOptions {
  PartialWordStrategy strategy;
  NormalizeOptions normalize;
  bool case_fold = true;
};

// utterance_id -> raw hypothesis text, in file order.
struct HypothesisTable {
  std::vector<std::pair<std::string, std::string>> rows;
};

// "utterance_id<TAB>hypothesis" lines; a line without a tab is an empty
// hypothesis. Throws DuplicateId.
HypothesisTable read_hypotheses(std::istream& in);

struct UtteranceScore {
  std::string utterance_id;
  std::size_t ref_words = 0;
  EditCounts counts;
  bool missing_hypothesis = false;
};

struct CorpusScore {
  WerReport total;
  std::vector<UtteranceScore> utterances;  // reference order
};

// Post-processes hypotheses, normalizes references and pools counts over the
// corpus (sum of errors over sum of reference words). References without a
// hypothesis are scored against an empty one and counted.
CorpusScore score_corpus_detailed(const Manifest& refs, const HypothesisTable& hyps,
                                  const ScoreOptions& opts = {});
WerReport score_corpus(const Manifest& refs, const HypothesisTable& hyps,
                       const ScoreOptions& opts = {});

struct RelativeMetrics {
  double nwer = 0.0;
  double werr = 0.0;
};

// nwer = model / baseline_ordinary; werr = 100 * (baseline - model) / baseline.
RelativeMetrics relative_metrics(double model_wer, double baseline_wer, double baseline_ordinary_wer);
RelativeMetrics relative_metrics(const WerReport& model, const WerReport& baseline,
                                 const WerReport& baseline_ordinary);

double werr(double model_wer, double baseline_wer);

// One published result row for one test set. Values that a table does not
// print are absent.
struct PublishedRow {
  std::string table;
  int row = 0;
  std::string train;
  std::string partial;
  std::string test;
  bool baseline = false;
  std::optional<double> nwer, werr, s, i, d;
};

std::vector<PublishedRow> read_published_rows(std::istream& in);

enum class DiscrepancyKind { WerrMismatch, ShareSum, MissingBaseline };

const char* to_string(DiscrepancyKind kind);

struct Discrepancy {
  DiscrepancyKind kind;
  std::string table;
  int row = 0;
  std::string test;
  double published = 0.0;
  double recomputed = 0.0;
};

inline constexpr double kWerrTolerancePp = 0.6;

// Recomputes each WERR from the row's NWER and the baseline row's NWER on the
// same (table, test); rows without an NWER are checked only when they are the
// baseline (WERR must be 0). Also requires S+I+D within [99, 101].
std::vector<Discrepancy> check_table_consistency(const std::vector<PublishedRow>& rows,
                                                 double tolerance_pp = kWerrTolerancePp);

}  // namespace disfl
