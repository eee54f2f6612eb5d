#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "disfl/metrics.hpp"

namespace disfl {

// One model evaluated on one test set. wer may be on any common scale (for
// published rows it is the NWER) since NWER and WERR are ratios.
struct ModelResult {
  std::string model;
  std::string test;
  double wer = 0.0;
  std::optional<double> s_share, i_share, d_share;
  std::optional<std::uint64_t> seed;

  static ModelResult from_report(std::string model, std::string test, const WerReport& r);
  std::string to_json() const;
};

ModelResult parse_model_result(const std::string& json_line);
// JSON lines as written by ModelResult::to_json.
std::vector<ModelResult> read_model_results(std::istream& in);

struct ReportCell {
  double wer = 0.0;  // mean over runs
  double nwer = 0.0;
  double werr = 0.0;
  std::optional<double> s_share, i_share, d_share;
  std::size_t runs = 0;
};

struct Report {
  std::string baseline;
  std::string ordinary_test;
  std::vector<std::string> models;  // first-seen order
  std::vector<std::string> tests;   // first-seen order
  std::map<std::pair<std::string, std::string>, ReportCell> cells;
  std::vector<std::string> warnings;

  const ReportCell* find(const std::string& model, const std::string& test) const;
};

// Averages repeated runs of a (model, test) pair, then derives NWER against
// the baseline on ordinary_test and WERR against the baseline on each test.
// Throws MissingBaseline when the baseline lacks a result the table needs.
Report build_report(const std::vector<ModelResult>& results, const std::string& baseline,
                    const std::string& ordinary_test);

// Per test: NWER, WERR, S, I, D columns.
std::string render_strategy_table(const Report& r);
// Per test: WERR only.
std::string render_fraction_table(const Report& r);
std::string report_json(const Report& r);

// Published rows of one table as model results (NWER as the WER scale).
// Rows without an NWER are skipped.
std::vector<ModelResult> results_from_published(const std::vector<PublishedRow>& rows,
                                                const std::string& table);
std::string published_model_label(const PublishedRow& row);

struct BestWerr {
  std::string model;
  double werr = 0.0;
};

// Largest WERR per test among non-baseline models.
std::map<std::string, BestWerr> best_werr_per_test(const Report& r);
std::map<std::string, BestWerr> best_werr_per_test(const std::vector<PublishedRow>& rows,
                                                   const std::string& table);

}  // namespace disfl
