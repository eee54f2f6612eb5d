#include "disfl/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "disfl/corpus.hpp"
#include "disfl/dataset.hpp"
#include "disfl/error.hpp"
#include "disfl/filter.hpp"
#include "disfl/metrics.hpp"
#include "disfl/parallel.hpp"
#include "disfl/report.hpp"
#include "disfl/text.hpp"
#include "disfl/transforms.hpp"
#include "disfl/wordpiece.hpp"
#include "json.hpp"

namespace disfl {
namespace {

constexpr std::size_t kBatch = 4096;

struct Common {
  std::vector<std::string> hesitations{"uh", "um", "hmm", "er"};
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());

  HesitationLexicon lexicon() const { return HesitationLexicon(hesitations); }
};

// Counts data errors; each one is reported on err as it happens.
struct Diagnostics {
  std::ostream& err;
  std::size_t errors = 0;

  void report(const std::string& where, const std::exception& e) {
    ++errors;
    err << where << ": " << e.what() << '\n';
  }
};

const CLI::Validator kWritable(
    [](std::string& path) -> std::string {
      auto parent = std::filesystem::path(path).parent_path();
      if (parent.empty() || std::filesystem::is_directory(parent)) return {};
      return "directory does not exist: " + parent.string();
    },
    "PATH");

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  return in;
}

std::string stem(const std::string& path) {
  auto name = std::filesystem::path(path).filename().string();
  auto dot = name.find('.');
  return dot == std::string::npos || dot == 0 ? name : name.substr(0, dot);
}

// Reads the manifest in batches, skipping (and reporting) bad records.
template <class Fn>
void for_each_batch(const std::string& path, const HesitationLexicon& lexicon, Diagnostics& diag,
                    Fn&& on_batch) {
  auto in = open_in(path);
  ManifestReader reader(in, lexicon);
  std::vector<UtteranceRecord> batch;
  for (;;) {
    std::optional<UtteranceRecord> rec;
    try {
      rec = reader.next();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::Io) throw;
      diag.report(path, e);
      continue;
    }
    if (!rec) break;
    batch.push_back(std::move(*rec));
    if (batch.size() == kBatch) {
      on_batch(batch);
      batch.clear();
    }
  }
  if (!batch.empty()) on_batch(batch);
}

Manifest load_manifest(const std::string& path, const HesitationLexicon& lexicon, Diagnostics& diag) {
  Manifest m;
  m.name = stem(path);
  for_each_batch(path, lexicon, diag, [&](std::vector<UtteranceRecord>& batch) {
    for (auto& r : batch) m.records.push_back(std::move(r));
  });
  return m;
}

PartialWordStrategy make_strategy(const std::string& name, const std::string& tag) {
  PartialWordStrategy s{parse_strategy(name), tag};
  s.validate();
  return s;
}

const std::vector<std::string> kStrategyNames = {"delete", "absent", "replace-tag", "append-tag",
                                                 "first-letter-tag"};

// ---------------------------------------------------------------------------

struct FilterArgs {
  std::string in, out, rejected, rule = "paper-composite";
  std::size_t max_words = 4;
  bool words_only = false;
};

int cmd_filter(const FilterArgs& a, const Common& c, std::ostream& out, Diagnostics& diag) {
  FilterRule rule;
  rule.variant = a.rule == "paper-composite" ? FilterVariant::PaperComposite
                                             : FilterVariant::SimpleSinglePartial;
  rule.max_words = a.max_words;
  rule.count_partials_as_words = !a.words_only;

  auto acc = open_out(a.out);
  std::unique_ptr<std::ofstream> rej;
  if (!a.rejected.empty()) rej = std::make_unique<std::ofstream>(open_out(a.rejected));

  FilterSummary summary;
  for_each_batch(a.in, c.lexicon(), diag, [&](std::vector<UtteranceRecord>& batch) {
    auto verdicts = ordered_parallel_map(
        batch, [&](const UtteranceRecord& r) { return apply_filter(r.transcript, rule); }, c.threads);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      summary.add(verdicts[i]);
      if (verdicts[i].accepted) write_record(acc, batch[i]);
      else if (rej) write_record(*rej, batch[i]);
    }
  });
  out << summary.to_json() << '\n';
  return 0;
}

struct TransformArgs {
  std::string in, out, strategy, tag = "<pw>";
};

int cmd_transform(const TransformArgs& a, const Common& c, std::ostream& out, Diagnostics& diag) {
  auto strategy = make_strategy(a.strategy, a.tag);
  auto dst = open_out(a.out);
  std::size_t n = 0, partials = 0;
  for_each_batch(a.in, c.lexicon(), diag, [&](std::vector<UtteranceRecord>& batch) {
    auto rewritten = ordered_parallel_map(
        batch, [&](const UtteranceRecord& r) { return transform(r.transcript, strategy); }, c.threads);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      partials += batch[i].transcript.count(TokenKind::PartialWord);
      batch[i].transcript = std::move(rewritten[i]);
      write_record(dst, batch[i]);
      ++n;
    }
  });
  nlohmann::ordered_json j;
  j["records"] = n;
  j["partial_words_rewritten"] = partials;
  j["strategy"] = to_string(strategy.kind);
  out << j.dump(2) << '\n';
  return 0;
}

struct SplitArgs {
  std::string in, prefix;
  std::vector<double> ratios{0.8, 0.1, 0.1};
  std::uint64_t seed = 0;
};

int cmd_split(const SplitArgs& a, const Common& c, std::ostream& out, Diagnostics& diag) {
  if (a.ratios.size() != 3) throw Error(ErrorCode::InvalidArgument, "--ratios needs three values");
  SplitSpec spec{a.ratios[0], a.ratios[1], a.ratios[2], a.seed};
  spec.validate();
  const char* names[] = {"train", "dev", "test"};
  std::ofstream files[3];
  for (int k = 0; k < 3; ++k) files[k] = open_out(a.prefix + "." + names[k] + ".manifest");
  std::set<std::string> speakers[3];
  double seconds[3] = {0, 0, 0};
  std::size_t counts[3] = {0, 0, 0};

  for_each_batch(a.in, c.lexicon(), diag, [&](std::vector<UtteranceRecord>& batch) {
    Manifest chunk;
    chunk.records = std::move(batch);
    auto parts = speaker_disjoint_split(chunk, spec);
    const Manifest* ms[] = {&parts.train, &parts.dev, &parts.test};
    for (int k = 0; k < 3; ++k)
      for (const auto& r : ms[k]->records) {
        write_record(files[k], r);
        speakers[k].insert(r.speaker_id);
        seconds[k] += r.duration_sec;
        ++counts[k];
      }
  });

  nlohmann::ordered_json j;
  for (int k = 0; k < 3; ++k)
    j[names[k]] = {{"utterances", counts[k]},
                   {"speakers", speakers[k].size()},
                   {"hours", seconds[k] / 3600.0}};
  out << j.dump(2) << '\n';
  return 0;
}

struct MixArgs {
  std::string ordinary, disfluencies, out, strategy = "replace-tag", tag = "<pw>";
  double fraction = 1.0;
  std::uint64_t seed = 0;
};

int cmd_mix(const MixArgs& a, const Common& c, std::ostream& out, Diagnostics& diag) {
  MixSpec spec{a.fraction, a.seed, make_strategy(a.strategy, a.tag)};
  spec.validate();
  auto lex = c.lexicon();
  auto ordinary = load_manifest(a.ordinary, lex, diag);
  auto disfl = load_manifest(a.disfluencies, lex, diag);
  auto result = build_mix(ordinary, disfl, spec);
  write_manifest_file(result.mixed, a.out);
  out << result.report.to_json() << '\n';
  return 0;
}

struct TokenizeArgs {
  std::string in, out, vocab, vocab_out;
  std::size_t vocab_size = 0;
  std::vector<std::string> specials{"<pw>"};
};

int cmd_tokenize(const TokenizeArgs& a, const Common& c, std::ostream& out, Diagnostics& diag) {
  auto lex = c.lexicon();
  std::set<std::string> specials(a.specials.begin(), a.specials.end());
  WordpieceVocab vocab;
  if (!a.vocab.empty()) {
    auto in = open_in(a.vocab);
    vocab = read_vocab(in);
  } else {
    auto corpus = load_manifest(a.in, lex, diag);
    vocab = build_char_fallback_vocab(corpus, a.vocab_size, specials);
  }
  if (!a.vocab_out.empty()) {
    auto vo = open_out(a.vocab_out);
    write_vocab(vocab, vo);
  }

  Segmenter segmenter(vocab);
  auto dst = open_out(a.out);
  std::size_t n = 0, pieces = 0;
  for_each_batch(a.in, lex, diag, [&](std::vector<UtteranceRecord>& batch) {
    struct Row {
      std::optional<Segmentation> seg;
      std::string error;
    };
    auto rows = ordered_parallel_map(
        batch,
        [&](const UtteranceRecord& r) {
          Row row;
          try {
            row.seg = segmenter(training_words(r.transcript, vocab.specials));
          } catch (const Error& e) {
            row.error = e.what();
          }
          return row;
        },
        c.threads);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (!rows[i].seg) {
        ++diag.errors;
        diag.err << batch[i].utterance_id << ": " << rows[i].error << '\n';
        continue;
      }
      dst << batch[i].utterance_id << '\t' << text::join(rows[i].seg->pieces) << '\n';
      pieces += rows[i].seg->pieces.size();
      ++n;
    }
  });

  nlohmann::ordered_json j;
  j["records"] = n;
  j["pieces"] = pieces;
  j["vocab_size"] = vocab.size();
  out << j.dump(2) << '\n';
  return 0;
}

struct EvaluateArgs {
  std::string refs, hyps, strategy, tag = "<pw>", model, test, results, details;
  bool no_case_fold = false, keep_hesitations = false, json = false;
  std::optional<std::uint64_t> seed;
};

int cmd_evaluate(const EvaluateArgs& a, const Common& c, std::ostream& out, Diagnostics& diag) {
  if (!a.results.empty() && (a.model.empty() || a.test.empty()))
    throw Error(ErrorCode::InvalidArgument, "--results needs --model and --test");
  ScoreOptions opts;
  opts.strategy = make_strategy(a.strategy, a.tag);
  opts.normalize.lexicon = c.lexicon();
  opts.normalize.keep_hesitations = a.keep_hesitations;
  opts.case_fold = !a.no_case_fold;

  auto refs = load_manifest(a.refs, opts.normalize.lexicon, diag);
  auto hin = open_in(a.hyps);
  auto hyps = read_hypotheses(hin);
  auto score = score_corpus_detailed(refs, hyps, opts);

  for (const auto& u : score.utterances)
    if (u.missing_hypothesis) diag.err << "warning: no hypothesis for '" << u.utterance_id << "'\n";

  out << (a.json ? score.total.to_json() + "\n" : score.total.to_text());

  if (!a.details.empty()) {
    auto d = open_out(a.details);
    d << "utterance_id\tref_words\tsub\tins\tdel\tmissing\n";
    for (const auto& u : score.utterances)
      d << u.utterance_id << '\t' << u.ref_words << '\t' << u.counts.sub << '\t' << u.counts.ins
        << '\t' << u.counts.del << '\t' << (u.missing_hypothesis ? 1 : 0) << '\n';
  }
  if (!a.results.empty()) {
    auto r = ModelResult::from_report(a.model, a.test, score.total);
    r.seed = a.seed;
    std::ofstream res(a.results, std::ios::binary | std::ios::app);
    if (!res) throw Error(ErrorCode::Io, "cannot open '" + a.results + "' for appending");
    res << r.to_json() << '\n';
  }
  return 0;
}

struct ReportArgs {
  std::vector<std::string> results;
  std::string baseline, ordinary_test = "ordinary", layout = "both", json;
};

int cmd_report(const ReportArgs& a, std::ostream& out, Diagnostics& diag) {
  std::vector<ModelResult> results;
  for (const auto& path : a.results) {
    auto in = open_in(path);
    auto part = read_model_results(in);
    results.insert(results.end(), part.begin(), part.end());
  }
  auto rep = build_report(results, a.baseline, a.ordinary_test);
  for (const auto& w : rep.warnings) diag.err << "warning: " << w << '\n';
  if (a.layout == "strategy" || a.layout == "both") out << render_strategy_table(rep);
  if (a.layout == "both") out << '\n';
  if (a.layout == "fraction" || a.layout == "both") out << render_fraction_table(rep);
  if (!a.json.empty()) {
    auto j = open_out(a.json);
    j << report_json(rep) << '\n';
  }
  return 0;
}

struct CheckArgs {
  std::vector<std::string> fixtures;
  double tolerance = kWerrTolerancePp;
  bool strict = false;
};

int cmd_check_tables(const CheckArgs& a, std::ostream& out) {
  std::vector<PublishedRow> rows;
  for (const auto& path : a.fixtures) {
    auto in = open_in(path);
    auto part = read_published_rows(in);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  auto found = check_table_consistency(rows, a.tolerance);

  std::vector<std::string> tables;
  for (const auto& r : rows)
    if (std::find(tables.begin(), tables.end(), r.table) == tables.end()) tables.push_back(r.table);

  char buf[256];
  out << "rows checked: " << rows.size() << '\n';
  for (const auto& d : found) {
    std::snprintf(buf, sizeof buf, "%s row %d %s: %s published %.2f recomputed %.2f\n",
                  d.table.c_str(), d.row, d.test.c_str(), to_string(d.kind), d.published,
                  d.recomputed);
    out << buf;
  }
  out << "discrepancies: " << found.size() << '\n';
  for (const auto& t : tables)
    for (const auto& [test, best] : best_werr_per_test(rows, t)) {
      std::snprintf(buf, sizeof buf, "%s best WERR on %s: %.1f%% (%s)\n", t.c_str(), test.c_str(),
                    best.werr, best.model.c_str());
      out << buf;
    }
  return a.strict && !found.empty() ? 1 : 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Disfluency-aware ASR corpus preparation and scoring"};
  app.name("disfl");
  app.require_subcommand(1, 1);

  Common common;
  app.add_option("--hesitations", common.hesitations, "Hesitation lexicon")->delimiter(',');
  app.add_option("--threads", common.threads, "Worker threads")->check(CLI::PositiveNumber);

  FilterArgs fa;
  auto* filter = app.add_subcommand("filter", "Select disfluent utterances");
  filter->add_option("--in", fa.in)->required()->check(CLI::ExistingFile);
  filter->add_option("--out", fa.out, "Accepted records")->required()->check(kWritable);
  filter->add_option("--rejected", fa.rejected, "Rejected records")->check(kWritable);
  filter->add_option("--rule", fa.rule)
      ->check(CLI::IsMember({"paper-composite", "simple-single-partial"}));
  filter->add_option("--max-words", fa.max_words)->check(CLI::PositiveNumber);
  filter->add_flag("--words-only", fa.words_only, "Count only full words toward --max-words");

  TransformArgs ta;
  auto* trans = app.add_subcommand("transform", "Rewrite partial words");
  trans->add_option("--in", ta.in)->required()->check(CLI::ExistingFile);
  trans->add_option("--out", ta.out)->required()->check(kWritable);
  trans->add_option("--strategy", ta.strategy)->required()->check(CLI::IsMember(kStrategyNames));
  trans->add_option("--tag", ta.tag);

  SplitArgs sa;
  auto* split = app.add_subcommand("split", "Speaker-disjoint train/dev/test split");
  split->add_option("--in", sa.in)->required()->check(CLI::ExistingFile);
  split->add_option("--out-prefix", sa.prefix)->required()->check(kWritable);
  split->add_option("--ratios", sa.ratios)->delimiter(',')->expected(3);
  split->add_option("--seed", sa.seed)->envname("DISFL_SEED");

  MixArgs ma;
  auto* mix = app.add_subcommand("mix", "Merge ordinary data with a fraction of disfluent data");
  mix->add_option("--ordinary", ma.ordinary)->required()->check(CLI::ExistingFile);
  mix->add_option("--disfluencies", ma.disfluencies)->required()->check(CLI::ExistingFile);
  mix->add_option("--out", ma.out)->required()->check(kWritable);
  mix->add_option("--fraction", ma.fraction)->check(CLI::Range(0.0, 1.0));
  mix->add_option("--seed", ma.seed)->envname("DISFL_SEED");
  mix->add_option("--strategy", ma.strategy)->check(CLI::IsMember(kStrategyNames));
  mix->add_option("--tag", ma.tag);

  TokenizeArgs ka;
  auto* tok = app.add_subcommand("tokenize", "Wordpiece-segment transcripts");
  tok->add_option("--in", ka.in)->required()->check(CLI::ExistingFile);
  tok->add_option("--out", ka.out)->required()->check(kWritable);
  auto* vocab_opt = tok->add_option("--vocab", ka.vocab)->check(CLI::ExistingFile);
  auto* size_opt = tok->add_option("--vocab-size", ka.vocab_size, "Build a vocabulary of this size");
  vocab_opt->excludes(size_opt);
  tok->add_option("--vocab-out", ka.vocab_out)->check(kWritable);
  tok->add_option("--specials", ka.specials)->delimiter(',');

  EvaluateArgs ea;
  auto* eval = app.add_subcommand("evaluate", "Score hypotheses against references");
  eval->add_option("--refs", ea.refs)->required()->check(CLI::ExistingFile);
  eval->add_option("--hyps", ea.hyps)->required()->check(CLI::ExistingFile);
  eval->add_option("--strategy", ea.strategy)->required()->check(CLI::IsMember(kStrategyNames));
  eval->add_option("--tag", ea.tag);
  eval->add_flag("--no-case-fold", ea.no_case_fold);
  eval->add_flag("--keep-hesitations", ea.keep_hesitations);
  eval->add_flag("--json", ea.json, "Print the report as JSON");
  eval->add_option("--model", ea.model);
  eval->add_option("--test", ea.test);
  eval->add_option("--seed", ea.seed);
  eval->add_option("--results", ea.results, "Append a result line to this file")->check(kWritable);
  eval->add_option("--details", ea.details, "Per-utterance counts")->check(kWritable);

  ReportArgs ra;
  auto* report = app.add_subcommand("report", "Tabulate NWER/WERR/S/I/D across models");
  report->add_option("--results", ra.results)->required()->check(CLI::ExistingFile);
  report->add_option("--baseline", ra.baseline)->required();
  report->add_option("--ordinary-test", ra.ordinary_test);
  report->add_option("--layout", ra.layout)->check(CLI::IsMember({"strategy", "fraction", "both"}));
  report->add_option("--json", ra.json)->check(kWritable);

  CheckArgs ca;
  auto* check = app.add_subcommand("check-tables", "Re-derive WERR from published NWER rows");
  check->add_option("--fixtures", ca.fixtures)->required()->check(CLI::ExistingFile);
  check->add_option("--tolerance", ca.tolerance);
  check->add_flag("--strict", ca.strict, "Exit 1 when discrepancies are found");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  if (tok->parsed() && ka.vocab.empty() && ka.vocab_size == 0) {
    err << "tokenize: one of --vocab or --vocab-size is required\n";
    return 2;
  }

  Diagnostics diag{err};
  try {
    int rc = 0;
    if (filter->parsed()) rc = cmd_filter(fa, common, out, diag);
    else if (trans->parsed()) rc = cmd_transform(ta, common, out, diag);
    else if (split->parsed()) rc = cmd_split(sa, common, out, diag);
    else if (mix->parsed()) rc = cmd_mix(ma, common, out, diag);
    else if (tok->parsed()) rc = cmd_tokenize(ka, common, out, diag);
    else if (eval->parsed()) rc = cmd_evaluate(ea, common, out, diag);
    else if (report->parsed()) rc = cmd_report(ra, out, diag);
    else if (check->parsed()) rc = cmd_check_tables(ca, out);
    if (diag.errors) {
      err << diag.errors << " data error(s)\n";
      return 1;
    }
    return rc;
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace disfl
