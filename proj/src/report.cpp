#include "disfl/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <sstream>

#include "disfl/error.hpp"
#include "disfl/text.hpp"
#include "json.hpp"

namespace disfl {

using nlohmann::ordered_json;

ModelResult ModelResult::from_report(std::string model, std::string test, const WerReport& r) {
  return {std::move(model), std::move(test), r.wer, r.s_share, r.i_share, r.d_share, std::nullopt};
}

std::string ModelResult::to_json() const {
  ordered_json j;
  j["model"] = model;
  j["test"] = test;
  j["wer"] = wer;
  auto opt = [](const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); };
  j["s_share"] = opt(s_share);
  j["i_share"] = opt(i_share);
  j["d_share"] = opt(d_share);
  j["seed"] = seed ? ordered_json(*seed) : ordered_json(nullptr);
  return j.dump();
}

ModelResult parse_model_result(const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::MalformedRecord, std::string("invalid result JSON: ") + e.what());
  }
  ModelResult r;
  for (const char* f : {"model", "test", "wer"})
    if (!j.contains(f) || j[f].is_null())
      throw Error(ErrorCode::MissingField, std::string("result lacks '") + f + "'");
  try {
    r.model = j["model"].get<std::string>();
    r.test = j["test"].get<std::string>();
    r.wer = j["wer"].get<double>();
    auto opt = [&](const char* f) -> std::optional<double> {
      if (!j.contains(f) || j[f].is_null()) return std::nullopt;
      return j[f].get<double>();
    };
    r.s_share = opt("s_share");
    r.i_share = opt("i_share");
    r.d_share = opt("d_share");
    if (j.contains("seed") && !j["seed"].is_null()) r.seed = j["seed"].get<std::uint64_t>();
  } catch (const nlohmann::json::type_error& e) {
    throw Error(ErrorCode::MalformedRecord, std::string("bad result field: ") + e.what());
  }
  return r;
}

std::vector<ModelResult> read_model_results(std::istream& in) {
  std::vector<ModelResult> out;
  std::string line;
  while (std::getline(in, line))
    if (!text::split_ws(line).empty()) out.push_back(parse_model_result(line));
  return out;
}

const ReportCell* Report::find(const std::string& model, const std::string& test) const {
  auto it = cells.find({model, test});
  return it == cells.end() ? nullptr : &it->second;
}

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  // avoid "-0.0"
  if (std::string(buf).find_first_not_of("-0.") == std::string::npos && buf[0] == '-')
    return std::string(buf + 1);
  return buf;
}

std::string opt_fmt(const char* f, const std::optional<double>& v) { return v ? fmt(f, *v) : "-"; }

void push_unique(std::vector<std::string>& v, const std::string& s) {
  if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
}

std::string pad(const std::string& s, std::size_t width, bool left = false) {
  if (s.size() >= width) return s;
  std::string fill(width - s.size(), ' ');
  return left ? s + fill : fill + s;
}

}  // namespace

Report build_report(const std::vector<ModelResult>& results, const std::string& baseline,
                    const std::string& ordinary_test) {
  Report rep;
  rep.baseline = baseline;
  rep.ordinary_test = ordinary_test;

  struct Acc {
    double wer = 0, s = 0, i = 0, d = 0;
    std::size_t runs = 0, shares = 0;
  };
  std::map<std::pair<std::string, std::string>, Acc> acc;
  for (const auto& r : results) {
    push_unique(rep.models, r.model);
    push_unique(rep.tests, r.test);
    auto& a = acc[{r.model, r.test}];
    a.wer += r.wer;
    ++a.runs;
    if (r.s_share && r.i_share && r.d_share) {
      a.s += *r.s_share;
      a.i += *r.i_share;
      a.d += *r.d_share;
      ++a.shares;
    }
  }

  auto base_wer = [&](const std::string& test) {
    auto it = acc.find({baseline, test});
    if (it == acc.end())
      throw Error(ErrorCode::MissingBaseline,
                  "baseline '" + baseline + "' has no result on test '" + test + "'");
    return it->second.wer / static_cast<double>(it->second.runs);
  };
  const double ordinary = base_wer(ordinary_test);

  for (const auto& [key, a] : acc) {
    ReportCell c;
    c.runs = a.runs;
    c.wer = a.wer / static_cast<double>(a.runs);
    auto rel = relative_metrics(c.wer, base_wer(key.second), ordinary);
    c.nwer = rel.nwer;
    c.werr = rel.werr;
    if (a.shares == a.runs) {
      c.s_share = a.s / static_cast<double>(a.runs);
      c.i_share = a.i / static_cast<double>(a.runs);
      c.d_share = a.d / static_cast<double>(a.runs);
      double rounded = std::round(*c.s_share) + std::round(*c.i_share) + std::round(*c.d_share);
      if (rounded < 99 || rounded > 101)
        rep.warnings.push_back("S+I+D of '" + key.first + "' on '" + key.second + "' sums to " +
                               fmt("%.0f", rounded));
    }
    rep.cells.emplace(key, c);
  }
  return rep;
}

std::string render_strategy_table(const Report& r) {
  std::size_t mw = 5;
  for (const auto& m : r.models) mw = std::max(mw, m.size());
  std::ostringstream os;
  os << pad("", mw, true);
  for (const auto& t : r.tests) os << " | " << pad(t, 30, true);
  os << '\n' << pad("model", mw, true);
  for (std::size_t k = 0; k < r.tests.size(); ++k)
    os << " | " << pad("NWER", 6) << pad("WERR", 7) << pad("S", 5) << pad("I", 5) << pad("D", 5)
       << "  ";
  os << '\n';
  for (const auto& m : r.models) {
    os << pad(m, mw, true);
    for (const auto& t : r.tests) {
      const auto* c = r.find(m, t);
      os << " | ";
      if (!c) {
        os << pad("-", 6) << pad("-", 7) << pad("-", 5) << pad("-", 5) << pad("-", 5) << "  ";
        continue;
      }
      os << pad(fmt("%.2f", c->nwer), 6) << pad(fmt("%.1f", c->werr), 7)
         << pad(opt_fmt("%.0f", c->s_share), 5) << pad(opt_fmt("%.0f", c->i_share), 5)
         << pad(opt_fmt("%.0f", c->d_share), 5) << "  ";
    }
    os << '\n';
  }
  return os.str();
}

std::string render_fraction_table(const Report& r) {
  std::size_t mw = 5;
  for (const auto& m : r.models) mw = std::max(mw, m.size());
  std::ostringstream os;
  os << pad("model", mw, true);
  for (const auto& t : r.tests) os << " | " << pad(t, std::max<std::size_t>(t.size(), 6));
  os << '\n';
  for (const auto& m : r.models) {
    os << pad(m, mw, true);
    for (const auto& t : r.tests) {
      const auto* c = r.find(m, t);
      os << " | " << pad(c ? fmt("%.1f", c->werr) : "-", std::max<std::size_t>(t.size(), 6));
    }
    os << '\n';
  }
  return os.str();
}

std::string report_json(const Report& r) {
  ordered_json j;
  j["baseline"] = r.baseline;
  j["ordinary_test"] = r.ordinary_test;
  auto& rows = j["rows"];
  rows = ordered_json::array();
  for (const auto& m : r.models)
    for (const auto& t : r.tests) {
      const auto* c = r.find(m, t);
      if (!c) continue;
      auto opt = [](const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); };
      rows.push_back({{"model", m},
                      {"test", t},
                      {"wer", c->wer},
                      {"nwer", c->nwer},
                      {"werr", c->werr},
                      {"s", opt(c->s_share)},
                      {"i", opt(c->i_share)},
                      {"d", opt(c->d_share)},
                      {"runs", c->runs}});
    }
  j["warnings"] = r.warnings;
  return j.dump(2);
}

std::string published_model_label(const PublishedRow& row) {
  std::string label = "#" + std::to_string(row.row);
  if (!row.train.empty() && row.train != "-") label += " " + row.train;
  if (!row.partial.empty() && row.partial != "-") label += " / " + row.partial;
  return label;
}

std::vector<ModelResult> results_from_published(const std::vector<PublishedRow>& rows,
                                                const std::string& table) {
  std::vector<ModelResult> out;
  for (const auto& row : rows) {
    if (row.table != table || !row.nwer) continue;
    out.push_back({published_model_label(row), row.test, *row.nwer, row.s, row.i, row.d, std::nullopt});
  }
  return out;
}

std::map<std::string, BestWerr> best_werr_per_test(const Report& r) {
  std::map<std::string, BestWerr> out;
  for (const auto& [key, c] : r.cells) {
    if (key.first == r.baseline) continue;
    auto it = out.find(key.second);
    if (it == out.end() || c.werr > it->second.werr) out[key.second] = {key.first, c.werr};
  }
  return out;
}

std::map<std::string, BestWerr> best_werr_per_test(const std::vector<PublishedRow>& rows,
                                                   const std::string& table) {
  std::map<std::string, BestWerr> out;
  for (const auto& row : rows) {
    if (row.table != table || row.baseline || !row.werr) continue;
    auto it = out.find(row.test);
    if (it == out.end() || *row.werr > it->second.werr)
      out[row.test] = {published_model_label(row), *row.werr};
  }
  return out;
}

}  // namespace disfl
