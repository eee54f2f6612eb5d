#include "disfl/wordpiece.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>

#include "disfl/error.hpp"
#include "disfl/text.hpp"

namespace disfl {

void WordpieceVocab::add_special(const std::string& symbol, double log_prob) {
  specials.insert(symbol);
  entries[symbol] = log_prob;
}

std::vector<std::string> Segmentation::words(std::string_view boundary_marker) const {
  std::vector<std::string> out;
  for (std::size_t w = 0; w < word_starts.size(); ++w) {
    std::size_t end = w + 1 < word_starts.size() ? word_starts[w + 1] : pieces.size();
    std::string word;
    for (std::size_t i = word_starts[w]; i < end; ++i) word += pieces[i];
    if (!boundary_marker.empty() && word.starts_with(boundary_marker))
      word.erase(0, boundary_marker.size());
    out.push_back(std::move(word));
  }
  return out;
}

namespace {

bool contains_special(std::string_view piece, const std::set<std::string>& specials) {
  for (const auto& sp : specials)
    if (piece != sp && piece.find(sp) != std::string_view::npos) return true;
  return false;
}

struct Cell {
  bool reachable = false;
  double score = 0.0;
  std::size_t count = 0;
  std::size_t prev = 0;
};

std::vector<std::string_view> path_to(const std::vector<Cell>& cells,
                                      const std::vector<std::size_t>& offs, std::string_view s,
                                      std::size_t end) {
  std::vector<std::string_view> out;
  while (end > 0) {
    auto start = cells[end].prev;
    out.push_back(s.substr(offs[start], offs[end] - offs[start]));
    end = start;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace

Segmenter::Segmenter(const WordpieceVocab& vocab) : vocab_(vocab) {
  for (const auto& [piece, lp] : vocab.entries) {
    if (piece.empty() || vocab.specials.count(piece) || contains_special(piece, vocab.specials))
      continue;
    usable_.emplace(piece, lp);
    max_piece_chars_ = std::max(max_piece_chars_, text::codepoint_offsets(piece).size() - 1);
  }
  specials_by_length_.assign(vocab.specials.begin(), vocab.specials.end());
  std::stable_sort(specials_by_length_.begin(), specials_by_length_.end(),
                   [](const auto& a, const auto& b) { return a.size() > b.size(); });
}

void Segmenter::segment_chunk(std::string_view chunk, std::string_view word,
                              std::size_t word_offset, Segmentation& out) const {
  const auto offs = text::codepoint_offsets(chunk);
  const std::size_t n = offs.size() - 1;
  std::vector<Cell> cells(n + 1);
  cells[0].reachable = true;

  std::string piece;
  for (std::size_t end = 1; end <= n; ++end) {
    auto& cur = cells[end];
    std::size_t first = end > max_piece_chars_ ? end - max_piece_chars_ : 0;
    for (std::size_t start = first; start < end; ++start) {
      if (!cells[start].reachable) continue;
      piece.assign(chunk.substr(offs[start], offs[end] - offs[start]));
      auto it = usable_.find(piece);
      if (it == usable_.end()) continue;
      double score = cells[start].score + it->second;
      std::size_t count = cells[start].count + 1;
      bool better;
      if (!cur.reachable || score > cur.score) {
        better = true;
      } else if (score < cur.score) {
        better = false;
      } else if (count != cur.count) {
        better = count < cur.count;
      } else {
        auto cand = path_to(cells, offs, chunk, start);
        cand.push_back(piece);
        better = cand < path_to(cells, offs, chunk, end);
      }
      if (better) cur = {true, score, count, start};
    }
  }

  if (!cells[n].reachable) {
    std::size_t stuck = 0;
    for (std::size_t k = 0; k <= n; ++k)
      if (cells[k].reachable) stuck = k;
    auto ch = chunk.substr(offs[stuck], offs[stuck + 1] - offs[stuck]);
    throw Error(ErrorCode::UncoverableCharacter,
                "no piece covers '" + std::string(ch) + "' at byte " +
                    std::to_string(word_offset + offs[stuck]) + " of word '" + std::string(word) +
                    "'");
  }
  for (auto p : path_to(cells, offs, chunk, n)) out.pieces.emplace_back(p);
}

Segmentation Segmenter::operator()(std::span<const std::string> words) const {
  Segmentation out;
  const auto& marker = vocab_.boundary_marker;
  for (const auto& word : words) {
    out.word_starts.push_back(out.pieces.size());
    std::string_view w = word;
    std::size_t i = 0, chunk_start = 0;
    bool first_chunk = true;
    auto flush = [&](std::size_t end) {
      if (end == chunk_start) return;
      auto chunk = w.substr(chunk_start, end - chunk_start);
      if (first_chunk && !marker.empty()) {
        std::string marked = marker + std::string(chunk);
        segment_chunk(marked, w, chunk_start, out);
      } else {
        segment_chunk(chunk, w, chunk_start, out);
      }
      first_chunk = false;
    };
    while (i < w.size()) {
      const std::string* hit = nullptr;
      for (const auto& sp : specials_by_length_)
        if (w.compare(i, sp.size(), sp) == 0) {
          hit = &sp;
          break;
        }
      if (!hit) {
        ++i;
        continue;
      }
      flush(i);
      out.pieces.push_back(*hit);
      first_chunk = false;
      i += hit->size();
      chunk_start = i;
    }
    flush(w.size());
  }
  for (const auto& p : out.pieces) out.score += vocab_.entries.at(p);
  return out;
}

Segmentation segment(std::span<const std::string> words, const WordpieceVocab& vocab) {
  return Segmenter(vocab)(words);
}

Segmentation segment(std::string_view text, const WordpieceVocab& vocab) {
  std::vector<std::string> words;
  for (auto w : text::split_ws(text)) words.emplace_back(w);
  return segment(words, vocab);
}

std::vector<std::string> training_words(const Transcript& t, const std::set<std::string>& specials) {
  std::vector<std::string> out;
  for (const auto& tok : t.tokens) {
    switch (tok.kind) {
      case TokenKind::Word:
      case TokenKind::TaggedPartial:
      case TokenKind::PartialWord:
        out.push_back(render_token(tok));
        break;
      case TokenKind::OtherTag:
        if (auto r = render_token(tok); specials.count(r)) out.push_back(std::move(r));
        break;
      case TokenKind::Hesitation:
        break;
    }
  }
  return out;
}

WordpieceVocab build_char_fallback_vocab(const Manifest& corpus, std::size_t target_size,
                                         const std::set<std::string>& specials,
                                         std::string boundary_marker, std::size_t max_piece_chars) {
  std::map<std::string, std::size_t> singles, multis, special_counts;
  std::vector<std::string> by_length(specials.begin(), specials.end());
  std::stable_sort(by_length.begin(), by_length.end(),
                   [](const auto& a, const auto& b) { return a.size() > b.size(); });

  auto count_chunk = [&](std::string_view chunk, bool word_initial) {
    std::string s = (word_initial ? boundary_marker : std::string()) + std::string(chunk);
    auto offs = text::codepoint_offsets(s);
    std::size_t n = offs.size() - 1;
    for (std::size_t a = 0; a < n; ++a) {
      ++singles[s.substr(offs[a], offs[a + 1] - offs[a])];
      for (std::size_t b = a + 2; b <= n && b - a <= max_piece_chars; ++b)
        ++multis[s.substr(offs[a], offs[b] - offs[a])];
    }
  };

  for (const auto& r : corpus.records) {
    for (const auto& word : training_words(r.transcript, specials)) {
      std::string_view w = word;
      std::size_t i = 0, start = 0;
      bool initial = true;
      while (i < w.size()) {
        const std::string* hit = nullptr;
        for (const auto& sp : by_length)
          if (w.compare(i, sp.size(), sp) == 0) {
            hit = &sp;
            break;
          }
        if (!hit) {
          ++i;
          continue;
        }
        if (i > start) count_chunk(w.substr(start, i - start), initial);
        ++special_counts[*hit];
        initial = false;
        i += hit->size();
        start = i;
      }
      if (w.size() > start) count_chunk(w.substr(start), initial);
    }
  }

  // Required entries: alphabet, marker, specials.
  std::map<std::string, std::size_t> chosen = singles;
  if (!boundary_marker.empty()) chosen.emplace(boundary_marker, 1);
  for (const auto& sp : specials) chosen[sp] = std::max<std::size_t>(special_counts[sp], 1);
  if (target_size < chosen.size())
    throw Error(ErrorCode::TargetTooSmall, "target size " + std::to_string(target_size) +
                                               " is below the " + std::to_string(chosen.size()) +
                                               " required pieces");

  std::vector<std::pair<std::string, std::size_t>> ranked;
  for (const auto& [piece, count] : multis)
    if (!chosen.count(piece)) ranked.emplace_back(piece, count);
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    if (a.first.size() != b.first.size()) return a.first.size() > b.first.size();
    return a.first < b.first;
  });
  for (std::size_t k = 0; k < ranked.size() && chosen.size() < target_size; ++k)
    chosen.insert(ranked[k]);

  double total = 0.0;
  for (const auto& [piece, count] : chosen) total += static_cast<double>(count);

  WordpieceVocab v;
  v.boundary_marker = std::move(boundary_marker);
  v.specials = specials;
  for (const auto& [piece, count] : chosen)
    v.entries.emplace(piece, std::log(static_cast<double>(count) / total));
  return v;
}

void write_vocab(const WordpieceVocab& v, std::ostream& out) {
  char buf[64];
  for (const auto& [piece, lp] : v.entries) {
    std::snprintf(buf, sizeof buf, "%.17g", lp);
    out << piece << '\t' << buf;
    if (v.specials.count(piece)) out << "\tspecial";
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::Io, "write failure");
}

WordpieceVocab read_vocab(std::istream& in) {
  WordpieceVocab v;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto tab = line.find('\t');
    auto bad = [&](const std::string& why) {
      return Error(ErrorCode::MalformedRecord, "vocab line " + std::to_string(line_no) + ": " + why);
    };
    if (tab == std::string::npos || tab == 0) throw bad("expected piece<TAB>log_prob");
    std::string piece = line.substr(0, tab);
    std::string rest = line.substr(tab + 1);
    std::string flag;
    if (auto tab2 = rest.find('\t'); tab2 != std::string::npos) {
      flag = rest.substr(tab2 + 1);
      rest = rest.substr(0, tab2);
    }
    double lp;
    try {
      std::size_t used = 0;
      lp = std::stod(rest, &used);
      if (used != rest.size()) throw bad("bad log_prob '" + rest + "'");
    } catch (const std::logic_error&) {
      throw bad("bad log_prob '" + rest + "'");
    }
    if (!flag.empty() && flag != "special") throw bad("unknown flag '" + flag + "'");
    if (!v.entries.emplace(piece, lp).second) throw bad("duplicate piece '" + piece + "'");
    if (flag == "special") v.specials.insert(piece);
    if (piece.starts_with(kWordBoundary)) v.boundary_marker = std::string(kWordBoundary);
  }
  return v;
}

}  // namespace disfl
