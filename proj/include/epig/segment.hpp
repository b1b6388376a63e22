// Copyright 2026 The epig Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "epig/error.hpp"
#include "epig/utf8.hpp"

namespace epig {

struct CodeRange {
  char32_t first;
  char32_t last;  // inclusive
};

/// Tamil marks that attach to the preceding base: dependent vowel signs,
/// pulli (virama) and the AU length mark.
inline constexpr std::array<CodeRange, 3> kTamilMarks{{
    {0x0BBE, 0x0BCC},
    {0x0BCD, 0x0BCD},
    {0x0BD7, 0x0BD7},
}};

inline bool in_ranges(char32_t cp, std::span<const CodeRange> ranges) noexcept {
  for (const auto& r : ranges) {
    if (cp >= r.first && cp <= r.last) return true;
  }
  return false;
}

inline bool is_tamil(char32_t cp) noexcept { return cp >= 0x0B80 && cp <= 0x0BFF; }

/// Text split into user-perceived characters.
struct GraphemeSeq {
  std::vector<std::string> clusters;
  bool leading_mark = false;  // first cluster starts with a combining mark

  std::size_t size() const noexcept { return clusters.size(); }
  bool empty() const noexcept { return clusters.empty(); }

  std::string str() const {
    std::string out;
    for (const auto& c : clusters) out += c;
    return out;
  }

  /// Clusters [begin, end) concatenated.
  std::string slice(std::size_t begin, std::size_t end) const {
    std::string out;
    for (std::size_t i = begin; i < end; ++i) out += clusters[i];
    return out;
  }

  friend bool operator==(const GraphemeSeq&, const GraphemeSeq&) = default;
};

/// Marks attach to the preceding cluster; everything else starts a new one.
inline GraphemeSeq split_graphemes(std::string_view text,
                                   std::span<const CodeRange> marks = kTamilMarks) {
  GraphemeSeq seq;
  for (const auto& cp : utf8::decode(text)) {
    const auto unit = text.substr(cp.offset, cp.length);
    if (in_ranges(cp.value, marks)) {
      if (seq.clusters.empty()) {
        seq.leading_mark = true;
        seq.clusters.emplace_back(unit);
      } else {
        seq.clusters.back() += unit;
      }
    } else {
      seq.clusters.emplace_back(unit);
    }
  }
  return seq;
}

/// Strips marks from Tamil clusters, leaving the base letter.
inline GraphemeSeq normalize_base(const GraphemeSeq& seq,
                                  std::span<const CodeRange> marks = kTamilMarks) {
  GraphemeSeq out;
  out.leading_mark = seq.leading_mark;
  out.clusters.reserve(seq.size());
  for (const auto& cluster : seq.clusters) {
    const auto cps = utf8::decode(cluster);
    const bool strip = !cps.empty() && is_tamil(cps.front().value) &&
                       !in_ranges(cps.front().value, marks);
    out.clusters.push_back(strip ? cluster.substr(0, cps.front().length) : cluster);
  }
  return out;
}

/// Dictionary over grapheme sequences, stored as a trie.
class Lexicon {
 public:
  /// Returns false if the word was already present. Empty words are rejected.
  bool insert(const GraphemeSeq& word) {
    if (word.empty()) throw ConfigError("lexicon: empty word");
    std::size_t node = 0;
    for (const auto& c : word.clusters) {
      auto it = nodes_[node].children.find(c);
      if (it == nodes_[node].children.end()) {
        nodes_.emplace_back();
        it = nodes_[node].children.emplace(c, nodes_.size() - 1).first;
      }
      node = it->second;
    }
    if (nodes_[node].terminal) return false;
    nodes_[node].terminal = true;
    ++size_;
    return true;
  }

  bool contains(const GraphemeSeq& word) const {
    if (word.empty()) return false;
    std::size_t node = 0;
    for (const auto& c : word.clusters) {
      auto it = nodes_[node].children.find(c);
      if (it == nodes_[node].children.end()) return false;
      node = it->second;
    }
    return nodes_[node].terminal;
  }

  bool contains(std::string_view word) const { return contains(split_graphemes(word)); }

  /// End indices e such that clusters [begin, e) form a word, ascending.
  std::vector<std::size_t> words_from(const GraphemeSeq& text, std::size_t begin) const {
    std::vector<std::size_t> ends;
    std::size_t node = 0;
    for (std::size_t i = begin; i < text.size(); ++i) {
      auto it = nodes_[node].children.find(text.clusters[i]);
      if (it == nodes_[node].children.end()) break;
      node = it->second;
      if (nodes_[node].terminal) ends.push_back(i + 1);
    }
    return ends;
  }

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }

 private:
  struct Node {
    std::map<std::string, std::size_t, std::less<>> children;
    bool terminal = false;
  };
  std::vector<Node> nodes_ = std::vector<Node>(1);
  std::size_t size_ = 0;
};

inline Lexicon build_lexicon(std::span<const std::string> words) {
  Lexicon lex;
  for (const auto& w : words) lex.insert(split_graphemes(w));
  return lex;
}

inline Lexicon build_lexicon(std::initializer_list<std::string> words) {
  return build_lexicon(std::span<const std::string>(words.begin(), words.size()));
}

/// One word per line; `#` starts a comment line; blank lines are skipped.
inline Lexicon parse_lexicon(std::string_view text) {
  std::vector<std::string> words;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);
    if (line.front() == '#') continue;
    if (!utf8::valid(line)) throw ParseError(line_no, "invalid UTF-8");
    words.emplace_back(line);
  }
  return build_lexicon(words);
}

enum class PieceKind { lexicon, oov };

struct Piece {
  std::size_t begin;  // cluster index, inclusive
  std::size_t end;    // exclusive
  PieceKind kind;

  friend bool operator==(const Piece&, const Piece&) = default;
};

/// Lexicographic: out-of-vocabulary clusters first, then piece count.
struct SegmentCost {
  std::size_t oov = 0;
  std::size_t pieces = 0;

  friend auto operator<=>(const SegmentCost&, const SegmentCost&) = default;
  SegmentCost operator+(const SegmentCost& o) const { return {oov + o.oov, pieces + o.pieces}; }
};

struct Segmentation {
  std::vector<Piece> pieces;
  SegmentCost cost;

  /// Interior cut positions, ascending.
  std::vector<std::size_t> boundaries() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i < pieces.size(); ++i) out.push_back(pieces[i].begin);
    return out;
  }
};

/// Minimum-cost split into lexicon words and maximal out-of-vocabulary runs.
/// Among equal costs the boundary list that is lexicographically smallest
/// wins. Dynamic programme over suffixes; lexicon hits come from trie walks.
inline Segmentation word_break(const GraphemeSeq& text, const Lexicon& lex) {
  const std::size_t n = text.size();
  constexpr SegmentCost kInf{std::numeric_limits<std::size_t>::max() / 4,
                             std::numeric_limits<std::size_t>::max() / 4};

  std::vector<std::vector<std::size_t>> ends(n);
  for (std::size_t i = 0; i < n; ++i) ends[i] = lex.words_from(text, i);

  // best[i][open]: cheapest split of [i, n) when an oov run may start at i
  // (open = 1) or may not because the previous piece already was one (open = 0).
  // run[i]: cheapest split of [i, n) that begins with an oov run.
  std::vector<std::array<SegmentCost, 2>> best(n + 1);
  std::vector<SegmentCost> run(n + 1, kInf);
  best[n] = {SegmentCost{}, SegmentCost{}};
  for (std::size_t i = n; i-- > 0;) {
    SegmentCost word = kInf;
    for (auto e : ends[i]) word = std::min(word, SegmentCost{0, 1} + best[e][1]);
    run[i] = std::min(SegmentCost{1, 1} + best[i + 1][0], run[i + 1] + SegmentCost{1, 0});
    best[i][0] = word;
    best[i][1] = std::min(word, run[i]);
  }

  Segmentation seg;
  seg.cost = best[0][1];
  std::size_t i = 0;
  bool open = true;
  while (i < n) {
    const SegmentCost target = best[i][open ? 1 : 0];
    const auto& word_ends = ends[i];
    auto w = word_ends.begin();
    bool placed = false;
    for (std::size_t e = i + 1; e <= n && !placed; ++e) {
      while (w != word_ends.end() && *w < e) ++w;
      if (w != word_ends.end() && *w == e && SegmentCost{0, 1} + best[e][1] == target) {
        seg.pieces.push_back({i, e, PieceKind::lexicon});
        i = e;
        open = true;
        placed = true;
      } else if (open && SegmentCost{e - i, 1} + best[e][0] == target) {
        seg.pieces.push_back({i, e, PieceKind::oov});
        i = e;
        open = false;
        placed = true;
      }
    }
    if (!placed) throw Error("word_break: inconsistent dynamic programme");  // unreachable
  }
  return seg;
}

/// Pieces joined by single spaces.
inline std::string render_spaced(const Segmentation& seg, const GraphemeSeq& text) {
  std::string out;
  for (std::size_t k = 0; k < seg.pieces.size(); ++k) {
    if (k) out += ' ';
    out += text.slice(seg.pieces[k].begin, seg.pieces[k].end);
  }
  return out;
}

/// Clusters the text, breaks it against the lexicon and re-joins with spaces.
inline std::string segment_text(std::string_view text, const Lexicon& lex) {
  const auto seq = split_graphemes(text);
  return render_spaced(word_break(seq, lex), seq);
}

}  // namespace epig
