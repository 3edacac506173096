// Copyright 2026 The Mercury Authors
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

#include "mercury/index.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "mercury/snapshot_file.hpp"
#include "mercury/text.hpp"

namespace mercury {

namespace detail {

struct Postings {
  std::vector<std::uint32_t> docs;
  std::vector<std::uint32_t> freqs;
  // Positional fields only: offset of each doc's run in `positions`.
  std::vector<std::uint32_t> pos_start;
  std::vector<std::uint32_t> positions;

  std::pair<const std::uint32_t*, const std::uint32_t*> positions_of(std::size_t i) const {
    std::size_t begin = pos_start[i];
    std::size_t end = i + 1 < pos_start.size() ? pos_start[i + 1] : positions.size();
    return {positions.data() + begin, positions.data() + end};
  }
};

struct Segment {
  std::vector<std::shared_ptr<const MetadataRecord>> docs;
  std::array<std::vector<std::uint32_t>, kFieldCount> lengths;
  std::array<std::unordered_map<std::string, Postings>, kFieldCount> terms;

  const Postings* find(IndexedField f, const std::string& token) const {
    const auto& map = terms[static_cast<std::size_t>(f)];
    auto it = map.find(token);
    return it == map.end() ? nullptr : &it->second;
  }
};

}  // namespace detail

using detail::Postings;
using detail::Segment;
using detail::SegmentRef;

namespace {

using Ords = std::vector<std::uint32_t>;

constexpr std::size_t fi(IndexedField f) { return static_cast<std::size_t>(f); }

void append_tokens(std::vector<std::pair<std::string, std::uint32_t>>& out,
                   const std::vector<std::string>& tokens, std::uint32_t& pos) {
  for (const auto& t : tokens) out.emplace_back(t, pos++);
}

void add_field(Segment& seg, IndexedField f, std::uint32_t ord,
               std::vector<std::pair<std::string, std::uint32_t>>& toks) {
  seg.lengths[fi(f)].push_back(static_cast<std::uint32_t>(toks.size()));
  std::stable_sort(toks.begin(), toks.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  auto& map = seg.terms[fi(f)];
  bool positional = is_positional(f);
  for (std::size_t i = 0; i < toks.size();) {
    std::size_t j = i;
    while (j < toks.size() && toks[j].first == toks[i].first) ++j;
    Postings& p = map[std::move(toks[i].first)];
    p.docs.push_back(ord);
    p.freqs.push_back(static_cast<std::uint32_t>(j - i));
    if (positional) {
      p.pos_start.push_back(static_cast<std::uint32_t>(p.positions.size()));
      for (std::size_t k = i; k < j; ++k) p.positions.push_back(toks[k].second);
    }
    i = j;
  }
}

std::shared_ptr<const Segment> build_segment(std::vector<std::shared_ptr<const MetadataRecord>> records) {
  auto seg = std::make_shared<Segment>();
  seg->docs = std::move(records);
  std::vector<std::pair<std::string, std::uint32_t>> toks;
  for (std::uint32_t ord = 0; ord < seg->docs.size(); ++ord) {
    const MetadataRecord& r = *seg->docs[ord];
    auto title = tokenize(r.title);
    auto abstract = tokenize(r.abstract);
    std::vector<std::vector<std::string>> keywords, authors;
    for (const auto& k : r.keywords) keywords.push_back(tokenize(k));
    for (const auto& a : r.authors) authors.push_back(tokenize(a));

    std::uint32_t pos = 0;
    toks.clear();
    append_tokens(toks, title, pos);
    append_tokens(toks, abstract, pos);
    for (const auto& k : keywords) append_tokens(toks, k, pos);
    for (const auto& a : authors) append_tokens(toks, a, pos);
    add_field(*seg, IndexedField::All, ord, toks);

    for (auto [field, lists] : {std::pair{IndexedField::Keywords, &keywords},
                                std::pair{IndexedField::Author, &authors}}) {
      pos = 0;
      toks.clear();
      for (const auto& l : *lists) append_tokens(toks, l, pos);
      add_field(*seg, field, ord, toks);
    }
    for (auto [field, tokens] :
         {std::pair{IndexedField::Title, &title}, std::pair{IndexedField::Abstract, &abstract}}) {
      pos = 0;
      toks.clear();
      append_tokens(toks, *tokens, pos);
      add_field(*seg, field, ord, toks);
    }
    auto source = tokenize(r.source_id);
    auto schema = tokenize(to_string(r.schema));
    for (auto [field, tokens] :
         {std::pair{IndexedField::Source, &source}, std::pair{IndexedField::Schema, &schema}}) {
      pos = 0;
      toks.clear();
      append_tokens(toks, *tokens, pos);
      add_field(*seg, field, ord, toks);
    }
  }
  return seg;
}

Ords intersect(const Ords& a, const Ords& b) {
  Ords out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

Ords unite(const Ords& a, const Ords& b) {
  Ords out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

Ords subtract(const Ords& a, const Ords& b) {
  Ords out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

/// Matching live docs of one leaf in one segment, with per-doc frequency.
struct LeafList {
  Ords ords;
  std::vector<std::uint32_t> freqs;
};

bool contains_sorted(const std::uint32_t* begin, const std::uint32_t* end, std::uint32_t v) {
  return std::binary_search(begin, end, v);
}

class SegmentEvaluator {
 public:
  explicit SegmentEvaluator(const SegmentRef& ref) : seg_(*ref.segment), live_(*ref.live) {}

  LeafList leaf(const QueryNode& n) const {
    switch (n.kind) {
      case QueryNode::Kind::MatchAll: {
        LeafList out;
        out.ords = all_live();
        out.freqs.assign(out.ords.size(), 0);
        return out;
      }
      case QueryNode::Kind::Term: return term(n.field, n.tokens.front());
      case QueryNode::Kind::Phrase:
        return is_positional(n.field) ? positional_phrase(n) : value_phrase(n);
      default: return {};
    }
  }

  Ords all_live() const {
    Ords out;
    for (std::uint32_t i = 0; i < live_.size(); ++i) {
      if (live_[i]) out.push_back(i);
    }
    return out;
  }

  const Segment& segment() const { return seg_; }

 private:
  LeafList term(IndexedField f, const std::string& token) const {
    LeafList out;
    const Postings* p = seg_.find(f, token);
    if (p == nullptr) return out;
    for (std::size_t i = 0; i < p->docs.size(); ++i) {
      if (!live_[p->docs[i]]) continue;
      out.ords.push_back(p->docs[i]);
      out.freqs.push_back(p->freqs[i]);
    }
    return out;
  }

  std::vector<const Postings*> lists_for(const QueryNode& n) const {
    std::vector<const Postings*> lists;
    for (const auto& t : n.tokens) {
      const Postings* p = seg_.find(n.field, t);
      if (p == nullptr) return {};
      lists.push_back(p);
    }
    return lists;
  }

  // Walks the first token's postings and locates the doc in every other list.
  template <typename OnCandidate>
  void for_each_candidate(const std::vector<const Postings*>& lists, OnCandidate&& fn) const {
    std::vector<std::size_t> cursor(lists.size(), 0);
    const Postings& first = *lists.front();
    for (std::size_t i = 0; i < first.docs.size(); ++i) {
      std::uint32_t doc = first.docs[i];
      if (!live_[doc]) continue;
      bool all = true;
      for (std::size_t k = 1; k < lists.size() && all; ++k) {
        const auto& docs = lists[k]->docs;
        auto it = std::lower_bound(docs.begin() + static_cast<std::ptrdiff_t>(cursor[k]), docs.end(), doc);
        cursor[k] = static_cast<std::size_t>(it - docs.begin());
        all = it != docs.end() && *it == doc;
      }
      if (all) fn(doc, i, cursor);
    }
  }

  LeafList positional_phrase(const QueryNode& n) const {
    LeafList out;
    auto lists = lists_for(n);
    if (lists.empty()) return out;
    for_each_candidate(lists, [&](std::uint32_t doc, std::size_t i0, const std::vector<std::size_t>& at) {
      auto [b0, e0] = lists[0]->positions_of(i0);
      std::uint32_t count = 0;
      for (const std::uint32_t* p = b0; p != e0; ++p) {
        bool ok = true;
        for (std::size_t k = 1; k < lists.size() && ok; ++k) {
          auto [bk, ek] = lists[k]->positions_of(at[k]);
          ok = contains_sorted(bk, ek, *p + static_cast<std::uint32_t>(k));
        }
        if (ok) ++count;
      }
      if (count > 0) {
        out.ords.push_back(doc);
        out.freqs.push_back(count);
      }
    });
    return out;
  }

  LeafList value_phrase(const QueryNode& n) const {
    LeafList out;
    auto lists = lists_for(n);
    if (lists.empty()) return out;
    for_each_candidate(lists, [&](std::uint32_t doc, std::size_t, const std::vector<std::size_t>&) {
      std::uint32_t count = 0;
      for (auto v : field_values(*seg_.docs[doc], n.field)) {
        if (tokenize(v) == n.tokens) ++count;
      }
      if (count > 0) {
        out.ords.push_back(doc);
        out.freqs.push_back(count);
      }
    });
    return out;
  }

  const Segment& seg_;
  const std::vector<std::uint8_t>& live_;
};

bool is_leaf(const QueryNode& n) {
  return n.kind == QueryNode::Kind::Term || n.kind == QueryNode::Kind::Phrase ||
         n.kind == QueryNode::Kind::MatchAll;
}

void collect_leaves(const QueryNode& n, bool positive, std::vector<const QueryNode*>& all,
                    std::vector<const QueryNode*>& scoring) {
  if (is_leaf(n)) {
    all.push_back(&n);
    if (positive) scoring.push_back(&n);
    return;
  }
  bool child_positive = positive && n.kind != QueryNode::Kind::Not;
  for (const auto& c : n.children) collect_leaves(c, child_positive, all, scoring);
}

using LeafTable = std::unordered_map<const QueryNode*, LeafList>;

Ords eval(const QueryNode& n, const LeafTable& leaves, const SegmentEvaluator& ev) {
  switch (n.kind) {
    case QueryNode::Kind::Term:
    case QueryNode::Kind::Phrase:
    case QueryNode::Kind::MatchAll: return leaves.at(&n).ords;
    case QueryNode::Kind::Not: return subtract(ev.all_live(), eval(n.children.front(), leaves, ev));
    case QueryNode::Kind::Or: {
      Ords acc;
      for (const auto& c : n.children) acc = unite(acc, eval(c, leaves, ev));
      return acc;
    }
    case QueryNode::Kind::And: {
      std::optional<Ords> acc;
      for (const auto& c : n.children) {
        if (c.kind == QueryNode::Kind::Not) continue;
        auto part = eval(c, leaves, ev);
        acc = acc ? intersect(*acc, part) : std::move(part);
        if (acc->empty()) return {};
      }
      if (!acc) acc = ev.all_live();
      for (const auto& c : n.children) {
        if (c.kind != QueryNode::Kind::Not) continue;
        acc = subtract(*acc, eval(c.children.front(), leaves, ev));
      }
      return *acc;
    }
  }
  return {};
}

bool passes_filters(const MetadataRecord& r, const Query& q) {
  if (q.spatial) {
    if (!r.bbox || !spatial_match(*r.bbox, q.spatial->box, q.spatial->relation)) return false;
  }
  if (q.temporal) {
    if (!r.temporal || !temporal_match(*r.temporal, q.temporal->start, q.temporal->end)) return false;
  }
  return true;
}

std::vector<FacetCount> top_facets(std::unordered_map<std::string_view, std::size_t>& counts) {
  std::vector<FacetCount> out;
  out.reserve(counts.size());
  for (const auto& [v, c] : counts) out.push_back({std::string(v), c});
  auto cmp = [](const FacetCount& a, const FacetCount& b) {
    return a.count != b.count ? a.count > b.count : a.value < b.value;
  };
  std::size_t keep = std::min(kFacetLimit, out.size());
  std::partial_sort(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(keep), out.end(), cmp);
  out.resize(keep);
  return out;
}

}  // namespace

std::string_view to_string(FacetField field) noexcept {
  switch (field) {
    case FacetField::Source: return "source";
    case FacetField::Schema: return "schema";
    case FacetField::Keywords: return "keywords";
  }
  return "?";
}

std::optional<FacetField> facet_from_string(std::string_view name) noexcept {
  for (auto f : {FacetField::Source, FacetField::Schema, FacetField::Keywords}) {
    if (text::iequals(name, to_string(f))) return f;
  }
  return std::nullopt;
}

std::string make_snippet(std::string_view input, std::size_t length) {
  auto cps = text::decode_utf8(input);
  if (cps.size() <= length) return std::string(input);
  std::size_t cut = length;
  for (std::size_t k = length; k > 0; --k) {
    if (cps[k] < 0x80 && text::is_space(static_cast<char>(cps[k]))) {
      cut = k;
      break;
    }
  }
  while (cut > 0 && cps[cut - 1] < 0x80 && text::is_space(static_cast<char>(cps[cut - 1]))) --cut;
  std::string out;
  for (std::size_t i = 0; i < cut; ++i) text::append_utf8(out, cps[i]);
  out += "…";
  return out;
}

struct IndexSnapshot::Match {
  const std::shared_ptr<const MetadataRecord>* record;
  double score;
};

IndexSnapshot::IndexSnapshot(std::vector<SegmentRef> segments, std::size_t live_docs,
                             std::array<std::uint64_t, kFieldCount> total_lengths)
    : segments_(std::move(segments)), live_docs_(live_docs), total_lengths_(total_lengths) {}

std::vector<IndexSnapshot::Match> IndexSnapshot::evaluate(const Query& query) const {
  std::vector<const QueryNode*> leaves, scoring;
  collect_leaves(query.root, true, leaves, scoring);

  std::vector<SegmentEvaluator> evaluators;
  std::vector<LeafTable> tables(segments_.size());
  std::unordered_map<const QueryNode*, std::size_t> df;
  for (std::size_t s = 0; s < segments_.size(); ++s) {
    evaluators.emplace_back(segments_[s]);
    for (const QueryNode* leaf : leaves) {
      auto list = evaluators[s].leaf(*leaf);
      df[leaf] += list.ords.size();
      tables[s].emplace(leaf, std::move(list));
    }
  }

  const double n = static_cast<double>(live_docs_);
  std::vector<double> idf(scoring.size()), avgdl(scoring.size());
  for (std::size_t i = 0; i < scoring.size(); ++i) {
    double d = static_cast<double>(df[scoring[i]]);
    idf[i] = std::log(1.0 + (n - d + 0.5) / (d + 0.5));
    avgdl[i] = n > 0 ? static_cast<double>(total_lengths_[fi(scoring[i]->field)]) / n : 0.0;
  }

  std::vector<Match> out;
  for (std::size_t s = 0; s < segments_.size(); ++s) {
    const Segment& seg = *segments_[s].segment;
    Ords hits = eval(query.root, tables[s], evaluators[s]);
    if (query.spatial || query.temporal) {
      std::erase_if(hits, [&](std::uint32_t ord) { return !passes_filters(*seg.docs[ord], query); });
    }
    std::vector<double> scores(hits.size(), 0.0);
    // Leaf-major accumulation keeps the per-document summation order equal
    // to the leaf order.
    for (std::size_t li = 0; li < scoring.size(); ++li) {
      const QueryNode& leaf = *scoring[li];
      const LeafList& list = tables[s].at(&leaf);
      const auto& lengths = seg.lengths[fi(leaf.field)];
      std::size_t j = 0;
      for (std::size_t h = 0; h < hits.size(); ++h) {
        while (j < list.ords.size() && list.ords[j] < hits[h]) ++j;
        if (j == list.ords.size()) break;
        if (list.ords[j] != hits[h]) continue;
        if (leaf.kind == QueryNode::Kind::MatchAll) {
          scores[h] += 1.0;
          continue;
        }
        double tf = list.freqs[j];
        double dl = lengths[hits[h]];
        scores[h] += idf[li] * tf * (kBm25K1 + 1.0) /
                     (tf + kBm25K1 * (1.0 - kBm25B + kBm25B * dl / avgdl[li]));
      }
    }
    for (std::size_t h = 0; h < hits.size(); ++h) out.push_back({&seg.docs[hits[h]], scores[h]});
  }
  return out;
}

SearchResult IndexSnapshot::search(const Query& query, const SearchOptions& options) const {
  if (options.page_size < 1 || options.page_size > kMaxPageSize) {
    throw SearchError(SearchError::Code::PageOutOfRange,
                      "page_size must be between 1 and " + std::to_string(kMaxPageSize));
  }
  auto matches = evaluate(query);
  SearchResult result;
  result.total_hits = matches.size();

  std::vector<FacetField> seen;
  for (FacetField f : options.facets) {
    if (std::find(seen.begin(), seen.end(), f) != seen.end()) continue;
    seen.push_back(f);
    std::unordered_map<std::string_view, std::size_t> counts;
    for (const auto& m : matches) {
      const MetadataRecord& r = **m.record;
      switch (f) {
        case FacetField::Source: ++counts[r.source_id]; break;
        case FacetField::Schema: ++counts[to_string(r.schema)]; break;
        case FacetField::Keywords:
          for (const auto& k : r.keywords) ++counts[k];
          break;
      }
    }
    result.facets.emplace_back(f, top_facets(counts));
  }

  // Deep pages are legal; anything past the end is simply empty.
  if (options.page >= (matches.size() + options.page_size - 1) / options.page_size) return result;
  std::size_t begin = options.page * options.page_size;
  std::size_t end = std::min(matches.size(), begin + options.page_size);
  auto cmp = [](const Match& a, const Match& b) {
    if (a.score != b.score) return a.score > b.score;
    return (*a.record)->identifier < (*b.record)->identifier;
  };
  std::partial_sort(matches.begin(), matches.begin() + static_cast<std::ptrdiff_t>(end), matches.end(), cmp);
  for (std::size_t i = begin; i < end; ++i) {
    const auto& rec = *matches[i].record;
    result.hits.push_back({rec->identifier, matches[i].score, rec, make_snippet(rec->abstract)});
  }
  return result;
}

std::vector<std::string> IndexSnapshot::matching_identifiers(const Query& query) const {
  std::vector<std::string> ids;
  for (const auto& m : evaluate(query)) ids.push_back((*m.record)->identifier);
  std::sort(ids.begin(), ids.end());
  return ids;
}

void IndexSnapshot::for_each_record(
    const std::function<void(const std::shared_ptr<const MetadataRecord>&)>& fn) const {
  for (const auto& ref : segments_) {
    for (std::size_t i = 0; i < ref.segment->docs.size(); ++i) {
      if ((*ref.live)[i]) fn(ref.segment->docs[i]);
    }
  }
}

Index::Index() : published_(std::make_shared<const IndexSnapshot>()) {}
Index::~Index() = default;

void Index::upsert(MetadataRecord record) {
  upsert(std::make_shared<const MetadataRecord>(std::move(record)));
}

void Index::upsert(std::shared_ptr<const MetadataRecord> record) {
  std::lock_guard lock(write_mutex_);
  remove_locked(record->identifier);
  if (!record->deleted) add_segment_locked({std::move(record)});
  publish_locked();
}

void Index::upsert_batch(std::vector<std::shared_ptr<const MetadataRecord>> records) {
  std::lock_guard lock(write_mutex_);
  batch_locked(std::move(records));
  publish_locked();
}

void Index::replace_all(std::vector<std::shared_ptr<const MetadataRecord>> records) {
  std::lock_guard lock(write_mutex_);
  clear_locked();
  batch_locked(std::move(records));
  publish_locked();
}

void Index::remove(std::string_view identifier) {
  std::lock_guard lock(write_mutex_);
  if (locations_.find(std::string(identifier)) == locations_.end()) return;
  remove_locked(identifier);
  publish_locked();
}

void Index::clear() {
  std::lock_guard lock(write_mutex_);
  clear_locked();
  publish_locked();
}

void Index::batch_locked(std::vector<std::shared_ptr<const MetadataRecord>> records) {
  std::unordered_map<std::string_view, std::size_t> last;
  for (std::size_t i = 0; i < records.size(); ++i) last[records[i]->identifier] = i;
  std::vector<std::shared_ptr<const MetadataRecord>> fresh;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (last[records[i]->identifier] != i) continue;
    remove_locked(records[i]->identifier);
    if (!records[i]->deleted) fresh.push_back(records[i]);
  }
  add_segment_locked(std::move(fresh));
}

void Index::clear_locked() {
  segments_.clear();
  locations_.clear();
  live_docs_ = 0;
  total_lengths_ = {};
}

std::shared_ptr<const IndexSnapshot> Index::snapshot() const {
  std::lock_guard lock(publish_mutex_);
  return published_;
}

void Index::add_segment_locked(std::vector<std::shared_ptr<const MetadataRecord>> records) {
  if (records.empty()) return;
  auto seg = build_segment(std::move(records));
  for (std::uint32_t i = 0; i < seg->docs.size(); ++i) {
    locations_[seg->docs[i]->identifier] = {seg.get(), i};
    for (std::size_t f = 0; f < kFieldCount; ++f) total_lengths_[f] += seg->lengths[f][i];
  }
  live_docs_ += seg->docs.size();
  auto live = std::make_shared<const std::vector<std::uint8_t>>(seg->docs.size(), 1);
  segments_.push_back({std::move(seg), std::move(live), 0});
  segments_.back().live_count = segments_.back().segment->docs.size();
  merge_locked();
}

void Index::remove_locked(std::string_view identifier) {
  auto it = locations_.find(std::string(identifier));
  if (it == locations_.end()) return;
  auto [segment, ordinal] = it->second;
  locations_.erase(it);
  for (auto& ref : segments_) {
    if (ref.segment.get() != segment) continue;
    auto live = std::make_shared<std::vector<std::uint8_t>>(*ref.live);
    (*live)[ordinal] = 0;
    ref.live = std::move(live);
    --ref.live_count;
    break;
  }
  --live_docs_;
  for (std::size_t f = 0; f < kFieldCount; ++f) total_lengths_[f] -= segment->lengths[f][ordinal];
}

void Index::merge_locked() {
  std::erase_if(segments_, [](const SegmentRef& r) { return r.live_count == 0; });
  // Binary-counter policy: live sizes stay strictly decreasing, so there are
  // at most log2(n) segments and each document is rebuilt O(log n) times.
  while (segments_.size() >= 2 &&
         segments_[segments_.size() - 2].live_count <= segments_.back().live_count) {
    std::vector<std::shared_ptr<const MetadataRecord>> records;
    for (std::size_t k = segments_.size() - 2; k < segments_.size(); ++k) {
      const auto& ref = segments_[k];
      for (std::size_t i = 0; i < ref.segment->docs.size(); ++i) {
        if ((*ref.live)[i]) records.push_back(ref.segment->docs[i]);
      }
    }
    segments_.resize(segments_.size() - 2);
    auto seg = build_segment(std::move(records));
    for (std::uint32_t i = 0; i < seg->docs.size(); ++i) {
      locations_[seg->docs[i]->identifier] = {seg.get(), i};
    }
    auto live = std::make_shared<const std::vector<std::uint8_t>>(seg->docs.size(), 1);
    std::size_t count = seg->docs.size();
    segments_.push_back({std::move(seg), std::move(live), count});
  }
}

void Index::publish_locked() {
  auto snap = std::make_shared<const IndexSnapshot>(segments_, live_docs_, total_lengths_);
  std::lock_guard lock(publish_mutex_);
  published_ = std::move(snap);
}

void snapshot_save(const Index& index, const std::filesystem::path& path) {
  std::vector<MetadataRecord> records;
  index.snapshot()->for_each_record([&](const auto& r) { records.push_back(*r); });
  std::sort(records.begin(), records.end(),
            [](const MetadataRecord& a, const MetadataRecord& b) { return a.identifier < b.identifier; });
  write_snapshot(path, records);
}

void snapshot_load(Index& index, const std::filesystem::path& path) {
  auto records = read_snapshot(path);
  std::vector<std::shared_ptr<const MetadataRecord>> shared;
  shared.reserve(records.size());
  for (auto& r : records) shared.push_back(std::make_shared<const MetadataRecord>(std::move(r)));
  index.replace_all(std::move(shared));
}

}  // namespace mercury
