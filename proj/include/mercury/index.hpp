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

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mercury/query.hpp"
#include "mercury/record.hpp"

namespace mercury {

inline constexpr double kBm25K1 = 1.2;
inline constexpr double kBm25B = 0.75;
inline constexpr std::size_t kMaxPageSize = 1000;
inline constexpr std::size_t kFacetLimit = 10;
inline constexpr std::size_t kSnippetLength = 200;

enum class FacetField { Source, Schema, Keywords };

std::string_view to_string(FacetField field) noexcept;
std::optional<FacetField> facet_from_string(std::string_view name) noexcept;

struct SearchOptions {
  std::size_t page = 0;
  std::size_t page_size = 10;
  std::vector<FacetField> facets;
};

struct SearchHit {
  std::string identifier;
  double score = 0;
  std::shared_ptr<const MetadataRecord> record;
  std::string snippet;  // abstract snippet
};

struct FacetCount {
  std::string value;
  std::size_t count = 0;
  friend bool operator==(const FacetCount&, const FacetCount&) = default;
};

struct SearchResult {
  std::size_t total_hits = 0;
  std::vector<SearchHit> hits;
  std::vector<std::pair<FacetField, std::vector<FacetCount>>> facets;
};

class SearchError : public std::runtime_error {
 public:
  enum class Code { PageOutOfRange };
  SearchError(Code code, const std::string& message) : std::runtime_error(message), code_(code) {}
  Code code() const noexcept { return code_; }

 private:
  Code code_;
};

/// First kSnippetLength code points of \p text, cut back to a word boundary
/// and ending in "…" when anything was dropped.
std::string make_snippet(std::string_view text, std::size_t length = kSnippetLength);

namespace detail {
struct Segment;
struct SegmentRef {
  std::shared_ptr<const Segment> segment;
  std::shared_ptr<const std::vector<std::uint8_t>> live;
  std::size_t live_count = 0;
};
}  // namespace detail

/// Immutable point-in-time view of an Index.
class IndexSnapshot {
 public:
  IndexSnapshot() = default;
  IndexSnapshot(std::vector<detail::SegmentRef> segments, std::size_t live_docs,
                std::array<std::uint64_t, kFieldCount> total_lengths);

  /// Throws SearchError(PageOutOfRange) when page_size is outside
  /// [1, kMaxPageSize].
  SearchResult search(const Query& query, const SearchOptions& options) const;
  /// Identifiers of every matching record, ascending.
  std::vector<std::string> matching_identifiers(const Query& query) const;

  std::size_t size() const noexcept { return live_docs_; }
  /// Visits live records in unspecified order.
  void for_each_record(const std::function<void(const std::shared_ptr<const MetadataRecord>&)>& fn) const;
  std::size_t segment_count() const noexcept { return segments_.size(); }

  const std::vector<detail::SegmentRef>& segments() const noexcept { return segments_; }
  std::uint64_t total_length(IndexedField f) const noexcept {
    return total_lengths_[static_cast<std::size_t>(f)];
  }

 private:
  struct Match;
  std::vector<Match> evaluate(const Query& query) const;

  std::vector<detail::SegmentRef> segments_;
  std::size_t live_docs_ = 0;
  std::array<std::uint64_t, kFieldCount> total_lengths_{};
};

/// In-memory inverted index built from immutable segments. Writers are
/// serialized; snapshot() never waits for a writer.
class Index {
 public:
  Index();
  ~Index();
  Index(const Index&) = delete;
  Index& operator=(const Index&) = delete;

  /// A deleted record is treated as remove(identifier).
  void upsert(MetadataRecord record);
  void upsert(std::shared_ptr<const MetadataRecord> record);
  /// Publishes the whole batch as one change; later duplicates win.
  void upsert_batch(std::vector<std::shared_ptr<const MetadataRecord>> records);
  /// Swaps the whole contents for \p records in one published change.
  void replace_all(std::vector<std::shared_ptr<const MetadataRecord>> records);
  /// No-op for unknown identifiers.
  void remove(std::string_view identifier);
  void clear();

  std::shared_ptr<const IndexSnapshot> snapshot() const;
  SearchResult search(const Query& query, const SearchOptions& options) const {
    return snapshot()->search(query, options);
  }
  std::size_t size() const { return snapshot()->size(); }

 private:
  struct Location {
    const detail::Segment* segment;
    std::uint32_t ordinal;
  };

  void batch_locked(std::vector<std::shared_ptr<const MetadataRecord>> records);
  void clear_locked();
  void add_segment_locked(std::vector<std::shared_ptr<const MetadataRecord>> records);
  void remove_locked(std::string_view identifier);
  void merge_locked();
  void publish_locked();

  std::mutex write_mutex_;
  std::vector<detail::SegmentRef> segments_;
  std::size_t live_docs_ = 0;
  std::array<std::uint64_t, kFieldCount> total_lengths_{};
  std::unordered_map<std::string, Location> locations_;

  mutable std::mutex publish_mutex_;
  std::shared_ptr<const IndexSnapshot> published_;
};

/// Writes the live records in the snapshot file format.
void snapshot_save(const Index& index, const std::filesystem::path& path);
/// Replaces the index contents with the records in \p path. Throws
/// CorruptSnapshot.
void snapshot_load(Index& index, const std::filesystem::path& path);

}  // namespace mercury
