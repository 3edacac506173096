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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mercury/record.hpp"

namespace mercury {

class StoreError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StoredRecord {
  std::shared_ptr<const MetadataRecord> record;
  std::uint64_t created_seq = 0;  // sequence number of the first write
  std::uint64_t updated_seq = 0;  // sequence number of the latest write
};

/// Immutable point-in-time view of a RecordStore, ordered by identifier.
class StoreView {
 public:
  using Map = std::map<std::string, StoredRecord, std::less<>>;

  StoreView(Map entries, std::uint64_t seq);

  const Map& entries() const noexcept { return entries_; }
  std::uint64_t seq() const noexcept { return seq_; }
  const StoredRecord* find(std::string_view identifier) const;
  std::size_t live_count() const noexcept { return live_count_; }
  std::optional<Instant> earliest_datestamp() const noexcept { return earliest_; }

 private:
  Map entries_;
  std::uint64_t seq_;
  std::size_t live_count_ = 0;
  std::optional<Instant> earliest_;
};

/// Latest state of every record, deleted ones kept as tombstones.
///
/// On disk (when opened on a directory): `records.snapshot` holds the last
/// compaction in the snapshot format and `records.jsonl` is the append-only
/// log of puts since then, one canonical record JSON object per line. A torn
/// final log line left by a crash is discarded on open.
///
/// Thread-safe; writes are serialized internally.
class RecordStore {
 public:
  RecordStore();
  explicit RecordStore(const std::filesystem::path& directory);

  RecordStore(const RecordStore&) = delete;
  RecordStore& operator=(const RecordStore&) = delete;

  /// Validates, persists, then publishes. Throws RecordError on an invalid
  /// record and StoreError on I/O failure.
  void put(MetadataRecord record);

  std::shared_ptr<const MetadataRecord> get(std::string_view identifier) const;
  std::shared_ptr<const StoreView> view() const;
  std::size_t size() const;

  /// Rewrites the snapshot from current state and truncates the log.
  void compact();

  const std::optional<std::filesystem::path>& directory() const noexcept { return directory_; }
  /// True for in-memory stores, or when the directory accepts writes.
  bool writable() const;

  static constexpr const char* kLogName = "records.jsonl";
  static constexpr const char* kSnapshotName = "records.snapshot";

 private:
  void apply_locked(MetadataRecord record);
  void replay_log(const std::filesystem::path& log_path);

  mutable std::mutex mutex_;
  StoreView::Map entries_;
  std::uint64_t seq_ = 0;
  std::optional<std::filesystem::path> directory_;
  std::ofstream log_;
  mutable std::shared_ptr<const StoreView> cached_view_;
};

}  // namespace mercury
