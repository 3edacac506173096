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

#include <memory>
#include <mutex>
#include <string_view>

#include "mercury/index.hpp"
#include "mercury/record_store.hpp"

namespace mercury {

/// The record store and the search index behind a single writer lock. Each
/// write lands in the store first, then the index.
class Catalog {
 public:
  explicit Catalog(RecordStore& store, Index* index = nullptr) : store_(store), index_(index) {}

  /// Stores the record and mirrors it into the index; tombstones remove it.
  void apply(MetadataRecord record);
  /// Replaces the record with a tombstone if it is live.
  bool remove(std::string_view identifier, Instant datestamp);
  /// Loads every live store record into the index.
  void rebuild_index();

  RecordStore& store() noexcept { return store_; }
  const RecordStore& store() const noexcept { return store_; }
  Index* index() noexcept { return index_; }

 private:
  std::mutex write_mutex_;
  RecordStore& store_;
  Index* index_;
};

}  // namespace mercury
