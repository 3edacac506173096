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

#include "mercury/record_store.hpp"

#include <iterator>

#include "mercury/snapshot_file.hpp"

namespace mercury {

namespace fs = std::filesystem;

StoreView::StoreView(Map entries, std::uint64_t seq) : entries_(std::move(entries)), seq_(seq) {
  for (const auto& [id, entry] : entries_) {
    if (!entry.record->deleted) ++live_count_;
    if (!earliest_ || entry.record->datestamp < *earliest_) earliest_ = entry.record->datestamp;
  }
}

const StoredRecord* StoreView::find(std::string_view identifier) const {
  auto it = entries_.find(identifier);
  return it == entries_.end() ? nullptr : &it->second;
}

RecordStore::RecordStore() = default;

RecordStore::RecordStore(const fs::path& directory) : directory_(directory) {
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw StoreError("cannot create record store directory " + directory.string());

  auto snapshot = directory / kSnapshotName;
  if (fs::exists(snapshot)) {
    for (auto& r : read_snapshot(snapshot)) apply_locked(std::move(r));
  }
  replay_log(directory / kLogName);

  log_.open(directory / kLogName, std::ios::binary | std::ios::app);
  if (!log_) throw StoreError("cannot open record log in " + directory.string());
}

void RecordStore::replay_log(const fs::path& log_path) {
  if (!fs::exists(log_path)) return;
  std::ifstream in(log_path, std::ios::binary);
  std::string contents((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  std::size_t start = 0;
  std::size_t good_end = 0;
  while (start < contents.size()) {
    auto end = contents.find('\n', start);
    bool last = end == std::string::npos;
    std::string_view line(contents.data() + start, (last ? contents.size() : end) - start);
    // A crash mid-append leaves at most one unterminated final line.
    if (last) break;
    try {
      apply_locked(record_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw StoreError("corrupt record log line at byte " + std::to_string(start) + ": " +
                       e.what());
    }
    good_end = end + 1;
    start = end + 1;
  }
  if (good_end < contents.size()) fs::resize_file(log_path, good_end);
}

void RecordStore::apply_locked(MetadataRecord record) {
  ++seq_;
  auto shared = std::make_shared<const MetadataRecord>(std::move(record));
  auto it = entries_.find(shared->identifier);
  if (it == entries_.end()) {
    std::string key = shared->identifier;
    entries_.emplace(std::move(key), StoredRecord{std::move(shared), seq_, seq_});
  } else {
    it->second.record = std::move(shared);
    it->second.updated_seq = seq_;
  }
  cached_view_.reset();
}

void RecordStore::put(MetadataRecord record) {
  if (auto why = validate(record); !why.empty()) {
    throw RecordError(RecordError::Code::InvalidRecord, why);
  }
  std::lock_guard lock(mutex_);
  if (log_.is_open()) {
    std::string line = to_json_line(record);
    line += '\n';
    log_.write(line.data(), static_cast<std::streamsize>(line.size()));
    log_.flush();
    if (!log_) throw StoreError("failed to append to record log");
  }
  apply_locked(std::move(record));
}

std::shared_ptr<const MetadataRecord> RecordStore::get(std::string_view identifier) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(identifier);
  return it == entries_.end() ? nullptr : it->second.record;
}

std::shared_ptr<const StoreView> RecordStore::view() const {
  std::lock_guard lock(mutex_);
  if (!cached_view_) cached_view_ = std::make_shared<const StoreView>(entries_, seq_);
  return cached_view_;
}

std::size_t RecordStore::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

void RecordStore::compact() {
  std::lock_guard lock(mutex_);
  if (!directory_) return;
  std::vector<MetadataRecord> records;
  records.reserve(entries_.size());
  for (const auto& [id, entry] : entries_) records.push_back(*entry.record);
  write_snapshot(*directory_ / kSnapshotName, records);
  log_.close();
  log_.open(*directory_ / kLogName, std::ios::binary | std::ios::trunc);
  if (!log_) throw StoreError("cannot reopen record log after compaction");
}

bool RecordStore::writable() const {
  if (!directory_) return true;
  // access(2) is meaningless for root, so probe with a real file.
  auto probe = *directory_ / ".write-probe";
  std::ofstream out(probe, std::ios::binary | std::ios::trunc);
  if (!out) return false;
  out.close();
  std::error_code ec;
  fs::remove(probe, ec);
  return true;
}

}  // namespace mercury
