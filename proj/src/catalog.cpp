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

#include "mercury/catalog.hpp"

namespace mercury {

void Catalog::apply(MetadataRecord record) {
  std::lock_guard lock(write_mutex_);
  auto shared = std::make_shared<const MetadataRecord>(record);
  store_.put(std::move(record));
  if (index_ == nullptr) return;
  if (shared->deleted) {
    index_->remove(shared->identifier);
  } else {
    index_->upsert(std::move(shared));
  }
}

bool Catalog::remove(std::string_view identifier, Instant datestamp) {
  auto existing = store_.get(identifier);
  if (!existing || existing->deleted) return false;
  apply(make_tombstone(*existing, datestamp));
  return true;
}

void Catalog::rebuild_index() {
  if (index_ == nullptr) return;
  std::lock_guard lock(write_mutex_);
  std::vector<std::shared_ptr<const MetadataRecord>> live;
  auto view = store_.view();
  live.reserve(view->live_count());
  for (const auto& [id, entry] : view->entries()) {
    if (!entry.record->deleted) live.push_back(entry.record);
  }
  index_->replace_all(std::move(live));
}

}  // namespace mercury
