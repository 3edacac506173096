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

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mercury/record.hpp"

namespace mercury {

class CorruptSnapshot : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Snapshot layout (all integers big-endian):
///
///   magic    8 bytes  "MERCSNAP"
///   version  u32      1
///   length   u64      byte length of the body
///   checksum 32 bytes SHA-256 of the body
///   body     JSON lines, one record object per line
///
/// Written to a temporary sibling and renamed into place.
inline constexpr std::string_view kSnapshotMagic = "MERCSNAP";
inline constexpr std::uint32_t kSnapshotVersion = 1;

void write_snapshot(const std::filesystem::path& path, const std::vector<MetadataRecord>& records);

/// Throws CorruptSnapshot on bad magic, unknown version, truncation,
/// checksum mismatch, or an unparseable record line.
std::vector<MetadataRecord> read_snapshot(const std::filesystem::path& path);

/// Writes `contents` to a temporary file next to `path` and renames it.
void atomic_write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace mercury
