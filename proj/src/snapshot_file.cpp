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

#include "mercury/snapshot_file.hpp"

#include <fstream>
#include <iterator>
#include <sstream>

#include <openssl/sha.h>

namespace mercury {

namespace fs = std::filesystem;

namespace {

void put_be(std::string& out, std::uint64_t v, int bytes) {
  for (int i = bytes - 1; i >= 0; --i) out += static_cast<char>((v >> (8 * i)) & 0xFF);
}

std::uint64_t get_be(std::string_view in, std::size_t pos, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v = (v << 8) | static_cast<std::uint8_t>(in[pos + i]);
  return v;
}

std::string sha256(std::string_view data) {
  std::string digest(SHA256_DIGEST_LENGTH, '\0');
  SHA256(reinterpret_cast<const unsigned char*>(data.data()), data.size(),
         reinterpret_cast<unsigned char*>(digest.data()));
  return digest;
}

constexpr std::size_t kHeaderSize = 8 + 4 + 8 + 32;

}  // namespace

void atomic_write_file(const fs::path& path, std::string_view contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

void write_snapshot(const fs::path& path, const std::vector<MetadataRecord>& records) {
  std::string body;
  for (const auto& r : records) {
    body += to_json_line(r);
    body += '\n';
  }
  std::string file;
  file.reserve(kHeaderSize + body.size());
  file.append(kSnapshotMagic);
  put_be(file, kSnapshotVersion, 4);
  put_be(file, body.size(), 8);
  file += sha256(body);
  file += body;
  atomic_write_file(path, file);
}

std::vector<MetadataRecord> read_snapshot(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorruptSnapshot("cannot open snapshot " + path.string());
  std::string file((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  if (file.size() < kHeaderSize) throw CorruptSnapshot("snapshot truncated in header");
  if (std::string_view(file).substr(0, 8) != kSnapshotMagic) {
    throw CorruptSnapshot("bad snapshot magic");
  }
  if (get_be(file, 8, 4) != kSnapshotVersion) throw CorruptSnapshot("unsupported snapshot version");
  std::uint64_t length = get_be(file, 12, 8);
  if (file.size() - kHeaderSize != length) throw CorruptSnapshot("snapshot body length mismatch");
  std::string_view body = std::string_view(file).substr(kHeaderSize);
  if (sha256(body) != std::string_view(file).substr(20, 32)) {
    throw CorruptSnapshot("snapshot checksum mismatch");
  }

  std::vector<MetadataRecord> records;
  std::size_t start = 0;
  while (start < body.size()) {
    auto end = body.find('\n', start);
    if (end == std::string_view::npos) throw CorruptSnapshot("snapshot body not newline-terminated");
    try {
      records.push_back(record_from_json(nlohmann::json::parse(body.substr(start, end - start))));
    } catch (const std::exception& e) {
      throw CorruptSnapshot(std::string("bad record in snapshot: ") + e.what());
    }
    start = end + 1;
  }
  return records;
}

}  // namespace mercury
