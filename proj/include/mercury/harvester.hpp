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

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "mercury/catalog.hpp"
#include "mercury/http_client.hpp"
#include "mercury/record.hpp"

namespace mercury::harvest {

enum class SourceKind { OaiPmh, Directory, HttpListing };

std::string_view to_string(SourceKind kind) noexcept;
/// "oai-pmh", "directory", "http-listing".
std::optional<SourceKind> source_kind_from_string(std::string_view name) noexcept;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SourceDescriptor {
  std::string source_id;
  SourceKind kind = SourceKind::OaiPmh;
  std::string location;  // base URL, directory path or listing URL
  std::optional<std::string> metadata_prefix;
  std::optional<std::string> set;
  std::chrono::seconds interval = std::chrono::hours(1);
  bool enabled = true;
};

inline constexpr std::chrono::seconds kMinInterval = std::chrono::minutes(1);

/// Throws ConfigError on an empty id, a location-less source or an interval
/// under kMinInterval.
void validate(const SourceDescriptor& source);
/// Throws ConfigError on duplicate source ids as well.
void validate(const std::vector<SourceDescriptor>& sources);

SourceDescriptor source_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const SourceDescriptor& source);

struct HarvestState {
  std::string source_id;
  std::optional<Instant> last_success;
  std::optional<Instant> high_watermark;
  std::map<std::string, Fingerprint> known;
  std::size_t consecutive_failures = 0;

  friend bool operator==(const HarvestState&, const HarvestState&) = default;
};

nlohmann::ordered_json to_json(const HarvestState& state);
HarvestState state_from_json(const nlohmann::json& j);

/// One JSON file per source under a directory, replaced atomically.
class StateStore {
 public:
  explicit StateStore(std::filesystem::path directory);

  /// A fresh state when none was saved.
  HarvestState load(const std::string& source_id) const;
  void save(const HarvestState& state) const;
  std::filesystem::path path_for(const std::string& source_id) const;

 private:
  std::filesystem::path directory_;
};

enum class HarvestMode { Full, Incremental };
std::string_view to_string(HarvestMode mode) noexcept;

enum class Outcome { Success, SourceUnavailable };
std::string_view to_string(Outcome outcome) noexcept;

struct HarvestCounts {
  std::size_t fetched = 0;
  std::size_t added = 0;
  std::size_t updated = 0;
  std::size_t unchanged = 0;
  std::size_t deleted = 0;
  std::size_t failed = 0;
  /// Local records removed by a Full harvest because the provider no longer
  /// lists them. Not part of fetched.
  std::size_t purged = 0;

  friend bool operator==(const HarvestCounts&, const HarvestCounts&) = default;
};

struct HarvestReport {
  std::string source_id;
  HarvestMode mode = HarvestMode::Incremental;
  Outcome outcome = Outcome::Success;
  Instant started{};
  Instant finished{};
  HarvestCounts counts;
  std::vector<std::string> errors;
  bool watermark_advanced = false;
};

nlohmann::ordered_json to_json(const HarvestReport& report);

struct HarvestEnvironment {
  Catalog& catalog;
  net::HttpClient& http;
  net::RetryPolicy retry = {};
  std::function<Instant()> clock = now_utc;
  /// Called before each fetched record is applied, with its 0-based
  /// position. Test hook for interrupting a harvest part-way.
  std::function<void(std::size_t)> before_record;
};

struct HarvestResult {
  HarvestReport report;
  HarvestState state;
};

/// Pulls the source and applies the changes to the catalog. Failures to
/// reach or understand the provider produce Outcome::SourceUnavailable with
/// consecutive_failures incremented. The returned state is not persisted.
HarvestResult run_harvest(const SourceDescriptor& source, const HarvestState& state, HarvestMode mode,
                          HarvestEnvironment& env);

/// Appends one JSON line per report.
class AuditLog {
 public:
  explicit AuditLog(std::filesystem::path path) : path_(std::move(path)) {}
  void append(const HarvestReport& report);
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::mutex mutex_;
  std::filesystem::path path_;
};

/// Runs each enabled source at its interval. A source still running when it
/// falls due is skipped for that interval rather than queued.
class Scheduler {
 public:
  using Runner = std::function<void(const SourceDescriptor&)>;
  using Logger = std::function<void(const std::string& source_id, const std::string& event)>;

  /// With \p run_inline the runner executes inside tick(); otherwise each
  /// run gets its own thread.
  Scheduler(std::vector<SourceDescriptor> sources, Runner runner, bool run_inline = false, Logger logger = {});
  ~Scheduler();

  Scheduler(const Scheduler&) = delete;
  Scheduler& operator=(const Scheduler&) = delete;

  /// Starts every source due at \p now; returns the ids started.
  std::vector<std::string> tick(Instant now);
  /// Blocks until no run is in flight.
  void wait_idle();
  bool running(const std::string& source_id) const;

  /// Ticks once a second on the wall clock until \p stop is set.
  void loop(const std::atomic<bool>& stop);

 private:
  struct Slot {
    SourceDescriptor source;
    std::optional<Instant> next_due;
    bool running = false;
    std::thread thread;
  };

  std::vector<Slot> slots_;
  Runner runner_;
  bool run_inline_;
  Logger logger_;
  mutable std::mutex mutex_;
  std::condition_variable idle_;
  std::size_t in_flight_ = 0;
};

}  // namespace mercury::harvest
