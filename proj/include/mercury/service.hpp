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
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "mercury/catalog.hpp"
#include "mercury/config.hpp"
#include "mercury/harvester.hpp"
#include "mercury/http_client.hpp"

namespace httplib {
class Server;
}

namespace mercury::service {

using Params = std::vector<std::pair<std::string, std::string>>;

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

/// Stateless request handlers over the catalog's current snapshots.
class SearchService {
 public:
  SearchService(const ServiceConfig& config, Catalog& catalog);

  /// \p path is already percent-decoded; \p params keep their order.
  Response handle(std::string_view method, std::string_view path, const Params& params) const;

  /// Remembers the outcome for /healthz.
  void record_harvest(const harvest::HarvestReport& report);
  void record_last_success(const std::string& source_id, std::optional<Instant> when);

  /// Routes every path through handle(), adding CORS headers and writing
  /// one JSON line per request to \p request_log when it is non-null.
  void mount(httplib::Server& server, std::ostream* request_log);

 private:
  struct HarvestStatus {
    std::optional<Instant> last_success;
    std::optional<Instant> last_finished;
    std::string last_outcome;
  };

  Response search(const Params& params) const;
  Response record(std::string_view id) const;
  Response rss(const Params& params) const;
  Response opensearch() const;
  Response oai(const Params& params) const;
  Response healthz() const;

  const ServiceConfig& config_;
  Catalog& catalog_;
  oai::RepositoryConfig repository_;
  mutable std::mutex status_mutex_;
  std::map<std::string, HarvestStatus> status_;
  std::mutex log_mutex_;
};

/// Harvests a configured source with its persisted state, saves the new
/// state and appends the report to the audit log. Without an explicit mode
/// the first harvest is Full and later ones Incremental.
harvest::HarvestReport harvest_configured(const ServiceConfig& config, Catalog& catalog,
                                          const harvest::SourceDescriptor& source,
                                          std::optional<harvest::HarvestMode> mode, net::HttpClient& http);

/// A running service: record store, index, scheduler and HTTP server.
class Runtime {
 public:
  /// Opens the store and loads the index. Throws ConfigError when the data
  /// paths are not writable and StoreError when the store cannot be read.
  explicit Runtime(ServiceConfig config);
  ~Runtime();

  Runtime(const Runtime&) = delete;
  Runtime& operator=(const Runtime&) = delete;

  /// Binds the listening socket; returns the port. Throws std::runtime_error
  /// when the address is unavailable.
  int bind();
  /// Serves until stop(); starts the harvest scheduler when \p schedule.
  void serve(bool schedule = true);
  void stop();

  SearchService& service() noexcept { return *service_; }
  Catalog& catalog() noexcept { return *catalog_; }
  Index& index() noexcept { return *index_; }
  const ServiceConfig& config() const noexcept { return config_; }

  /// Saves the index snapshot next to the store sequence it reflects.
  void persist();

 private:
  void load_index();

  ServiceConfig config_;
  std::unique_ptr<RecordStore> store_;
  std::unique_ptr<Index> index_;
  std::unique_ptr<Catalog> catalog_;
  std::unique_ptr<SearchService> service_;
  std::unique_ptr<httplib::Server> server_;
  std::unique_ptr<std::ofstream> request_log_file_;
  std::unique_ptr<net::HttplibClient> http_;
  std::atomic<bool> stop_scheduler_{false};
  std::atomic<bool> stop_requested_{false};
  std::atomic<bool> serving_{false};
  bool bound_ = false;
  bool served_ = false;
  std::mutex harvest_mutex_;
};

}  // namespace mercury::service
