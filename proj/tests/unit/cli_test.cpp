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

#include <doctest.h>

#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>

#include <chrono>
#include <fstream>
#include <regex>
#include <thread>

#include "generators.hpp"
#include "golden.hpp"
#include "mercury/service.hpp"
#include "temp_dir.hpp"

extern char** environ;

using namespace mercury;
using json = nlohmann::json;
using mercury::testing::TempDir;

namespace {

struct Run {
  int status = -1;
  std::string out;
  std::string err;
};

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

Run mercury_cli(const std::string& args, const std::string& env = "") {
  TempDir io;
  std::string cmd = env + " " + quote(MERCURY_CLI) + " " + args + " >" + quote((io / "out").string()) + " 2>" +
                    quote((io / "err").string());
  int raw = std::system(cmd.c_str());
  Run r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = testing::read_file(io / "out");
  r.err = testing::read_file(io / "err");
  return r;
}

/// Writes a configuration whose data lives under \p dir.
std::filesystem::path write_config(const TempDir& dir, const json& extra) {
  json c = {{"port", 0}, {"bind", "127.0.0.1"}, {"data_dir", "data"}};
  if (!extra.is_null()) c.update(extra);
  auto path = dir / "mercury.json";
  std::ofstream(path) << c.dump(2);
  return path;
}

ServiceConfig config_for(const std::filesystem::path& path) { return load_config(path); }

/// A data provider served from this process.
struct Provider {
  TempDir dir;
  ServiceConfig config;
  std::unique_ptr<service::Runtime> runtime;
  std::thread thread;
  int port = 0;

  explicit Provider(int records) {
    config = config_for(write_config(dir, json::object()));
    runtime = std::make_unique<service::Runtime>(config);
    std::mt19937_64 rng(5);
    for (int i = 0; i < records; ++i) runtime->catalog().apply(testing::random_oai_dc_record(rng, i, "prov"));
    port = runtime->bind();
    thread = std::thread([this] { runtime->serve(false); });
  }
  ~Provider() {
    runtime->stop();
    thread.join();
  }
  std::string oai() const { return "http://127.0.0.1:" + std::to_string(port) + "/oai"; }
};

int free_port() {
  TempDir dir;
  auto config = config_for(write_config(dir, json::object()));
  service::Runtime probe(config);
  return probe.bind();
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(mercury_cli("").status == 2);
  CHECK(mercury_cli("frobnicate").status == 2);
  CHECK(mercury_cli("--help").status == 0);
  CHECK(mercury_cli("search x", "env -u MERCURY_CONFIG").status == 2);
  CHECK(mercury_cli("serve --config /nonexistent/mercury.json").status == 2);
}

TEST_CASE("harvest subcommand") {
  Provider provider(25);
  TempDir dir;
  auto cfg = write_config(dir, {{"sources", {{{"id", "prov"}, {"kind", "oai-pmh"}, {"location", provider.oai()}}}}});

  auto r = mercury_cli("--config " + quote(cfg.string()) + " harvest --source prov");
  CHECK(r.status == 0);
  auto report = json::parse(r.out);
  CHECK(report["added"] == 25);
  CHECK(report["outcome"] == "success");

  auto again = json::parse(mercury_cli("--config " + quote(cfg.string()) + " harvest --source prov").out);
  CHECK(again["mode"] == "incremental");
  CHECK(again["added"] == 0);

  CHECK(mercury_cli("--config " + quote(cfg.string()) + " harvest --source nope").status == 2);

  // Through the environment variable instead of --config.
  CHECK(mercury_cli("harvest --source prov --full", "MERCURY_CONFIG=" + quote(cfg.string())).status == 0);
}

TEST_CASE("harvest of an unreachable provider leaves the store alone") {
  TempDir dir;
  std::string down = "http://127.0.0.1:" + std::to_string(free_port()) + "/oai";
  auto cfg = write_config(dir, {{"sources", {{{"id", "gone"}, {"kind", "oai-pmh"}, {"location", down}}}}});
  auto r = mercury_cli("--config " + quote(cfg.string()) + " harvest --source gone");
  CHECK(r.status == 1);
  CHECK(json::parse(r.out)["outcome"] == "source_unavailable");
  service::Runtime runtime(config_for(cfg));
  CHECK(runtime.catalog().store().view()->live_count() == 0);
}

TEST_CASE("search subcommand") {
  TempDir dir;
  auto cfg = write_config(dir, json::object());
  auto search = [&](const std::string& args) { return mercury_cli("--config " + quote(cfg.string()) + " search " + args); };

  auto empty = search("eagles --json");
  CHECK(empty.status == 0);
  CHECK(json::parse(empty.out)["total"] == 0);

  {
    service::Runtime runtime(config_for(cfg));
    for (const auto& r : testing::eagles_corpus()) runtime.catalog().apply(r);
  }
  CHECK(json::parse(search("title:eagles --json").out)["total"] == 1);
  CHECK(json::parse(search("eagles --json").out)["total"] == 2);
  auto plain = search("title:eagles");
  CHECK(plain.status == 0);
  CHECK(plain.out.find("1 hits") == 0);
  CHECK(plain.out.find("music:eagles-1") != std::string::npos);

  auto bad = search(quote("soil AND (carbon"));
  CHECK(bad.status == 2);
  CHECK(bad.err.find("SyntaxError") != std::string::npos);
  CHECK(bad.err.find("offset") != std::string::npos);
  CHECK(search("eagles --bbox 181,0,10,10").status == 2);
  CHECK(search("eagles --bbox -180,-90,180,90 --start 1990 --end 2030 --json").status == 0);
}

TEST_CASE("crosswalk subcommand") {
  for (const auto& c : testing::golden_cases(MERCURY_FIXTURES_DIR)) {
    auto r = mercury_cli("crosswalk " + quote(c.xml_path.string()));
    CHECK_MESSAGE(r.status == 0, c.name);
    CHECK_MESSAGE(json::parse(r.out) == json::parse(testing::read_file(c.expected_path)), c.name);
  }
  TempDir dir;
  std::ofstream(dir / "unknown.xml") << "<catalog><item/></catalog>";
  std::ofstream(dir / "broken.xml") << "<metadata><idinfo>";
  auto unknown = mercury_cli("crosswalk " + quote((dir / "unknown.xml").string()));
  CHECK(unknown.status == 2);
  CHECK(unknown.err.find("UnknownSchema") != std::string::npos);
  auto broken = mercury_cli("crosswalk " + quote((dir / "broken.xml").string()));
  CHECK(broken.status == 2);
  CHECK(broken.err.find("MalformedXml") != std::string::npos);
  CHECK(mercury_cli("crosswalk " + quote((dir / "missing.xml").string())).status == 2);
}

TEST_CASE("federation subcommand") {
  TempDir dir;
  auto write = [&](const std::string& name, const std::string& body) {
    std::ofstream(dir / name) << body;
    return quote((dir / name).string());
  };
  auto three = json::parse(mercury_cli("federation " + write("a.json", R"([{"uptime":0.99,"latency":120},{"uptime":0.99,"latency":80},{"uptime":0.99,"latency":300}])")).out);
  CHECK(three["composite_uptime"].get<double>() == doctest::Approx(0.970299).epsilon(1e-12));
  CHECK(three["federated_latency_ms"] == 300.0);
  auto one = json::parse(mercury_cli("federation --processing 25 " + write("b.json", R"([{"uptime":1.0,"latency":50}])")).out);
  CHECK(one["federated_latency_ms"] == 75.0);
  CHECK(one["composite_uptime"] == 1.0);
  CHECK(mercury_cli("federation " + write("c.json", "[]")).status == 2);
  CHECK(mercury_cli("federation " + write("d.json", "{not json")).status == 2);
}

TEST_CASE("serve subcommand") {
  TempDir dir;
  int port = free_port();
  auto cfg = write_config(dir, {{"port", port}});
  auto err_path = (dir / "serve.err").string();
  std::string script = "exec " + quote(MERCURY_CLI) + " serve --config " + quote(cfg.string()) + " 2>" + quote(err_path);
  const char* argv[] = {"sh", "-c", script.c_str(), nullptr};
  pid_t pid = 0;
  REQUIRE(posix_spawn(&pid, "/bin/sh", nullptr, nullptr, const_cast<char**>(argv), environ) == 0);

  net::HttplibClient http(std::chrono::seconds(2));
  int health = 0;
  for (int i = 0; i < 100 && health != 200; ++i) {
    try {
      health = http.get("http://127.0.0.1:" + std::to_string(port) + "/healthz").status;
    } catch (const net::TransportError&) {
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
  }
  CHECK(health == 200);

  // The port is now occupied.
  TempDir other;
  auto clash = write_config(other, {{"port", port}});
  CHECK(mercury_cli("serve --config " + quote(clash.string())).status == 1);

  kill(pid, SIGTERM);
  int status = 0;
  waitpid(pid, &status, 0);
  CHECK(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == 0);
  CHECK(std::filesystem::exists(dir / "data"));
}
