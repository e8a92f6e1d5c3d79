// Copyright 2026 The schwinger-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "catch_amalgamated.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

struct Run {
  int rc = -1;
  std::string out, err;
};

fs::path scratch() {
  static int counter = 0;
  fs::path p = fs::temp_directory_path() / ("schwinger_pipeline_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run lab(const std::string& args, const fs::path& dir) {
  const char* exe = std::getenv("SCHWINGER_LAB");
  REQUIRE(exe != nullptr);
  std::string cmd = std::string("\"") + exe + "\" " + args + " >\"" + (dir / "stdout").string() + "\" 2>\"" +
                    (dir / "stderr").string() + "\"";
  int status = std::system(cmd.c_str());
  Run r;
  r.rc = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(dir / "stdout");
  r.err = slurp(dir / "stderr");
  return r;
}

void write_file(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

const char* kSmallSpectrum = R"({"L": 2, "n_max": 4, "e": [0.5, 1.0], "m": [0.1, 0.2], "theta": ["0", "pi"]})";

}  // namespace

TEST_CASE("spectrum run writes hashed CSV and a manifest", "[pipeline]") {
  auto dir = scratch();
  write_file(dir / "cfg.json", kSmallSpectrum);
  auto r = lab("spectrum --config \"" + (dir / "cfg.json").string() + "\" --out \"" + (dir / "o").string() + "\"", dir);
  REQUIRE(r.rc == 0);
  std::string csv = slurp(dir / "o" / "spectrum.csv");
  CHECK(csv.rfind("# schwinger_lab spectrum", 0) == 0);
  CHECK(csv.find("# config_hash ") != std::string::npos);
  CHECK(csv.find("L,theta_k,theta,e,m,n_max,E0,E1,gap\n") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3 + 8);

  // summaries on stdout, per-point lines on stderr
  CHECK(r.out.find("spectrum L=2 theta_k=0 points=4") != std::string::npos);
  CHECK(r.out.find("config_hash=") != std::string::npos);
  CHECK(r.out.find("[spectrum]") == std::string::npos);
  CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 8);

  auto m = nlohmann::json::parse(slurp(dir / "o" / "manifest.json"));
  REQUIRE(m["entries"].size() == 1);
  const auto& e = m["entries"][0];
  CHECK(e["command"] == "spectrum");
  CHECK(e["status"] == "complete");
  CHECK(e["files"] == nlohmann::json::array({"spectrum.csv"}));
  CHECK(e["config"]["n_max"] == 4);
  CHECK(csv.find(e["config_hash"].get<std::string>()) != std::string::npos);
  for (const char* k : {"timestamp", "artifact_version", "config_hash"}) CHECK(e.contains(k));
}

TEST_CASE("reruns are byte identical regardless of thread count", "[pipeline]") {
  auto dir = scratch();
  write_file(dir / "cfg.json", kSmallSpectrum);
  const std::string cfg = " --config \"" + (dir / "cfg.json").string() + "\"";
  REQUIRE(lab("spectrum" + cfg + " --jobs 1 --out \"" + (dir / "a").string() + "\"", dir).rc == 0);
  REQUIRE(lab("spectrum" + cfg + " --jobs 4 --out \"" + (dir / "b").string() + "\"", dir).rc == 0);
  CHECK(slurp(dir / "a" / "spectrum.csv") == slurp(dir / "b" / "spectrum.csv"));

  // rerunning into the same directory replaces the manifest entry
  REQUIRE(lab("spectrum" + cfg + " --out \"" + (dir / "a").string() + "\"", dir).rc == 0);
  auto m = nlohmann::json::parse(slurp(dir / "a" / "manifest.json"));
  CHECK(m["entries"].size() == 1);
}

TEST_CASE("flags override the config and change the hash", "[pipeline]") {
  auto dir = scratch();
  write_file(dir / "cfg.json", kSmallSpectrum);
  const std::string cfg = " --config \"" + (dir / "cfg.json").string() + "\"";
  REQUIRE(lab("spectrum" + cfg + " --out \"" + (dir / "a").string() + "\"", dir).rc == 0);
  REQUIRE(lab("spectrum" + cfg + " --set n_max=5 --seed 7 --out \"" + (dir / "b").string() + "\"", dir).rc == 0);
  auto a = nlohmann::json::parse(slurp(dir / "a" / "manifest.json"))["entries"][0];
  auto b = nlohmann::json::parse(slurp(dir / "b" / "manifest.json"))["entries"][0];
  CHECK(b["config"]["n_max"] == 5);
  CHECK(b["config"]["seed"] == 7);
  CHECK(a["config_hash"] != b["config_hash"]);
}

TEST_CASE("validation failures exit 1 with a structured error line", "[pipeline]") {
  auto dir = scratch();
  auto check_error = [&](const std::string& args, const std::string& code) {
    auto r = lab(args + " --out \"" + (dir / "o").string() + "\"", dir);
    CAPTURE(args, r.err);
    CHECK(r.rc == 1);
    CHECK(r.err.find("error: code=" + code + " class=validation message=\"") != std::string::npos);
  };
  check_error("spectrum --set L=0", "InvalidParams");
  check_error("spectrum --set bogus=1", "InvalidConfig");
  check_error("spectrum --set 'theta=\"pi/2\"' --set L=2 --set n_max=2", "InvalidSector");
  check_error("spectrum --set 'e=[]'", "InvalidGrid");
  check_error("spectrum --set seed=-3", "InvalidConfig");
  check_error("theta --set 'theta=\"0.3\"' --set 'L=[3]'", "InvalidSector");
  check_error("spectrum --jobs 0", "UsageError");
  write_file(dir / "broken.json", "{\"L\": ");
  check_error("spectrum --config \"" + (dir / "broken.json").string() + "\"", "InvalidConfig");
  CHECK_FALSE(fs::exists(dir / "o" / "spectrum.csv"));
}

TEST_CASE("numerical failures exit 2", "[pipeline]") {
  auto dir = scratch();
  // a single coupling leaves nothing to extrapolate
  auto r = lab("critical --set L=2 --set n_max=6 --set 'e=[0.5]' --out \"" + (dir / "o").string() + "\"", dir);
  CHECK(r.rc == 2);
  CHECK(r.err.find("error: code=DegenerateFit class=numerical") != std::string::npos);
}
