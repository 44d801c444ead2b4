// Runs the cartan executable and checks exit codes, reports and determinism.

#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

#include "cartan/io.hpp"

using cartan::io::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int status = -1;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(CARTAN_CLI) + " " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

fs::path scratch() {
  const auto dir = fs::temp_directory_path() / "cartan_cli_tests";
  fs::create_directories(dir);
  return dir;
}

std::string write(const std::string& name, const json& j) {
  const auto p = scratch() / name;
  std::ofstream(p) << j.dump();
  return p.string();
}

json without_timings(std::string text) {
  json j = json::parse(text);
  j.erase("timings_ms");
  return j;
}

}  // namespace

TEST_CASE("sphere-counterexample reports all three parts") {
  const auto r = run("sphere-counterexample --n 12");
  CHECK(r.status == 0);
  const auto j = json::parse(r.out);
  CHECK(j.at("command") == "sphere-counterexample");
  REQUIRE(j.at("checks").size() >= 3);
  for (const auto& c : j.at("checks")) CHECK(c.at("pass") == true);
  CHECK(j.contains("timings_ms"));
  CHECK(j.contains("version"));
}

TEST_CASE("input errors exit with status 2") {
  CHECK(run("sphere-counterexample --n 7").status == 2);
  CHECK(run("").status == 2);
  CHECK(run("no-such-command").status == 2);
  CHECK(run("cover").status == 2);
  const auto bad = (scratch() / "bad.json").string();
  std::ofstream(bad) << "{\"version\": 1, \"d\": [[0, 1], [1 0]]}";
  CHECK(run("tightspan " + bad).status == 2);
  CHECK(run("tightspan " + write("asym.json", {{"version", 1}, {"d", {{0, 1}, {2, 0}}}})).status != 0);
  CHECK(run("tightspan " + write("extra.json", {{"version", 1}, {"d", {{0, 1}, {1, 0}}}, {"colour", 1}})).status == 2);
}

TEST_CASE("a failing check exits with status 1 and names its witness") {
  // v0, v4, v8 on C_12 are pairwise at distance 4: radius-2 balls meet in pairs only
  const auto fam = write("family.json", {{"version", 1},
                                         {"balls", {{{"center", "v0"}, {"radius", 2}},
                                                    {{"center", "v4"}, {"radius", 2}},
                                                    {{"center", "v8"}, {"radius", 2}}}}});
  const auto r = run("helly \"cycle(12)\" " + fam);
  CHECK(r.status == 1);
  const auto j = json::parse(r.out);
  bool found = false;
  for (const auto& c : j.at("checks"))
    if (c.at("property") == "intersection-nonempty") {
      found = true;
      CHECK(c.at("pass") == false);
      CHECK(c.at("residual").get<double>() == doctest::Approx(2.0));
    }
  CHECK(found);
}

TEST_CASE("tightspan, check and cover succeed on valid inputs") {
  const auto metric = write("four.json", {{"version", 1}, {"d", {{0, 3, 4, 3}, {3, 0, 3, 5}, {4, 3, 0, 3}, {3, 5, 3, 0}}}});
  CHECK(run("tightspan " + metric).status == 0);
  const auto plan = write("plan.json", {{"version", 1},
                                        {"t_grid", 3},
                                        {"pairs", {{{0, 0}, {1, 2}}, {{0.5, 0.25}, {2, 0}}}},
                                        {"quadruples", {{{0, 0}, {1, 1}, {0.5, 0}, {2, 1}}}}});
  CHECK(run("check \"linf(2)\" linear-chart --plan " + plan).status == 0);

  const auto dir = scratch() / "model";
  fs::remove_all(dir);
  fs::create_directories(dir);
  REQUIRE(run("--out " + dir.string() + " generate \"cycle(12)\"").status == 0);
  REQUIRE(fs::exists(dir / "atlas.json"));
  const auto r = run("cover " + (dir / "atlas.json").string() + " --base v0 --lmax 13 --target v0");
  CHECK(r.status == 0);
  CHECK(json::parse(r.out).at("witnesses").at("preimages") == 3);
}

TEST_CASE("reports are identical across runs apart from timings") {
  for (const char* args : {"sphere-counterexample --n 9", "validate \"rectangle(2,1)\""}) {
    CAPTURE(args);
    const auto a = run(args), b = run(args);
    CHECK(a.status == b.status);
    CHECK(without_timings(a.out).dump() == without_timings(b.out).dump());
  }
}
