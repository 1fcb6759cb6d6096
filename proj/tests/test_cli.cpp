#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path& work() {
  static const fs::path dir = [] {
    auto p = fs::temp_directory_path() / "fusemine_cli_test";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const auto log = work() / "stdout.txt";
  const std::string cmd = std::string(FUSEMINE_BIN) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string dir(const std::string& name) { return (work() / name).string(); }

// Synthesizes and preprocesses a default cohort once.
const std::string& prepared() {
  static const std::string p = [] {
    REQUIRE(run("synth --seed 3 --out " + dir("raw")).code == 0);
    REQUIRE(run("preprocess --seed 3 --input " + dir("raw") + " --out " + dir("prep")).code == 0);
    return dir("prep");
  }();
  return p;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("preprocessing writes both variants and is repeatable") {
  const auto& first = prepared();
  for (auto sub : {"numeric", "discretized", "fused"}) CHECK(fs::is_directory(fs::path(first) / sub));
  CHECK(fs::is_regular_file(fs::path(first) / "params.json"));
  REQUIRE(run("preprocess --seed 3 --input " + dir("raw") + " --out " + dir("prep2")).code == 0);
  for (const auto& entry : fs::recursive_directory_iterator(first)) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), first);
    CHECK(slurp(entry.path()) == slurp(fs::path(dir("prep2")) / rel));
  }
}

TEST_CASE("input problems exit with 2") {
  prepared();
  fs::create_directories(dir("partial"));
  for (auto f : {"theory.csv", "practice.csv", "online.csv", "schema.json"})
    if (fs::exists(fs::path(dir("raw")) / f))
      fs::copy_file(fs::path(dir("raw")) / f, fs::path(dir("partial")) / f, fs::copy_options::overwrite_existing);
  CHECK(run("preprocess --input " + dir("partial") + " --out " + dir("bad")).code == 2);
  CHECK(run("explain " + dir("nowhere.json")).code == 2);
  CHECK(run("eval --k 1 --input " + prepared()).code == 2);
  CHECK(run("experiment --approach stacking --input " + prepared()).code == 2);
  CHECK(run("train --bogus-flag").code == 2);
}

TEST_CASE("the full grid writes eight tables") {
  const auto r = run("experiment --approach all --variant both --input " + prepared() + " --out " + dir("grid"));
  REQUIRE(r.code == 0);
  const auto csv = slurp(fs::path(dir("grid")) / "report.csv");
  CHECK(count_lines(csv) == 1 + 48);
  const auto tables = slurp(fs::path(dir("grid")) / "tables.txt");
  std::size_t avg = 0;
  for (auto pos = tables.find("Avg."); pos != std::string::npos; pos = tables.find("Avg.", pos + 1)) ++avg;
  // Four blocks, each with both variants on one Avg. line.
  CHECK(avg == 4);
  CHECK(r.out.find("best: ") != std::string::npos);

  REQUIRE(run("experiment --approach all --variant both --input " + prepared() + " --out " + dir("grid2")).code == 0);
  CHECK(slurp(fs::path(dir("grid2")) / "report.csv") == csv);
  CHECK(slurp(fs::path(dir("grid2")) / "tables.txt") == tables);
}

TEST_CASE("a single algorithm and approach gives a one-row table") {
  REQUIRE(run("experiment --algorithm c45 --approach merge --variant numeric --input " + prepared() + " --out " +
              dir("one"))
              .code == 0);
  const auto csv = slurp(fs::path(dir("one")) / "report.csv");
  CHECK(count_lines(csv) == 2);
  CHECK(csv.find("merge,numeric,c45,") != std::string::npos);
}

TEST_CASE("weight search reports the chosen weights") {
  const auto r = run("experiment --algorithm part --approach ensemble --variant discretized --weight-search --input " +
                     prepared() + " --out " + dir("ws"));
  REQUIRE(r.code == 0);
  CHECK(r.out.find("weights ensemble discretized part: theory ") != std::string::npos);
}

TEST_CASE("trained ensembles explain per source") {
  REQUIRE(run("train --algorithm ripper --approach ensemble --variant discretized --weights 1,1,2 --input " +
              prepared() + " --out " + dir("model"))
              .code == 0);
  const auto model = (fs::path(dir("model")) / "model.json").string();
  const auto r = run("explain " + model);
  REQUIRE(r.code == 0);
  CHECK(r.out.find("JRIP rules (Theory, weight 1)") != std::string::npos);
  CHECK(r.out.find("JRIP rules (Practice, weight 1)") != std::string::npos);
  CHECK(r.out.find("JRIP rules (Online, weight 2)") != std::string::npos);

  const auto traced = run("explain " + model + " --variant discretized --student 1 --input " + prepared());
  REQUIRE(traced.code == 0);
  CHECK(traced.out.find("student 1") != std::string::npos);
  CHECK(traced.out.find("vote: ") != std::string::npos);
}

TEST_CASE("a single model trains and explains") {
  REQUIRE(run("train --algorithm part --approach merge --variant discretized --input " + prepared() + " --out " +
              dir("part"))
              .code == 0);
  const auto r = run("explain " + (fs::path(dir("part")) / "model.json").string());
  REQUIRE(r.code == 0);
  CHECK(r.out.find("Number of Rules : ") != std::string::npos);
}
