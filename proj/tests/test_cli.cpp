#include "doctest.h"
#include "support.hpp"

#include "coref/corpus.hpp"

#include "json.hpp"

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;
using testing_support::fixture;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(COREF_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("coref_mtl_cli_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

const char* kTinyConfig =
    "[encoder]\ndim = 8\nvocab_size = 200\n"
    "[model]\nfeature_dim = 4\nffnn_hidden = 16\nffnn_layers = 1\nmax_span_width = 3\nprune_ratio = 1.0\n"
    "max_antecedents = 10\n"
    "[train]\nsteps = 15\ntask_learning_rate = 0.003\nencoder_learning_rate = 0.003\n";

std::vector<std::string> lines(const std::string& path) {
  std::vector<std::string> out;
  std::istringstream in(coref::read_file(path));
  for (std::string l; std::getline(in, l);)
    if (!l.empty()) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(run("--help") == 0);
  CHECK(run("train --help") == 0);
  CHECK(run("") == 1);
  CHECK(run("score") == 1);
  CHECK(run("score --bogus a b") == 1);
  CHECK(run("score --mention-mode some " + fixture("pair1_key.conll") + " " + fixture("pair1_key.conll")) == 1);
}

TEST_CASE("score and analyze-errors") {
  TempDir tmp;
  CHECK(run("score " + fixture("pair3_key.conll") + " " + fixture("pair3_response.conll") + " --keep-singletons --json " +
            (tmp / "r.json")) == 0);
  auto j = nlohmann::json::parse(coref::read_file(tmp / "r.json"));
  CHECK(j.contains("avg_f1"));
  CHECK(run("score " + fixture("pair1_key.conll") + " " + (tmp / "missing.conll")) == 2);
  CHECK(run("score " + fixture("pair1_key.conll") + " " + fixture("pair2_key.conll")) == 2);
  CHECK(run("analyze-errors " + fixture("errors_gold.conll") + " " + fixture("errors_a.conll") + " " +
            fixture("errors_b.conll") + " --json " + (tmp / "e.json")) == 0);
  auto e = nlohmann::json::parse(coref::read_file(tmp / "e.json"));
  CHECK(e.is_object());
}

TEST_CASE("train, predict and configuration snapshot") {
  TempDir tmp;
  coref::write_file(tmp / "tiny.ini", kTinyConfig);
  REQUIRE(run("synth --documents 4 --seed 3 --out " + (tmp / "c.conll") + " --sidecar " + (tmp / "c.tsv")) == 0);
  const std::string data = " --train " + (tmp / "c.conll") + " --sidecar " + (tmp / "c.tsv");

  REQUIRE(run("train --config " + (tmp / "tiny.ini") + " --preset baseline" + data + " --out " + (tmp / "base")) == 0);
  for (const auto& l : lines(tmp / "base/metrics.jsonl")) {
    auto r = nlohmann::json::parse(l);
    if (!r.contains("coref")) continue;
    CHECK_FALSE(r.contains("singleton"));
    CHECK_FALSE(r.contains("entity_type"));
    CHECK_FALSE(r.contains("info_status"));
  }

  REQUIRE(run("train --config " + (tmp / "tiny.ini") + " --preset sg_ent" + data + " --out " + (tmp / "mtl")) == 0);
  int step_lines = 0;
  for (const auto& l : lines(tmp / "mtl/metrics.jsonl")) {
    auto r = nlohmann::json::parse(l);
    if (!r.contains("coref")) continue;
    ++step_lines;
    CHECK(r.contains("singleton"));
    CHECK(r.contains("entity_type"));
    CHECK_FALSE(r.contains("info_status"));
  }
  CHECK(step_lines == 15);

  REQUIRE(run("train --config " + (tmp / "tiny.ini") + " --preset sg_ent" + data + " --out " + (tmp / "mtl2")) == 0);
  CHECK(coref::read_file(tmp / "mtl/metrics.jsonl") == coref::read_file(tmp / "mtl2/metrics.jsonl"));
  CHECK(fs::exists(tmp / "mtl/config.ini"));
  CHECK(fs::exists(tmp / "mtl/best.bin"));

  // resuming to a larger budget equals one longer run
  REQUIRE(run("train --config " + (tmp / "tiny.ini") + " --preset sg_ent" + data + " --steps 20 --out " +
              (tmp / "long")) == 0);
  REQUIRE(run("train --config " + (tmp / "tiny.ini") + " --preset sg_ent" + data + " --steps 20 --resume " +
              (tmp / "mtl2/checkpoint.bin") + " --out " + (tmp / "mtl2")) == 0);
  CHECK(coref::read_file(tmp / "long/checkpoint.bin") == coref::read_file(tmp / "mtl2/checkpoint.bin"));

  // prediction needs only the checkpoint
  REQUIRE(run("predict --checkpoint " + (tmp / "mtl/checkpoint.bin") + " --input " + (tmp / "c.conll") + " --output " +
              (tmp / "p.jsonl") + " --conll " + (tmp / "p.conll") + " --threshold 0.0") == 0);
  CHECK(coref::parse_jsonl(coref::read_file(tmp / "p.jsonl")).size() == 4);
  REQUIRE(run("predict --checkpoint " + (tmp / "mtl/checkpoint.bin") + " --input " + (tmp / "c.conll") + " --output " +
              (tmp / "q.jsonl") + " --conll " + (tmp / "q.conll") + " --no-singletons") == 0);
  for (const auto& d : coref::parse_conll(coref::read_file(tmp / "q.conll")))
    for (const auto& c : d.gold_clusters) CHECK(c.size() >= 2);

  coref::write_file(tmp / "empty.jsonl", "");
  CHECK(run("predict --checkpoint " + (tmp / "mtl/checkpoint.bin") + " --input " + (tmp / "empty.jsonl") +
            " --output " + (tmp / "e.jsonl")) == 0);
  CHECK(coref::read_file(tmp / "e.jsonl").empty());

  coref::write_file(tmp / "wide.ini", "[encoder]\ndim = 16\n");
  CHECK(run("predict --checkpoint " + (tmp / "mtl/checkpoint.bin") + " --config " + (tmp / "wide.ini") + " --input " +
            (tmp / "c.conll") + " --output " + (tmp / "w.jsonl")) == 2);

  coref::write_file(tmp / "bad.ini", "[model]\nbogus = 1\n");
  CHECK(run("train --config " + (tmp / "bad.ini") + data + " --out " + (tmp / "bad")) == 1);
  CHECK(run("train" + data + " --out " + (tmp / "none") + " --preset nothing") == 1);
}
