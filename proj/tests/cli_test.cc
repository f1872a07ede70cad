#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "doctest.h"
#include "helpers.h"
#include "json.hpp"
#include "ocp/cli.h"
#include "ocp/corpus.h"
#include "ocp/hash.h"
#include "ocp/preprocess.h"

namespace fs = std::filesystem;
using nlohmann::json;
using testing::fixture;
using testing::TempDir;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run ocp_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = ocp::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string f(const char* name) { return fixture(name).string(); }

json read_json(const fs::path& p) { return json::parse(testing::read_file(p)); }

std::map<std::string, std::string> fixture_hashes() {
  std::map<std::string, std::string> h;
  for (const auto& e : fs::directory_iterator(fixture(""))) h[e.path().filename().string()] = ocp::sha256_file(e.path());
  return h;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors and version") {
  CHECK(ocp_run({"--no-such-flag"}).code == 2);
  CHECK(ocp_run({"frobnicate"}).code == 2);
  CHECK(ocp_run({"convert"}).code == 2);
  Run v = ocp_run({"--version"});
  CHECK(v.code == 0);
  CHECK(v.out.find("0.3.0") != std::string::npos);
  CHECK(ocp_run({"--help"}).code == 0);
}

TEST_CASE("convert: shares, bad input, empty input") {
  setenv("SOURCE_DATE_EPOCH", "1600000000", 1);
  TempDir dir;
  Run r = ocp_run({"convert", "--input", f("soft_a.tsv"), "--task", "A", "--out", (dir / "a.tsv").string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("25") != std::string::npos);
  ocp::Dataset back = ocp::load_canonical(dir / "a.tsv");
  CHECK(back.size() == 200);
  json m = read_json(dir / "a.tsv.manifest.json");
  CHECK(m.at("exit_code") == 0);
  CHECK(m.at("outputs").size() == 1);

  Run bad = ocp_run({"convert", "--input", f("soft_a_out_of_range.tsv"), "--out", (dir / "bad.tsv").string()});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("line 3") != std::string::npos);
  CHECK(read_json(dir / "bad.tsv.manifest.json").at("exit_code") == 2);

  testing::write_file(dir / "empty.tsv", "");
  Run empty = ocp_run({"convert", "--input", (dir / "empty.tsv").string(), "--out", (dir / "e.tsv").string()});
  CHECK(empty.code == 0);

  Run c = ocp_run({"convert", "--input", f("soft_c.tsv"), "--task", "C", "--out", (dir / "c.tsv").string()});
  CHECK(c.code == 0);
  CHECK(ocp::load_canonical(dir / "c.tsv").task() == ocp::Task::kC);
}

TEST_CASE("train baseline then evaluate the model") {
  setenv("SOURCE_DATE_EPOCH", "1600000000", 1);
  TempDir dir;
  std::string model = (dir / "svm").string();
  Run t = ocp_run({"train", "baseline", "--config", f("svm.json"), "--data", f("olid_train.tsv"), "--out", model});
  REQUIRE(t.code == 0);
  json m = read_json(dir / "svm" / "manifest.json");
  CHECK(m.at("metrics").at("macro_f1") == 1.0);
  CHECK(m.at("config").at("kind") == "linear_svm");
  for (const char* file : {"model.json", "tfidf.tsv", "pipeline.json", "eval_report.json"})
    CHECK(fs::exists(dir / "svm" / file));

  Run e = ocp_run({"evaluate", "--model", model, "--data", f("olid_test_a.tsv"), "--gold", f("gold_a.csv"), "--out",
                   (dir / "ev").string()});
  REQUIRE(e.code == 0);
  json report = read_json(dir / "ev" / "eval_report.json");
  CHECK(report.at("macro_f1") == 1.0);
  for (const char* file : {"confusion.csv", "confusion.png", "error_report.json", "predictions.csv"})
    CHECK(fs::exists(dir / "ev" / file));

  Run missing = ocp_run({"evaluate", "--model", model, "--data", f("olid_test_a.tsv"), "--gold",
                         f("gold_a_missing.csv"), "--out", (dir / "ev2").string()});
  CHECK(missing.code == 2);
  CHECK(missing.err.find("t0039") != std::string::npos);

  Run rep = ocp_run({"report", "--eval-dir", (dir / "ev").string()});
  CHECK(rep.code == 0);
}

TEST_CASE("evaluate a prediction file: hand example") {
  TempDir dir;
  Run e = ocp_run({"evaluate", "--predictions", f("hand_predictions.csv"), "--data", f("hand_test.tsv"), "--gold",
                   f("hand_gold.csv"), "--out", (dir / "ev").string()});
  REQUIRE(e.code == 0);
  json m = read_json(dir / "ev" / "manifest.json");
  CHECK(m.at("metrics").at("macro_f1").get<double>() == doctest::Approx(0.733333).epsilon(1e-6));
  CHECK(m.at("metrics").at("accuracy") == 0.75);
  CHECK(testing::read_file(dir / "ev" / "confusion.csv") == "true\\predicted,OFF,NOT\nOFF,1,1\nNOT,0,2\n");
}

TEST_CASE("neural training exit codes") {
  setenv("SOURCE_DATE_EPOCH", "1600000000", 1);
  TempDir dir;
  Run zero = ocp_run({"train", "soft-lstm", "--task", "C", "--config", f("soft_lstm_zero_epochs.json"), "--data",
                      f("soft_c.tsv"), "--out", (dir / "z").string()});
  CHECK(zero.code == 0);
  std::string hist = testing::read_file(dir / "z" / "history.csv");
  CHECK(std::count(hist.begin(), hist.end(), '\n') == 1);

  setenv("OCP_MODEL_REGISTRY", (dir / "registry").string().c_str(), 1);
  Run miss = ocp_run({"train", "finetune", "--config", f("finetune_missing_registry.json"), "--data",
                      f("olid_train.tsv"), "--out", (dir / "ft").string()});
  unsetenv("OCP_MODEL_REGISTRY");
  CHECK(miss.code == 3);
  json m = read_json(dir / "ft" / "manifest.json");
  CHECK(m.at("exit_code") == 3);

  Run no_data = ocp_run({"train", "soft-lstm", "--task", "C", "--config", f("soft_lstm.json"), "--data",
                         (dir / "nope.tsv").string(), "--out", (dir / "n").string()});
  CHECK(no_data.code == 2);
}

TEST_CASE("augment with the stub and the live client") {
  TempDir dir;
  Run a = ocp_run({"augment", "--base", f("da_train.tsv"), "--source", f("en_source.tsv"), "--target", "da", "--out",
                   (dir / "aug.tsv").string()});
  REQUIRE(a.code == 0);
  ocp::Dataset merged = ocp::load_canonical(dir / "aug.tsv");
  CHECK(merged.size() == 103);
  CHECK(merged.language() == ocp::Language::kDa);
  std::string prov = testing::read_file(dir / "aug.tsv.provenance.jsonl");
  CHECK(std::count(prov.begin(), prov.end(), '\n') == 3);
  CHECK(fs::exists(dir / "aug.tsv.manifest.json"));

  unsetenv("OCP_TRANSLATE_API_KEY");
  Run live = ocp_run({"augment", "--base", f("da_train.tsv"), "--source", f("en_source.tsv"), "--target", "da",
                      "--client", "live", "--out", (dir / "live.tsv").string()});
  CHECK(live.code == 4);
}

TEST_CASE("preprocess and report") {
  TempDir dir;
  Run p = ocp_run({"preprocess", "--preset", "danish", "--language", "da", "--data", f("da_train.tsv"), "--out",
                   (dir / "p.tsv").string()});
  REQUIRE(p.code == 0);
  ocp::Dataset ds = ocp::load_canonical(dir / "p.tsv");
  ocp::Dataset raw = ocp::load_any(fixture("da_train.tsv"), ocp::Task::kA, ocp::Language::kDa);
  REQUIRE(ds.size() == raw.size());
  ocp::PreprocessConfig cfg = ocp::make_preset(ocp::Preset::kDanish);
  for (size_t i = 0; i < ds.size(); ++i) CHECK(ds[i].text == ocp::preprocess(raw[i].text, cfg));
  Run r = ocp_run({"report", "--data", f("olid_train.tsv")});
  CHECK(r.code == 0);
  CHECK(r.out.find("200") != std::string::npos);
  CHECK(ocp_run({"report"}).code == 2);
}

TEST_CASE("repeated runs give identical manifests and replay matches") {
  setenv("SOURCE_DATE_EPOCH", "1600000000", 1);
  TempDir dir;
  std::vector<std::string> args = {"train", "baseline", "--config", f("svm.json"), "--data", f("olid_train.tsv"),
                                   "--out", (dir / "m").string(), "--seed", "7"};
  REQUIRE(ocp_run(args).code == 0);
  std::string first = testing::read_file(dir / "m" / "manifest.json");
  REQUIRE(ocp_run(args).code == 0);
  CHECK(testing::read_file(dir / "m" / "manifest.json") == first);
  Run replay = ocp_run({"replay", (dir / "m" / "manifest.json").string()});
  CHECK(replay.code == 0);

  testing::write_file(dir / "m" / "eval_report.json", "{}");
  json m = read_json(dir / "m" / "manifest.json");
  // replay rewrites the outputs, so a tampered file is restored
  CHECK(ocp_run({"replay", (dir / "m" / "manifest.json").string()}).code == 0);
  CHECK(testing::read_file(dir / "m" / "eval_report.json") != "{}");
}

TEST_CASE("inputs are never modified") {
  auto before = fixture_hashes();
  TempDir dir;
  ocp_run({"convert", "--input", f("soft_b.tsv"), "--task", "B", "--out", (dir / "b.tsv").string()});
  ocp_run({"train", "baseline", "--config", f("svm.json"), "--data", f("olid_train.tsv"), "--out",
           (dir / "m").string()});
  ocp_run({"augment", "--base", f("da_train.tsv"), "--source", f("en_source.tsv"), "--target", "da", "--out",
           (dir / "a.tsv").string()});
  ocp_run({"preprocess", "--preset", "english", "--data", f("olid_train.tsv"), "--out", (dir / "p.tsv").string()});
  CHECK(fixture_hashes() == before);
}

}  // TEST_SUITE
