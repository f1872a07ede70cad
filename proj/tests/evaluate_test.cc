#include <cmath>

#include "doctest.h"
#include "helpers.h"
#include "ocp/error.h"
#include "ocp/evaluate.h"
#include "ocp/rng.h"
#include "oracles.h"

using namespace ocp;

namespace {

const std::vector<Label> kTrue = {Label::kOff, Label::kOff, Label::kNot, Label::kNot};
const std::vector<Label> kPred = {Label::kOff, Label::kNot, Label::kNot, Label::kNot};

Dataset hand_dataset() {
  std::vector<TweetRecord> recs;
  for (size_t i = 0; i < kTrue.size(); ++i) {
    recs.push_back({std::to_string(i + 1), "tweet " + std::to_string(i + 1), Language::kEn,
                    HardLabel{Task::kA, kTrue[i]}});
  }
  return Dataset(Task::kA, Language::kEn, PayloadKind::kHard, recs);
}

}  // namespace

TEST_SUITE("evaluate") {

TEST_CASE("hand example") {
  const auto& set = label_set(Task::kA);
  CHECK(macro_f1(kTrue, kPred, set) == doctest::Approx(0.733333).epsilon(1e-6));
  CHECK(accuracy(kTrue, kPred) == 0.75);
  ConfusionMatrix cm = confusion(kTrue, kPred, {Label::kOff, Label::kNot});
  CHECK(cm.counts == std::vector<std::vector<size_t>>{{1, 1}, {0, 2}});
  CHECK(cm.total() == 4);
  CHECK(macro_f1(kTrue, kTrue, set) == 1.0);
  CHECK(accuracy(kTrue, kTrue) == 1.0);
  CHECK(accuracy({Label::kOff, Label::kNot}, {Label::kNot, Label::kOff}) == 0.0);
}

TEST_CASE("errors") {
  const auto& set = label_set(Task::kA);
  CHECK_THROWS_AS(macro_f1({Label::kOff}, {}, set), Error);
  CHECK_THROWS_AS(macro_f1({}, {}, set), Error);
  CHECK_THROWS_AS(macro_f1({Label::kTin}, {Label::kTin}, set), Error);
  CHECK_THROWS_AS(accuracy({Label::kOff}, {}), Error);
  CHECK_THROWS_AS(confusion({Label::kInd}, {Label::kInd}, {Label::kOff, Label::kNot}), Error);
  CHECK_THROWS_AS(batch_averaged({}), Error);
}

TEST_CASE("batch_averaged") {
  CHECK(batch_averaged({0.5, 1.0}) == 0.75);
  CHECK(batch_averaged({0.3}) == 0.3);
  CHECK(batch_averaged({0.2, 0.2, 0.2}) == doctest::Approx(0.2));
}

TEST_CASE("error report") {
  Dataset ds = hand_dataset();
  ErrorReport r = error_report(ds, kPred);
  REQUIRE(r.size() == 1);
  auto cell = r.at({Label::kOff, Label::kNot});
  REQUIRE(cell.size() == 1);
  CHECK(cell[0].id == "2");
  CHECK(error_report(ds, kTrue).empty());

  std::vector<Label> wrong;
  for (Label l : kTrue) wrong.push_back(l == Label::kOff ? Label::kNot : Label::kOff);
  ErrorReport all = error_report(ds, wrong);
  size_t n = 0;
  for (const auto& [k, v] : all) n += v.size();
  CHECK(all.size() == 2);
  CHECK(n == ds.size());
  CHECK_THROWS_AS(error_report(ds, {Label::kOff}), Error);
}

TEST_CASE("evaluate report and json round trip") {
  Dataset ds = hand_dataset();
  EvalReport r = evaluate(ds, kPred);
  CHECK(r.macro_f1 == macro_f1(kTrue, kPred, label_set(Task::kA)));
  CHECK(r.metric_convention == MetricConvention::kCorpus);
  CHECK(r.misclassified.size() == 1);
  EvalReport back = eval_report_from_json(to_json(r));
  CHECK(back.macro_f1 == r.macro_f1);
  CHECK(back.confusion.counts == r.confusion.counts);
  CHECK(back.misclassified.size() == 1);
  auto scores = class_scores(r.confusion);
  for (const auto& [l, s] : scores) CHECK(s.f1 == r.per_class.at(l).f1);
}

TEST_CASE("figure and csv sidecar") {
  testing::TempDir dir;
  ConfusionMatrix cm = confusion(kTrue, kPred, {Label::kOff, Label::kNot});
  emit_confusion_figure(cm, dir / "cm");
  CHECK(testing::read_file(dir / "cm.csv") == "true\\predicted,OFF,NOT\nOFF,1,1\nNOT,0,2\n");
  CHECK(read_confusion_csv(dir / "cm.csv", Task::kA).counts == cm.counts);
  std::string png = testing::read_file(dir / "cm.png");
  REQUIRE(png.size() > 8);
  CHECK(png.substr(1, 3) == "PNG");

  std::vector<Label> t = {Label::kInd, Label::kGrp, Label::kOth, Label::kInd, Label::kInd};
  std::vector<Label> p = {Label::kInd, Label::kInd, Label::kOth, Label::kGrp, Label::kInd};
  ConfusionMatrix c3 = confusion(t, p, label_set(Task::kC));
  emit_confusion_figure(c3, dir / "c3");
  CHECK(std::filesystem::file_size(dir / "c3.png") > 0);
  ConfusionMatrix c3b = read_confusion_csv(dir / "c3.csv", Task::kC);
  CHECK(c3b.row_sum(0) == 3);
  CHECK(c3b.row_sum(1) == 1);

  ConfusionMatrix zero{label_set(Task::kA), {{0, 0}, {0, 0}}};
  emit_confusion_figure(zero, dir / "zero");
  CHECK(std::filesystem::file_size(dir / "zero.png") > 0);
  CHECK(read_confusion_csv(dir / "zero.csv", Task::kA).total() == 0);
}

TEST_CASE("property: metrics equal the naive tallies") {
  Rng rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    Task task = trial % 2 ? Task::kA : Task::kC;
    const auto& set = label_set(task);
    size_t n = 1 + rng.uniform_int(40);
    std::vector<Label> t, p;
    std::vector<int> ti, pi;
    for (size_t i = 0; i < n; ++i) {
      ti.push_back(static_cast<int>(rng.uniform_int(set.size())));
      pi.push_back(rng.uniform_int(3) == 0 ? ti.back() : static_cast<int>(rng.uniform_int(set.size())));
      t.push_back(set[ti.back()]);
      p.push_back(set[pi.back()]);
    }
    oracle::Metrics o = oracle::metrics(ti, pi, static_cast<int>(set.size()));
    CHECK(macro_f1(t, p, set) == o.macro_f1);
    CHECK(accuracy(t, p) == o.accuracy);
    ConfusionMatrix cm = confusion(t, p, set);
    for (size_t i = 0; i < set.size(); ++i)
      for (size_t j = 0; j < set.size(); ++j) CHECK(static_cast<long>(cm.counts[i][j]) == o.confusion[i][j]);
    CHECK(accuracy(t, p) == static_cast<double>(cm.trace()) / static_cast<double>(cm.total()));
    // with every class present, a perfect score means a diagonal matrix
    bool all_present = true;
    for (size_t i = 0; i < set.size(); ++i) all_present = all_present && cm.row_sum(i) > 0;
    if (all_present) CHECK((macro_f1(t, p, set) == 1.0) == (cm.trace() == cm.total()));
  }
}

TEST_CASE("property: joint relabelling leaves macro F1 unchanged") {
  Rng rng(8);
  const auto& set = label_set(Task::kC);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<size_t> perm = rng.permutation(3);
    std::vector<Label> t, p, t2, p2, set2;
    for (size_t i = 0; i < 20; ++i) {
      size_t a = rng.uniform_int(3), b = rng.uniform_int(3);
      t.push_back(set[a]);
      p.push_back(set[b]);
      t2.push_back(set[perm[a]]);
      p2.push_back(set[perm[b]]);
    }
    for (size_t k = 0; k < 3; ++k) set2.push_back(set[perm[k]]);
    CHECK(macro_f1(t, p, set) == doctest::Approx(macro_f1(t2, p2, set2)).epsilon(1e-15));
  }
}

}  // TEST_SUITE
