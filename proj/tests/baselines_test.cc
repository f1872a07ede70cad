#include <algorithm>
#include <set>

#include "doctest.h"
#include "helpers.h"
#include "ocp/baselines.h"
#include "ocp/error.h"
#include "synthetic.h"

using namespace ocp;
using testing::code_of;

namespace {

BaselineSpec spec_of(BaselineKind kind, ClassWeighting cw = ClassWeighting::kNone) {
  BaselineSpec s;
  s.kind = kind;
  s.class_weighting = cw;
  return s;
}

const BaselineKind kAllKinds[] = {BaselineKind::kLinearSvm, BaselineKind::kLogisticRegression, BaselineKind::kKnn,
                                  BaselineKind::kRandomForest, BaselineKind::kGradientBoostedTrees};

double recall_of(Label label, const std::vector<Label>& truth, const std::vector<Label>& pred) {
  double tp = 0, n = 0;
  for (size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] != label) continue;
    n += 1;
    if (pred[i] == label) tp += 1;
  }
  return tp / n;
}

}  // namespace

TEST_SUITE("baselines") {

TEST_CASE("separable clusters are fitted exactly by every kind") {
  auto pts = synthetic::separable();
  for (BaselineKind kind : kAllKinds) {
    CAPTURE(to_string(kind));
    BaselineSpec s = spec_of(kind);
    if (kind == BaselineKind::kKnn) s.hyperparams.knn_k = 1;
    BaselineModel m = train_baseline(s, pts.x, pts.y);
    CHECK(predict_baseline(m, pts.x) == pts.y);
    CHECK(m.classes == std::vector<Label>{Label::kNot, Label::kOff});
  }
}

TEST_CASE("knn k=1 reproduces training labels") {
  auto pts = synthetic::blobs(40, 40, 0.5, 3, 4);
  BaselineSpec s = spec_of(BaselineKind::kKnn);
  s.hyperparams.knn_k = 1;
  BaselineModel m = train_baseline(s, pts.x, pts.y);
  CHECK(predict_baseline(m, pts.x) == pts.y);
}

TEST_CASE("balanced logistic regression lifts minority recall") {
  auto train = synthetic::blobs(900, 100, 1.0, 2, 17);
  auto test = synthetic::blobs(900, 100, 1.0, 2, 18);
  BaselineModel plain = train_baseline(spec_of(BaselineKind::kLogisticRegression), train.x, train.y);
  BaselineModel balanced =
      train_baseline(spec_of(BaselineKind::kLogisticRegression, ClassWeighting::kBalanced), train.x, train.y);
  double r_plain = recall_of(Label::kOff, test.y, predict_baseline(plain, test.x));
  double r_bal = recall_of(Label::kOff, test.y, predict_baseline(balanced, test.x));
  CHECK(r_bal > r_plain);
  REQUIRE(balanced.class_weights.has_value());
  CHECK(balanced.class_weights->at(Label::kOff) == doctest::Approx(5.0));
  CHECK(balanced.classes == plain.classes);
}

TEST_CASE("property: balanced weighting keeps the label set for every kind") {
  auto pts = synthetic::blobs(60, 15, 1.5, 3, 23);
  for (BaselineKind kind : kAllKinds) {
    CAPTURE(to_string(kind));
    BaselineModel a = train_baseline(spec_of(kind), pts.x, pts.y);
    BaselineModel b = train_baseline(spec_of(kind, ClassWeighting::kBalanced), pts.x, pts.y);
    CHECK(a.classes == b.classes);
    for (Label l : predict_baseline(b, pts.x)) CHECK(std::find(b.classes.begin(), b.classes.end(), l) != b.classes.end());
  }
}

TEST_CASE("prediction edge cases") {
  auto pts = synthetic::separable();
  for (BaselineKind kind : kAllKinds) {
    BaselineModel m = train_baseline(spec_of(kind), pts.x, pts.y);
    CHECK(predict_baseline(m, {}).empty());
    std::vector<SparseVector> same(5, pts.x[3]);
    auto out = predict_baseline(m, same);
    CHECK(std::all_of(out.begin(), out.end(), [&](Label l) { return l == out[0]; }));
    SparseVector wide = pts.x[0];
    wide.dimension = 7;
    CHECK(code_of([&] { predict_baseline(m, {wide}); }) == ErrorCode::kDimensionMismatch);
  }
}

TEST_CASE("training errors") {
  auto pts = synthetic::separable();
  BaselineSpec svm = spec_of(BaselineKind::kLinearSvm);
  std::vector<Label> one(pts.y.size(), Label::kOff);
  CHECK(code_of([&] { train_baseline(svm, pts.x, one); }) == ErrorCode::kSingleClassData);
  CHECK(code_of([&] { train_baseline(svm, pts.x, {Label::kOff}); }) == ErrorCode::kLengthMismatch);
  CHECK(code_of([&] { train_baseline(svm, {}, {}); }) == ErrorCode::kEmptyDataset);
  auto mixed = pts.x;
  mixed[2].dimension = 9;
  CHECK(code_of([&] { train_baseline(svm, mixed, pts.y); }) == ErrorCode::kDimensionMismatch);
  BaselineSpec knn = spec_of(BaselineKind::kKnn);
  knn.hyperparams.knn_k = 0;
  CHECK_THROWS_AS(knn.validate(), Error);
}

TEST_CASE("multi-class input: binary-only kinds refuse, knn and forest accept") {
  Rng rng(4);
  std::vector<SparseVector> x;
  std::vector<Label> y;
  const Label classes[] = {Label::kInd, Label::kGrp, Label::kOth};
  for (int i = 0; i < 30; ++i) {
    int c = i % 3;
    x.push_back(synthetic::dense_row({c * 5.0 + rng.uniform(), 1.0 + rng.uniform()}));
    y.push_back(classes[c]);
  }
  CHECK(code_of([&] { train_baseline(spec_of(BaselineKind::kLinearSvm), x, y); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([&] { train_baseline(spec_of(BaselineKind::kGradientBoostedTrees), x, y); }) ==
        ErrorCode::kInvalidArgument);
  BaselineSpec knn = spec_of(BaselineKind::kKnn);
  knn.hyperparams.knn_k = 1;
  CHECK(predict_baseline(train_baseline(knn, x, y), x) == y);
  CHECK(predict_baseline(train_baseline(spec_of(BaselineKind::kRandomForest), x, y), x) == y);
}

TEST_CASE("non-convergence is reported, model still returned") {
  auto pts = synthetic::blobs(50, 50, 0.3, 3, 5);
  BaselineSpec s = spec_of(BaselineKind::kLinearSvm);
  s.hyperparams.max_iter = 1;
  BaselineModel m = train_baseline(s, pts.x, pts.y);
  CHECK_FALSE(m.converged);
  CHECK(m.iterations == 1);
  CHECK(predict_baseline(m, pts.x).size() == pts.x.size());
}

TEST_CASE("save and load keep predictions") {
  testing::TempDir dir;
  auto pts = synthetic::blobs(30, 20, 1.0, 4, 6);
  for (BaselineKind kind : kAllKinds) {
    CAPTURE(to_string(kind));
    BaselineModel m = train_baseline(spec_of(kind, ClassWeighting::kBalanced), pts.x, pts.y);
    save_baseline(m, dir / "m.json");
    BaselineModel back = load_baseline(dir / "m.json");
    CHECK(predict_baseline(back, pts.x) == predict_baseline(m, pts.x));
    CHECK(back.spec.kind == kind);
    CHECK(to_json(back.spec) == to_json(m.spec));
  }
}

TEST_CASE("spec json and aliases") {
  BaselineSpec s = baseline_spec_from_json(
      nlohmann::json{{"kind", "xgboost"}, {"class_weighting", "balanced"}, {"hyperparams", {{"gbt_rounds", 7}}}});
  CHECK(s.kind == BaselineKind::kGradientBoostedTrees);
  CHECK(s.hyperparams.gbt_rounds == 7);
  CHECK(parse_baseline_kind("svm") == BaselineKind::kLinearSvm);
  CHECK(parse_baseline_kind("lr") == BaselineKind::kLogisticRegression);
  CHECK(parse_baseline_kind("rf") == BaselineKind::kRandomForest);
  CHECK_THROWS_AS(baseline_spec_from_json(nlohmann::json{{"kind", "perceptron"}}), Error);
  BaselineSpec defaults;
  CHECK(defaults.hyperparams.knn_k == 5);
  CHECK(defaults.hyperparams.rf_trees == 100);
  CHECK(defaults.hyperparams.gbt_max_depth == 6);
  CHECK(defaults.hyperparams.gbt_learning_rate == 0.3);
}

TEST_CASE("experiment: marker corpus is perfectly classified") {
  Dataset ds = synthetic::marker_corpus(200, 12);
  ExperimentResult r = run_baseline_experiment(ds, spec_of(BaselineKind::kLinearSvm), 0.8, 3);
  CHECK(r.report.macro_f1 == 1.0);
  CHECK(r.split.train.size() == 160);
  CHECK(r.split.validation.size() == 40);
}

TEST_CASE("experiment: tf-idf sees the training fold only") {
  std::vector<TweetRecord> recs;
  Dataset base = synthetic::marker_corpus(60, 13);
  for (size_t i = 0; i < base.size(); ++i) {
    TweetRecord r = base[i];
    r.text += " uniq" + std::to_string(i);
    recs.push_back(r);
  }
  Dataset ds(Task::kA, Language::kEn, PayloadKind::kHard, recs);
  ExperimentResult r = run_baseline_experiment(ds, spec_of(BaselineKind::kLogisticRegression), 0.75, 9);
  CHECK(r.tfidf.n_documents == r.split.train.size());
  std::set<std::string> train_terms;
  for (size_t i : r.split.train)
    for (const auto& w : whitespace_split(ds[i].text)) train_terms.insert(w);
  for (const auto& t : r.tfidf.vocabulary.terms()) CHECK(train_terms.count(t) == 1);
  for (size_t i : r.split.validation) CHECK(r.tfidf.vocabulary.index("uniq" + std::to_string(i)) == -1);
}

TEST_CASE("experiment: seeded runs are identical") {
  Dataset ds = synthetic::marker_corpus(120, 14);
  for (BaselineKind kind : kAllKinds) {
    auto a = run_baseline_experiment(ds, spec_of(kind), 0.8, 5);
    auto b = run_baseline_experiment(ds, spec_of(kind), 0.8, 5);
    CHECK(to_json(a.report) == to_json(b.report));
    CHECK(a.split.train == b.split.train);
  }
}

TEST_CASE("experiment: argument checks") {
  Dataset ds = synthetic::marker_corpus(20, 15);
  CHECK(code_of([&] { run_baseline_experiment(ds, spec_of(BaselineKind::kKnn), 1.0, 0); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(code_of([&] { run_baseline_experiment(ds, spec_of(BaselineKind::kKnn), 0.0, 0); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("bundled fixture corpus gives macro F1 1.0 with an SVM") {
  Dataset ds = load_any(testing::fixture("olid_train.tsv"), Task::kA, Language::kEn);
  ExperimentResult r = run_baseline_experiment(ds, spec_of(BaselineKind::kLinearSvm, ClassWeighting::kBalanced), 0.8, 0);
  CHECK(r.report.macro_f1 == 1.0);
}

}  // TEST_SUITE
