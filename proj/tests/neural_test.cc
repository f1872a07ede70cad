#include <cmath>
#include <cstdlib>
#include <set>

#include "doctest.h"
#include "helpers.h"
#include "ocp/error.h"
#include "ocp/neural.h"
#include "oracles.h"
#include "synthetic.h"

using namespace ocp;
using namespace ocp::nn;
using testing::code_of;

namespace {

std::vector<double> random_simplex(Rng& rng, size_t k) {
  std::vector<double> v(k);
  double s = 0;
  for (double& x : v) {
    x = rng.uniform() + 1e-3;
    s += x;
  }
  for (double& x : v) x /= s;
  return v;
}

double rel_error(double a, double b) { return std::abs(a - b) / std::max({1e-8, std::abs(a), std::abs(b)}); }

// Central-difference check of d(f)/d(x) for every entry of `x`.
double worst_gradient_error(const Var& x, const std::function<Var()>& f) {
  x->grad.resize(0, 0);
  Var out = f();
  backward(out);
  Matrix analytic = x->grad;
  double worst = 0;
  const double h = 1e-6;
  for (long i = 0; i < x->value.size(); ++i) {
    double keep = x->value.data()[i];
    x->value.data()[i] = keep + h;
    double up = f()->value(0, 0);
    x->value.data()[i] = keep - h;
    double down = f()->value(0, 0);
    x->value.data()[i] = keep;
    double numeric = (up - down) / (2 * h);
    double a = analytic.size() ? analytic.data()[i] : 0.0;
    if (std::abs(numeric) < 1e-7 && std::abs(a) < 1e-7) continue;
    worst = std::max(worst, rel_error(a, numeric));
  }
  return worst;
}

Matrix random_matrix(Rng& rng, long r, long c) {
  Matrix m(r, c);
  for (long i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

Var sum_all(const Var& x) {
  Matrix ones_r = Matrix::Ones(1, x->value.rows());
  Matrix ones_c = Matrix::Ones(x->value.cols(), 1);
  return matmul(matmul(constant(ones_r), x), constant(ones_c));
}

EncoderSpec tiny_encoder(int dim = 16) {
  EncoderSpec e;
  e.num_layers = 2;
  e.hidden_dim = dim;
  e.num_heads = 2;
  e.vocab_size = 200;
  e.max_positions = 32;
  return e;
}

FinetuneConfig toy_finetune(int epochs) {
  FinetuneConfig c;
  c.learning_rate = 1e-3;
  c.max_epochs = epochs;
  c.batch_size = 16;
  c.max_sequence_length = 16;
  c.early_stopping = false;
  return c;
}

}  // namespace

TEST_SUITE("neural") {

TEST_CASE("soft cross-entropy worked values") {
  CHECK(soft_cross_entropy({1, 0, 0}, {1, 0, 0}) <= 1e-6);
  CHECK(soft_cross_entropy({1.0 / 3, 1.0 / 3, 1.0 / 3}, {1.0 / 3, 1.0 / 3, 1.0 / 3}) ==
        doctest::Approx(1.098612).epsilon(1e-6));
  CHECK(soft_cross_entropy({0.8, 0.2, 0}, {0.5, 0.25, 0.25}) == doctest::Approx(0.831777).epsilon(1e-6));
  CHECK(code_of([] { soft_cross_entropy({1, 0}, {1, 0, 0}); }) == ErrorCode::kDimensionMismatch);
  // zero q is clamped rather than producing infinity
  CHECK(std::isfinite(soft_cross_entropy({0.5, 0.5}, {1.0, 0.0})));
}

TEST_CASE("property: soft cross-entropy matches the formula and Gibbs inequality") {
  Rng rng(1);
  for (int i = 0; i < 500; ++i) {
    auto p = random_simplex(rng, 3), q = random_simplex(rng, 3);
    CHECK(soft_cross_entropy(p, q) == doctest::Approx(oracle::soft_ce(p, q)).epsilon(1e-12));
    CHECK(soft_cross_entropy(p, q) >= soft_cross_entropy(p, p) - 1e-12);
  }
}

TEST_CASE("property: gradient equals q - p and central differences") {
  Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    auto p = random_simplex(rng, 3);
    std::vector<double> z = {rng.normal(), rng.normal(), rng.normal()};
    auto g = soft_cross_entropy_grad(p, z);
    auto q = oracle::softmax(z);
    for (int k = 0; k < 3; ++k) {
      CHECK(g[k] == doctest::Approx(q[k] - p[k]).epsilon(1e-12));
      auto zp = z, zm = z;
      zp[k] += 1e-6;
      zm[k] -= 1e-6;
      double fd = (oracle::soft_ce(p, oracle::softmax(zp)) - oracle::soft_ce(p, oracle::softmax(zm))) / 2e-6;
      CHECK(rel_error(g[k], fd) < 1e-4);
    }
  }
}

TEST_CASE("autodiff: operator gradients match central differences") {
  Rng rng(3);
  Var x = leaf(random_matrix(rng, 3, 4), true);
  Var w = leaf(random_matrix(rng, 4, 5), true);
  Var b = leaf(random_matrix(rng, 1, 5), true);
  Var gamma = leaf(random_matrix(rng, 1, 4), true);
  Var beta = leaf(random_matrix(rng, 1, 4), true);
  Matrix target = Matrix::Constant(3, 5, 0.2);

  CHECK(worst_gradient_error(w, [&] { return soft_cross_entropy_logits(add(matmul(x, w), b), target); }) < 1e-5);
  CHECK(worst_gradient_error(x, [&] { return sum_all(mul(tanh(x), sigmoid(x))); }) < 1e-5);
  CHECK(worst_gradient_error(x, [&] { return sum_all(mul(gelu(x), x)); }) < 1e-5);
  CHECK(worst_gradient_error(x, [&] { return sum_all(mul(softmax_rows(x), x)); }) < 1e-5);
  CHECK(worst_gradient_error(gamma, [&] { return sum_all(mul(layer_norm(x, gamma, beta), x)); }) < 1e-5);
  CHECK(worst_gradient_error(x, [&] { return sum_all(mul(layer_norm(x, gamma, beta), x)); }) < 1e-4);
  CHECK(worst_gradient_error(x, [&] {
          return sum_all(mul(concat_cols({slice_cols(x, 0, 2), transpose(slice_rows(transpose(x), 2, 2))}), x));
        }) < 1e-5);
  Var table = leaf(random_matrix(rng, 6, 3), true);
  CHECK(worst_gradient_error(table, [&] {
          Var g = gather_rows(table, {1, 4, 1});
          return sum_all(mul(g, g));
        }) < 1e-5);
}

TEST_CASE("autodiff: recurrent layers match central differences") {
  Rng rng(4);
  std::vector<Parameter> reg;
  Lstm lstm = make_lstm(reg, "l", 3, 4, rng);
  Gru gru = make_gru(reg, "g", 3, 4, rng);
  Var xs = leaf(random_matrix(rng, 5, 3), true);
  Matrix in_mask = dropout_mask(1, 3, 0.3, rng);
  Matrix rec_mask = dropout_mask(1, 4, 0.3, rng);
  CHECK(worst_gradient_error(lstm.kernel, [&] { return sum_all(lstm.run(xs, false, in_mask, rec_mask)); }) < 1e-4);
  CHECK(worst_gradient_error(lstm.recurrent, [&] { return sum_all(lstm.run(xs, true)); }) < 1e-4);
  CHECK(worst_gradient_error(xs, [&] { return sum_all(gru.run(xs, false)); }) < 1e-4);
  CHECK(worst_gradient_error(gru.recurrent_bias, [&] { return sum_all(gru.run(xs, true)); }) < 1e-4);
}

TEST_CASE("layers: dropout masks and init") {
  Rng rng(5);
  Matrix m = dropout_mask(200, 50, 0.2, rng);
  double zeros = 0;
  for (long i = 0; i < m.size(); ++i) {
    double v = m.data()[i];
    CHECK((v == 0.0 || std::abs(v - 1.25) < 1e-12));
    if (v == 0.0) zeros += 1;
  }
  CHECK(zeros / static_cast<double>(m.size()) == doctest::Approx(0.2).epsilon(0.1));
  Matrix q = init_matrix(Init::kOrthogonal, 6, 6, rng);
  Matrix eye = q.transpose() * q;
  CHECK((eye - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-10);
  Var x = leaf(random_matrix(rng, 2, 3), false);
  CHECK(dropout(x, 0.5, nullptr)->value == x->value);
}

TEST_CASE("tokenizer") {
  WordTokenizer tok = WordTokenizer::build({"b a a", "c a b"}, 0, false);
  CHECK(tok.size() == 7);
  CHECK(tok.token(4) == "a");
  CHECK(tok.token(5) == "b");
  CHECK(tok.token(6) == "c");
  CHECK(tok.encode_marked("a b zz", 10) == std::vector<int>{2, 4, 5, 1, 3});
  CHECK(tok.encode_plain("", 10) == std::vector<int>{1});
  CHECK(tok.id("A") == 4);
  WordTokenizer capped = WordTokenizer::build({"b a a", "c a b"}, 5, false);
  CHECK(capped.size() == 5);

  Rng rng(6);
  for (int i = 0; i < 200; ++i) {
    std::string text = synthetic::filler_text(rng, rng.uniform_int(40));
    size_t cap = 2 + rng.uniform_int(20);
    auto ids = tok.encode_marked(text, cap);
    CHECK(ids.size() <= cap);
    CHECK(ids.front() == WordTokenizer::kCls);
    CHECK(ids.back() == WordTokenizer::kSep);
    CHECK(tok.encode_plain(text, cap).size() <= cap);
  }

  testing::TempDir dir;
  tok.save(dir / "vocab.txt");
  CHECK(WordTokenizer::load(dir / "vocab.txt", false) == tok);
}

TEST_CASE("build_classifier shapes") {
  EncoderSpec enc = tiny_encoder(32);
  HeadSpec linear;
  NeuralClassifier m = build_classifier(enc, linear, 2, 1);
  Matrix probs = m.forward_probabilities({{2, 5, 9, 3}, {2, 7, 3}, {2, 3}});
  CHECK(probs.rows() == 3);
  CHECK(probs.cols() == 2);
  for (long r = 0; r < probs.rows(); ++r) CHECK(std::abs(probs.row(r).sum() - 1.0) <= 1e-6);

  HeadSpec lstm4;
  lstm4.kind = HeadKind::kBiLstm;
  lstm4.use_last4_concat = true;
  CHECK(build_classifier(enc, lstm4, 3, 1).head_input_width() == 128);
  CHECK(build_classifier(enc, linear, 3, 1).head_input_width() == 32);
  CHECK(code_of([&] { build_classifier(enc, linear, 1, 1); }) == ErrorCode::kIncompatibleDims);
  EncoderSpec bad = enc;
  bad.num_heads = 5;
  CHECK(code_of([&] { build_classifier(bad, linear, 2, 1); }) == ErrorCode::kIncompatibleDims);
}

TEST_CASE("frozen encoder keeps encoder weights fixed") {
  Dataset ds = synthetic::marker_corpus(60, 3);
  HeadSpec head;
  head.kind = HeadKind::kBiGru;
  head.freeze_encoder = true;
  head.recurrent_hidden_dim = 8;
  NeuralClassifier m = build_classifier(tiny_encoder(), head, 2, 4);
  std::vector<Matrix> before;
  std::vector<std::string> names;
  for (const Parameter& p : m.parameters()) {
    before.push_back(p.var->value);
    names.push_back(p.name);
  }
  FinetuneResult r = finetune(std::move(m), ds, toy_finetune(1));
  auto after = r.model.parameters();
  bool head_moved = false;
  for (size_t i = 0; i < after.size(); ++i) {
    bool same = after[i].var->value == before[i];
    if (names[i].rfind("encoder.", 0) == 0) {
      CHECK(same);
    } else if (!same) {
      head_moved = true;
    }
  }
  CHECK(head_moved);
  for (const std::string& n : r.decayed_parameters) CHECK(n.rfind("encoder.", 0) != 0);
}

TEST_CASE("finetune: zero epochs returns untrained model and empty history") {
  Dataset ds = synthetic::marker_corpus(40, 5);
  NeuralClassifier m = build_classifier(tiny_encoder(), HeadSpec{}, 2, 6);
  FinetuneResult r = finetune(std::move(m), ds, toy_finetune(0));
  CHECK(r.history.epochs.empty());
  CHECK(r.history.best_epoch == 0);
  Dataset empty(Task::kA, Language::kEn, PayloadKind::kHard, {});
  CHECK(code_of([&] { finetune(build_classifier(tiny_encoder(), HeadSpec{}, 2, 6), empty, toy_finetune(1)); }) ==
        ErrorCode::kEmptyDataset);
}

TEST_CASE("finetune: loss falls, decay skips bias and norm, early stopping picks the best epoch") {
  Dataset ds = synthetic::marker_corpus(200, 7);
  NeuralClassifier m = build_classifier(tiny_encoder(), HeadSpec{}, 2, 8);
  std::map<std::string, ParamRole> roles;
  for (const Parameter& p : m.parameters()) roles[p.name] = p.role;
  FinetuneConfig cfg = toy_finetune(3);
  FinetuneResult r = finetune(std::move(m), ds, cfg);
  REQUIRE(r.history.epochs.size() == 3);
  CHECK(r.history.epochs.back().train_loss < r.history.epochs.front().train_loss);
  REQUIRE_FALSE(r.decayed_parameters.empty());
  for (const std::string& n : r.decayed_parameters) {
    CHECK(roles.at(n) != ParamRole::kBias);
    CHECK(roles.at(n) != ParamRole::kNorm);
  }
  size_t n_bias_norm = 0;
  for (auto [n, role] : roles) n_bias_norm += role == ParamRole::kBias || role == ParamRole::kNorm;
  CHECK(r.decayed_parameters.size() + n_bias_norm == roles.size());

  FinetuneConfig es = toy_finetune(4);
  es.early_stopping = true;
  es.patience = 4;
  FinetuneResult e = finetune(build_classifier(tiny_encoder(), HeadSpec{}, 2, 8), ds, es);
  REQUIRE_FALSE(e.history.epochs.empty());
  double best = -1;
  int best_epoch = 0;
  for (const EpochRecord& rec : e.history.epochs) {
    if (rec.val_f1_batchavg > best) {
      best = rec.val_f1_batchavg;
      best_epoch = rec.epoch;
    }
  }
  CHECK(e.history.best_epoch == best_epoch);
}

TEST_CASE("finetune: chunked training covers every epoch and saves chunk checkpoints") {
  testing::TempDir dir;
  Dataset ds = synthetic::marker_corpus(80, 9);
  FinetuneConfig cfg = toy_finetune(2);
  cfg.chunk_size = 25;
  cfg.chunk_checkpoint_dir = (dir / "chunks").string();
  FinetuneResult r = finetune(build_classifier(tiny_encoder(), HeadSpec{}, 2, 10), ds, cfg);
  CHECK(r.history.epochs.size() == 2);
  size_t saved = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir / "chunks")) {
    CHECK(is_neural_checkpoint(entry.path()));
    ++saved;
  }
  // 64 training records in chunks of 25, two epochs
  CHECK(saved == 6);
}

TEST_CASE("evaluation mode is deterministic") {
  Dataset ds = synthetic::marker_corpus(60, 11);
  HeadSpec head;
  head.kind = HeadKind::kBiLstm;
  head.recurrent_hidden_dim = 8;
  FinetuneResult r = finetune(build_classifier(tiny_encoder(), head, 2, 12), ds, toy_finetune(1));
  std::vector<std::string> texts = {"zork day", "zork day", "rain again", "x"};
  auto a = predict_neural(r.model, texts);
  auto b = predict_neural(r.model, texts);
  REQUIRE(a.size() == 4);
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].probabilities == b[i].probabilities);
    double s = 0;
    for (double p : a[i].probabilities) s += p;
    CHECK(std::abs(s - 1.0) <= 1e-6);
  }
  CHECK(a[0].probabilities == a[1].probabilities);
  CHECK(predict_neural(r.model, {}).empty());
  auto ids = r.model.encode("zork day");
  CHECK(r.model.logits(ids, nullptr)->value == r.model.logits(ids, nullptr)->value);
}

TEST_CASE("soft LSTM: uniform targets drive the loss to ln 3") {
  std::vector<TweetRecord> recs;
  for (int i = 0; i < 60; ++i) {
    recs.push_back({"u" + std::to_string(i), "same text every time", Language::kEn,
                    SoftScoreC{1.0 / 3, 1.0 / 3, 1.0 / 3}});
  }
  Dataset ds(Task::kC, Language::kEn, PayloadKind::kSoft, recs);
  SoftLstmConfig cfg;
  cfg.embedding_dim = 8;
  cfg.hidden_dim = 8;
  cfg.max_epochs = 3;
  cfg.batch_size = 8;
  cfg.learning_rate = 0.01;
  SoftLstmResult r = train_soft_lstm(ds, cfg);
  REQUIRE(r.history.epochs.size() == 3);
  CHECK(std::abs(r.history.epochs.back().val_loss - std::log(3.0)) < 0.05);
  auto pred = predict_neural(r.model, {"same text every time"});
  for (double q : pred[0].probabilities) CHECK(std::abs(q - 1.0 / 3) < 0.05);
}

TEST_CASE("soft LSTM: errors and zero epochs") {
  Dataset empty(Task::kC, Language::kEn, PayloadKind::kSoft, {});
  CHECK(code_of([&] { train_soft_lstm(empty, SoftLstmConfig{}); }) == ErrorCode::kEmptyDataset);
  Dataset hard = synthetic::marker_corpus(10, 1);
  CHECK(code_of([&] { train_soft_lstm(hard, SoftLstmConfig{}); }) == ErrorCode::kInvalidArgument);
  SoftLstmConfig zero;
  zero.max_epochs = 0;
  zero.embedding_dim = 4;
  zero.hidden_dim = 4;
  SoftLstmResult r = train_soft_lstm(synthetic::soft_marker_corpus(20, 2), zero);
  CHECK(r.history.epochs.empty());
  SoftLstmConfig bad;
  bad.spatial_dropout = 1.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("soft LSTM: best validation loss checkpoint") {
  SoftLstmConfig cfg;
  cfg.embedding_dim = 16;
  cfg.hidden_dim = 16;
  cfg.batch_size = 16;
  cfg.learning_rate = 0.01;
  cfg.max_epochs = 4;
  SoftLstmResult r = train_soft_lstm(synthetic::soft_marker_corpus(200, 3), cfg);
  REQUIRE(r.history.epochs.size() == 4);
  int argmin = 1;
  for (const EpochRecord& e : r.history.epochs)
    if (e.val_loss < r.history.epochs[argmin - 1].val_loss) argmin = e.epoch;
  CHECK(r.history.best_epoch == argmin);
}

TEST_CASE("checkpoints round trip") {
  testing::TempDir dir;
  Dataset ds = synthetic::marker_corpus(60, 13);
  HeadSpec head;
  head.kind = HeadKind::kBiGru;
  head.use_last4_concat = true;
  head.recurrent_hidden_dim = 6;
  FinetuneResult r = finetune(build_classifier(tiny_encoder(), head, 2, 14), ds, toy_finetune(1));
  save_classifier(r.model, r.history, dir / "ft");
  CHECK(is_neural_checkpoint(dir / "ft"));
  NeuralClassifier back = load_classifier(dir / "ft");
  std::vector<std::string> texts = {"zork rain", "park day", "unknownword"};
  auto a = predict_neural(r.model, texts), b = predict_neural(back, texts);
  for (size_t i = 0; i < texts.size(); ++i) CHECK(a[i].probabilities == b[i].probabilities);
  CHECK(read_history_csv(dir / "ft" / "history.csv").epochs == r.history.epochs);

  SoftLstmConfig cfg;
  cfg.embedding_dim = 6;
  cfg.hidden_dim = 6;
  cfg.max_epochs = 1;
  SoftLstmResult s = train_soft_lstm(synthetic::soft_marker_corpus(40, 4), cfg);
  save_soft_lstm(s.model, s.history, dir / "sl");
  auto loaded = load_neural_model(dir / "sl");
  auto c = predict_neural(s.model, texts), d = predict_neural(*loaded, texts);
  for (size_t i = 0; i < texts.size(); ++i) CHECK(c[i].probabilities == d[i].probabilities);
  CHECK(loaded->labels() == label_set(Task::kC));
  CHECK_FALSE(is_neural_checkpoint(dir.path()));
}

TEST_CASE("model registry") {
  testing::TempDir dir;
  ::setenv("OCP_MODEL_REGISTRY", (dir / "registry").c_str(), 1);
  EncoderSpec missing = tiny_encoder();
  missing.source = EncoderSource::kPretrainedRegistry;
  missing.identifier = "absent-model";
  CHECK(code_of([&] { build_classifier(missing, HeadSpec{}, 2, 0); }) == ErrorCode::kModelNotFound);

  FinetuneResult r = finetune(build_classifier(tiny_encoder(), HeadSpec{}, 2, 15), synthetic::marker_corpus(40, 16),
                              toy_finetune(1));
  publish_to_registry(r.model, "tiny-test");
  EncoderSpec from_registry;
  from_registry.source = EncoderSource::kPretrainedRegistry;
  from_registry.identifier = "tiny-test";
  NeuralClassifier m = build_classifier(from_registry, HeadSpec{}, 3, 0);
  CHECK(m.encoder_spec().hidden_dim == 16);
  REQUIRE(m.tokenizer().has_value());
  CHECK(*m.tokenizer() == *r.model.tokenizer());
  CHECK(registry_revision("tiny-test").size() == 64);
  ::unsetenv("OCP_MODEL_REGISTRY");
}

TEST_CASE("config json round trips") {
  FinetuneConfig f = toy_finetune(3);
  f.chunk_size = 7;
  CHECK(to_json(finetune_config_from_json(to_json(f))) == to_json(f));
  SoftLstmConfig s;
  s.hidden_dim = 5;
  CHECK(to_json(soft_lstm_config_from_json(to_json(s))) == to_json(s));
  HeadSpec h;
  h.kind = HeadKind::kBiGru;
  h.use_last4_concat = true;
  CHECK(to_json(head_spec_from_json(to_json(h))) == to_json(h));
  CHECK(to_json(encoder_spec_from_json(to_json(tiny_encoder()))) == to_json(tiny_encoder()));
  FinetuneConfig bad;
  bad.max_sequence_length = 1;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = FinetuneConfig{};
  bad.learning_rate = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

}  // TEST_SUITE
