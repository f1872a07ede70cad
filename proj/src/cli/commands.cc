#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "ocp/augment.h"
#include "ocp/baselines.h"
#include "ocp/cli.h"
#include "ocp/error.h"
#include "ocp/evaluate.h"
#include "ocp/hash.h"
#include "ocp/labels.h"
#include "ocp/manifest.h"
#include "ocp/neural.h"
#include "ocp/preprocess.h"
#include "ocp/utf8.h"

namespace ocp::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Carries an exit code out of a command body.
struct Exit {
  int code;
  std::string message;
};

struct Common {
  std::string task = "A";
  std::string language = "en";
  uint64_t seed = 0;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--task", c.task, "Sub-task: A, B or C")->capture_default_str();
  cmd->add_option("--language", c.language, "Language tag: en, da, el, tr, ar")->capture_default_str();
  cmd->add_option("--seed", c.seed, "Random seed")->capture_default_str();
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, path.string() + ": " + e.what());
  }
}

void write_json_file(const json& j, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

bool empty_file(const fs::path& path) {
  std::error_code ec;
  return fs::is_regular_file(path, ec) && fs::file_size(path, ec) == 0;
}

void check_task(const Dataset& ds, Task task, const fs::path& path) {
  if (ds.task() != task) {
    throw Error(ErrorCode::kInvalidArgument, path.string() + " holds sub-task " + std::string(to_string(ds.task())) +
                                                 " data, expected " + std::string(to_string(task)));
  }
}

Dataset load_labeled(const fs::path& path, Task task, Language language) {
  if (empty_file(path)) return Dataset(task, language, PayloadKind::kHard, {}, path.string());
  Dataset ds = load_any(path, task, language);
  check_task(ds, task, path);
  return ds;
}

Dataset load_soft(const fs::path& path, Task task, Language language) {
  if (empty_file(path)) return Dataset(task, language, PayloadKind::kSoft, {}, path.string());
  std::ifstream in(path, std::ios::binary);
  std::string first;
  std::getline(in, first);
  Dataset ds = first.rfind("#ocp-", 0) == 0 ? load_canonical(path) : load_soft_tsv(path, task, language);
  check_task(ds, task, path);
  return ds;
}

std::string percent(double fraction) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << 100.0 * fraction << '%';
  return s.str();
}

json stats_json(const ClassStats& stats) {
  json counts = json::object(), fractions = json::object();
  for (const auto& [label, n] : stats.counts) counts[std::string(to_string(label))] = n;
  for (const auto& [label, f] : stats.fractions) fractions[std::string(to_string(label))] = f;
  return {{"total", stats.total}, {"counts", counts}, {"fractions", fractions}};
}

void print_stats(const ClassStats& stats, std::ostream& out) {
  out << "sub-task " << to_string(stats.task) << ": " << stats.total << " records\n";
  for (Label l : label_set(stats.task)) {
    size_t n = stats.counts.count(l) ? stats.counts.at(l) : 0;
    out << "  " << to_string(l) << '\t' << n;
    if (stats.fractions_defined()) out << '\t' << percent(stats.fractions.at(l));
    out << '\n';
  }
}

fs::path path_with_suffix(const fs::path& p, const std::string& suffix) { return p.string() + suffix; }

// ------------------------------------------------------------------ convert

struct ConvertArgs {
  Common common;
  std::string input, output, manifest;
};

int cmd_convert(const ConvertArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
  RunManifest manifest("convert", argv);
  manifest.set_config({{"task", a.common.task}, {"language", a.common.language}, {"rule",
      "A: OFF iff mean > 0.5; B: UNT iff mean >= 0.5; C: argmax, ties IND > GRP > OTH"}});
  manifest.set_seed(a.common.seed);
  fs::path manifest_path = a.manifest.empty() ? path_with_suffix(a.output, ".manifest.json") : fs::path(a.manifest);
  Task task = parse_task(a.common.task);
  Language language = parse_language(a.common.language);
  manifest.add_input(a.input);
  try {
    Dataset soft = load_soft(a.input, task, language);
    Dataset hard = convert_dataset(soft);
    if (fs::path(a.output).has_parent_path()) fs::create_directories(fs::path(a.output).parent_path());
    save_canonical(hard, a.output);
    manifest.add_output(a.output);
    ClassStats stats = class_distribution(hard);
    print_stats(stats, out);
    manifest.set_metric("class_stats", stats_json(stats));
  } catch (const Error& e) {
    manifest.fail(e.what(), kExitInputError);
    manifest.write(manifest_path);
    throw Exit{kExitInputError, e.what()};
  }
  manifest.write(manifest_path);
  return kExitOk;
}

// -------------------------------------------------------------------- train

struct TrainArgs {
  Common common;
  std::string family;
  std::string config, data, output;
};

json baseline_pipeline(const json& cfg, Task task, Language language) {
  return {{"family", "baseline"},
          {"task", to_string(task)},
          {"language", to_string(language)},
          {"preprocess", cfg.value("preprocess", std::string(to_string(default_preset(language))))}};
}

int cmd_train(const TrainArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
  RunManifest manifest("train", argv);
  manifest.set_seed(a.common.seed);
  fs::path out_dir(a.output);
  fs::path manifest_path = out_dir / "manifest.json";
  auto fail = [&](int code, const std::string& msg) -> Exit {
    manifest.fail(msg, code);
    manifest.write(manifest_path);
    return Exit{code, msg};
  };

  Task task{};
  Language language{};
  json cfg = json::object();
  std::optional<Dataset> ds;
  try {
    task = parse_task(a.common.task);
    language = parse_language(a.common.language);
    if (!a.config.empty()) {
      manifest.add_input(a.config);
      cfg = read_json_file(a.config);
    }
    manifest.add_input(a.data);
    ds = a.family == "soft-lstm" ? load_soft(a.data, task, language) : load_labeled(a.data, task, language);
  } catch (const Error& e) {
    throw fail(kExitInputError, e.what());
  }
  fs::create_directories(out_dir);

  try {
    if (a.family == "baseline") {
      json spec_json = cfg;
      if (!spec_json.contains("kind")) spec_json["kind"] = "linear_svm";
      BaselineSpec spec = baseline_spec_from_json(spec_json);
      spec.hyperparams.seed = a.common.seed;
      double split = cfg.value("split", 0.8);
      json pipeline = baseline_pipeline(cfg, task, language);
      Preset preset = parse_preset(pipeline["preprocess"].get<std::string>());
      json snapshot = to_json(spec);
      snapshot["split"] = split;
      snapshot["preprocess"] = pipeline["preprocess"];
      snapshot["metric_convention"] = "corpus";
      snapshot["task"] = to_string(task);
      snapshot["language"] = to_string(language);
      manifest.set_config(snapshot);

      ExperimentResult r = run_baseline_experiment(*ds, spec, split, a.common.seed, make_preset(preset));
      save_baseline(r.model, out_dir / "model.json");
      save_tfidf(r.tfidf, out_dir / "tfidf.tsv");
      write_json_file(pipeline, out_dir / "pipeline.json");
      write_json_file(to_json(r.report), out_dir / "eval_report.json");
      for (const char* f : {"model.json", "tfidf.tsv", "pipeline.json", "eval_report.json"}) {
        manifest.add_output(out_dir / f);
      }
      manifest.set_metric("macro_f1", r.report.macro_f1);
      manifest.set_metric("accuracy", r.report.accuracy);
      manifest.set_metric("metric_convention", "corpus");
      manifest.set_metric("train_size", r.split.train.size());
      manifest.set_metric("validation_size", r.split.validation.size());
      manifest.set_metric("converged", r.model.converged);
      manifest.set_metric("iterations", r.model.iterations);
      if (!r.model.converged) manifest.add_note("NonConvergence: solver stopped at max_iter");
      out << to_string(spec.kind) << " validation macro F1 " << r.report.macro_f1 << ", accuracy "
          << r.report.accuracy << '\n';
    } else if (a.family == "finetune") {
      nn::EncoderSpec enc = nn::encoder_spec_from_json(cfg.value("encoder", json::object()));
      nn::HeadSpec head = nn::head_spec_from_json(cfg.value("head", json::object()));
      nn::FinetuneConfig ft = nn::finetune_config_from_json(cfg.value("finetune", json::object()));
      ft.seed = a.common.seed;
      json snapshot{{"encoder", nn::to_json(enc)}, {"head", nn::to_json(head)}, {"finetune", nn::to_json(ft)},
                    {"task", to_string(task)}, {"language", to_string(language)}};
      manifest.set_config(snapshot);
      if (enc.source == nn::EncoderSource::kPretrainedRegistry) {
        manifest.set_metric("encoder_identifier", enc.identifier);
        manifest.set_metric("encoder_revision", nn::registry_revision(enc.identifier));
      }
      nn::NeuralClassifier model = nn::build_classifier(enc, head, label_set(task).size(), a.common.seed);
      nn::FinetuneResult r = nn::finetune(std::move(model), *ds, ft);
      nn::save_classifier(r.model, r.history, out_dir);
      for (const char* f : {"config.json", "weights.bin", "vocab.txt", "history.csv"}) {
        manifest.add_output(out_dir / f);
      }
      manifest.set_metric("epochs", r.history.epochs.size());
      manifest.set_metric("best_epoch", r.history.best_epoch);
      manifest.set_metric("decayed_parameters", r.decayed_parameters.size());
      manifest.set_metric("metric_convention", "batch_averaged");
      if (r.history.best_epoch > 0) {
        const nn::EpochRecord& e = r.history.epochs[r.history.best_epoch - 1];
        manifest.set_metric("val_f1_batchavg", e.val_f1_batchavg);
        manifest.set_metric("val_acc_batchavg", e.val_acc_batchavg);
        manifest.set_metric("val_loss", e.val_loss);
        out << "best epoch " << e.epoch << ": val F1 (batch-averaged) " << e.val_f1_batchavg << '\n';
      } else {
        out << "no epochs trained\n";
      }
    } else if (a.family == "soft-lstm") {
      nn::SoftLstmConfig sc = nn::soft_lstm_config_from_json(cfg);
      sc.seed = a.common.seed;
      json snapshot = nn::to_json(sc);
      snapshot["task"] = to_string(task);
      snapshot["language"] = to_string(language);
      manifest.set_config(snapshot);
      nn::SoftLstmResult r = nn::train_soft_lstm(*ds, sc);
      nn::save_soft_lstm(r.model, r.history, out_dir);
      for (const char* f : {"config.json", "weights.bin", "vocab.txt", "history.csv"}) {
        manifest.add_output(out_dir / f);
      }
      manifest.set_metric("epochs", r.history.epochs.size());
      manifest.set_metric("best_epoch", r.history.best_epoch);
      manifest.set_metric("metric_convention", "batch_averaged");
      if (r.history.best_epoch > 0) {
        const nn::EpochRecord& e = r.history.epochs[r.history.best_epoch - 1];
        manifest.set_metric("val_loss", e.val_loss);
        manifest.set_metric("val_f1_batchavg", e.val_f1_batchavg);
        out << "best epoch " << e.epoch << ": val loss " << e.val_loss << '\n';
      } else {
        out << "no epochs trained\n";
      }
    } else {
      throw fail(kExitInputError, "unknown model family '" + a.family + "' (baseline, finetune, soft-lstm)");
    }
  } catch (const Error& e) {
    throw fail(kExitTrainingError, e.what());
  }
  manifest.write(manifest_path);
  return kExitOk;
}

// ----------------------------------------------------------------- evaluate

struct EvaluateArgs {
  Common common;
  std::string model, predictions, data, gold, output;
};

std::vector<Label> read_predictions(const fs::path& path, const Dataset& ds) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot read " + path.string());
  std::map<std::string, Label> by_id;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos) throw Error(ErrorCode::kMalformedRow, path.string() + ": expected id,label", line_no);
    by_id[line.substr(0, comma)] = parse_label(ds.task(), line.substr(comma + 1));
  }
  std::vector<Label> out;
  for (const TweetRecord& r : ds.records()) {
    auto it = by_id.find(r.id);
    if (it == by_id.end()) throw Error(ErrorCode::kUnmatchedId, "no prediction for id '" + r.id + "'");
    out.push_back(it->second);
  }
  return out;
}

std::vector<Label> predict_with_model(const fs::path& dir, const Dataset& ds, RunManifest& manifest) {
  std::vector<std::string> texts = ds.texts();
  if (fs::exists(dir / "pipeline.json")) {
    json pipeline = read_json_file(dir / "pipeline.json");
    manifest.add_input(dir / "model.json");
    manifest.add_input(dir / "tfidf.tsv");
    BaselineModel model = load_baseline(dir / "model.json");
    TfidfModel tfidf = load_tfidf(dir / "tfidf.tsv");
    PreprocessConfig pre = make_preset(parse_preset(pipeline.at("preprocess").get<std::string>()));
    for (std::string& t : texts) t = preprocess(t, pre);
    return predict_baseline(model, transform_all(tfidf, texts));
  }
  if (nn::is_neural_checkpoint(dir)) {
    manifest.add_input(dir / "weights.bin");
    std::unique_ptr<nn::NeuralModel> model = nn::load_neural_model(dir);
    std::vector<Label> out;
    for (const nn::Prediction& p : nn::predict_neural(*model, texts)) out.push_back(p.label);
    return out;
  }
  throw Error(ErrorCode::kModelNotFound, dir.string() + " is neither a baseline nor a neural model directory");
}

void write_predictions(const Dataset& ds, const std::vector<Label>& y, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
  for (size_t i = 0; i < ds.size(); ++i) out << ds[i].id << ',' << to_string(y[i]) << '\n';
}

int cmd_evaluate(const EvaluateArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
  RunManifest manifest("evaluate", argv);
  manifest.set_seed(a.common.seed);
  fs::path out_dir(a.output);
  fs::path manifest_path = out_dir / "manifest.json";
  manifest.set_config({{"task", a.common.task},
                       {"language", a.common.language},
                       {"model", a.model},
                       {"predictions", a.predictions},
                       {"metric_convention", "corpus"}});
  auto fail = [&](int code, const std::string& msg) -> Exit {
    manifest.fail(msg, code);
    manifest.write(manifest_path);
    return Exit{code, msg};
  };
  if (a.model.empty() == a.predictions.empty()) {
    throw fail(kExitInputError, "give exactly one of --model or --predictions");
  }
  std::optional<Dataset> ds;
  std::vector<Label> predicted;
  try {
    Task task = parse_task(a.common.task);
    Language language = parse_language(a.common.language);
    manifest.add_input(a.data);
    if (!a.gold.empty()) {
      manifest.add_input(a.gold);
      Dataset test = empty_file(a.data) ? Dataset(task, language, PayloadKind::kNone, {})
                                        : load_any(a.data, task, language);
      check_task(test, task, a.data);
      ds = join_gold(test, a.gold);
    } else {
      ds = load_labeled(a.data, task, language);
    }
    if (!a.predictions.empty()) {
      manifest.add_input(a.predictions);
      predicted = read_predictions(a.predictions, *ds);
    }
  } catch (const Error& e) {
    throw fail(kExitInputError, e.what());
  }
  try {
    if (!a.model.empty()) predicted = predict_with_model(a.model, *ds, manifest);
  } catch (const Error& e) {
    throw fail(e.code() == ErrorCode::kModelNotFound ? kExitInputError : kExitTrainingError, e.what());
  }
  fs::create_directories(out_dir);
  EvalReport report = evaluate(*ds, predicted);
  write_json_file(to_json(report), out_dir / "eval_report.json");
  write_json_file(to_json(error_report(*ds, predicted)), out_dir / "error_report.json");
  emit_confusion_figure(report.confusion, out_dir / "confusion");
  write_predictions(*ds, predicted, out_dir / "predictions.csv");
  for (const char* f : {"eval_report.json", "error_report.json", "confusion.csv", "confusion.png", "predictions.csv"}) {
    manifest.add_output(out_dir / f);
  }
  manifest.set_metric("macro_f1", report.macro_f1);
  manifest.set_metric("accuracy", report.accuracy);
  manifest.set_metric("records", ds->size());
  manifest.set_metric("misclassified", report.misclassified.size());
  manifest.set_metric("metric_convention", "corpus");
  manifest.write(manifest_path);
  out << "macro F1 " << report.macro_f1 << ", accuracy " << report.accuracy << " over " << ds->size()
      << " records\n";
  return kExitOk;
}

// ------------------------------------------------------------------ augment

struct AugmentArgs {
  Common common;
  std::string base, source, target, client = "stub", output;
  std::string source_language = "en";
  int max_retries = 3;
  double backoff = 0.5;
  size_t workers = 1;
  double max_skip_fraction = 0.0;
  double requests_per_second = 5.0;
};

int cmd_augment(const AugmentArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
  RunManifest manifest("augment", argv);
  manifest.set_seed(a.common.seed);
  fs::path output(a.output);
  fs::path manifest_path = path_with_suffix(output, ".manifest.json");
  manifest.set_config({{"target", a.target},
                       {"source_language", a.source_language},
                       {"client", a.client},
                       {"max_retries", a.max_retries},
                       {"backoff_seconds", a.client == "stub" ? 0.0 : a.backoff},
                       {"workers", a.workers},
                       {"max_skip_fraction", a.max_skip_fraction},
                       {"requests_per_second", a.requests_per_second}});
  auto fail = [&](int code, const std::string& msg) -> Exit {
    manifest.fail(msg, code);
    manifest.write(manifest_path);
    return Exit{code, msg};
  };
  std::optional<Dataset> base, source;
  Language target{};
  try {
    target = parse_language(a.target);
    Language source_language = parse_language(a.source_language);
    if (a.client != "stub" && a.client != "live") {
      throw Error(ErrorCode::kInvalidArgument, "--client must be stub or live");
    }
    manifest.add_input(a.base);
    manifest.add_input(a.source);
    base = load_labeled(a.base, Task::kA, target);
    source = load_labeled(a.source, Task::kA, source_language);
  } catch (const Error& e) {
    throw fail(kExitInputError, e.what());
  }

  std::unique_ptr<TranslationClient> client;
  try {
    if (a.client == "stub") {
      client = std::make_unique<StubClient>();
    } else {
      HttpClientConfig hc = HttpClientConfig::from_env();
      hc.requests_per_second = a.requests_per_second;
      client = std::make_unique<HttpTranslationClient>(hc);
    }
  } catch (const Error& e) {
    throw fail(kExitExternalError, e.what());
  }

  Dataset offensive = select_offensive(*source);
  AugmentOptions opt{a.max_retries, a.client == "stub" ? 0.0 : a.backoff, a.workers};
  TranslationResult tr = [&] {
    try {
      return translate_dataset(offensive, *client, target, opt);
    } catch (const Error& e) {
      throw fail(kExitInputError, e.what());
    }
  }();
  Dataset merged = [&] {
    try {
      return merge_augmented(*base, tr.dataset);
    } catch (const Error& e) {
      throw fail(kExitInputError, e.what());
    }
  }();
  if (output.has_parent_path()) fs::create_directories(output.parent_path());
  save_canonical(merged, output);
  fs::path provenance = path_with_suffix(output, ".provenance.jsonl");
  fs::path skipped = path_with_suffix(output, ".skipped.jsonl");
  write_provenance_jsonl(tr.provenance, provenance);
  write_skip_report(tr.skipped, skipped);
  for (const fs::path& p : {output, provenance, skipped}) manifest.add_output(p);

  ClassStats before = class_distribution(*base);
  ClassStats after = class_distribution(merged);
  manifest.set_metric("selected_offensive", offensive.size());
  manifest.set_metric("translated", tr.provenance.size());
  manifest.set_metric("skipped", tr.skipped.size());
  manifest.set_metric("base", stats_json(before));
  manifest.set_metric("merged", stats_json(after));
  out << "translated " << tr.provenance.size() << " of " << offensive.size() << " OFF records, skipped "
      << tr.skipped.size() << "; merged dataset has " << merged.size() << " records\n";
  double skip_fraction =
      offensive.empty() ? 0.0 : static_cast<double>(tr.skipped.size()) / static_cast<double>(offensive.size());
  if (skip_fraction > a.max_skip_fraction) {
    throw fail(kExitExternalError, "translation failed for " + std::to_string(tr.skipped.size()) + " of " +
                                       std::to_string(offensive.size()) + " records (see " + skipped.string() + ")");
  }
  manifest.write(manifest_path);
  return kExitOk;
}

// --------------------------------------------------------------- preprocess

struct PreprocessArgs {
  Common common;
  std::string preset, data, output;
  bool soft = false;
};

int cmd_preprocess(const PreprocessArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
  RunManifest manifest("preprocess", argv);
  fs::path manifest_path = path_with_suffix(a.output, ".manifest.json");
  try {
    Task task = parse_task(a.common.task);
    Language language = parse_language(a.common.language);
    Preset preset = a.preset.empty() ? default_preset(language) : parse_preset(a.preset);
    manifest.set_config({{"preset", to_string(preset)}, {"task", a.common.task}, {"language", a.common.language}});
    manifest.add_input(a.data);
    Dataset ds = a.soft ? load_soft(a.data, task, language) : load_labeled(a.data, task, language);
    PreprocessConfig cfg = make_preset(preset);
    std::vector<TweetRecord> records;
    size_t dropped = 0;
    for (const TweetRecord& r : ds.records()) {
      TweetRecord copy = r;
      copy.text = preprocess(r.text, cfg);
      if (utf8::trim(copy.text).empty()) {
        ++dropped;
        continue;
      }
      records.push_back(std::move(copy));
    }
    Dataset processed(ds.task(), ds.language(), ds.payload_kind(), std::move(records),
                      ds.provenance() + (ds.provenance().empty() ? "" : "; ") + "preprocessed:" +
                          std::string(to_string(preset)));
    if (fs::path(a.output).has_parent_path()) fs::create_directories(fs::path(a.output).parent_path());
    save_canonical(processed, a.output);
    manifest.add_output(a.output);
    manifest.set_metric("records", processed.size());
    manifest.set_metric("dropped_empty", dropped);
    out << "wrote " << processed.size() << " records (" << dropped << " empty after preprocessing dropped)\n";
  } catch (const Error& e) {
    manifest.fail(e.what(), kExitInputError);
    manifest.write(manifest_path);
    throw Exit{kExitInputError, e.what()};
  }
  manifest.write(manifest_path);
  return kExitOk;
}

// ------------------------------------------------------------------- report

struct ReportArgs {
  Common common;
  std::string data, eval_dir;
  bool soft = false;
  size_t max_examples = 5;
};

int cmd_report(const ReportArgs& a, std::ostream& out) {
  if (a.data.empty() == a.eval_dir.empty()) throw Exit{kExitInputError, "give exactly one of --data or --eval-dir"};
  try {
    if (!a.data.empty()) {
      Task task = parse_task(a.common.task);
      Language language = parse_language(a.common.language);
      Dataset ds = a.soft ? convert_dataset(load_soft(a.data, task, language)) : load_labeled(a.data, task, language);
      ClassStats stats = class_distribution(ds);
      print_stats(stats, out);
      bool all_present = stats.total > 0;
      for (Label l : label_set(task)) all_present = all_present && stats.counts.count(l) && stats.counts.at(l) > 0;
      if (all_present) {
        ClassWeights w = balanced_weights(stats);
        out << "balanced weights:";
        for (Label l : label_set(task)) out << ' ' << to_string(l) << '=' << w.at(l);
        out << '\n';
      }
      return kExitOk;
    }
    fs::path dir(a.eval_dir);
    EvalReport report = eval_report_from_json(read_json_file(dir / "eval_report.json"));
    out << "macro F1 " << report.macro_f1 << ", accuracy " << report.accuracy << " ("
        << to_string(report.metric_convention) << ")\n";
    out << "confusion (rows true, columns predicted):\n  ";
    for (Label l : report.confusion.label_order) out << '\t' << to_string(l);
    out << '\n';
    for (size_t i = 0; i < report.confusion.label_order.size(); ++i) {
      out << "  " << to_string(report.confusion.label_order[i]);
      for (size_t n : report.confusion.counts[i]) out << '\t' << n;
      out << '\n';
    }
    std::map<std::pair<Label, Label>, std::vector<const Misclassification*>> groups;
    for (const Misclassification& m : report.misclassified) groups[{m.truth, m.predicted}].push_back(&m);
    for (const auto& [cell, items] : groups) {
      out << to_string(cell.first) << " predicted as " << to_string(cell.second) << ": " << items.size() << '\n';
      for (size_t k = 0; k < items.size() && k < a.max_examples; ++k) {
        out << "  " << items[k]->id << '\t' << items[k]->text << '\n';
      }
    }
  } catch (const Error& e) {
    throw Exit{kExitInputError, e.what()};
  }
  return kExitOk;
}

// ------------------------------------------------------------------- replay

struct ReplayArgs {
  std::string manifest;
};

int cmd_replay(const ReplayArgs& a, std::ostream& out, std::ostream& err) {
  json m;
  std::vector<std::string> invocation;
  try {
    m = read_json_file(a.manifest);
    invocation = m.at("invocation").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw Exit{kExitInputError, a.manifest + ": " + e.what()};
  } catch (const Error& e) {
    throw Exit{kExitInputError, e.what()};
  }
  if (!invocation.empty() && invocation[0] == "replay") throw Exit{kExitInputError, "cannot replay a replay"};
  fs::path previous = fs::current_path();
  fs::path wd = m.value("working_directory", previous.string());
  std::error_code ec;
  fs::current_path(wd, ec);
  if (ec) throw Exit{kExitInputError, "cannot enter working directory " + wd.string()};
  int code = run(invocation, out, err);
  size_t same = 0, differ = 0;
  for (const json& o : m.value("outputs", json::array())) {
    if (o.at("sha256").is_null()) continue;
    fs::path p = o.at("path").get<std::string>();
    std::string now = fs::is_regular_file(p) ? sha256_file(p) : std::string();
    if (now == o.at("sha256").get<std::string>()) {
      ++same;
    } else {
      ++differ;
      err << "replay: " << p.string() << " differs from the recorded run\n";
    }
  }
  fs::current_path(previous, ec);
  out << "replay: exit " << code << " (recorded " << m.value("exit_code", 0) << "), " << same
      << " outputs identical, " << differ << " differ\n";
  if (code != m.value("exit_code", 0)) return code == 0 ? kExitTrainingError : code;
  return differ == 0 ? kExitOk : kExitTrainingError;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Offensive-language classification toolkit"};
  app.name("ocp");
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(OCP_VERSION));

  ConvertArgs convert;
  auto* c_convert = app.add_subcommand("convert", "Map soft scores to hard labels and report class shares");
  add_common(c_convert, convert.common);
  c_convert->add_option("--input", convert.input, "Soft-label TSV or canonical file")->required();
  c_convert->add_option("--out", convert.output, "Canonical hard-label output")->required();
  c_convert->add_option("--manifest", convert.manifest, "Manifest path (default <out>.manifest.json)");

  TrainArgs train;
  auto* c_train = app.add_subcommand("train", "Train a baseline, fine-tuned or soft-label model");
  add_common(c_train, train.common);
  c_train->add_option("family", train.family, "baseline | finetune | soft-lstm")->required();
  c_train->add_option("--config", train.config, "JSON config for the family");
  c_train->add_option("--data", train.data, "Training dataset")->required();
  c_train->add_option("--out", train.output, "Output directory")->required();

  EvaluateArgs evaluate_args;
  auto* c_eval = app.add_subcommand("evaluate", "Score a model or a prediction file against gold labels");
  add_common(c_eval, evaluate_args.common);
  c_eval->add_option("--model", evaluate_args.model, "Model directory written by train");
  c_eval->add_option("--predictions", evaluate_args.predictions, "id,label CSV of predictions");
  c_eval->add_option("--data", evaluate_args.data, "Test dataset")->required();
  c_eval->add_option("--gold", evaluate_args.gold, "id,label gold file for an unlabeled test set");
  c_eval->add_option("--out", evaluate_args.output, "Output directory")->required();

  AugmentArgs augment;
  auto* c_aug = app.add_subcommand("augment", "Append translated OFF tweets to a training set");
  add_common(c_aug, augment.common);
  c_aug->add_option("--base", augment.base, "Target-language training set (sub-task A)")->required();
  c_aug->add_option("--source", augment.source, "Source dataset whose OFF tweets are translated")->required();
  c_aug->add_option("--target", augment.target, "Target language")->required();
  c_aug->add_option("--source-language", augment.source_language, "Source language")->capture_default_str();
  c_aug->add_option("--client", augment.client, "stub | live")->capture_default_str();
  c_aug->add_option("--out", augment.output, "Merged canonical output")->required();
  c_aug->add_option("--max-retries", augment.max_retries, "Retries per record")->capture_default_str();
  c_aug->add_option("--backoff", augment.backoff, "First retry delay in seconds (live client)")->capture_default_str();
  c_aug->add_option("--workers", augment.workers, "Parallel translation workers")->capture_default_str();
  c_aug->add_option("--max-skip-fraction", augment.max_skip_fraction, "Tolerated fraction of skipped records")
      ->capture_default_str();
  c_aug->add_option("--rps", augment.requests_per_second, "Request rate cap (live client)")->capture_default_str();

  PreprocessArgs pre;
  auto* c_pre = app.add_subcommand("preprocess", "Apply a preprocessing preset to a dataset");
  add_common(c_pre, pre.common);
  c_pre->add_option("--preset", pre.preset, "none, greek, arabic, turkish, danish, english, english_soft_c");
  c_pre->add_option("--data", pre.data, "Input dataset")->required();
  c_pre->add_option("--out", pre.output, "Canonical output")->required();
  c_pre->add_flag("--soft", pre.soft, "Input carries soft scores");

  ReportArgs report;
  auto* c_report = app.add_subcommand("report", "Class statistics of a dataset or summary of an evaluation");
  add_common(c_report, report.common);
  c_report->add_option("--data", report.data, "Dataset to describe");
  c_report->add_flag("--soft", report.soft, "Dataset carries soft scores (converted first)");
  c_report->add_option("--eval-dir", report.eval_dir, "Directory written by evaluate");
  c_report->add_option("--examples", report.max_examples, "Examples shown per confusion cell")->capture_default_str();

  ReplayArgs replay;
  auto* c_replay = app.add_subcommand("replay", "Re-run the invocation recorded in a manifest and compare outputs");
  c_replay->add_option("manifest", replay.manifest, "Manifest JSON")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (c_convert->parsed()) return cmd_convert(convert, args, out);
    if (c_train->parsed()) return cmd_train(train, args, out);
    if (c_eval->parsed()) return cmd_evaluate(evaluate_args, args, out);
    if (c_aug->parsed()) return cmd_augment(augment, args, out);
    if (c_pre->parsed()) return cmd_preprocess(pre, args, out);
    if (c_report->parsed()) return cmd_report(report, out);
    if (c_replay->parsed()) return cmd_replay(replay, out, err);
  } catch (const Exit& e) {
    err << "error: " << e.message << '\n';
    return e.code;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitTrainingError;
  }
  return kExitInputError;
}

}  // namespace ocp::cli
