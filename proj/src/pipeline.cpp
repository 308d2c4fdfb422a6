#include "atoss/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>

#include "atoss/absa_backends.hpp"
#include "atoss/complexity.hpp"
#include "atoss/core_json.hpp"
#include "atoss/digest.hpp"
#include "atoss/parallel.hpp"
#include "atoss/records.hpp"
#include "atoss/splitter.hpp"
#include "atoss/synthetic.hpp"
#include "atoss/teacher.hpp"
#include "atoss/tiny_model.hpp"

namespace atoss::pipeline {

namespace fs = std::filesystem;
using core::AnnotatedExample;
using nlohmann::json;

std::string to_string(Stage stage) {
  switch (stage) {
    case Stage::prepare: return "prepare";
    case Stage::categorize: return "categorize";
    case Stage::gen_splits: return "gen_splits";
    case Stage::filter: return "filter";
    case Stage::train_sft: return "train_sft";
    case Stage::build_prefs: return "build_prefs";
    case Stage::train_dpo: return "train_dpo";
    case Stage::infer: return "infer";
    case Stage::evaluate: return "evaluate";
    case Stage::oracle_vote: return "oracle_vote";
  }
  return "prepare";
}

Stage stage_from_string(std::string_view name) {
  std::string n(name);
  std::replace(n.begin(), n.end(), '-', '_');
  for (Stage s : {Stage::prepare, Stage::categorize, Stage::gen_splits,
                  Stage::filter, Stage::train_sft, Stage::build_prefs,
                  Stage::train_dpo, Stage::infer, Stage::evaluate,
                  Stage::oracle_vote}) {
    if (to_string(s) == n) return s;
  }
  throw ConfigInvalid("unknown stage: " + std::string(name));
}

json manifest_to_json(const RunManifest& m) {
  return json{{"run_id", m.run_id},
              {"stage", to_string(m.stage)},
              {"config_digest", m.config_digest},
              {"input_digests", m.input_digests},
              {"output_paths", m.output_paths},
              {"seed", m.seed},
              {"started_at", m.started_at},
              {"finished_at", m.finished_at}};
}

Config Config::load(const std::string& path) {
  Config cfg;
  cfg.path_ = path;
  std::string bytes;
  try {
    bytes = util::read_file(path);
  } catch (const Error&) {
    throw ConfigInvalid("cannot read config file: " + path);
  }
  try {
    cfg.raw_ = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw ConfigInvalid(std::string("config is not valid JSON: ") + e.what());
  }
  if (!cfg.raw_.is_object()) throw ConfigInvalid("config root must be an object");
  cfg.digest_ = util::sha256_hex(bytes);
  return cfg;
}

std::string Config::run_dir() const {
  std::string dir = raw_.value("run_dir", "");
  if (dir.empty()) throw ConfigInvalid("config requires run_dir");
  return dir;
}

uint64_t Config::seed() const { return raw_.value("seed", uint64_t{17}); }

json Config::section(const std::string& name) const {
  if (raw_.contains(name) && raw_[name].is_object()) return raw_[name];
  return json::object();
}

json Config::require_section(const std::string& name) const {
  if (!raw_.contains(name) || !raw_[name].is_object())
    throw ConfigInvalid("config missing required section: " + name);
  return raw_[name];
}

Config Config::with_overrides(const json& overrides) const {
  Config out = *this;
  for (auto it = overrides.begin(); it != overrides.end(); ++it) {
    if (it->is_object() && out.raw_.contains(it.key()) &&
        out.raw_[it.key()].is_object()) {
      for (auto inner = it->begin(); inner != it->end(); ++inner)
        out.raw_[it.key()][inner.key()] = inner.value();
    } else {
      out.raw_[it.key()] = it.value();
    }
  }
  return out;
}

namespace {

std::string iso_utc_now() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string compact_utc_now() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y%m%dT%H%M%S", &tm);
  auto us = std::chrono::duration_cast<std::chrono::microseconds>(
                now.time_since_epoch())
                .count() %
            1000000;
  std::ostringstream out;
  out << buf << '.' << us;
  return out.str();
}

// Collects input/output paths and digests while a stage body runs.
struct StageContext {
  const Config& cfg;
  RunManifest manifest;

  explicit StageContext(const Config& config, Stage stage) : cfg(config) {
    manifest.stage = stage;
    manifest.config_digest = config.digest();
    manifest.seed = config.seed();
    manifest.started_at = iso_utc_now();
    manifest.run_id = to_string(stage) + "-" + compact_utc_now() + "-" +
                      config.digest().substr(0, 8);
  }

  std::string art(const std::string& name) const {
    return (fs::path(cfg.run_dir()) / name).string();
  }

  void input(const std::string& path) {
    if (!fs::exists(path))
      throw MissingUpstream("missing upstream artifact: " + path);
    manifest.input_digests[path] = util::sha256_file(path);
  }

  void output(const std::string& path) {
    manifest.output_paths.push_back(path);
  }
};

core::Task config_task(const Config& cfg) {
  json ds = cfg.require_section("dataset");
  return core::task_from_string(ds.value("task", "ASQP"));
}

core::ParseOptions config_parse_options(const Config& cfg) {
  core::ParseOptions opts;
  std::string order = cfg.section("dataset").value("order", "");
  if (!order.empty()) opts.order = core::ElementOrder::parse(order);
  return opts;
}

bool looks_like_records(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    for (char c : line) {
      if (c == ' ' || c == '\t') continue;
      return c == '{';
    }
  }
  return false;
}

std::vector<AnnotatedExample> load_examples_any(const std::string& path,
                                                core::Task task,
                                                const core::ParseOptions& opts) {
  if (looks_like_records(path))
    return util::read_records<AnnotatedExample>(path);
  return core::load_dataset(path, task, opts);
}

// Rethrowable exception capture around data-parallel loops.
template <typename F>
void parallel_for_rethrow(size_t n, F&& fn) {
  std::exception_ptr error = nullptr;
  std::mutex mu;
  par::parallel_for(n, [&](size_t i) {
    try {
      fn(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (!error) error = std::current_exception();
    }
  });
  if (error) std::rethrow_exception(error);
}

std::shared_ptr<llm::CompletionClient> make_teacher(const Config& cfg) {
  json t = cfg.require_section("teacher");
  std::string kind = t.value("kind", "synthetic");
  std::string cache_dir = t.value("cache_dir", "");

  std::shared_ptr<llm::CompletionClient> client;
  if (kind == "synthetic") {
    client = std::make_shared<llm::ScriptedClient>(
        synthetic::oracle_teacher_script());
  } else if (kind == "http") {
    llm::HttpConfig http;
    http.base_url = t.value("endpoint", "");
    http.path = t.value("path", "/v1/chat/completions");
    http.model = t.value("model", "");
    http.api_key_env = t.value("api_key_env", "ATOSS_TEACHER_KEY");
    http.retry.max_retries = t.value("max_retries", 3);
    http.retry.backoff_ms = t.value("backoff_ms", 200);
    if (cache_dir.empty())
      throw ConfigInvalid("http teacher requires teacher.cache_dir");
    client = std::make_shared<llm::HttpClient>(http);
  } else if (kind == "replay") {
    if (cache_dir.empty())
      throw ConfigInvalid("replay teacher requires teacher.cache_dir");
    client = nullptr;
  } else {
    throw ConfigInvalid("unknown teacher kind: " + kind);
  }

  if (!cache_dir.empty())
    return std::make_shared<llm::ReplayCacheClient>(client, cache_dir);
  return client;
}

teacher::FilterConfig config_filter(const Config& cfg) {
  json f = cfg.section("filter");
  teacher::FilterConfig out;
  out.k = f.value("k", 2);
  out.n_candidates = f.value("n_candidates", 10);
  out.validate();
  return out;
}

model::TinyConfig config_model(const Config& cfg) {
  json m = cfg.section("model");
  model::TinyConfig out;
  out.embed_dim = m.value("embed_dim", 10);
  out.hidden_dim = m.value("hidden_dim", 40);
  out.max_len = m.value("max_len", 240);
  out.seed = m.value("seed", cfg.seed());
  return out;
}

model::SftConfig config_sft(const Config& cfg) {
  json s = cfg.section("sft");
  model::SftConfig out;
  out.train_batch = s.value("train_batch", 64);
  out.val_batch = s.value("val_batch", 8);
  out.epochs = s.value("epochs", 50);
  out.learning_rate = s.value("learning_rate", 6e-5);
  out.early_stop_patience = s.value("early_stop_patience", 20);
  out.validate();
  return out;
}

pref::DpoConfig config_dpo(const Config& cfg) {
  json d = cfg.section("dpo");
  pref::DpoConfig out;
  out.beta = d.value("beta", 0.1);
  out.batch = d.value("batch", 8);
  out.epochs = d.value("epochs", 1);
  out.learning_rate = d.value("learning_rate", 1e-4);
  out.loss_kind = d.value("loss_kind", "sigmoid");
  out.validate();
  return out;
}

std::map<std::string, std::vector<teacher::SplitCandidate>> group_candidates(
    const std::vector<teacher::SplitCandidate>& flat) {
  std::map<std::string, std::vector<teacher::SplitCandidate>> out;
  for (const auto& c : flat) out[c.source_id].push_back(c);
  return out;
}

// ---- stage bodies ----------------------------------------------------------

void do_prepare(StageContext& ctx) {
  json ds = ctx.cfg.require_section("dataset");
  std::string path = ds.value("path", "");
  if (path.empty()) throw ConfigInvalid("dataset.path is required");
  ctx.input(path);

  auto examples = load_examples_any(path, config_task(ctx.cfg),
                                    config_parse_options(ctx.cfg));
  std::string out = ctx.art("dataset.jsonl");
  util::write_records(out, examples);
  ctx.output(out);

  core::DatasetStats stats = core::dataset_stats(examples);
  json stats_json = {
      {"dataset", path},
      {"sentence_count", stats.sentence_count},
      {"positive", stats.quad_counts_by_polarity.at(core::Polarity::positive)},
      {"neutral", stats.quad_counts_by_polarity.at(core::Polarity::neutral)},
      {"negative", stats.quad_counts_by_polarity.at(core::Polarity::negative)},
      {"category_set_size", stats.category_set_size}};
  std::string stats_path = ctx.art("stats.json");
  util::atomic_write(stats_path, [&](std::ostream& o) {
    o << stats_json.dump(2) << '\n';
  });
  ctx.output(stats_path);
  std::string csv_path = ctx.art("stats.csv");
  util::write_csv(csv_path,
                  {"dataset", "sentences", "positive", "neutral", "negative",
                   "categories"},
                  {{path, std::to_string(stats.sentence_count),
                    std::to_string(
                        stats.quad_counts_by_polarity.at(core::Polarity::positive)),
                    std::to_string(
                        stats.quad_counts_by_polarity.at(core::Polarity::neutral)),
                    std::to_string(
                        stats.quad_counts_by_polarity.at(core::Polarity::negative)),
                    std::to_string(stats.category_set_size)}});
  ctx.output(csv_path);
}

void do_categorize(StageContext& ctx) {
  std::string dataset = ctx.art("dataset.jsonl");
  ctx.input(dataset);
  auto examples = util::read_records<AnnotatedExample>(dataset);
  complexity::RatioReport ratios = complexity::ratio_report(examples);

  json out = {{"dataset", ctx.cfg.section("dataset").value("path", dataset)},
              {"n_examples", examples.size()},
              {"simple_pct", ratios.simple_pct},
              {"compound_pct", ratios.compound_pct},
              {"simple_count", ratios.simple_count},
              {"compound_count", ratios.compound_count}};
  std::string json_path = ctx.art("ratios.json");
  util::atomic_write(json_path,
                     [&](std::ostream& o) { o << out.dump(2) << '\n'; });
  ctx.output(json_path);

  std::string csv_path = ctx.art("ratios.csv");
  util::write_csv(csv_path,
                  {"dataset", "simple_pct", "compound_pct", "simple_count",
                   "compound_count"},
                  {{out["dataset"].get<std::string>(),
                    std::to_string(ratios.simple_pct),
                    std::to_string(ratios.compound_pct),
                    std::to_string(ratios.simple_count),
                    std::to_string(ratios.compound_count)}});
  ctx.output(csv_path);
}

void do_gen_splits(StageContext& ctx, teacher::PromptMode mode) {
  std::string dataset = ctx.art("dataset.jsonl");
  ctx.input(dataset);
  auto examples = util::read_records<AnnotatedExample>(dataset);

  auto client = make_teacher(ctx.cfg);
  teacher::FilterConfig filter = config_filter(ctx.cfg);
  double temperature = ctx.cfg.section("teacher").value("temperature", 1.0);

  std::vector<std::vector<teacher::SplitCandidate>> slots(examples.size());
  parallel_for_rethrow(examples.size(), [&](size_t i) {
    slots[i] = teacher::generate_candidates(*client, examples[i], mode, filter,
                                            temperature);
  });

  std::vector<teacher::SplitCandidate> flat;
  for (auto& s : slots)
    for (auto& c : s) flat.push_back(std::move(c));

  std::string out = ctx.art(mode == teacher::PromptMode::zero_shot
                                ? "candidates_zero.jsonl"
                                : "candidates_few.jsonl");
  util::write_records(out, flat);
  ctx.output(out);
}

void do_filter(StageContext& ctx) {
  std::string dataset = ctx.art("dataset.jsonl");
  std::string candidates_path = ctx.art("candidates_zero.jsonl");
  ctx.input(dataset);
  ctx.input(candidates_path);

  auto examples = util::read_records<AnnotatedExample>(dataset);
  auto grouped = group_candidates(
      util::read_records<teacher::SplitCandidate>(candidates_path));
  teacher::FilterConfig filter = config_filter(ctx.cfg);

  std::vector<teacher::SplitCandidate> kept;
  std::vector<splitter::SftRecord> sft_data;
  for (const auto& ex : examples) {
    auto it = grouped.find(ex.id);
    if (it == grouped.end()) continue;
    for (auto& c : teacher::filter_top_k(it->second, ex, filter)) {
      splitter::SftRecord rec;
      rec.id = ex.id;
      rec.source = ex.text;
      rec.target = c.text;
      rec.quads = ex.quads;
      sft_data.push_back(std::move(rec));
      kept.push_back(std::move(c));
    }
  }

  std::string filtered_path = ctx.art("filtered.jsonl");
  util::write_records(filtered_path, kept);
  ctx.output(filtered_path);
  std::string sft_path = ctx.art("sft_data.jsonl");
  util::write_records(sft_path, sft_data);
  ctx.output(sft_path);
}

void do_train_sft(StageContext& ctx) {
  std::string sft_path = ctx.art("sft_data.jsonl");
  ctx.input(sft_path);
  auto records = util::read_records<splitter::SftRecord>(sft_path);

  int holdout = ctx.cfg.section("sft").value("val_holdout", 10);
  std::vector<splitter::SftRecord> train, val;
  for (size_t i = 0; i < records.size(); ++i) {
    if (holdout > 0 && (i + 1) % static_cast<size_t>(holdout) == 0)
      val.push_back(records[i]);
    else
      train.push_back(records[i]);
  }

  model::TinySeq2Seq model(config_model(ctx.cfg));
  splitter::TrainLog log =
      splitter::train_sft(model, train, config_sft(ctx.cfg), val);

  std::string ckpt = ctx.art("sft_ckpt");
  model::CheckpointMeta meta;
  meta.epoch = log.best_epoch;
  meta.val_loss = log.best_val;
  model::save_checkpoint(ckpt, model, meta);
  ctx.output((fs::path(ckpt) / "model.json").string());

  std::vector<json> log_records;
  for (const auto& e : log.epochs)
    log_records.push_back(json{{"epoch", e.epoch},
                               {"train_nll", e.train_nll},
                               {"val_nll", e.val_nll},
                               {"improved", e.improved}});
  std::string log_path = ctx.art("sft_train_log.jsonl");
  util::write_jsonl(log_path, log_records);
  ctx.output(log_path);
}

void do_build_prefs(StageContext& ctx) {
  std::string dataset = ctx.art("dataset.jsonl");
  std::string few_path = ctx.art("candidates_few.jsonl");
  std::string ckpt = (fs::path(ctx.art("sft_ckpt")) / "model.json").string();
  ctx.input(dataset);
  ctx.input(few_path);
  ctx.input(ckpt);

  auto examples = util::read_records<AnnotatedExample>(dataset);
  auto few = group_candidates(
      util::read_records<teacher::SplitCandidate>(few_path));
  model::TinySeq2Seq model = model::load_checkpoint(ctx.art("sft_ckpt"));
  int width = config_filter(ctx.cfg).n_candidates;

  std::vector<std::vector<teacher::SplitCandidate>> beam_slots(examples.size());
  parallel_for_rethrow(examples.size(), [&](size_t i) {
    beam_slots[i] = splitter::generate_splits(model, examples[i].text, width,
                                              examples[i].id);
  });
  std::vector<teacher::SplitCandidate> beams_flat;
  for (auto& s : beam_slots)
    for (auto& c : s) beams_flat.push_back(std::move(c));
  std::string beams_path = ctx.art("beams.jsonl");
  util::write_records(beams_path, beams_flat);
  ctx.output(beams_path);

  auto backend = backends::make_backend(ctx.cfg.require_section("backend"));
  auto pairs =
      pref::build_pairs(examples, few, group_candidates(beams_flat), *backend);
  std::string pairs_path = ctx.art("pairs.jsonl");
  util::write_records(pairs_path, pairs);
  ctx.output(pairs_path);
}

void do_train_dpo(StageContext& ctx) {
  std::string pairs_path = ctx.art("pairs.jsonl");
  std::string ckpt = (fs::path(ctx.art("sft_ckpt")) / "model.json").string();
  ctx.input(pairs_path);
  ctx.input(ckpt);

  auto pairs = util::read_records<pref::PreferencePair>(pairs_path);
  model::TinySeq2Seq policy = model::load_checkpoint(ctx.art("sft_ckpt"));
  pref::DpoLog log = pref::train_dpo(policy, pairs, config_dpo(ctx.cfg));

  std::string out = ctx.art("dpo_ckpt");
  model::CheckpointMeta meta;
  meta.epoch = config_dpo(ctx.cfg).epochs;
  meta.val_loss = log.final_mean_loss;
  model::save_checkpoint(out, policy, meta);
  ctx.output((fs::path(out) / "model.json").string());

  std::vector<json> log_records;
  for (size_t i = 0; i < log.step_mean_loss.size(); ++i)
    log_records.push_back(
        json{{"step", i + 1}, {"mean_loss", log.step_mean_loss[i]}});
  log_records.push_back(json{{"final_mean_loss", log.final_mean_loss}});
  std::string log_path = ctx.art("dpo_train_log.jsonl");
  util::write_jsonl(log_path, log_records);
  ctx.output(log_path);
}

void do_infer(StageContext& ctx) {
  std::string dataset = ctx.art("dataset.jsonl");
  ctx.input(dataset);
  auto examples = util::read_records<AnnotatedExample>(dataset);

  json infer_cfg = ctx.cfg.section("infer");
  bool identity = infer_cfg.value("identity", false);
  std::string ckpt_dir = infer_cfg.value("ckpt", "");
  std::string out_path = infer_cfg.value("out", "");
  if (out_path.empty())
    out_path = ctx.art(identity ? "predictions_baseline.jsonl"
                                : "predictions_atoss.jsonl");

  std::unique_ptr<model::TinySeq2Seq> splitter_model;
  if (!identity) {
    if (ckpt_dir.empty()) throw ConfigInvalid("infer.ckpt required");
    ctx.input((fs::path(ckpt_dir) / "model.json").string());
    splitter_model =
        std::make_unique<model::TinySeq2Seq>(model::load_checkpoint(ckpt_dir));
  }

  auto backend = backends::make_backend(ctx.cfg.require_section("backend"));
  pref::MemoBackend memo(*backend);
  eval::PlugAndPlayOptions opts;
  opts.per_segment_union =
      ctx.cfg.section("eval").value("per_segment_union", false);

  std::vector<AnnotatedExample> predictions(examples.size());
  parallel_for_rethrow(examples.size(), [&](size_t i) {
    const auto& ex = examples[i];
    std::string used;
    auto quads = eval::plug_and_play_predict(splitter_model.get(), memo, ex,
                                             opts, &used);
    AnnotatedExample rec;
    rec.id = ex.id;
    rec.text = used;
    rec.quads = std::move(quads);
    rec.task = ex.task;
    predictions[i] = std::move(rec);
  });

  util::write_records(out_path, predictions);
  ctx.output(out_path);
}

eval::EvalReport do_evaluate(StageContext& ctx) {
  std::string dataset = ctx.art("dataset.jsonl");
  json eval_cfg = ctx.cfg.section("eval");
  std::string pred_path = eval_cfg.value("pred", "");
  if (pred_path.empty()) pred_path = ctx.art("predictions_atoss.jsonl");
  std::string report_path = eval_cfg.value("report", "");
  if (report_path.empty()) report_path = ctx.art("report.json");
  ctx.input(dataset);
  ctx.input(pred_path);

  auto golds = util::read_records<AnnotatedExample>(dataset);
  eval::Predictions predictions;
  for (const auto& rec : util::read_records<AnnotatedExample>(pred_path)) {
    // Prediction records may legitimately carry zero quads.
    predictions[rec.id] = rec.quads;
  }

  eval::EvalReport report = eval::evaluate(predictions, golds);
  json out = eval::report_to_json(report);
  out["dataset"] = ctx.cfg.section("dataset").value("path", dataset);
  out["predictions"] = pred_path;
  util::atomic_write(report_path,
                     [&](std::ostream& o) { o << out.dump(2) << '\n'; });
  ctx.output(report_path);

  std::string csv_path = report_path;
  if (csv_path.size() > 5 && csv_path.substr(csv_path.size() - 5) == ".json")
    csv_path = csv_path.substr(0, csv_path.size() - 5) + ".csv";
  else
    csv_path += ".csv";
  auto row = [&](const std::string& subset, double p, double r, double f1) {
    return std::vector<std::string>{subset, std::to_string(p),
                                    std::to_string(r), std::to_string(f1)};
  };
  std::vector<std::vector<std::string>> rows;
  rows.push_back(row("total", report.precision, report.recall, report.f1));
  for (const auto& [label, s] : report.per_complexity)
    rows.push_back(
        row(complexity::to_string(label), s.precision, s.recall, s.f1));
  util::write_csv(csv_path, {"subset", "precision", "recall", "f1"}, rows);
  ctx.output(csv_path);
  return report;
}

void do_oracle_vote(StageContext& ctx) {
  std::string dataset = ctx.art("dataset.jsonl");
  json eval_cfg = ctx.cfg.section("eval");
  std::string pool = eval_cfg.value("pool", "few");
  std::string candidates_path = ctx.art(
      pool == "zero" ? "candidates_zero.jsonl" : "candidates_few.jsonl");
  int max_m = eval_cfg.value("max_m", 10);
  ctx.input(dataset);
  ctx.input(candidates_path);

  auto examples = util::read_records<AnnotatedExample>(dataset);
  auto grouped = group_candidates(
      util::read_records<teacher::SplitCandidate>(candidates_path));
  auto backend = backends::make_backend(ctx.cfg.require_section("backend"));

  eval::OracleCurve curve =
      eval::corpus_oracle_curve(examples, grouped, *backend, max_m);
  curve.pool_name = pool;

  json out = {{"pool", pool}, {"points", json::array()}};
  std::vector<std::vector<std::string>> rows;
  for (const auto& [m, f1] : curve.points) {
    out["points"].push_back(json{{"num_candidates", m}, {"f1", f1}});
    rows.push_back({std::to_string(m), std::to_string(f1)});
  }
  std::string json_path = ctx.art("oracle_curve.json");
  util::atomic_write(json_path,
                     [&](std::ostream& o) { o << out.dump(2) << '\n'; });
  ctx.output(json_path);
  std::string csv_path = eval_cfg.value("plot", ctx.art("oracle_curve.csv"));
  util::write_csv(csv_path, {"num_candidates", "f1"}, rows);
  ctx.output(csv_path);
}

RunManifest run_stage_impl(Stage stage, const Config& cfg,
                           eval::EvalReport* report_out) {
  StageContext ctx(cfg, stage);
  fs::create_directories(cfg.run_dir());
  try {
    switch (stage) {
      case Stage::prepare: do_prepare(ctx); break;
      case Stage::categorize: do_categorize(ctx); break;
      case Stage::gen_splits: {
        std::string mode = cfg.section("teacher").value("mode", "zero");
        do_gen_splits(ctx, mode == "few" ? teacher::PromptMode::few_shot
                                         : teacher::PromptMode::zero_shot);
        break;
      }
      case Stage::filter: do_filter(ctx); break;
      case Stage::train_sft: do_train_sft(ctx); break;
      case Stage::build_prefs: do_build_prefs(ctx); break;
      case Stage::train_dpo: do_train_dpo(ctx); break;
      case Stage::infer: do_infer(ctx); break;
      case Stage::evaluate: {
        eval::EvalReport report = do_evaluate(ctx);
        if (report_out) *report_out = report;
        break;
      }
      case Stage::oracle_vote: do_oracle_vote(ctx); break;
    }
  } catch (const ConfigInvalid&) {
    throw;
  } catch (const MissingUpstream&) {
    throw;
  } catch (const Error& e) {
    throw StageFailed(to_string(stage) + " failed (" + e.kind() +
                      "): " + e.what());
  } catch (const std::exception& e) {
    throw StageFailed(to_string(stage) + " failed: " + e.what());
  }

  ctx.manifest.finished_at = iso_utc_now();
  std::string manifest_path =
      (fs::path(cfg.run_dir()) / "manifests" / (ctx.manifest.run_id + ".json"))
          .string();
  util::atomic_write(manifest_path, [&](std::ostream& o) {
    o << manifest_to_json(ctx.manifest).dump(2) << '\n';
  });
  return ctx.manifest;
}

}  // namespace

RunManifest run_stage(Stage stage, const std::string& config_path) {
  Config cfg = Config::load(config_path);
  return run_stage_impl(stage, cfg, nullptr);
}

PipelineSummary full_pipeline(const std::string& config_path) {
  Config cfg = Config::load(config_path);
  cfg.require_section("backend");
  cfg.require_section("dataset");

  run_stage_impl(Stage::prepare, cfg, nullptr);
  run_stage_impl(Stage::categorize, cfg, nullptr);
  run_stage_impl(Stage::gen_splits,
                 cfg.with_overrides(json{{"teacher", {{"mode", "zero"}}}}),
                 nullptr);
  run_stage_impl(Stage::filter, cfg, nullptr);
  run_stage_impl(Stage::train_sft, cfg, nullptr);
  run_stage_impl(Stage::gen_splits,
                 cfg.with_overrides(json{{"teacher", {{"mode", "few"}}}}),
                 nullptr);
  run_stage_impl(Stage::build_prefs, cfg, nullptr);

  PipelineSummary summary;
  std::string run_dir = cfg.run_dir();
  std::string pairs_path = (fs::path(run_dir) / "pairs.jsonl").string();
  bool have_pairs = false;
  if (fs::exists(pairs_path))
    have_pairs = !util::read_jsonl(pairs_path).empty();
  std::string final_ckpt;
  if (have_pairs) {
    run_stage_impl(Stage::train_dpo, cfg, nullptr);
    summary.dpo_ran = true;
    final_ckpt = (fs::path(run_dir) / "dpo_ckpt").string();
  } else {
    // No preference pairs materialized (the splitter already matches the
    // backend's preferences); fall back to the SFT checkpoint.
    final_ckpt = (fs::path(run_dir) / "sft_ckpt").string();
  }

  std::string pred_baseline =
      (fs::path(run_dir) / "predictions_baseline.jsonl").string();
  std::string pred_atoss =
      (fs::path(run_dir) / "predictions_atoss.jsonl").string();

  run_stage_impl(
      Stage::infer,
      cfg.with_overrides(json{{"infer", {{"identity", true},
                                      {"out", pred_baseline}}}}),
      nullptr);
  run_stage_impl(
      Stage::infer,
      cfg.with_overrides(json{{"infer", {{"identity", false},
                                      {"ckpt", final_ckpt},
                                      {"out", pred_atoss}}}}),
      nullptr);

  std::string report_baseline =
      (fs::path(run_dir) / "report_baseline.json").string();
  std::string report_atoss = (fs::path(run_dir) / "report_atoss.json").string();
  run_stage_impl(
      Stage::evaluate,
      cfg.with_overrides(json{{"eval", {{"pred", pred_baseline},
                                     {"report", report_baseline}}}}),
      &summary.baseline);
  run_stage_impl(
      Stage::evaluate,
      cfg.with_overrides(json{{"eval", {{"pred", pred_atoss},
                                     {"report", report_atoss}}}}),
      &summary.equipped);

  json summary_json = {
      {"baseline", eval::report_to_json(summary.baseline)},
      {"atoss", eval::report_to_json(summary.equipped)},
      {"dpo_ran", summary.dpo_ran},
      {"final_checkpoint", final_ckpt},
  };
  summary.summary_path = (fs::path(run_dir) / "summary.json").string();
  util::atomic_write(summary.summary_path, [&](std::ostream& o) {
    o << summary_json.dump(2) << '\n';
  });
  return summary;
}

}  // namespace atoss::pipeline
