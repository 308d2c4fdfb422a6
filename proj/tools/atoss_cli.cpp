// atoss: command-line front end for the sentence-splitting pipeline.
// Subcommands mirror the pipeline stages plus direct file-to-file forms for
// each operation. Exit code 0 on success; failures print a machine-readable
// error record to stderr and exit nonzero.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "atoss/absa_backends.hpp"
#include "atoss/complexity.hpp"
#include "atoss/core_json.hpp"
#include "atoss/digest.hpp"
#include "atoss/evaluation.hpp"
#include "atoss/parallel.hpp"
#include "atoss/pipeline.hpp"
#include "atoss/records.hpp"
#include "atoss/splitter.hpp"
#include "atoss/synthetic.hpp"
#include "atoss/teacher.hpp"
#include "atoss/tiny_model.hpp"

namespace {

using atoss::core::AnnotatedExample;
using atoss::core::Task;
using nlohmann::json;

Task parse_task(const std::string& name) {
  return atoss::core::task_from_string(name);
}

atoss::core::ParseOptions order_options(const std::string& order) {
  atoss::core::ParseOptions opts;
  if (!order.empty()) opts.order = atoss::core::ElementOrder::parse(order);
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

std::vector<AnnotatedExample> load_any(const std::string& path, Task task,
                                       const std::string& order) {
  if (looks_like_records(path))
    return atoss::util::read_records<AnnotatedExample>(path);
  return atoss::core::load_dataset(path, task, order_options(order));
}

std::unique_ptr<atoss::pref::AbsaBackend> backend_from_name(
    const std::string& name) {
  if (name == "lexicon") return atoss::backends::make_backend(json{{"kind", "lexicon"}});
  if (name.rfind("http=", 0) == 0)
    return atoss::backends::make_backend(
        json{{"kind", "http"}, {"endpoint", name.substr(5)}});
  if (name.rfind("llm=", 0) == 0)
    return atoss::backends::make_backend(
        json{{"kind", "llm"}, {"endpoint", name.substr(4)}});
  throw atoss::ConfigInvalid("unknown backend name: " + name +
                             " (expected lexicon, http=<url> or llm=<url>)");
}

std::shared_ptr<atoss::llm::CompletionClient> teacher_from_name(
    const std::string& name, const std::string& cache_dir) {
  std::shared_ptr<atoss::llm::CompletionClient> client;
  if (name == "synthetic") {
    client = std::make_shared<atoss::llm::ScriptedClient>(
        atoss::synthetic::oracle_teacher_script());
  } else if (name == "replay") {
    if (cache_dir.empty())
      throw atoss::ConfigInvalid("replay teacher requires --cache");
    client = nullptr;
  } else if (name.rfind("http=", 0) == 0) {
    atoss::llm::HttpConfig cfg;
    cfg.base_url = name.substr(5);
    client = std::make_shared<atoss::llm::HttpClient>(cfg);
  } else {
    throw atoss::ConfigInvalid("unknown teacher: " + name);
  }
  if (!cache_dir.empty())
    return std::make_shared<atoss::llm::ReplayCacheClient>(client, cache_dir);
  return client;
}

void print_report(const std::string& label,
                  const atoss::eval::EvalReport& report) {
  auto line = [](const std::string& name, double p, double r, double f1,
                 int64_t n) {
    std::printf("  %-10s pre %6.2f  rec %6.2f  f1 %6.2f  (n=%lld)\n",
                name.c_str(), 100.0 * p, 100.0 * r, 100.0 * f1,
                static_cast<long long>(n));
  };
  std::printf("%s\n", label.c_str());
  line("total", report.precision, report.recall, report.f1,
       report.n_examples);
  for (const auto& [lbl, s] : report.per_complexity)
    line(atoss::complexity::to_string(lbl), s.precision, s.recall, s.f1,
         s.n_examples);
  std::printf("  aspect-f1  %6.2f\n", 100.0 * report.aspect_f1);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ATOSS: aspect-term-oriented sentence splitting pipeline"};
  app.require_subcommand(1);

  int threads = 0;
  app.add_option("--threads", threads,
                 "worker threads for data-parallel stages (0 = auto)");

  // ---- stats ----
  auto* stats = app.add_subcommand("stats", "dataset statistics");
  std::string stats_in, stats_task = "ASQP", stats_order, stats_csv;
  stats->add_option("--in", stats_in, "dataset file")->required();
  stats->add_option("--task", stats_task, "ASQP|ACOS|TASD|ASTE");
  stats->add_option("--order", stats_order, "element order override, e.g. at,ac,sp,ot");
  stats->add_option("--csv", stats_csv, "also write a CSV table");

  // ---- categorize ----
  auto* categorize = app.add_subcommand(
      "categorize", "simple/compound ratio table per dataset");
  std::vector<std::string> cat_in;
  std::string cat_task = "ASQP", cat_order, cat_json, cat_csv;
  categorize->add_option("--in", cat_in, "dataset file(s)")->required();
  categorize->add_option("--task", cat_task, "task");
  categorize->add_option("--order", cat_order, "element order override");
  categorize->add_option("--json", cat_json, "structured record output");
  categorize->add_option("--csv", cat_csv, "CSV output");
  categorize->alias("ratios");

  // ---- prepare ----
  auto* prepare = app.add_subcommand("prepare", "parse a dataset into records");
  std::string prep_in, prep_task = "ASQP", prep_order, prep_out;
  prepare->add_option("--in", prep_in)->required();
  prepare->add_option("--task", prep_task);
  prepare->add_option("--order", prep_order);
  prepare->add_option("--out", prep_out, "records output")->required();

  // ---- gen-splits ----
  auto* gen = app.add_subcommand("gen-splits",
                                 "generate split candidates via the teacher");
  std::string gen_mode = "zero", gen_in, gen_out, gen_task = "ASQP";
  std::string gen_teacher = "synthetic", gen_cache, gen_filtered, gen_order;
  int gen_n = 10, gen_k = 2;
  double gen_temperature = 1.0;
  gen->add_option("--mode", gen_mode, "zero|few")->required();
  gen->add_option("--n", gen_n, "candidates per sentence");
  gen->add_option("--k", gen_k, "kept after filtering");
  gen->add_option("--in", gen_in, "dataset file or records")->required();
  gen->add_option("--task", gen_task);
  gen->add_option("--order", gen_order);
  gen->add_option("--out", gen_out, "candidate records")->required();
  gen->add_option("--filtered", gen_filtered, "also write top-k records");
  gen->add_option("--teacher", gen_teacher, "synthetic|replay|http=<url>");
  gen->add_option("--cache", gen_cache, "replay cache directory");
  gen->add_option("--temperature", gen_temperature);
  gen->alias("gen_splits");

  // ---- filter ----
  auto* filter = app.add_subcommand("filter", "top-k candidate filtering");
  std::string fil_in, fil_data, fil_out, fil_sft, fil_task = "ASQP", fil_order;
  int fil_k = 2, fil_n = 10;
  filter->add_option("--in", fil_in, "candidate records")->required();
  filter->add_option("--data", fil_data, "matching dataset")->required();
  filter->add_option("--task", fil_task);
  filter->add_option("--order", fil_order);
  filter->add_option("--k", fil_k);
  filter->add_option("--n", fil_n, "n_candidates upper bound");
  filter->add_option("--out", fil_out, "filtered candidate records")->required();
  filter->add_option("--sft-out", fil_sft, "derived SFT records (s, s', Q)");

  // ---- train-sft ----
  auto* tsft = app.add_subcommand("train-sft", "supervised fine-tuning");
  std::string tsft_data, tsft_cfg, tsft_out, tsft_val;
  tsft->add_option("--data", tsft_data, "SFT records")->required();
  tsft->add_option("--config", tsft_cfg, "run config (sft/model sections)");
  tsft->add_option("--val", tsft_val, "validation records");
  tsft->add_option("--out", tsft_out, "checkpoint directory")->required();
  tsft->alias("train_sft");

  // ---- split ----
  auto* split = app.add_subcommand("split", "apply the splitter to a file");
  std::string split_ckpt, split_in, split_out, split_task = "ASQP", split_order;
  bool split_ungated = false;
  int split_width = 1;
  split->add_option("--ckpt", split_ckpt)->required();
  split->add_option("--in", split_in)->required();
  split->add_option("--task", split_task);
  split->add_option("--order", split_order);
  split->add_option("--out", split_out, "records with split text")->required();
  split->add_option("--width", split_width, "beam width for inference");
  split->add_flag("--ungated", split_ungated, "split every sentence");

  // ---- build-prefs ----
  auto* prefs = app.add_subcommand("build-prefs", "preference pairs");
  std::string bp_few, bp_beams, bp_backend = "lexicon", bp_out, bp_gold;
  std::string bp_task = "ASQP", bp_order;
  prefs->add_option("--fewshot", bp_few, "few-shot candidate records")->required();
  prefs->add_option("--beams", bp_beams, "beam candidate records")->required();
  prefs->add_option("--gold", bp_gold, "gold dataset")->required();
  prefs->add_option("--task", bp_task);
  prefs->add_option("--order", bp_order);
  prefs->add_option("--backend", bp_backend, "lexicon|http=<url>|llm=<url>");
  prefs->add_option("--out", bp_out, "pair records")->required();
  prefs->alias("build_prefs");

  // ---- train-dpo ----
  auto* tdpo = app.add_subcommand("train-dpo", "preference alignment");
  std::string tdpo_ckpt, tdpo_pairs, tdpo_cfg, tdpo_out;
  tdpo->add_option("--ckpt", tdpo_ckpt, "SFT checkpoint")->required();
  tdpo->add_option("--pairs", tdpo_pairs, "pair records")->required();
  tdpo->add_option("--config", tdpo_cfg, "run config (dpo section)");
  tdpo->add_option("--out", tdpo_out, "aligned checkpoint")->required();
  tdpo->alias("train_dpo");

  // ---- infer ----
  auto* infer = app.add_subcommand("infer",
                                   "plug-and-play predictions via a backend");
  std::string inf_ckpt, inf_in, inf_out, inf_backend = "lexicon";
  std::string inf_task = "ASQP", inf_order;
  bool inf_identity = false, inf_union = false;
  infer->add_option("--ckpt", inf_ckpt, "splitter checkpoint");
  infer->add_flag("--identity", inf_identity, "no-split baseline");
  infer->add_option("--in", inf_in)->required();
  infer->add_option("--task", inf_task);
  infer->add_option("--order", inf_order);
  infer->add_option("--backend", inf_backend);
  infer->add_flag("--per-segment", inf_union,
                  "query the backend once per split segment");
  infer->add_option("--out", inf_out)->required();

  // ---- evaluate ----
  auto* evaluate = app.add_subcommand("evaluate", "score predictions");
  std::string ev_pred, ev_gold, ev_task = "ASQP", ev_order, ev_json, ev_csv;
  evaluate->add_option("--pred", ev_pred, "prediction records")->required();
  evaluate->add_option("--gold", ev_gold, "gold dataset")->required();
  evaluate->add_option("--task", ev_task);
  evaluate->add_option("--order", ev_order);
  evaluate->add_option("--json", ev_json, "report JSON path");
  evaluate->add_option("--csv", ev_csv, "report CSV path");

  // ---- oracle-vote ----
  auto* oracle = app.add_subcommand("oracle-vote", "oracle-voting curve");
  std::string ov_candidates, ov_backend = "lexicon", ov_gold, ov_plot;
  std::string ov_task = "ASQP", ov_order, ov_json;
  int ov_max_m = 10;
  oracle->add_option("--candidates", ov_candidates)->required();
  oracle->add_option("--gold", ov_gold)->required();
  oracle->add_option("--task", ov_task);
  oracle->add_option("--order", ov_order);
  oracle->add_option("--backend", ov_backend);
  oracle->add_option("--max-m", ov_max_m);
  oracle->add_option("--plot", ov_plot, "CSV output")->required();
  oracle->add_option("--json", ov_json, "JSON output");
  oracle->alias("oracle_vote");

  // ---- run (config-driven stage) ----
  auto* run = app.add_subcommand("run", "run one pipeline stage from a config");
  std::string run_stage_name, run_cfg;
  run->add_option("stage", run_stage_name,
                  "prepare|categorize|gen_splits|filter|train_sft|build_prefs|"
                  "train_dpo|infer|evaluate|oracle_vote")
      ->required();
  run->add_option("--config", run_cfg)->required();

  // ---- full-pipeline ----
  auto* full = app.add_subcommand("full-pipeline",
                                  "run every stage and compare baseline vs "
                                  "splitter-equipped results");
  std::string full_cfg;
  full->add_option("--config", full_cfg)->required();
  full->alias("full_pipeline");

  // ---- make-synthetic ----
  auto* synth = app.add_subcommand("make-synthetic",
                                   "write the synthetic compound corpus");
  std::string syn_out;
  int syn_simple = 80, syn_compound = 160;
  uint64_t syn_seed = 17;
  synth->add_option("--out", syn_out)->required();
  synth->add_option("--n-simple", syn_simple);
  synth->add_option("--n-compound", syn_compound);
  synth->add_option("--seed", syn_seed);

  CLI11_PARSE(app, argc, argv);
  atoss::par::set_threads(threads);

  try {
    if (*stats) {
      auto examples = load_any(stats_in, parse_task(stats_task), stats_order);
      auto s = atoss::core::dataset_stats(examples);
      std::printf("%s: %lld sentences, %lld quads "
                  "(pos %lld / neu %lld / neg %lld), %lld categories\n",
                  stats_in.c_str(), (long long)s.sentence_count,
                  (long long)s.total_quads(),
                  (long long)s.quad_counts_by_polarity.at(
                      atoss::core::Polarity::positive),
                  (long long)s.quad_counts_by_polarity.at(
                      atoss::core::Polarity::neutral),
                  (long long)s.quad_counts_by_polarity.at(
                      atoss::core::Polarity::negative),
                  (long long)s.category_set_size);
      if (!stats_csv.empty())
        atoss::util::write_csv(
            stats_csv,
            {"dataset", "sentences", "positive", "neutral", "negative",
             "categories"},
            {{stats_in, std::to_string(s.sentence_count),
              std::to_string(s.quad_counts_by_polarity.at(
                  atoss::core::Polarity::positive)),
              std::to_string(s.quad_counts_by_polarity.at(
                  atoss::core::Polarity::neutral)),
              std::to_string(s.quad_counts_by_polarity.at(
                  atoss::core::Polarity::negative)),
              std::to_string(s.category_set_size)}});
    } else if (*categorize) {
      std::vector<json> records;
      std::vector<std::vector<std::string>> rows;
      std::printf("%-40s %10s %10s\n", "dataset", "simple%", "compound%");
      for (const auto& path : cat_in) {
        auto examples = load_any(path, parse_task(cat_task), cat_order);
        auto r = atoss::complexity::ratio_report(examples);
        std::printf("%-40s %10.2f %10.2f\n", path.c_str(), r.simple_pct,
                    r.compound_pct);
        records.push_back(json{{"dataset", path},
                               {"simple_pct", r.simple_pct},
                               {"compound_pct", r.compound_pct},
                               {"simple_count", r.simple_count},
                               {"compound_count", r.compound_count}});
        rows.push_back({path, std::to_string(r.simple_pct),
                        std::to_string(r.compound_pct)});
      }
      if (!cat_json.empty()) atoss::util::write_jsonl(cat_json, records);
      if (!cat_csv.empty())
        atoss::util::write_csv(cat_csv, {"dataset", "simple_pct", "compound_pct"},
                               rows);
    } else if (*prepare) {
      auto examples = load_any(prep_in, parse_task(prep_task), prep_order);
      atoss::util::write_records(prep_out, examples);
      std::printf("wrote %zu records to %s\n", examples.size(),
                  prep_out.c_str());
    } else if (*gen) {
      auto examples = load_any(gen_in, parse_task(gen_task), gen_order);
      auto client = teacher_from_name(gen_teacher, gen_cache);
      atoss::teacher::FilterConfig fc{gen_k, gen_n};
      fc.validate();
      auto mode = gen_mode == "few" ? atoss::teacher::PromptMode::few_shot
                                    : atoss::teacher::PromptMode::zero_shot;
      std::vector<atoss::teacher::SplitCandidate> all, filtered;
      for (const auto& ex : examples) {
        auto cands = atoss::teacher::generate_candidates(*client, ex, mode, fc,
                                                         gen_temperature);
        if (!gen_filtered.empty())
          for (auto& c : atoss::teacher::filter_top_k(cands, ex, fc))
            filtered.push_back(c);
        for (auto& c : cands) all.push_back(std::move(c));
      }
      atoss::util::write_records(gen_out, all);
      if (!gen_filtered.empty())
        atoss::util::write_records(gen_filtered, filtered);
      std::printf("wrote %zu candidates to %s\n", all.size(), gen_out.c_str());
    } else if (*filter) {
      auto examples = load_any(fil_data, parse_task(fil_task), fil_order);
      auto grouped = [&] {
        std::map<std::string, std::vector<atoss::teacher::SplitCandidate>> g;
        for (auto& c :
             atoss::util::read_records<atoss::teacher::SplitCandidate>(fil_in))
          g[c.source_id].push_back(std::move(c));
        return g;
      }();
      atoss::teacher::FilterConfig fc{fil_k, fil_n};
      fc.validate();
      std::vector<atoss::teacher::SplitCandidate> kept;
      std::vector<atoss::splitter::SftRecord> sft;
      for (const auto& ex : examples) {
        auto it = grouped.find(ex.id);
        if (it == grouped.end()) continue;
        for (auto& c : atoss::teacher::filter_top_k(it->second, ex, fc)) {
          if (!fil_sft.empty())
            sft.push_back({ex.id, ex.text, c.text, ex.quads});
          kept.push_back(std::move(c));
        }
      }
      atoss::util::write_records(fil_out, kept);
      if (!fil_sft.empty()) atoss::util::write_records(fil_sft, sft);
      std::printf("kept %zu candidates\n", kept.size());
    } else if (*tsft) {
      auto data =
          atoss::util::read_records<atoss::splitter::SftRecord>(tsft_data);
      std::vector<atoss::splitter::SftRecord> val;
      if (!tsft_val.empty())
        val = atoss::util::read_records<atoss::splitter::SftRecord>(tsft_val);
      atoss::model::SftConfig sft_cfg;
      atoss::model::TinyConfig tiny_cfg;
      if (!tsft_cfg.empty()) {
        auto cfg = atoss::pipeline::Config::load(tsft_cfg);
        auto s = cfg.section("sft");
        sft_cfg.train_batch = s.value("train_batch", sft_cfg.train_batch);
        sft_cfg.val_batch = s.value("val_batch", sft_cfg.val_batch);
        sft_cfg.epochs = s.value("epochs", sft_cfg.epochs);
        sft_cfg.learning_rate = s.value("learning_rate", sft_cfg.learning_rate);
        sft_cfg.early_stop_patience =
            s.value("early_stop_patience", sft_cfg.early_stop_patience);
        auto m = cfg.section("model");
        tiny_cfg.embed_dim = m.value("embed_dim", tiny_cfg.embed_dim);
        tiny_cfg.hidden_dim = m.value("hidden_dim", tiny_cfg.hidden_dim);
        tiny_cfg.max_len = m.value("max_len", tiny_cfg.max_len);
        tiny_cfg.seed = m.value("seed", cfg.seed());
      }
      atoss::model::TinySeq2Seq model(tiny_cfg);
      auto log = atoss::splitter::train_sft(model, data, sft_cfg, val);
      atoss::model::CheckpointMeta meta;
      meta.epoch = log.best_epoch;
      meta.val_loss = log.best_val;
      atoss::model::save_checkpoint(tsft_out, model, meta);
      std::printf("best epoch %d, monitored nll %.4f, checkpoint %s\n",
                  log.best_epoch, log.best_val, tsft_out.c_str());
    } else if (*split) {
      auto examples = load_any(split_in, parse_task(split_task), split_order);
      auto model = atoss::model::load_checkpoint(split_ckpt);
      std::vector<AnnotatedExample> out;
      for (const auto& ex : examples) {
        std::optional<atoss::complexity::ComplexityLabel> gate;
        if (!split_ungated) gate = atoss::complexity::classify(ex);
        AnnotatedExample rec = ex;
        rec.raw_annotation.clear();
        if (split_width <= 1) {
          rec.text = atoss::splitter::split(model, ex.text, gate);
        } else if (!gate ||
                   *gate == atoss::complexity::ComplexityLabel::Compound) {
          auto beams = model.beam_generate(ex.text, split_width);
          rec.text = beams.empty() ? ex.text : beams.front().text;
        }
        out.push_back(std::move(rec));
      }
      atoss::util::write_records(split_out, out);
      std::printf("wrote %zu split records\n", out.size());
    } else if (*prefs) {
      auto examples = load_any(bp_gold, parse_task(bp_task), bp_order);
      auto group = [](const std::string& path) {
        std::map<std::string, std::vector<atoss::teacher::SplitCandidate>> g;
        for (auto& c :
             atoss::util::read_records<atoss::teacher::SplitCandidate>(path))
          g[c.source_id].push_back(std::move(c));
        return g;
      };
      auto backend = backend_from_name(bp_backend);
      auto pairs = atoss::pref::build_pairs(examples, group(bp_few),
                                            group(bp_beams), *backend);
      atoss::util::write_records(bp_out, pairs);
      std::printf("built %zu preference pairs\n", pairs.size());
    } else if (*tdpo) {
      auto pairs =
          atoss::util::read_records<atoss::pref::PreferencePair>(tdpo_pairs);
      atoss::pref::DpoConfig dpo_cfg;
      if (!tdpo_cfg.empty()) {
        auto cfg = atoss::pipeline::Config::load(tdpo_cfg);
        auto d = cfg.section("dpo");
        dpo_cfg.beta = d.value("beta", dpo_cfg.beta);
        dpo_cfg.batch = d.value("batch", dpo_cfg.batch);
        dpo_cfg.epochs = d.value("epochs", dpo_cfg.epochs);
        dpo_cfg.learning_rate = d.value("learning_rate", dpo_cfg.learning_rate);
      }
      auto policy = atoss::model::load_checkpoint(tdpo_ckpt);
      auto log = atoss::pref::train_dpo(policy, pairs, dpo_cfg);
      atoss::model::CheckpointMeta meta;
      meta.epoch = dpo_cfg.epochs;
      meta.val_loss = log.final_mean_loss;
      atoss::model::save_checkpoint(tdpo_out, policy, meta);
      std::printf("final mean dpo loss %.4f, checkpoint %s\n",
                  log.final_mean_loss, tdpo_out.c_str());
    } else if (*infer) {
      auto examples = load_any(inf_in, parse_task(inf_task), inf_order);
      std::unique_ptr<atoss::model::TinySeq2Seq> model;
      if (!inf_identity) {
        if (inf_ckpt.empty())
          throw atoss::ConfigInvalid("infer requires --ckpt or --identity");
        model = std::make_unique<atoss::model::TinySeq2Seq>(
            atoss::model::load_checkpoint(inf_ckpt));
      }
      auto backend = backend_from_name(inf_backend);
      atoss::pref::MemoBackend memo(*backend);
      atoss::eval::PlugAndPlayOptions opts;
      opts.per_segment_union = inf_union;
      std::vector<AnnotatedExample> out;
      for (const auto& ex : examples) {
        std::string used;
        auto quads =
            atoss::eval::plug_and_play_predict(model.get(), memo, ex, opts, &used);
        AnnotatedExample rec;
        rec.id = ex.id;
        rec.text = used;
        rec.quads = std::move(quads);
        rec.task = ex.task;
        out.push_back(std::move(rec));
      }
      atoss::util::write_records(inf_out, out);
      std::printf("wrote %zu prediction records\n", out.size());
    } else if (*evaluate) {
      auto golds = load_any(ev_gold, parse_task(ev_task), ev_order);
      atoss::eval::Predictions predictions;
      for (const auto& rec :
           atoss::util::read_records<AnnotatedExample>(ev_pred))
        predictions[rec.id] = rec.quads;
      auto report = atoss::eval::evaluate(predictions, golds);
      print_report("evaluation (" + ev_pred + ")", report);
      if (!ev_json.empty()) {
        auto j = atoss::eval::report_to_json(report);
        atoss::util::atomic_write(ev_json, [&](std::ostream& o) {
          o << j.dump(2) << '\n';
        });
      }
      if (!ev_csv.empty()) {
        std::vector<std::vector<std::string>> rows{
            {"total", std::to_string(report.precision),
             std::to_string(report.recall), std::to_string(report.f1)}};
        for (const auto& [lbl, s] : report.per_complexity)
          rows.push_back({atoss::complexity::to_string(lbl),
                          std::to_string(s.precision),
                          std::to_string(s.recall), std::to_string(s.f1)});
        atoss::util::write_csv(ev_csv, {"subset", "precision", "recall", "f1"},
                               rows);
      }
    } else if (*oracle) {
      auto golds = load_any(ov_gold, parse_task(ov_task), ov_order);
      std::map<std::string, std::vector<atoss::teacher::SplitCandidate>> g;
      for (auto& c : atoss::util::read_records<atoss::teacher::SplitCandidate>(
               ov_candidates))
        g[c.source_id].push_back(std::move(c));
      auto backend = backend_from_name(ov_backend);
      auto curve =
          atoss::eval::corpus_oracle_curve(golds, g, *backend, ov_max_m);
      std::vector<std::vector<std::string>> rows;
      for (const auto& [m, f1] : curve.points) {
        std::printf("m=%-3d f1=%.4f\n", m, f1);
        rows.push_back({std::to_string(m), std::to_string(f1)});
      }
      atoss::util::write_csv(ov_plot, {"num_candidates", "f1"}, rows);
      if (!ov_json.empty()) {
        json out = {{"pool", ov_candidates}, {"points", json::array()}};
        for (const auto& [m, f1] : curve.points)
          out["points"].push_back(json{{"num_candidates", m}, {"f1", f1}});
        atoss::util::atomic_write(ov_json, [&](std::ostream& o) {
          o << out.dump(2) << '\n';
        });
      }
    } else if (*run) {
      auto manifest = atoss::pipeline::run_stage(
          atoss::pipeline::stage_from_string(run_stage_name), run_cfg);
      std::printf("stage %s done, run id %s\n",
                  atoss::pipeline::to_string(manifest.stage).c_str(),
                  manifest.run_id.c_str());
      for (const auto& p : manifest.output_paths)
        std::printf("  -> %s\n", p.c_str());
    } else if (*full) {
      auto summary = atoss::pipeline::full_pipeline(full_cfg);
      print_report("baseline (no split)", summary.baseline);
      print_report(summary.dpo_ran ? "with splitter (sft + dpo)"
                                   : "with splitter (sft only; no pairs)",
                   summary.equipped);
      std::printf("summary: %s\n", summary.summary_path.c_str());
    } else if (*synth) {
      atoss::synthetic::CorpusOptions opts;
      opts.n_simple = syn_simple;
      opts.n_compound = syn_compound;
      opts.seed = syn_seed;
      auto corpus = atoss::synthetic::make_corpus(opts);
      atoss::util::atomic_write(syn_out, [&](std::ostream& o) {
        for (const auto& ex : corpus)
          o << atoss::core::serialize_example(ex) << '\n';
      });
      std::printf("wrote %zu sentences to %s\n", corpus.size(),
                  syn_out.c_str());
    }
  } catch (const atoss::Error& e) {
    json err = {{"error", e.kind()}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    json err = {{"error", "Unhandled"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 2;
  }
  return 0;
}
