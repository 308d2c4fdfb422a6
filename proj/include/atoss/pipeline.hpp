// Stage orchestration with reproducible configuration, run manifests and
// artifact lineage. One structured config file drives a run; every stage
// writes its outputs atomically plus a manifest recording config and input
// digests and the seed.
#pragma once

#include <nlohmann/json.hpp>

#include <map>
#include <string>
#include <vector>

#include "atoss/evaluation.hpp"

namespace atoss::pipeline {

enum class Stage {
  prepare,
  categorize,
  gen_splits,
  filter,
  train_sft,
  build_prefs,
  train_dpo,
  infer,
  evaluate,
  oracle_vote,
};

std::string to_string(Stage stage);
Stage stage_from_string(std::string_view name);

struct RunManifest {
  std::string run_id;
  Stage stage = Stage::prepare;
  std::string config_digest;
  std::map<std::string, std::string> input_digests;  // path -> sha256
  std::vector<std::string> output_paths;
  uint64_t seed = 0;
  std::string started_at;   // ISO-8601 UTC
  std::string finished_at;
};

nlohmann::json manifest_to_json(const RunManifest& manifest);

// Parsed + digested run configuration. Unknown stages of validation happen
// per stage; `require` throws ConfigInvalid with a dotted path.
class Config {
 public:
  static Config load(const std::string& path);

  const nlohmann::json& raw() const { return raw_; }
  const std::string& digest() const { return digest_; }
  const std::string& path() const { return path_; }

  std::string run_dir() const;
  uint64_t seed() const;
  nlohmann::json section(const std::string& name) const;  // {} when missing
  nlohmann::json require_section(const std::string& name) const;

  // Copy with section-level overrides merged in; the digest stays tied to
  // the on-disk file (overrides are internal pipeline wiring, not config).
  Config with_overrides(const nlohmann::json& overrides) const;

 private:
  nlohmann::json raw_;
  std::string digest_;
  std::string path_;
};

// Validates the stage's config slice, checks upstream artifacts, executes,
// writes outputs and a manifest atomically. Internal failures surface as
// StageFailed with the cause in the message; ConfigInvalid and
// MissingUpstream pass through.
RunManifest run_stage(Stage stage, const std::string& config_path);

struct PipelineSummary {
  eval::EvalReport baseline;
  eval::EvalReport equipped;
  bool dpo_ran = false;
  std::string summary_path;
};

// Full run: prepare, categorize, zero-shot generation, filtering, SFT,
// few-shot generation, preference building, DPO (skipped when no pairs
// materialize), then side-by-side baseline and splitter-equipped evaluation.
PipelineSummary full_pipeline(const std::string& config_path);

}  // namespace atoss::pipeline
