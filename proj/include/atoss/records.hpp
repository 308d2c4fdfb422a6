// Line-delimited JSON record IO plus atomic file writes (temp-then-rename).
// Individual record schemas live with their owning modules as to_json /
// from_json pairs.
#pragma once

#include <nlohmann/json_fwd.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "atoss/error.hpp"

#include <nlohmann/json.hpp>

namespace atoss::util {

using json = nlohmann::json;

std::vector<json> read_jsonl(const std::string& path);

// Writes content via `fill`, to <path>.tmp first, then renames over path.
void atomic_write(const std::string& path,
                  const std::function<void(std::ostream&)>& fill);

void write_jsonl(const std::string& path, const std::vector<json>& records);

template <typename T>
std::vector<T> read_records(const std::string& path) {
  std::vector<T> out;
  for (const auto& j : read_jsonl(path)) out.push_back(j.get<T>());
  return out;
}

template <typename T>
void write_records(const std::string& path, const std::vector<T>& records) {
  std::vector<json> js;
  js.reserve(records.size());
  for (const auto& r : records) js.push_back(json(r));
  write_jsonl(path, js);
}

void write_csv(const std::string& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

std::string read_file(const std::string& path);

}  // namespace atoss::util
