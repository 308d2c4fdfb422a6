// JSON record schema for pipeline artifacts: one object per line with fields
// {id, text, quads, task}. Quads are 4-slot string arrays in (at, ac, sp, ot)
// order; fields a task does not define hold "".
#pragma once

#include <nlohmann/json.hpp>

#include "atoss/core.hpp"

namespace atoss::core {

inline void to_json(nlohmann::json& j, const Quadruplet& q) {
  j = nlohmann::json::array(
      {q.aspect_term, q.aspect_category, to_string(q.polarity), q.opinion_term});
}

inline void from_json(const nlohmann::json& j, Quadruplet& q) {
  if (!j.is_array() || j.size() != 4)
    throw MalformedLine("quad record must be a 4-slot array");
  q.aspect_term = j[0].get<std::string>();
  q.aspect_category = j[1].get<std::string>();
  q.polarity = polarity_from_string(j[2].get<std::string>());
  q.opinion_term = j[3].get<std::string>();
}

inline void to_json(nlohmann::json& j, const AnnotatedExample& ex) {
  j = nlohmann::json{{"id", ex.id},
                     {"text", ex.text},
                     {"quads", ex.quads},
                     {"task", to_string(ex.task)}};
}

inline void from_json(const nlohmann::json& j, AnnotatedExample& ex) {
  ex.id = j.at("id").get<std::string>();
  ex.text = j.at("text").get<std::string>();
  ex.quads = j.at("quads").get<std::vector<Quadruplet>>();
  ex.task = task_from_string(j.at("task").get<std::string>());
  ex.raw_annotation.clear();
}

}  // namespace atoss::core
