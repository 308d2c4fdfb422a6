#include "atoss/records.hpp"

#include <sstream>

namespace atoss::util {

std::vector<json> read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingUpstream("cannot open records file: " + path);
  std::vector<json> out;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      std::ostringstream msg;
      msg << path << ":" << lineno << ": " << e.what();
      throw MalformedLine(msg.str());
    }
  }
  return out;
}

void atomic_write(const std::string& path,
                  const std::function<void(std::ostream&)>& fill) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw StageFailed("cannot write file: " + tmp.string());
    fill(out);
    if (!out) throw StageFailed("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

void write_jsonl(const std::string& path, const std::vector<json>& records) {
  atomic_write(path, [&](std::ostream& out) {
    for (const auto& r : records) out << r.dump() << '\n';
  });
}

namespace {
std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}
}  // namespace

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  atomic_write(path, [&](std::ostream& out) {
    for (size_t i = 0; i < header.size(); ++i)
      out << (i ? "," : "") << csv_escape(header[i]);
    out << '\n';
    for (const auto& row : rows) {
      for (size_t i = 0; i < row.size(); ++i)
        out << (i ? "," : "") << csv_escape(row[i]);
      out << '\n';
    }
  });
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingUpstream("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace atoss::util
