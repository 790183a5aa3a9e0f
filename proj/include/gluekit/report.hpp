#pragma once

// Deterministic line-oriented "key: value" reports with a versioned header.
// Identical input and configuration produce byte-identical output.

#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace gluekit {

class Report {
 public:
  explicit Report(const std::string& command) {
    add("gluekit-report", "1");
    add("command", command);
  }

  void add(const std::string& key, const std::string& value) { lines_.emplace_back(key, value); }
  void add(const std::string& key, const char* value) { add(key, std::string(value)); }
  void add(const std::string& key, long value) { add(key, std::to_string(value)); }
  void add(const std::string& key, bool value) { add(key, std::string(value ? "true" : "false")); }

  std::string str() const {
    std::ostringstream os;
    for (const auto& [k, v] : lines_) os << k << ": " << v << "\n";
    return os.str();
  }

  const std::vector<std::pair<std::string, std::string>>& lines() const { return lines_; }

 private:
  std::vector<std::pair<std::string, std::string>> lines_;
};

}  // namespace gluekit
