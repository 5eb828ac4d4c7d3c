#pragma once

#include <json.hpp>
#include <set>
#include <string>
#include <vector>

#include "widthlab/types.hpp"

namespace widthlab {

// Reads members of a JSON object while tracking which keys were consumed, so
// that unknown keys can be rejected with their full path.
class FieldReader {
 public:
  FieldReader(const nlohmann::json& object, std::string path);

  const std::string& path() const { return path_; }
  std::string path_of(const std::string& key) const { return path_ + "/" + key; }

  bool has(const std::string& key) const;
  const nlohmann::json& required(const std::string& key);
  const nlohmann::json* optional(const std::string& key);

  double number(const std::string& key);
  double number_or(const std::string& key, double fallback);
  // Rejects values <= 0 with the message "non-positive <what>".
  double positive(const std::string& key, const std::string& what = "value");
  double positive_or(const std::string& key, double fallback, const std::string& what = "value");
  int integer_or(const std::string& key, int fallback);
  std::string text(const std::string& key);
  std::string text_or(const std::string& key, const std::string& fallback);
  bool flag_or(const std::string& key, bool fallback);
  // A two-element numeric array [lo, hi] with lo < hi.
  std::array<double, 2> interval(const std::string& key);
  std::array<double, 2> interval_or(const std::string& key, std::array<double, 2> fallback);
  Vec2 point(const std::string& key);
  Vec2 point_or(const std::string& key, Vec2 fallback);
  std::vector<double> numbers(const std::string& key);

  // Throws ConfigError naming the first key that was never read.
  void reject_unknown() const;

 private:
  const nlohmann::json& object_;
  std::string path_;
  std::set<std::string> seen_;
};

double as_number(const nlohmann::json& value, const std::string& path);
Vec2 as_point(const nlohmann::json& value, const std::string& path);

}  // namespace widthlab
