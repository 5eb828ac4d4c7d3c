#include "widthlab/json_fields.hpp"

namespace widthlab {

using nlohmann::json;

FieldReader::FieldReader(const json& object, std::string path)
    : object_(object), path_(std::move(path)) {
  if (!object_.is_object()) throw ConfigError(path_.empty() ? "/" : path_, "expected an object");
}

bool FieldReader::has(const std::string& key) const { return object_.contains(key); }

const json& FieldReader::required(const std::string& key) {
  seen_.insert(key);
  auto it = object_.find(key);
  if (it == object_.end()) throw ConfigError(path_of(key), "missing required field");
  return *it;
}

const json* FieldReader::optional(const std::string& key) {
  seen_.insert(key);
  auto it = object_.find(key);
  return it == object_.end() ? nullptr : &*it;
}

double as_number(const json& value, const std::string& path) {
  if (!value.is_number()) throw ConfigError(path, "expected a number");
  double x = value.get<double>();
  if (!std::isfinite(x)) throw ConfigError(path, "expected a finite number");
  return x;
}

Vec2 as_point(const json& value, const std::string& path) {
  if (!value.is_array() || value.size() != 2) throw ConfigError(path, "expected a two-element array");
  return {as_number(value[0], path + "/0"), as_number(value[1], path + "/1")};
}

double FieldReader::number(const std::string& key) { return as_number(required(key), path_of(key)); }

double FieldReader::number_or(const std::string& key, double fallback) {
  const json* v = optional(key);
  return v ? as_number(*v, path_of(key)) : fallback;
}

double FieldReader::positive(const std::string& key, const std::string& what) {
  double x = number(key);
  if (x <= 0) throw ConfigError(path_of(key), "non-positive " + what);
  return x;
}

double FieldReader::positive_or(const std::string& key, double fallback, const std::string& what) {
  if (!has(key)) {
    seen_.insert(key);
    return fallback;
  }
  return positive(key, what);
}

int FieldReader::integer_or(const std::string& key, int fallback) {
  const json* v = optional(key);
  if (!v) return fallback;
  if (!v->is_number_integer()) throw ConfigError(path_of(key), "expected an integer");
  return v->get<int>();
}

std::string FieldReader::text(const std::string& key) {
  const json& v = required(key);
  if (!v.is_string()) throw ConfigError(path_of(key), "expected a string");
  return v.get<std::string>();
}

std::string FieldReader::text_or(const std::string& key, const std::string& fallback) {
  return has(key) ? text(key) : (seen_.insert(key), fallback);
}

bool FieldReader::flag_or(const std::string& key, bool fallback) {
  const json* v = optional(key);
  if (!v) return fallback;
  if (!v->is_boolean()) throw ConfigError(path_of(key), "expected true or false");
  return v->get<bool>();
}

std::array<double, 2> FieldReader::interval(const std::string& key) {
  Vec2 p = as_point(required(key), path_of(key));
  if (!(p[0] < p[1])) throw ConfigError(path_of(key), "interval must satisfy lo < hi");
  return {p[0], p[1]};
}

std::array<double, 2> FieldReader::interval_or(const std::string& key, std::array<double, 2> fallback) {
  return has(key) ? interval(key) : (seen_.insert(key), fallback);
}

Vec2 FieldReader::point(const std::string& key) { return as_point(required(key), path_of(key)); }

Vec2 FieldReader::point_or(const std::string& key, Vec2 fallback) {
  return has(key) ? point(key) : (seen_.insert(key), fallback);
}

std::vector<double> FieldReader::numbers(const std::string& key) {
  const json& v = required(key);
  if (!v.is_array()) throw ConfigError(path_of(key), "expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], path_of(key) + "/" + std::to_string(i)));
  return out;
}

void FieldReader::reject_unknown() const {
  for (auto it = object_.begin(); it != object_.end(); ++it) {
    if (!seen_.count(it.key())) throw ConfigError(path_of(it.key()), "unknown key");
  }
}

}  // namespace widthlab
