#pragma once

#include <compare>
#include <map>
#include <string>
#include <string_view>
#include <variant>

#include <nlohmann/json.hpp>

namespace readmit {

// A hyperparameter value: a number, or a keyword such as "auto" or "none".
class ParamValue {
 public:
  ParamValue() : value_(0.0) {}
  ParamValue(double v) : value_(v) {}
  ParamValue(int v) : value_(static_cast<double>(v)) {}
  ParamValue(std::string v) : value_(std::move(v)) {}
  ParamValue(const char* v) : value_(std::string(v)) {}

  bool is_number() const noexcept { return std::holds_alternative<double>(value_); }
  bool is_text() const noexcept { return !is_number(); }
  double number() const;
  const std::string& text() const;

  // Shortest round-trip form for numbers; the keyword otherwise.
  std::string to_string() const;

  // Numbers order before keywords; numbers by value, keywords lexically.
  friend std::strong_ordering operator<=>(const ParamValue& a, const ParamValue& b);
  friend bool operator==(const ParamValue& a, const ParamValue& b) { return (a <=> b) == 0; }

 private:
  std::variant<double, std::string> value_;
};

using ParamMap = std::map<std::string, ParamValue>;

void to_json(nlohmann::json& j, const ParamValue& v);
void from_json(const nlohmann::json& j, ParamValue& v);

std::string describe(const ParamMap& params);

}  // namespace readmit
