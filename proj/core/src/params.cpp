#include "readmit/params.hpp"

#include <cmath>
#include <cstdint>

#include <fmt/format.h>

#include "readmit/error.hpp"

namespace readmit {

double ParamValue::number() const {
  if (!is_number()) throw DomainError("parameter value '" + std::get<std::string>(value_) + "' is not a number");
  return std::get<double>(value_);
}

const std::string& ParamValue::text() const {
  if (!is_text()) throw DomainError("parameter value " + to_string() + " is not a keyword");
  return std::get<std::string>(value_);
}

std::string ParamValue::to_string() const {
  if (is_number()) return fmt::format("{}", std::get<double>(value_));
  return std::get<std::string>(value_);
}

std::strong_ordering operator<=>(const ParamValue& a, const ParamValue& b) {
  if (a.is_number() != b.is_number()) return a.is_number() ? std::strong_ordering::less : std::strong_ordering::greater;
  if (a.is_number()) {
    double x = a.number();
    double y = b.number();
    if (x < y) return std::strong_ordering::less;
    if (x > y) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }
  return a.text() <=> b.text();
}

void to_json(nlohmann::json& j, const ParamValue& v) {
  if (v.is_number() && v.number() == std::floor(v.number()) && std::abs(v.number()) < 9007199254740992.0)
    j = static_cast<std::int64_t>(v.number());
  else if (v.is_number())
    j = v.number();
  else
    j = v.text();
}

void from_json(const nlohmann::json& j, ParamValue& v) {
  if (j.is_number())
    v = ParamValue(j.get<double>());
  else if (j.is_string())
    v = ParamValue(j.get<std::string>());
  else if (j.is_null())
    v = ParamValue("none");
  else
    throw DomainError("parameter values must be numbers or strings, got " + j.dump());
}

std::string describe(const ParamMap& params) {
  std::string out;
  for (const auto& [k, v] : params) {
    if (!out.empty()) out += ' ';
    out += k + '=' + v.to_string();
  }
  return out;
}

}  // namespace readmit
