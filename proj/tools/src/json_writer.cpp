#include "rtourn_cli/json_writer.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace rtourn::cli {

namespace {

bool is_scalar_array(const Json& v) {
  if (!v.is_array()) return false;
  for (const auto& e : v) {
    if (e.is_structured()) return false;
  }
  return true;
}

void write_value(std::ostream& os, const Json& v, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(2 * depth), ' ');
  switch (v.type()) {
    case Json::value_t::number_float:
      os << format_double(v.get<double>());
      return;
    case Json::value_t::object: {
      if (v.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (const auto& [key, item] : v.items()) {
        if (!first) os << ",\n";
        first = false;
        os << pad << Json(key).dump() << ": ";
        write_value(os, item, depth + 1);
      }
      os << '\n' << close << '}';
      return;
    }
    case Json::value_t::array: {
      if (is_scalar_array(v)) {
        os << '[';
        for (std::size_t i = 0; i < v.size(); ++i) {
          if (i > 0) os << ", ";
          write_value(os, v[i], depth + 1);
        }
        os << ']';
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) os << ",\n";
        os << pad;
        write_value(os, v[i], depth + 1);
      }
      os << '\n' << close << ']';
      return;
    }
    default:
      os << v.dump();
  }
}

}  // namespace

std::string format_double(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_json(std::ostream& os, const Json& value) {
  write_value(os, value, 0);
  os << '\n';
}

}  // namespace rtourn::cli
