#include "fedlinucb/numfmt.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace fedlinucb {

std::string format_number(double v) {
  if (!std::isfinite(v)) throw std::domain_error("format_number: non-finite value");
  if (v == 0.0) return "0";

  constexpr int kDigits = 12;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*e", kDigits - 1, v);
  // buf looks like "-d.ddddddddddde+XX".
  std::string s(buf);
  const bool negative = s[0] == '-';
  if (negative) s.erase(0, 1);
  const auto epos = s.find('e');
  const int exponent = std::atoi(s.c_str() + epos + 1);
  std::string digits = s.substr(0, 1) + s.substr(2, epos - 2);

  std::string out;
  if (exponent >= kDigits - 1) {
    out = digits + std::string(static_cast<std::size_t>(exponent - (kDigits - 1)), '0');
  } else if (exponent >= 0) {
    out = digits.substr(0, exponent + 1) + "." + digits.substr(exponent + 1);
  } else {
    out = "0." + std::string(static_cast<std::size_t>(-exponent - 1), '0') + digits;
  }
  return negative ? "-" + out : out;
}

namespace {

void write_indent(std::ostream& os, int indent, int level) {
  if (indent > 0) os << '\n' << std::string(static_cast<std::size_t>(indent * level), ' ');
}

void write_value(std::ostream& os, const nlohmann::ordered_json& v, int indent, int level) {
  using nlohmann::ordered_json;
  switch (v.type()) {
    case ordered_json::value_t::object: {
      if (v.empty()) {
        os << "{}";
        return;
      }
      os << '{';
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) os << ',';
        first = false;
        write_indent(os, indent, level + 1);
        os << ordered_json(it.key()).dump() << (indent > 0 ? ": " : ":");
        write_value(os, it.value(), indent, level + 1);
      }
      write_indent(os, indent, level);
      os << '}';
      return;
    }
    case ordered_json::value_t::array: {
      if (v.empty()) {
        os << "[]";
        return;
      }
      os << '[';
      bool first = true;
      for (const auto& item : v) {
        if (!first) os << ',';
        first = false;
        write_indent(os, indent, level + 1);
        write_value(os, item, indent, level + 1);
      }
      write_indent(os, indent, level);
      os << ']';
      return;
    }
    case ordered_json::value_t::number_float:
      os << format_number(v.get<double>());
      return;
    default:
      os << v.dump();
      return;
  }
}

}  // namespace

void write_json(std::ostream& os, const nlohmann::ordered_json& value, int indent) {
  write_value(os, value, indent, 0);
  os << '\n';
}

std::string to_json_string(const nlohmann::ordered_json& value, int indent) {
  std::ostringstream os;
  write_json(os, value, indent);
  return os.str();
}

}  // namespace fedlinucb
