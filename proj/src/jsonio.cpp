#include "bslq/jsonio.hpp"

#include <cmath>
#include <cstdio>

namespace bslq {
namespace {

void write_escaped(std::string& out, const std::string& s) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

void write(std::string& out, const Json& j, int indent, int depth) {
  auto newline = [&](int d) {
    if (indent > 0) {
      out += '\n';
      out.append(static_cast<std::size_t>(indent) * d, ' ');
    }
  };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) { out += "{}"; return; }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        write_escaped(out, it.key());
        out += indent > 0 ? ": " : ":";
        write(out, it.value(), indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) { out += "[]"; return; }
      // keep flat numeric arrays on one line; matrices stay readable
      bool flat = true;
      for (const auto& e : j)
        if (e.is_structured()) { flat = false; break; }
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += ',';
        if (!first && flat && indent > 0) out += ' ';
        first = false;
        if (!flat) newline(depth + 1);
        write(out, e, indent, depth + 1);
      }
      if (!flat) newline(depth);
      out += ']';
      return;
    }
    case Json::value_t::string:
      write_escaped(out, j.get_ref<const std::string&>());
      return;
    case Json::value_t::boolean:
      out += j.get<bool>() ? "true" : "false";
      return;
    case Json::value_t::number_integer:
      out += std::to_string(j.get<std::int64_t>());
      return;
    case Json::value_t::number_unsigned:
      out += std::to_string(j.get<std::uint64_t>());
      return;
    case Json::value_t::number_float: {
      double v = j.get<double>();
      char buf[40];
      if (!std::isfinite(v)) {
        out += "null";  // JSON has no inf/nan; reports never contain them
      } else {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out += buf;
        // make sure the token re-parses as a float, not an integer
        std::string_view sv(buf);
        if (sv.find('.') == std::string_view::npos &&
            sv.find('e') == std::string_view::npos &&
            sv.find("inf") == std::string_view::npos)
          out += ".0";
      }
      return;
    }
    default:
      out += "null";
      return;
  }
}

}  // namespace

std::string dump_json(const Json& j, int indent) {
  std::string out;
  write(out, j, indent, 0);
  out += '\n';
  return out;
}

}  // namespace bslq
