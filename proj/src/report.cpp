#include "moran/report.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace moran {

ReportFormat report_format_from_name(const std::string& name) {
  if (name == "csv") return ReportFormat::csv;
  if (name == "json") return ReportFormat::json;
  throw std::invalid_argument("unknown report format: " + name);
}

namespace {

std::string format_double(double d) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  return buf;
}

std::string json_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out += "\"";
  return out;
}

}  // namespace

std::string format_value(const ReportValue& v, ReportFormat format) {
  return std::visit(
      [&](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, long long>) return std::to_string(x);
        if constexpr (std::is_same_v<T, std::uint64_t>) return std::to_string(x);
        if constexpr (std::is_same_v<T, double>) return format_double(x);
        if constexpr (std::is_same_v<T, Rational>) {
          std::string s = format_rational(x);
          return format == ReportFormat::json ? json_quote(s) : s;
        }
        if constexpr (std::is_same_v<T, std::string>)
          return format == ReportFormat::json ? json_quote(x) : x;
        if constexpr (std::is_same_v<T, bool>) return x ? "true" : "false";
      },
      v);
}

std::string emit_report(const std::vector<ReportRecord>& records, ReportFormat format,
                        const std::vector<std::string>& header_when_empty) {
  std::ostringstream out;
  if (format == ReportFormat::csv) {
    if (!records.empty()) {
      for (std::size_t i = 0; i < records[0].size(); ++i)
        out << (i ? "," : "") << records[0][i].first;
      out << "\n";
    } else {
      for (std::size_t i = 0; i < header_when_empty.size(); ++i)
        out << (i ? "," : "") << header_when_empty[i];
      out << "\n";
    }
    for (const auto& rec : records) {
      for (std::size_t i = 0; i < rec.size(); ++i)
        out << (i ? "," : "") << format_value(rec[i].second, format);
      out << "\n";
    }
  } else {
    for (const auto& rec : records) {
      out << "{";
      for (std::size_t i = 0; i < rec.size(); ++i) {
        if (i) out << ",";
        out << json_quote(rec[i].first) << ":" << format_value(rec[i].second, format);
      }
      out << "}\n";
    }
  }
  return out.str();
}

}  // namespace moran
