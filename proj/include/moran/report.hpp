#ifndef MORAN_REPORT_HPP
#define MORAN_REPORT_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "moran/rational.hpp"

namespace moran {

enum class ReportFormat { csv, json };

// One record = ordered (field, value) pairs. CSV output carries a header row
// built from the first record; JSON output is one object per line. Floats
// print with 17 significant digits, rationals as "num/den".
using ReportValue = std::variant<long long, std::uint64_t, double, Rational, std::string, bool>;
using ReportRecord = std::vector<std::pair<std::string, ReportValue>>;

std::string format_value(const ReportValue& v, ReportFormat format);
std::string emit_report(const std::vector<ReportRecord>& records, ReportFormat format,
                        const std::vector<std::string>& header_when_empty = {});

ReportFormat report_format_from_name(const std::string& name);

}  // namespace moran

#endif
