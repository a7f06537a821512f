#ifndef LCGLN_REPORT_H_
#define LCGLN_REPORT_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lcgln/results.h"

namespace lcgln {

enum class ReportFormat { kTable, kLineplot, kHistogram };

std::string_view ReportFormatName(ReportFormat format);
std::optional<ReportFormat> ParseReportFormat(std::string_view name);

// All emitters throw ContractError on an empty summary list and produce
// byte-identical output for identical input.
std::string FormatTableText(std::span<const Summary> summaries);
std::string FormatTableCsv(std::span<const Summary> summaries);
// Inverse of FormatTableCsv. Throws IngestionError on malformed input.
std::vector<Summary> ParseTableCsv(std::string_view text);

// Normalized regret against sample count, one polyline per
// (problem, method, fakes) series, with a point and an SEM bar per summary.
std::string LineplotSvg(std::span<const Summary> summaries);
// One group per fake-target count, one bar per (problem, method, samples)
// series inside each group, with an SEM bar on every bar.
std::string HistogramSvg(std::span<const Summary> summaries);

// Writes the report and returns the files written. The table format writes
// aligned text to `out` and the CSV next to it with a .csv extension (or
// .txt for the text when `out` already ends in .csv).
std::vector<std::string> EmitReport(std::span<const Summary> summaries,
                                    ReportFormat format, const std::string& out);

}  // namespace lcgln

#endif  // LCGLN_REPORT_H_
