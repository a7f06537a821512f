#ifndef LCGLN_LOG_H_
#define LCGLN_LOG_H_

#include <functional>
#include <string_view>

namespace lcgln {

using LogSink = std::function<void(std::string_view)>;

// Warnings go to std::clog unless a sink is installed. Returns the previous
// sink so callers (tests, the harness) can restore it.
LogSink SetWarningSink(LogSink sink);
void LogWarning(std::string_view message);

}  // namespace lcgln

#endif  // LCGLN_LOG_H_
