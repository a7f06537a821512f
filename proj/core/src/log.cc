#include "lcgln/log.h"

#include <iostream>
#include <mutex>
#include <utility>

namespace lcgln {

namespace {

std::mutex& SinkMutex() {
  static std::mutex m;
  return m;
}

LogSink& Sink() {
  static LogSink sink;
  return sink;
}

}  // namespace

LogSink SetWarningSink(LogSink sink) {
  std::lock_guard lock(SinkMutex());
  return std::exchange(Sink(), std::move(sink));
}

void LogWarning(std::string_view message) {
  std::lock_guard lock(SinkMutex());
  if (Sink()) {
    Sink()(message);
  } else {
    std::clog << "[lcgln] warning: " << message << '\n';
  }
}

}  // namespace lcgln
