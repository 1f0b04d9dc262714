#pragma once

#include <cstdint>
#include <iostream>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "hepflow/error.hpp"

namespace hepflow::fwk {

enum class Level { debug = 0, info = 1, warning = 2, error = 3 };

inline std::string_view to_string(Level l) {
  switch (l) {
    case Level::debug: return "DEBUG";
    case Level::info: return "INFO";
    case Level::warning: return "WARNING";
    default: return "ERROR";
  }
}

inline Level parse_level(std::string_view s) {
  if (s == "debug" || s == "DEBUG") return Level::debug;
  if (s == "info" || s == "INFO") return Level::info;
  if (s == "warning" || s == "WARNING" || s == "warn") return Level::warning;
  if (s == "error" || s == "ERROR") return Level::error;
  throw ConfigError("unknown log level '" + std::string(s) + "'");
}

inline constexpr std::uint64_t no_event = std::numeric_limits<std::uint64_t>::max();

/// Line-oriented logger shared by all tasks. Each message is formatted
/// completely before the sink lock is taken, and written with one call.
class Logger {
 public:
  explicit Logger(std::ostream& sink = std::clog, Level threshold = Level::info)
      : sink_(&sink), threshold_(threshold) {}

  Level threshold() const { return threshold_; }
  void set_threshold(Level l) { threshold_ = l; }
  bool enabled(Level l) const { return l >= threshold_; }

  void log(Level level, std::string_view task, std::uint64_t event_index, std::string_view message) {
    if (!enabled(level)) return;
    std::string line;
    line.reserve(message.size() + task.size() + 32);
    line += to_string(level);
    line += ' ';
    line += task.empty() ? std::string_view("fwk") : task;
    if (event_index != no_event) {
      line += '[';
      line += std::to_string(event_index);
      line += ']';
    }
    line += ": ";
    line += message;
    line += '\n';
    std::lock_guard lock(mu_);
    sink_->write(line.data(), static_cast<std::streamsize>(line.size()));
  }

  void log(Level level, std::string_view task, std::string_view message) {
    log(level, task, no_event, message);
  }

 private:
  std::ostream* sink_;
  Level threshold_;
  std::mutex mu_;
};

}  // namespace hepflow::fwk
