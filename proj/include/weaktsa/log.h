// Minimal stderr logging.  Data never goes to stdout/stderr; only progress
// and warnings do.

#ifndef WEAKTSA_LOG_H_
#define WEAKTSA_LOG_H_

#include <iostream>
#include <sstream>
#include <string_view>

namespace weaktsa::log {

enum class Level { kQuiet = 0, kWarning = 1, kInfo = 2 };

Level& level();

template <typename... Args>
void write(Level at, std::string_view tag, const Args&... args) {
  if (static_cast<int>(at) > static_cast<int>(level())) return;
  std::ostringstream os;
  os << "[" << tag << "] ";
  (os << ... << args);
  os << '\n';
  std::cerr << os.str();
}

template <typename... Args>
void info(const Args&... args) { write(Level::kInfo, "info", args...); }

template <typename... Args>
void warn(const Args&... args) { write(Level::kWarning, "warn", args...); }

}  // namespace weaktsa::log

#endif  // WEAKTSA_LOG_H_
