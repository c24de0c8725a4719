#pragma once

// Stderr logging gated by the IDEALREG_LOG environment variable
// (error < info < debug; default error).  The level is read once.

#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace idealreg {

enum class LogLevel { kError = 0, kInfo = 1, kDebug = 2 };

inline LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("IDEALREG_LOG");
    if (env == nullptr) return LogLevel::kError;
    if (std::strcmp(env, "debug") == 0) return LogLevel::kDebug;
    if (std::strcmp(env, "info") == 0) return LogLevel::kInfo;
    return LogLevel::kError;
  }();
  return level;
}

namespace detail {

inline void vlog(const char* tag, const char* fmt, std::va_list args) {
  std::fprintf(stderr, "[%s] ", tag);
  std::vfprintf(stderr, fmt, args);
  std::fputc('\n', stderr);
}

}  // namespace detail

#if defined(__GNUC__)
#define IDEALREG_PRINTF_CHECK __attribute__((format(printf, 1, 2)))
#else
#define IDEALREG_PRINTF_CHECK
#endif

IDEALREG_PRINTF_CHECK inline void log_error(const char* fmt, ...) {
  std::va_list args;
  va_start(args, fmt);
  detail::vlog("error", fmt, args);
  va_end(args);
}

IDEALREG_PRINTF_CHECK inline void log_info(const char* fmt, ...) {
  if (log_level() < LogLevel::kInfo) return;
  std::va_list args;
  va_start(args, fmt);
  detail::vlog("info", fmt, args);
  va_end(args);
}

IDEALREG_PRINTF_CHECK inline void log_debug(const char* fmt, ...) {
  if (log_level() < LogLevel::kDebug) return;
  std::va_list args;
  va_start(args, fmt);
  detail::vlog("debug", fmt, args);
  va_end(args);
}

#undef IDEALREG_PRINTF_CHECK

}  // namespace idealreg
