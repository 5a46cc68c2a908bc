#include "camcond/log.hpp"

#include <spdlog/sinks/stdout_sinks.h>

#include <cstdlib>
#include <string>

namespace camcond::log {

void init(spdlog::level::level_enum fallback) {
  auto logger = spdlog::get("camcond");
  if (!logger) logger = spdlog::stderr_logger_mt("camcond");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("%Y-%m-%dT%H:%M:%S.%e %l %v");
  auto level = fallback;
  if (const char* env = std::getenv("CAMCOND_LOG"); env != nullptr && *env != '\0') {
    const std::string name(env);
    const auto parsed = spdlog::level::from_str(name);
    if (parsed != spdlog::level::off || name == "off") level = parsed;
  }
  spdlog::set_level(level);
}

}  // namespace camcond::log
