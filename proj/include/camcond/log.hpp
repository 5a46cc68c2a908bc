#pragma once

#include <spdlog/spdlog.h>

namespace camcond::log {

/// Installs a stderr logger as the spdlog default. Level comes from
/// CAMCOND_LOG (trace, debug, info, warn, error, off); unset means `fallback`.
void init(spdlog::level::level_enum fallback = spdlog::level::info);

}  // namespace camcond::log
