#pragma once

#include <string>
#include <vector>

namespace ptse {

//! Non-fatal condition surfaced by a fitting or estimation routine.
//! `code` is a stable machine-readable tag, `message` is for humans.
struct Warning {
  std::string code;
  std::string message;
};

using WarningLog = std::vector<Warning>;

//! Append to `log` if it is non-null; silently drop otherwise.
inline void warn(WarningLog* log, std::string code, std::string message)
{
  if (log != nullptr) {
    log->push_back(Warning{ std::move(code), std::move(message) });
  }
}

} // namespace ptse
