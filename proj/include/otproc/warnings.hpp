#pragma once

#include <functional>
#include <string>

namespace otproc {

using WarningHandler = std::function<void(const std::string&)>;

// Replaces the process-wide warning handler and returns the previous one.
// The default handler writes "warning: <message>" to stderr.
WarningHandler set_warning_handler(WarningHandler handler);

void warn(const std::string& message);

}  // namespace otproc
