#include "otproc/warnings.hpp"

#include <cstdio>
#include <mutex>
#include <utility>

namespace otproc {

namespace {

std::mutex handler_mutex;

WarningHandler& handler_slot() {
    static WarningHandler handler = [](const std::string& message) {
        std::fprintf(stderr, "warning: %s\n", message.c_str());
    };
    return handler;
}

}  // namespace

WarningHandler set_warning_handler(WarningHandler handler) {
    std::lock_guard<std::mutex> lock(handler_mutex);
    WarningHandler previous = std::move(handler_slot());
    handler_slot() = std::move(handler);
    return previous;
}

void warn(const std::string& message) {
    WarningHandler snapshot;
    {
        std::lock_guard<std::mutex> lock(handler_mutex);
        snapshot = handler_slot();
    }
    if (snapshot) snapshot(message);
}

}  // namespace otproc
