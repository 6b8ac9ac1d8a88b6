#include "hill/error.hpp"

#include <atomic>
#include <iostream>

namespace hill {

namespace {

void stderr_sink(const std::string& message) { std::cerr << "warning: " << message << '\n'; }

std::atomic<WarningSink> g_sink{&stderr_sink};

}  // namespace

void warn(const std::string& message) {
    if (auto sink = g_sink.load()) sink(message);
}

WarningSink set_warning_sink(WarningSink sink) { return g_sink.exchange(sink); }

}  // namespace hill
