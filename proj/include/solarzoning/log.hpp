#pragma once

#include <functional>
#include <string_view>

namespace solarzoning::log {

using Sink = std::function<void(std::string_view)>;

// Replaces the warning sink (default writes to std::clog). Returns the old one.
Sink set_warning_sink(Sink sink);

void warn(std::string_view message);

}  // namespace solarzoning::log
