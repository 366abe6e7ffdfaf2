#pragma once

#include <functional>
#include <string_view>

namespace qrefl {

/// Non-fatal diagnostics. The default sink writes "warning: ..." to stderr.
void warn(std::string_view message);

/// Replaces the warning sink; returns the previous one. Pass {} to restore
/// the default.
std::function<void(std::string_view)> set_warning_sink(std::function<void(std::string_view)> sink);

}  // namespace qrefl
