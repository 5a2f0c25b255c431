#pragma once

#include <functional>
#include <string>

namespace upb {

using WarningSink = std::function<void(const std::string& module, const std::string& message)>;

// Warnings go to std::clog unless a sink is installed. Passing an empty
// function restores the default.
void set_warning_sink(WarningSink sink);
void warn(const std::string& module, const std::string& message);

}  // namespace upb
