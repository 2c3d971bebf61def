#pragma once

#include <string_view>

namespace pip2::log {

void set_quiet(bool quiet);
bool quiet();

void info(std::string_view message);
void warn(std::string_view message);

}  // namespace pip2::log
