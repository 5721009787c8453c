#pragma once

#include <map>
#include <string>
#include <vector>

namespace supmmd {

// flat `section.key = value` file; '#' comments; later lines win
std::map<std::string, std::string> parse_config_file(const std::string& path);

int run_command(const std::vector<std::string>& args);

}  // namespace supmmd
