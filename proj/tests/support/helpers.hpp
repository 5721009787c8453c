#pragma once

#include <sys/wait.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "supmmd/util.hpp"

namespace testsup {

inline std::string fresh_dir(const std::string& tag) {
    static std::atomic<int> counter{0};
    auto base = std::filesystem::temp_directory_path() /
                ("supmmd_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(base);
    return base.string();
}

// exit code of the pipeline binary; output goes to log files inside dir
inline int run_cli(const std::string& dir, const std::string& argline) {
    std::string cmd = "cd '" + dir + "' && '" + SUPMMD_BIN + "' " + argline + " >>cli.out.log 2>>cli.err.log";
    int rc = std::system(cmd.c_str());
    if (rc == -1) return -1;
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

inline bool same_bytes(const std::string& a, const std::string& b) {
    return supmmd::read_file(a) == supmmd::read_file(b);
}

}  // namespace testsup
