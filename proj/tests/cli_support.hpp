// Copyright 2026 The nulllab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NULLLAB_TESTS_CLI_SUPPORT_HPP
#define NULLLAB_TESTS_CLI_SUPPORT_HPP

// Runs the command-line tool through the shell and captures its output.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace nulllab::testing {

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

inline std::string slurp(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// `args` is pasted into a shell command line after the binary path.
inline CliResult run_cli(const std::string &args, const std::string &env = "") {
    static int counter = 0;
    auto dir = std::filesystem::temp_directory_path();
    auto stem = "nulllab_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++);
    auto out_path = dir / (stem + ".out");
    auto err_path = dir / (stem + ".err");
    std::string cmd = env + (env.empty() ? "" : " ") + "'" + std::string(NULLLAB_CLI) + "' " + args + " >'" +
                      out_path.string() + "' 2>'" + err_path.string() + "'";
    int status = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    std::filesystem::remove(out_path);
    std::filesystem::remove(err_path);
    return r;
}

}  // namespace nulllab::testing

#endif  // NULLLAB_TESTS_CLI_SUPPORT_HPP
