#pragma once

// Helpers for integration/acceptance tests that drive the CLI binary.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

namespace testutil {

namespace fs = std::filesystem;

inline std::string env_or_fail(const char* name) {
    const char* value = std::getenv(name);
    if (!value || !*value) {
        throw std::runtime_error(std::string("environment variable ") + name + " not set");
    }
    return value;
}

inline std::string wowbench_bin() { return env_or_fail("WOWBENCH_BIN"); }
inline std::string data_dir() { return env_or_fail("WOWBENCH_DATA"); }

struct TempDir {
    fs::path path;

    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() /
               ("wowbench_" + tag + "_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int n = 0;
        return n;
    }
};

struct CliResult {
    int exit_code = -1;
    std::string stdout_text;
    std::string stderr_text;
};

inline std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

inline void spit(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
}

inline CliResult run_cli(const std::string& args, const TempDir& scratch) {
    const fs::path out_file = scratch.path / "cli_stdout.txt";
    const fs::path err_file = scratch.path / "cli_stderr.txt";
    const std::string cmd =
        wowbench_bin() + " " + args + " > " + out_file.string() + " 2> " + err_file.string();
    const int status = std::system(cmd.c_str());
    CliResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.stdout_text = slurp(out_file);
    result.stderr_text = slurp(err_file);
    return result;
}

}  // namespace testutil
