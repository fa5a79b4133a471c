#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <unistd.h>

namespace fx {

inline std::filesystem::path dir() { return SURF_FIXTURES; }

inline std::string read(const std::filesystem::path& p) {
    std::ifstream in(p.is_absolute() ? p : dir() / p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline std::string sample_code() { return read("sample_code.java"); }
inline std::string sample_trace() { return read("sample_trace.txt"); }

// Scratch directory removed on scope exit.
struct TempDir {
    std::filesystem::path path;
    TempDir() {
        static int counter = 0;
        path = std::filesystem::temp_directory_path() /
               ("surf-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
};

}  // namespace fx
