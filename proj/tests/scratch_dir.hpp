#pragma once

#include <filesystem>
#include <string>

#include <unistd.h>

// Fresh directory under the system temp dir, removed on scope exit.
struct scratch_dir {
    std::filesystem::path path;

    explicit scratch_dir(const std::string& tag)
        : path(std::filesystem::temp_directory_path() /
               ("alox-test-" + tag + "-" + std::to_string(::getpid()))) {
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~scratch_dir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    scratch_dir(const scratch_dir&) = delete;
    scratch_dir& operator=(const scratch_dir&) = delete;
};
