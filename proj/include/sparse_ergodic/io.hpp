#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

namespace sparse_ergodic::io {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::filesystem::path& path);
/// Creates parent directories; throws IoError when the path cannot be written.
void write_file(const std::filesystem::path& path, const std::string& data);
void ensure_directory(const std::filesystem::path& dir);

}  // namespace sparse_ergodic::io
