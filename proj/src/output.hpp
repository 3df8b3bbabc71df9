#pragma once

#include <map>
#include <string>
#include <string_view>

namespace css::detail {

std::string sha256_hex(std::string_view bytes);

/// Output directory held under an exclusive advisory lock for one run. Files
/// are written to a temporary sibling and renamed into place.
class OutputDir {
 public:
  explicit OutputDir(const std::string& path);
  ~OutputDir();
  OutputDir(const OutputDir&) = delete;
  OutputDir& operator=(const OutputDir&) = delete;

  void write(const std::string& name, std::string_view bytes);
  // Deletes a leftover from an earlier run; missing files are fine.
  void remove(const std::string& name);
  const std::map<std::string, std::string>& checksums() const noexcept { return checksums_; }
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
  int lock_fd_ = -1;
  std::map<std::string, std::string> checksums_;
};

}  // namespace css::detail
