#include "output.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "css/error.hpp"

namespace css::detail {

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    fail(ErrorKind::io, "sha256 failed");
  std::string hex;
  for (unsigned int k = 0; k < len; ++k) hex += fmt::format("{:02x}", md[k]);
  return hex;
}

OutputDir::OutputDir(const std::string& path) : path_(path) {
  std::error_code ec;
  std::filesystem::create_directories(path_, ec);
  if (ec) fail(ErrorKind::io, "cannot create output directory '" + path_ + "': " + ec.message());
  const std::string lock = path_ + "/.lock";
  lock_fd_ = ::open(lock.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (lock_fd_ < 0) fail(ErrorKind::io, "cannot open lock file '" + lock + "': " + std::strerror(errno));
  if (::flock(lock_fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(lock_fd_);
    lock_fd_ = -1;
    fail(ErrorKind::io, "output directory '" + path_ + "' is in use by another run");
  }
}

OutputDir::~OutputDir() {
  if (lock_fd_ >= 0) {
    ::flock(lock_fd_, LOCK_UN);
    ::close(lock_fd_);
  }
}

void OutputDir::write(const std::string& name, std::string_view bytes) {
  const std::string final_path = path_ + "/" + name;
  const std::string tmp = path_ + "/." + name + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorKind::io, "cannot write '" + tmp + "'");
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    f.flush();
    if (!f) fail(ErrorKind::io, "short write to '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, final_path, ec);
  if (ec) fail(ErrorKind::io, "cannot move '" + tmp + "' into place: " + ec.message());
  checksums_[name] = sha256_hex(bytes);
}

void OutputDir::remove(const std::string& name) {
  std::error_code ec;
  std::filesystem::remove(path_ + "/" + name, ec);
  if (ec) fail(ErrorKind::io, "cannot remove stale '" + name + "': " + ec.message());
  checksums_.erase(name);
}

}  // namespace css::detail
