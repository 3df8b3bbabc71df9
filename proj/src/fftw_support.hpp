#pragma once

#include <fftw3.h>

#include <cstddef>
#include <mutex>
#include <new>

namespace css::detail {

// FFTW's planner is not reentrant; plan execution is.
std::mutex& fftw_planner_mutex();

template <class T>
class FftwBuffer {
 public:
  explicit FftwBuffer(std::size_t n) : n_(n), data_(static_cast<T*>(fftw_malloc(sizeof(T) * n))) {
    if (data_ == nullptr) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data_); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;

  T* data() noexcept { return data_; }
  const T* data() const noexcept { return data_; }
  std::size_t size() const noexcept { return n_; }
  T& operator[](std::size_t k) noexcept { return data_[k]; }
  const T& operator[](std::size_t k) const noexcept { return data_[k]; }

 private:
  std::size_t n_;
  T* data_;
};

}  // namespace css::detail
