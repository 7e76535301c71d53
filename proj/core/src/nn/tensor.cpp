// SPDX-License-Identifier: Apache-2.0
#include "linetrace/nn/tensor.hpp"

#include <sys/mman.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <new>

#include "linetrace/error.hpp"

namespace linetrace::nn {

namespace detail {
namespace {

// Every buffer starts on a cache-line boundary. Vectorized kernels split work
// by pointer alignment, so a fixed alignment keeps results bit-reproducible.
constexpr std::align_val_t kAlign{64};
constexpr std::size_t kLargeBlock = std::size_t(1) << 20;
constexpr std::size_t kPageAlign = std::size_t(2) << 20;
constexpr std::size_t kPoolBytes = std::size_t(1) << 30;

std::size_t rounded(std::size_t bytes) { return (bytes + kPageAlign - 1) / kPageAlign * kPageAlign; }

struct Pool {
  struct Block {
    void* p;
    std::size_t bytes;
  };
  std::vector<Block> free;
  std::size_t held = 0;

  ~Pool() {
    for (const Block& b : free) std::free(b.p);
  }
};

Pool& pool() {
  thread_local Pool p;
  return p;
}

}  // namespace

void* acquire_buffer(std::size_t bytes) {
  if (bytes < kLargeBlock) return ::operator new(bytes, kAlign);
  const std::size_t size = rounded(bytes);
  Pool& pl = pool();
  for (std::size_t i = pl.free.size(); i-- > 0;) {
    if (pl.free[i].bytes == size) {
      void* p = pl.free[i].p;
      pl.free.erase(pl.free.begin() + static_cast<std::ptrdiff_t>(i));
      pl.held -= size;
      return p;
    }
  }
  void* p = std::aligned_alloc(kPageAlign, size);
  if (!p) throw std::bad_alloc();
#ifdef MADV_HUGEPAGE
  madvise(p, size, MADV_HUGEPAGE);
#endif
  return p;
}

void release_buffer(void* p, std::size_t bytes) noexcept {
  if (!p) return;
  if (bytes < kLargeBlock) {
    ::operator delete(p, kAlign);
    return;
  }
  const std::size_t size = rounded(bytes);
  Pool& pl = pool();
  try {
    pl.free.push_back({p, size});
  } catch (...) {
    std::free(p);
    return;
  }
  pl.held += size;
  while (pl.held > kPoolBytes && !pl.free.empty()) {
    std::free(pl.free.front().p);
    pl.held -= pl.free.front().bytes;
    pl.free.erase(pl.free.begin());
  }
}

}  // namespace detail

std::size_t numel(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string to_string(const Shape& shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + ")";
}

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)), data_(numel(shape_), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(data.begin(), data.end()) {
  if (data_.size() != numel(shape_)) {
    throw ShapeError("tensor data holds " + std::to_string(data_.size()) + " values but shape " +
                     to_string(shape_) + " needs " + std::to_string(numel(shape_)));
  }
}

void Tensor::reshape(Shape shape) {
  if (numel(shape) != data_.size()) {
    throw ShapeError("cannot reshape " + to_string(shape_) + " to " + to_string(shape));
  }
  shape_ = std::move(shape);
}

Tensor Tensor::reshaped(Shape shape) const {
  Tensor t = *this;
  t.reshape(std::move(shape));
  return t;
}

void Tensor::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

bool Tensor::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace linetrace::nn
