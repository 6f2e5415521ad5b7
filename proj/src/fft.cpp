#include "psr/fft.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <thread>

#include "psr/error.hpp"
#include "psr/simd/kernels.hpp"

namespace psr {

namespace {

cx unit_root(std::size_t k, std::size_t n) {
  // exp(-2 pi i k / n)
  const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
  return {std::cos(angle), std::sin(angle)};
}

void conjugate(cx* data, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) data[i] = std::conj(data[i]);
}

}  // namespace

Fft1d::Fft1d(std::size_t n) : n_(n) {
  if (n == 0) throw DimensionError("FFT length must be >= 1");
  if (std::has_single_bit(n)) {
    twiddle_.resize(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) twiddle_[k] = unit_root(k, n);
    const int bits = std::countr_zero(n);
    bitrev_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t r = 0;
      for (int b = 0; b < bits; ++b) r |= ((i >> b) & 1u) << (bits - 1 - b);
      bitrev_[i] = r;
    }
    return;
  }
  m_ = std::bit_ceil(2 * n - 1);
  chirp_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    // exp(-i pi k^2 / n); k^2 reduced mod 2n keeps the argument small.
    const std::size_t k2 = (k * k) % (2 * n);
    const double angle = -std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n);
    chirp_[k] = {std::cos(angle), std::sin(angle)};
  }
  inner_ = std::make_unique<Fft1d>(m_);
  kernel_spectrum_.assign(m_, cx{});
  kernel_spectrum_[0] = std::conj(chirp_[0]);
  for (std::size_t k = 1; k < n; ++k) {
    kernel_spectrum_[k] = std::conj(chirp_[k]);
    kernel_spectrum_[m_ - k] = std::conj(chirp_[k]);
  }
  inner_->forward(kernel_spectrum_.data(), 1);
}

Fft1d::~Fft1d() = default;
Fft1d::Fft1d(Fft1d&&) noexcept = default;
Fft1d& Fft1d::operator=(Fft1d&&) noexcept = default;

void Fft1d::forward(cx* data, std::size_t block) const {
  if (n_ == 1) return;
  if (m_ == 0) {
    radix2(data, block, false);
  } else {
    bluestein(data, block);
  }
}

void Fft1d::inverse(cx* data, std::size_t block) const {
  if (n_ == 1) return;
  if (m_ == 0) {
    radix2(data, block, true);
    return;
  }
  conjugate(data, n_ * block);
  bluestein(data, block);
  conjugate(data, n_ * block);
}

void Fft1d::radix2(cx* data, std::size_t block, bool inverse) const {
  const auto& k = simd::active();
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t r = bitrev_[i];
    if (r > i) std::swap_ranges(data + i * block, data + (i + 1) * block, data + r * block);
  }
  for (std::size_t len = 2; len <= n_; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t step = n_ / len;
    for (std::size_t start = 0; start < n_; start += len) {
      for (std::size_t j = 0; j < half; ++j) {
        const cx w = inverse ? std::conj(twiddle_[j * step]) : twiddle_[j * step];
        k.butterfly(data + (start + j) * block, data + (start + j + half) * block, w, block);
      }
    }
  }
}

void Fft1d::bluestein(cx* data, std::size_t block) const {
  const auto& k = simd::active();
  std::vector<cx> work(m_ * block);
  for (std::size_t i = 0; i < n_; ++i) {
    std::copy_n(data + i * block, block, work.data() + i * block);
    k.scale(work.data() + i * block, chirp_[i], block);
  }
  inner_->forward(work.data(), block);
  for (std::size_t i = 0; i < m_; ++i) k.scale(work.data() + i * block, kernel_spectrum_[i], block);
  inner_->inverse(work.data(), block);
  const double inv_m = 1.0 / static_cast<double>(m_);
  for (std::size_t i = 0; i < n_; ++i) {
    std::copy_n(work.data() + i * block, block, data + i * block);
    k.scale(data + i * block, chirp_[i] * inv_m, block);
  }
}

Fft2::Fft2(std::size_t nx, std::size_t ny, int threads)
    : x_(nx), y_(ny), threads_(std::max(1, threads)) {}

namespace {

// Centered transform of n contiguous blocks: ifftshift, DFT, fftshift.
void centered(const Fft1d& f, cx* data, std::size_t block, bool inverse) {
  const std::size_t n = f.size();
  const std::size_t c = n / 2;
  std::rotate(data, data + c * block, data + n * block);
  if (inverse) {
    f.inverse(data, block);
  } else {
    f.forward(data, block);
  }
  std::rotate(data, data + (n - c) * block, data + n * block);
}

}  // namespace

void Fft2::transform(ComplexVolume& v, bool inverse) const {
  const Dims d = v.dims();
  if (d.nx != x_.size() || d.ny != y_.size()) {
    throw DimensionError("fft2: plan is " + std::to_string(x_.size()) + "x" +
                         std::to_string(y_.size()) + ", volume is " + to_string(d));
  }
  const std::size_t row = d.ny * d.nt;
  auto rows = [&](std::size_t begin, std::size_t end) {
    for (std::size_t ix = begin; ix < end; ++ix) centered(y_, v.raw() + ix * row, d.nt, inverse);
  };
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads_), d.nx);
  if (workers <= 1) {
    rows(0, d.nx);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (d.nx + workers - 1) / workers;
    for (std::size_t begin = 0; begin < d.nx; begin += chunk) {
      pool.emplace_back(rows, begin, std::min(d.nx, begin + chunk));
    }
  }
  centered(x_, v.raw(), row, inverse);
  scale(v, 1.0 / std::sqrt(static_cast<double>(d.nx * d.ny)));
}

void Fft2::forward(ComplexVolume& v) const {
  transform(v, false);
  v.set_domain(Domain::KSpace);
}

void Fft2::inverse(ComplexVolume& v) const {
  transform(v, true);
  v.set_domain(Domain::Image);
}

ComplexVolume fft2(const ComplexVolume& v, int threads) {
  if (v.domain() != Domain::Image) {
    throw ValidationError(std::string("fft2 expects an image volume, got ") + to_string(v.domain()));
  }
  ComplexVolume out = v;
  Fft2(v.dims().nx, v.dims().ny, threads).forward(out);
  return out;
}

ComplexVolume ifft2(const ComplexVolume& v, int threads) {
  if (v.domain() != Domain::KSpace) {
    throw ValidationError(std::string("ifft2 expects a k-space volume, got ") +
                          to_string(v.domain()));
  }
  ComplexVolume out = v;
  Fft2(v.dims().nx, v.dims().ny, threads).inverse(out);
  return out;
}

GradientWeights gradient_weights(std::size_t nx, std::size_t ny) {
  if (nx == 0 || ny == 0) throw DimensionError("gradient_weights: sizes must be >= 1");
  GradientWeights w{nx, ny, std::vector<double>(nx * ny), std::vector<double>(nx * ny)};
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t ix = 0; ix < nx; ++ix) {
    const double fx = static_cast<double>(ix) - static_cast<double>(nx / 2);
    for (std::size_t iy = 0; iy < ny; ++iy) {
      const double fy = static_cast<double>(iy) - static_cast<double>(ny / 2);
      w.wx[ix * ny + iy] = two_pi * fx / static_cast<double>(nx);
      w.wy[ix * ny + iy] = two_pi * fy / static_cast<double>(ny);
    }
  }
  return w;
}

}  // namespace psr
