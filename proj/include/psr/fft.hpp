#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "psr/volume.hpp"

namespace psr {

/// Unnormalized 1-D DFT of length n applied to n contiguous blocks of `block`
/// complexes each (element k of every lane is block k). Power-of-two lengths
/// use an iterative radix-2 transform; other lengths go through Bluestein's
/// chirp-z reduction onto a power-of-two transform.
class Fft1d {
 public:
  explicit Fft1d(std::size_t n);
  ~Fft1d();
  Fft1d(Fft1d&&) noexcept;
  Fft1d& operator=(Fft1d&&) noexcept;

  std::size_t size() const { return n_; }
  /// X_k = sum_j x_j exp(-2 pi i jk / n)
  void forward(cx* data, std::size_t block) const;
  /// x_j = sum_k X_k exp(+2 pi i jk / n)
  void inverse(cx* data, std::size_t block) const;

 private:
  void radix2(cx* data, std::size_t block, bool inverse) const;
  void bluestein(cx* data, std::size_t block) const;

  std::size_t n_ = 0;
  std::vector<cx> twiddle_;  // exp(-2 pi i k / n), k < n/2
  std::vector<std::size_t> bitrev_;
  // Bluestein state; empty for powers of two.
  std::size_t m_ = 0;
  std::vector<cx> chirp_;
  std::vector<cx> kernel_spectrum_;
  std::unique_ptr<Fft1d> inner_;
};

/// Per-frame centered orthonormal 2-D transform for volumes with a fixed
/// Nx x Ny frame. Frequency index k of an axis of length N corresponds to the
/// integer frequency k - N/2, so DC sits at (Nx/2, Ny/2).
class Fft2 {
 public:
  Fft2(std::size_t nx, std::size_t ny, int threads = 1);

  std::size_t nx() const { return x_.size(); }
  std::size_t ny() const { return y_.size(); }

  /// In place; retags the volume as k-space. Any Nt is accepted.
  void forward(ComplexVolume& v) const;
  /// In place; retags the volume as image.
  void inverse(ComplexVolume& v) const;

 private:
  void transform(ComplexVolume& v, bool inverse) const;

  Fft1d x_;
  Fft1d y_;
  int threads_;
};

/// Image -> k-space. Throws ValidationError unless `v` is tagged image.
ComplexVolume fft2(const ComplexVolume& v, int threads = 1);
/// K-space -> image. Throws ValidationError unless `v` is tagged k-space.
ComplexVolume ifft2(const ComplexVolume& v, int threads = 1);

struct GradientWeights {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<double> wx;  // nx*ny grid, row-major, radians/pixel
  std::vector<double> wy;

  double x(std::size_t ix, std::size_t iy) const { return wx[ix * ny + iy]; }
  double y(std::size_t ix, std::size_t iy) const { return wy[ix * ny + iy]; }
};

/// wx[kx, .] = 2 pi (kx - nx/2) / nx on the centered grid, wy analogously.
GradientWeights gradient_weights(std::size_t nx, std::size_t ny);

}  // namespace psr
