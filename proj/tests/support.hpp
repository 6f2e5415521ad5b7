#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "psr/rng.hpp"
#include "psr/volume.hpp"

namespace psr::test {

inline ComplexVolume random_volume(const Dims& d, std::uint64_t seed,
                                   Domain domain = Domain::Image) {
  Rng rng(seed);
  ComplexVolume v(d, domain);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = rng.complex_normal();
  return v;
}

inline std::vector<cx> random_taps(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<cx> t(n);
  for (auto& z : t) z = rng.complex_normal();
  return t;
}

inline double rel_err(const ComplexVolume& a, const ComplexVolume& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return den == 0.0 ? std::sqrt(num) : std::sqrt(num / den);
}

inline bool bit_equal(const ComplexVolume& a, const ComplexVolume& b) {
  if (!(a.dims() == b.dims())) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].real() != b[i].real() || a[i].imag() != b[i].imag()) return false;
  }
  return true;
}

inline Eigen::VectorXcd to_vec(const ComplexVolume& v) {
  Eigen::VectorXcd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

inline ComplexVolume from_vec(const Eigen::VectorXcd& x, const Dims& d, Domain domain) {
  ComplexVolume v(d, domain);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = x(static_cast<Eigen::Index>(i));
  return v;
}

/// Centered orthonormal 1-D DFT matrix: index k <-> k - n/2, same for space.
inline Eigen::MatrixXcd centered_dft_matrix(std::size_t n) {
  Eigen::MatrixXcd m(n, n);
  const double c = static_cast<double>(n / 2);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t x = 0; x < n; ++x) {
      const double ph = -2.0 * std::numbers::pi * (k - c) * (x - c) / static_cast<double>(n);
      m(k, x) = std::polar(1.0 / std::sqrt(static_cast<double>(n)), ph);
    }
  }
  return m;
}

/// Dense per-frame 2-D transform acting on the (x, y, t) flattening.
inline Eigen::MatrixXcd dense_fft2(const Dims& d) {
  const Eigen::MatrixXcd fx = centered_dft_matrix(d.nx);
  const Eigen::MatrixXcd fy = centered_dft_matrix(d.ny);
  const Eigen::Index n = static_cast<Eigen::Index>(d.size());
  Eigen::MatrixXcd f = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t kx = 0; kx < d.nx; ++kx)
    for (std::size_t ky = 0; ky < d.ny; ++ky)
      for (std::size_t x = 0; x < d.nx; ++x)
        for (std::size_t y = 0; y < d.ny; ++y)
          for (std::size_t t = 0; t < d.nt; ++t)
            f((kx * d.ny + ky) * d.nt + t, (x * d.ny + y) * d.nt + t) = fx(kx, x) * fy(ky, y);
  return f;
}

/// Valid temporal convolution r[n] = sum_j h[j] s[n + L - j] as a dense matrix.
inline Eigen::MatrixXcd dense_temporal_conv(const Dims& d, const std::vector<cx>& h) {
  const std::size_t L = h.size() - 1, no = d.nt - L;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d.frame_size() * no, d.size());
  for (std::size_t p = 0; p < d.frame_size(); ++p)
    for (std::size_t n = 0; n < no; ++n)
      for (std::size_t j = 0; j <= L; ++j) m(p * no + n, p * d.nt + n + L - j) += h[j];
  return m;
}

/// Valid 2-D convolution of every frame with one shared kx x ky filter.
inline Eigen::MatrixXcd dense_spatial_conv(const Dims& d, std::size_t kx, std::size_t ky,
                                           const std::vector<cx>& h) {
  const std::size_t ox = d.nx - kx + 1, oy = d.ny - ky + 1;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(ox * oy * d.nt, d.size());
  for (std::size_t a = 0; a < ox; ++a)
    for (std::size_t b = 0; b < oy; ++b)
      for (std::size_t t = 0; t < d.nt; ++t)
        for (std::size_t p = 0; p < kx; ++p)
          for (std::size_t q = 0; q < ky; ++q)
            m((a * oy + b) * d.nt + t, ((a + kx - 1 - p) * d.ny + (b + ky - 1 - q)) * d.nt + t) +=
                h[p * ky + q];
  return m;
}

}  // namespace psr::test
