#pragma once

// Hankel lifting and the annihilation operators built on it. Annihilation is
// valid-mode (no wrap) convolution, so applying a filter of L+1 taps to a
// length-N series yields N-L outputs:
//   (s * h)[n] = sum_j h[j] s[n + L - j],  n = 0 .. N-L-1
// which equals the Hankel lift of s (window L+1) times the reversed filter.
// Adjoints zero-pad, so <T v, r> = <v, T^H r> holds to roundoff.

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "psr/volume.hpp"

namespace psr {

/// Temporal null-space filter h_ps (order L = taps - 1).
class TemporalFilter {
 public:
  TemporalFilter() = default;
  /// Throws ValidationError unless length >= 2 with a nonzero leading tap.
  explicit TemporalFilter(std::vector<cx> taps);

  std::size_t order() const { return taps_.size() - 1; }
  std::size_t size() const { return taps_.size(); }
  std::span<const cx> taps() const { return taps_; }
  cx operator[](std::size_t j) const { return taps_[j]; }
  double norm() const;

 private:
  std::vector<cx> taps_;
};

/// One 2-D k-space filter; taps stored row-major (kx_len x ky_len).
class SpatialFilter {
 public:
  SpatialFilter() = default;
  /// Throws ValidationError for empty extents or an all-zero filter.
  SpatialFilter(std::size_t kx_len, std::size_t ky_len, std::vector<cx> taps);

  std::size_t kx() const { return kx_; }
  std::size_t ky() const { return ky_; }
  std::span<const cx> taps() const { return taps_; }
  cx operator()(std::size_t p, std::size_t q) const { return taps_[p * ky_ + q]; }
  double norm() const;

 private:
  std::size_t kx_ = 0;
  std::size_t ky_ = 0;
  std::vector<cx> taps_;
};

/// Per-frame spatial filters h_s = [h_s1 .. h_sT]. A single entry is shared by
/// every frame.
class SpatialBank {
 public:
  SpatialBank() = default;
  explicit SpatialBank(std::vector<SpatialFilter> filters);
  static SpatialBank shared(SpatialFilter f) { return SpatialBank({std::move(f)}); }

  std::size_t count() const { return filters_.size(); }
  bool is_shared() const { return filters_.size() == 1; }
  std::size_t kx() const { return filters_.front().kx(); }
  std::size_t ky() const { return filters_.front().ky(); }
  const SpatialFilter& for_frame(std::size_t t) const {
    return filters_[is_shared() ? 0 : t];
  }
  const std::vector<SpatialFilter>& filters() const { return filters_; }
  /// Throws DimensionError unless the bank fits frames of `d`.
  void check_fits(const Dims& d) const;

 private:
  std::vector<SpatialFilter> filters_;
};

/// Row r, column c holds series[r + c]; shape (N - window + 1) x window.
Eigen::MatrixXcd hankel_temporal(std::span<const cx> series, std::size_t window);

/// Per-pixel valid temporal convolution; result is Nx x Ny x (Nt - L).
ComplexVolume apply_annihilation_temporal(const ComplexVolume& v, const TemporalFilter& h);
/// Zero-padded adjoint; `r` has Nt - L frames, the result Nt.
ComplexVolume adjoint_annihilation_temporal(const ComplexVolume& r, const TemporalFilter& h);
/// T^H T v, same dims as v.
ComplexVolume gram_apply_temporal(const ComplexVolume& v, const TemporalFilter& h);

/// Valid 2-D convolution of a single frame; result (Nx-kx+1) x (Ny-ky+1) x 1.
ComplexVolume apply_annihilation_spatial(const ComplexVolume& v, const SpatialFilter& h,
                                         std::size_t frame);
/// Every frame t convolved with bank.for_frame(t).
ComplexVolume apply_annihilation_spatial(const ComplexVolume& v, const SpatialBank& bank);
ComplexVolume adjoint_annihilation_spatial(const ComplexVolume& r, const SpatialBank& bank,
                                           std::size_t nx, std::size_t ny);
ComplexVolume gram_apply_spatial(const ComplexVolume& v, const SpatialBank& bank);

/// Gradient of Re<w, T^H T v> with respect to the (complex) taps of h, in the
/// convention dL = Re sum conj(g_j) dh_j:
///   g_j = <S_j w, T v> + <S_j v, T w>,  (S_j a)[n] = a[n + L - j].
std::vector<cx> gram_tap_gradient_temporal(const ComplexVolume& v, const ComplexVolume& w,
                                           const TemporalFilter& h);
/// Same for the spatial Gram operator; one gradient grid per bank entry
/// (frames sharing a filter accumulate into it).
std::vector<std::vector<cx>> gram_tap_gradient_spatial(const ComplexVolume& v,
                                                       const ComplexVolume& w,
                                                       const SpatialBank& bank);

}  // namespace psr
