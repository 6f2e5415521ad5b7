#pragma once

#include <cstdint>
#include <vector>

#include "psr/fft.hpp"
#include "psr/volume.hpp"

namespace psr {

/// Binary Cartesian mask M. Phase encoding runs along y; every sampled
/// (y, t) line covers all x.
class SamplingMask {
 public:
  SamplingMask() = default;
  /// Validates binary entries and full-readout lines. Throws ValidationError.
  explicit SamplingMask(RealVolume mask);

  const RealVolume& values() const { return mask_; }
  const Dims& dims() const { return mask_.dims(); }
  /// Ny / (mean sampled lines per frame).
  double acceleration() const { return acceleration_; }
  std::size_t lines_in_frame(std::size_t t) const;
  bool sampled(std::size_t y, std::size_t t) const { return mask_(0, y, t) != 0.0; }
  bool full() const;

 private:
  RealVolume mask_;
  double acceleration_ = 1.0;
};

/// round(ny / acceleration) lines per frame, always including the `acs_lines`
/// lines centered on ky = 0; the remainder is drawn uniformly without
/// replacement, independently per frame unless `per_frame` is false.
SamplingMask make_mask(std::size_t nx, std::size_t ny, std::size_t nt, double acceleration,
                       std::size_t acs_lines, std::uint64_t seed, bool per_frame = true);

/// Coil sensitivities c_i, each an nx*ny grid.
struct CoilSet {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<std::vector<cx>> maps;

  std::size_t count() const { return maps.size(); }
  /// max over pixels of |sum_i |c_i|^2 - 1|
  double normalization_error() const;
};

CoilSet identity_coils(std::size_t nx, std::size_t ny);
/// Smooth complex Gaussian lobes around the field of view, sum-of-squares
/// normalized. m = 1 gives the identity map.
CoilSet make_coils(std::size_t nx, std::size_t ny, std::size_t m, std::uint64_t seed);

/// File form: one complex record, dims (nx, ny, m), domain tag map.
ComplexVolume coils_to_volume(const CoilSet& coils);
CoilSet coils_from_volume(const ComplexVolume& v);

/// y_i = M . F(c_i gamma)
std::vector<ComplexVolume> encode(const ComplexVolume& gamma, const CoilSet& coils,
                                  const SamplingMask& mask, int threads = 1);
/// sum_i conj(c_i) F^-1(M . y_i)
ComplexVolume adjoint_encode(const std::vector<ComplexVolume>& y, const CoilSet& coils,
                             const SamplingMask& mask, int threads = 1);

/// Throws DimensionError unless image dims, mask dims, coil grids and each
/// coil's k-space agree.
void check_consistent(const Dims& image, const CoilSet& coils, const SamplingMask& mask,
                      const std::vector<ComplexVolume>* y = nullptr);

}  // namespace psr
