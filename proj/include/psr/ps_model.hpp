#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "psr/hankel.hpp"
#include "psr/volume.hpp"

namespace psr {

/// gamma(r, t) = sum_l c_l(r) phi_l(t)
struct PSDecomposition {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::size_t nt = 0;
  std::vector<std::vector<cx>> spatial_maps;    // L grids of nx*ny, row-major
  std::vector<std::vector<cx>> temporal_basis;  // L sequences of nt

  std::size_t order() const { return spatial_maps.size(); }
};

ComplexVolume assemble_phantom(const PSDecomposition& decomp);

/// Coefficients of prod_l (1 - z_l zeta^-1), leading tap 1. The filter
/// annihilates every sum of a_l z_l^t in valid mode. With repeated roots it
/// still annihilates the pure exponentials, but not t z^t terms unless the
/// root is listed with matching multiplicity.
TemporalFilter prony_filter(std::span<const cx> roots);

struct CalibrationResult {
  TemporalFilter filter;               // unit norm
  std::vector<double> singular_values;  // nonincreasing, length = window
  double residual = 0.0;               // sigma_min / ||H||_F
};

/// Stacks the temporal Hankel rows (given window) of every pixel of every
/// training volume and takes the right singular vector of the smallest
/// singular value, reversed into convolution order. Row blocks are folded
/// into a running Householder R factor, so memory stays O(window^2).
CalibrationResult calibrate_nullspace(std::span<const ComplexVolume> training,
                                      std::size_t window);

/// ||gamma * h|| / (||h|| ||H(gamma)||_F) over all volumes, the Hankel lift
/// using window = h.size(). Matches CalibrationResult::residual for the
/// calibrated filter.
double annihilation_residual(std::span<const ComplexVolume> volumes, const TemporalFilter& h);

/// 3x3 discrete Laplacian, unit Euclidean norm.
SpatialFilter spatial_filter_default();

struct PhantomConfig {
  std::uint64_t seed = 0;
  /// Seed for the temporal roots; defaults to `seed`. Phantoms sharing it
  /// share their dynamics and differ only in spatial maps and noise.
  std::optional<std::uint64_t> dynamics_seed;
  std::size_t nx = 64;
  std::size_t ny = 64;
  std::size_t nt = 16;
  std::size_t order = 3;
  double modulus_min = 0.95;
  double modulus_max = 1.0;
  double noise = 0.0;     // std of additive circular complex Gaussian noise
  bool constant = false;  // order 1 only: root exactly 1
};

struct Phantom {
  PSDecomposition decomposition;
  std::vector<cx> roots;  // phi_l(t) = roots[l]^t
  ComplexVolume clean;
  ComplexVolume volume;  // clean + noise
};

/// Beating ring: an annulus whose radius oscillates, plus a central blob,
/// written as `order` separable components with exponential temporal bases.
Phantom make_phantom(const PhantomConfig& cfg);

}  // namespace psr
