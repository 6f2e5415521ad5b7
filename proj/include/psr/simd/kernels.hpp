#pragma once

// Inner-loop kernels over contiguous arrays of complex doubles. Each table
// entry has a scalar reference implementation and, on x86-64, an AVX2 variant
// picked at runtime. Elementwise kernels are bit-identical across variants;
// reductions differ only in summation order.

#include <complex>
#include <cstddef>

namespace psr::simd {

using cx = std::complex<double>;

struct KernelTable {
  const char* name;
  /// a' = a + w b, b' = a - w b
  void (*butterfly)(cx* a, cx* b, cx w, std::size_t n);
  /// a *= s
  void (*scale)(cx* a, cx s, std::size_t n);
  /// a *= b, entrywise
  void (*mul)(cx* a, const cx* b, std::size_t n);
  /// a *= conj(b), entrywise
  void (*mul_conj)(cx* a, const cx* b, std::size_t n);
  /// y += alpha x
  void (*axpy)(cx* y, cx alpha, const cx* x, std::size_t n);
  /// a /= d, entrywise with real d
  void (*div_real)(cx* a, const double* d, std::size_t n);
  /// a *= d, entrywise with real d
  void (*mul_real)(cx* a, const double* d, std::size_t n);
  /// sum conj(a) b
  cx (*dot)(const cx* a, const cx* b, std::size_t n);
  /// sum |a|^2
  double (*norm2)(const cx* a, std::size_t n);
};

const KernelTable& scalar_kernels();
/// Null when the build has no AVX2 variant or the CPU lacks AVX2.
const KernelTable* avx2_kernels();

/// Table chosen once per process: AVX2 when available unless the environment
/// variable PSR_SIMD=scalar forces the reference path.
const KernelTable& active();

}  // namespace psr::simd
