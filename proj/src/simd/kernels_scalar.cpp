#include "psr/simd/kernels.hpp"

namespace psr::simd {
namespace {

// Complex products are spelled out so that the AVX2 variants, which use the
// same operation order, round identically.
inline cx cmul(cx a, cx b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.imag() * b.real() + a.real() * b.imag()};
}

void butterfly(cx* a, cx* b, cx w, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const cx t = cmul(b[i], w);
    const cx u = a[i];
    a[i] = {u.real() + t.real(), u.imag() + t.imag()};
    b[i] = {u.real() - t.real(), u.imag() - t.imag()};
  }
}

void scale(cx* a, cx s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) a[i] = cmul(a[i], s);
}

void mul(cx* a, const cx* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) a[i] = cmul(a[i], b[i]);
}

void mul_conj(cx* a, const cx* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) a[i] = cmul(a[i], std::conj(b[i]));
}

void axpy(cx* y, cx alpha, const cx* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const cx t = cmul(x[i], alpha);
    y[i] = {y[i].real() + t.real(), y[i].imag() + t.imag()};
  }
}

void div_real(cx* a, const double* d, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) a[i] = {a[i].real() / d[i], a[i].imag() / d[i]};
}

void mul_real(cx* a, const double* d, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) a[i] = {a[i].real() * d[i], a[i].imag() * d[i]};
}

cx dot(const cx* a, const cx* b, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    im += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
  }
  return {re, im};
}

double norm2(const cx* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
  return s;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", butterfly, scale, mul, mul_conj, axpy,
                                 div_real, mul_real, dot,   norm2};
  return table;
}

}  // namespace psr::simd
