// AVX2 variants of the kernel table. Two complex doubles per __m256d lane
// group; tails fall through to the same scalar formulas.

#include <immintrin.h>

#include "psr/simd/kernels.hpp"

namespace psr::simd {
namespace {

inline cx cmul(cx a, cx b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.imag() * b.real() + a.real() * b.imag()};
}

inline __m256d load(const cx* p) { return _mm256_loadu_pd(reinterpret_cast<const double*>(p)); }
inline void store(cx* p, __m256d v) { _mm256_storeu_pd(reinterpret_cast<double*>(p), v); }
inline __m256d swap_ri(__m256d v) { return _mm256_permute_pd(v, 0b0101); }

// v * s for a broadcast complex scalar (sr, si).
inline __m256d mul_scalar(__m256d v, __m256d sr, __m256d si) {
  return _mm256_addsub_pd(_mm256_mul_pd(v, sr), _mm256_mul_pd(swap_ri(v), si));
}

// Entrywise a * b.
inline __m256d mul_vec(__m256d a, __m256d b) {
  const __m256d br = _mm256_movedup_pd(b);
  const __m256d bi = _mm256_permute_pd(b, 0b1111);
  return _mm256_addsub_pd(_mm256_mul_pd(a, br), _mm256_mul_pd(swap_ri(a), bi));
}

void butterfly(cx* a, cx* b, cx w, std::size_t n) {
  const __m256d wr = _mm256_set1_pd(w.real());
  const __m256d wi = _mm256_set1_pd(w.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d t = mul_scalar(load(b + i), wr, wi);
    const __m256d u = load(a + i);
    store(a + i, _mm256_add_pd(u, t));
    store(b + i, _mm256_sub_pd(u, t));
  }
  for (; i < n; ++i) {
    const cx t = cmul(b[i], w);
    const cx u = a[i];
    a[i] = {u.real() + t.real(), u.imag() + t.imag()};
    b[i] = {u.real() - t.real(), u.imag() - t.imag()};
  }
}

void scale(cx* a, cx s, std::size_t n) {
  const __m256d sr = _mm256_set1_pd(s.real());
  const __m256d si = _mm256_set1_pd(s.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) store(a + i, mul_scalar(load(a + i), sr, si));
  for (; i < n; ++i) a[i] = cmul(a[i], s);
}

void mul(cx* a, const cx* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) store(a + i, mul_vec(load(a + i), load(b + i)));
  for (; i < n; ++i) a[i] = cmul(a[i], b[i]);
}

void mul_conj(cx* a, const cx* b, std::size_t n) {
  const __m256d conj_mask = _mm256_set_pd(-0.0, 0.0, -0.0, 0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    store(a + i, mul_vec(load(a + i), _mm256_xor_pd(load(b + i), conj_mask)));
  }
  for (; i < n; ++i) a[i] = cmul(a[i], std::conj(b[i]));
}

void axpy(cx* y, cx alpha, const cx* x, std::size_t n) {
  const __m256d ar = _mm256_set1_pd(alpha.real());
  const __m256d ai = _mm256_set1_pd(alpha.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    store(y + i, _mm256_add_pd(load(y + i), mul_scalar(load(x + i), ar, ai)));
  }
  for (; i < n; ++i) {
    const cx t = cmul(x[i], alpha);
    y[i] = {y[i].real() + t.real(), y[i].imag() + t.imag()};
  }
}

void div_real(cx* a, const double* d, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d dd = _mm256_set_pd(d[i + 1], d[i + 1], d[i], d[i]);
    store(a + i, _mm256_div_pd(load(a + i), dd));
  }
  for (; i < n; ++i) a[i] = {a[i].real() / d[i], a[i].imag() / d[i]};
}

void mul_real(cx* a, const double* d, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d dd = _mm256_set_pd(d[i + 1], d[i + 1], d[i], d[i]);
    store(a + i, _mm256_mul_pd(load(a + i), dd));
  }
  for (; i < n; ++i) a[i] = {a[i].real() * d[i], a[i].imag() * d[i]};
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(s) + _mm_cvtsd_f64(_mm_unpackhi_pd(s, s));
}

cx dot(const cx* a, const cx* b, std::size_t n) {
  // re += ar br + ai bi ; im += ar bi - ai br
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d va = load(a + i);
    const __m256d vb = load(b + i);
    acc_re = _mm256_add_pd(acc_re, _mm256_mul_pd(va, vb));
    acc_im = _mm256_add_pd(acc_im, _mm256_mul_pd(va, swap_ri(vb)));
  }
  const __m256d sign = _mm256_set_pd(-1.0, 1.0, -1.0, 1.0);
  double re = hsum(acc_re);
  double im = hsum(_mm256_mul_pd(acc_im, sign));
  for (; i < n; ++i) {
    re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    im += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
  }
  return {re, im};
}

double norm2(const cx* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d v = load(a + i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(v, v));
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
  return s;
}

}  // namespace

const KernelTable& avx2_kernel_table() {
  static const KernelTable table{"avx2",   butterfly, scale, mul,  mul_conj,
                                 axpy,     div_real,  mul_real, dot, norm2};
  return table;
}

}  // namespace psr::simd
