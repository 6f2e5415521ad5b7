#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>

#include "psr/simd/kernels.hpp"
#include "support.hpp"

using namespace psr;
using psr::simd::KernelTable;

namespace {

bool same_bits(const std::vector<cx>& a, const std::vector<cx>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(cx)) == 0;
}

std::vector<double> positive(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> d(n);
  for (auto& v : d) v = rng.uniform(0.5, 3.0);
  return d;
}

const std::size_t kSizes[] = {0, 1, 2, 3, 4, 7, 64, 1001};
const cx kAlpha{0.7, -1.3};

}  // namespace

TEST_CASE("scalar kernels match plain complex arithmetic") {
  const KernelTable& k = simd::scalar_kernels();
  for (std::size_t n : kSizes) {
    const auto a0 = test::random_taps(n, 1), b = test::random_taps(n, 2);
    const auto d = positive(n, 3);
    auto a = a0;
    k.mul(a.data(), b.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(a[i] - a0[i] * b[i]) <= 1e-15 * std::abs(a[i]) + 1e-300);
    a = a0;
    k.mul_conj(a.data(), b.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(a[i] - a0[i] * std::conj(b[i])) <= 1e-15 * std::abs(a[i]) + 1e-300);
    a = a0;
    k.axpy(a.data(), kAlpha, b.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(a[i] - (a0[i] + kAlpha * b[i])) <= 1e-15 * (1 + std::abs(a[i])));
    a = a0;
    k.div_real(a.data(), d.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(a[i] == a0[i] / d[i]);
    cx dot{};
    double n2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      dot += std::conj(a0[i]) * b[i];
      n2 += std::norm(a0[i]);
    }
    CHECK(std::abs(k.dot(a0.data(), b.data(), n) - dot) <= 1e-13 * (1 + std::abs(dot)));
    CHECK(std::abs(k.norm2(a0.data(), n) - n2) <= 1e-13 * (1 + n2));
    auto x = a0, y = b;
    k.butterfly(x.data(), y.data(), kAlpha, n);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(x[i] - (a0[i] + kAlpha * b[i])) <= 1e-15 * (1 + std::abs(x[i])));
      CHECK(std::abs(y[i] - (a0[i] - kAlpha * b[i])) <= 1e-15 * (1 + std::abs(y[i])));
    }
  }
}

TEST_CASE("AVX2 kernels are equivalent to the scalar reference") {
  const KernelTable* v = simd::avx2_kernels();
  if (v == nullptr) {
    MESSAGE("AVX2 variant unavailable on this build or CPU");
    return;
  }
  const KernelTable& s = simd::scalar_kernels();
  for (std::size_t n : kSizes) {
    CAPTURE(n);
    const auto a0 = test::random_taps(n, 10 + n), b = test::random_taps(n, 20 + n);
    const auto d = positive(n, 30 + n);
    auto run = [&](const KernelTable& k, auto&& op) {
      auto a = a0;
      op(k, a);
      return a;
    };
    auto mul = [&](const KernelTable& k, std::vector<cx>& a) { k.mul(a.data(), b.data(), n); };
    auto mulc = [&](const KernelTable& k, std::vector<cx>& a) { k.mul_conj(a.data(), b.data(), n); };
    auto ax = [&](const KernelTable& k, std::vector<cx>& a) { k.axpy(a.data(), kAlpha, b.data(), n); };
    auto sc = [&](const KernelTable& k, std::vector<cx>& a) { k.scale(a.data(), kAlpha, n); };
    auto dv = [&](const KernelTable& k, std::vector<cx>& a) { k.div_real(a.data(), d.data(), n); };
    auto mr = [&](const KernelTable& k, std::vector<cx>& a) { k.mul_real(a.data(), d.data(), n); };
    CHECK(same_bits(run(s, mul), run(*v, mul)));
    CHECK(same_bits(run(s, mulc), run(*v, mulc)));
    CHECK(same_bits(run(s, ax), run(*v, ax)));
    CHECK(same_bits(run(s, sc), run(*v, sc)));
    CHECK(same_bits(run(s, dv), run(*v, dv)));
    CHECK(same_bits(run(s, mr), run(*v, mr)));

    auto xs = a0, ys = b, xv = a0, yv = b;
    s.butterfly(xs.data(), ys.data(), kAlpha, n);
    v->butterfly(xv.data(), yv.data(), kAlpha, n);
    CHECK(same_bits(xs, xv));
    CHECK(same_bits(ys, yv));

    const cx ds = s.dot(a0.data(), b.data(), n), dvv = v->dot(a0.data(), b.data(), n);
    CHECK(std::abs(ds - dvv) <= 1e-13 * (1 + std::abs(ds)));
    const double ns = s.norm2(a0.data(), n), nv = v->norm2(a0.data(), n);
    CHECK(std::abs(ns - nv) <= 1e-13 * (1 + ns));
  }
}

TEST_CASE("active table is one of the variants") {
  const KernelTable& a = simd::active();
  const KernelTable* v = simd::avx2_kernels();
  CHECK((&a == &simd::scalar_kernels() || (v != nullptr && &a == v)));
  MESSAGE("active kernels: " << a.name);
}
