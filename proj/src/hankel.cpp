#include "psr/hankel.hpp"

#include <algorithm>
#include <cmath>

#include "psr/error.hpp"
#include "psr/simd/kernels.hpp"

namespace psr {

namespace {

double taps_norm(std::span<const cx> taps) {
  double s = 0.0;
  for (const cx& z : taps) s += std::norm(z);
  return std::sqrt(s);
}

void check_temporal_fit(const Dims& d, const TemporalFilter& h, const char* what) {
  if (h.size() < 2) throw ValidationError(std::string(what) + ": empty temporal filter");
  if (h.size() > d.nt) {
    throw DimensionError(std::string(what) + ": filter of " + std::to_string(h.size()) +
                         " taps longer than " + std::to_string(d.nt) + " frames");
  }
}

}  // namespace

TemporalFilter::TemporalFilter(std::vector<cx> taps) : taps_(std::move(taps)) {
  if (taps_.size() < 2) throw ValidationError("temporal filter needs at least 2 taps");
  if (taps_.front() == cx{}) throw ValidationError("temporal filter leading tap must be nonzero");
}

double TemporalFilter::norm() const { return taps_norm(taps_); }

SpatialFilter::SpatialFilter(std::size_t kx_len, std::size_t ky_len, std::vector<cx> taps)
    : kx_(kx_len), ky_(ky_len), taps_(std::move(taps)) {
  if (kx_ == 0 || ky_ == 0) throw ValidationError("spatial filter extents must be >= 1");
  if (taps_.size() != kx_ * ky_) throw ValidationError("spatial filter tap count mismatch");
  if (std::all_of(taps_.begin(), taps_.end(), [](const cx& z) { return z == cx{}; })) {
    throw ValidationError("spatial filter has no nonzero tap");
  }
}

double SpatialFilter::norm() const { return taps_norm(taps_); }

SpatialBank::SpatialBank(std::vector<SpatialFilter> filters) : filters_(std::move(filters)) {
  if (filters_.empty()) throw ValidationError("spatial bank is empty");
  for (const auto& f : filters_) {
    if (f.kx() != filters_.front().kx() || f.ky() != filters_.front().ky()) {
      throw ValidationError("spatial bank filters must share one extent");
    }
  }
}

void SpatialBank::check_fits(const Dims& d) const {
  if (filters_.empty()) throw ValidationError("spatial bank is empty");
  if (kx() > d.nx || ky() > d.ny) {
    throw DimensionError("spatial filter " + std::to_string(kx()) + "x" + std::to_string(ky()) +
                         " larger than frame " + std::to_string(d.nx) + "x" +
                         std::to_string(d.ny));
  }
  if (!is_shared() && count() != d.nt) {
    throw DimensionError("spatial bank has " + std::to_string(count()) + " filters for " +
                         std::to_string(d.nt) + " frames");
  }
}

Eigen::MatrixXcd hankel_temporal(std::span<const cx> series, std::size_t window) {
  if (window == 0 || window > series.size()) {
    throw DimensionError("hankel_temporal: window " + std::to_string(window) +
                         " does not fit series of length " + std::to_string(series.size()));
  }
  const std::size_t rows = series.size() - window + 1;
  Eigen::MatrixXcd h(rows, window);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < window; ++c) h(r, c) = series[r + c];
  }
  return h;
}

ComplexVolume apply_annihilation_temporal(const ComplexVolume& v, const TemporalFilter& h) {
  const Dims d = v.dims();
  check_temporal_fit(d, h, "apply_annihilation_temporal");
  const std::size_t L = h.order();
  const std::size_t out_nt = d.nt - L;
  ComplexVolume out({d.nx, d.ny, out_nt}, v.domain());
  const auto& k = simd::active();
  for (std::size_t p = 0; p < d.frame_size(); ++p) {
    cx* r = out.raw() + p * out_nt;
    const cx* s = v.raw() + p * d.nt;
    for (std::size_t j = 0; j <= L; ++j) k.axpy(r, h[j], s + L - j, out_nt);
  }
  return out;
}

ComplexVolume adjoint_annihilation_temporal(const ComplexVolume& r, const TemporalFilter& h) {
  const Dims d = r.dims();
  const std::size_t L = h.order();
  const std::size_t nt = d.nt + L;
  ComplexVolume out({d.nx, d.ny, nt}, r.domain());
  const auto& k = simd::active();
  for (std::size_t p = 0; p < d.frame_size(); ++p) {
    cx* v = out.raw() + p * nt;
    const cx* rp = r.raw() + p * d.nt;
    for (std::size_t j = 0; j <= L; ++j) k.axpy(v + L - j, std::conj(h[j]), rp, d.nt);
  }
  return out;
}

ComplexVolume gram_apply_temporal(const ComplexVolume& v, const TemporalFilter& h) {
  return adjoint_annihilation_temporal(apply_annihilation_temporal(v, h), h);
}

ComplexVolume apply_annihilation_spatial(const ComplexVolume& v, const SpatialFilter& h,
                                         std::size_t frame) {
  const Dims d = v.dims();
  if (frame >= d.nt) throw DimensionError("apply_annihilation_spatial: frame out of range");
  if (h.kx() > d.nx || h.ky() > d.ny) {
    throw DimensionError("apply_annihilation_spatial: filter larger than frame");
  }
  const std::size_t ox = d.nx - h.kx() + 1;
  const std::size_t oy = d.ny - h.ky() + 1;
  ComplexVolume out({ox, oy, 1}, v.domain());
  for (std::size_t a = 0; a < ox; ++a) {
    for (std::size_t b = 0; b < oy; ++b) {
      cx acc{};
      for (std::size_t p = 0; p < h.kx(); ++p) {
        for (std::size_t q = 0; q < h.ky(); ++q) {
          acc += h(p, q) * v(a + h.kx() - 1 - p, b + h.ky() - 1 - q, frame);
        }
      }
      out(a, b, 0) = acc;
    }
  }
  return out;
}

ComplexVolume apply_annihilation_spatial(const ComplexVolume& v, const SpatialBank& bank) {
  const Dims d = v.dims();
  bank.check_fits(d);
  const std::size_t kx = bank.kx(), ky = bank.ky();
  const std::size_t ox = d.nx - kx + 1;
  const std::size_t oy = d.ny - ky + 1;
  ComplexVolume out({ox, oy, d.nt}, v.domain());
  if (bank.is_shared()) {
    // Rows of (b, t) are contiguous in both input and output.
    const SpatialFilter& h = bank.for_frame(0);
    const auto& k = simd::active();
    const std::size_t run = oy * d.nt;
    for (std::size_t a = 0; a < ox; ++a) {
      cx* dst = out.raw() + a * run;
      for (std::size_t p = 0; p < kx; ++p) {
        for (std::size_t q = 0; q < ky; ++q) {
          const cx* src = v.raw() + v.index(a + kx - 1 - p, ky - 1 - q, 0);
          k.axpy(dst, h(p, q), src, run);
        }
      }
    }
    return out;
  }
  for (std::size_t a = 0; a < ox; ++a) {
    for (std::size_t b = 0; b < oy; ++b) {
      for (std::size_t t = 0; t < d.nt; ++t) {
        const SpatialFilter& h = bank.for_frame(t);
        cx acc{};
        for (std::size_t p = 0; p < kx; ++p) {
          for (std::size_t q = 0; q < ky; ++q) acc += h(p, q) * v(a + kx - 1 - p, b + ky - 1 - q, t);
        }
        out(a, b, t) = acc;
      }
    }
  }
  return out;
}

ComplexVolume adjoint_annihilation_spatial(const ComplexVolume& r, const SpatialBank& bank,
                                           std::size_t nx, std::size_t ny) {
  const Dims d = r.dims();
  const std::size_t kx = bank.kx(), ky = bank.ky();
  if (d.nx + kx - 1 != nx || d.ny + ky - 1 != ny) {
    throw DimensionError("adjoint_annihilation_spatial: residual does not match frame size");
  }
  bank.check_fits({nx, ny, d.nt});
  ComplexVolume out({nx, ny, d.nt}, r.domain());
  if (bank.is_shared()) {
    const SpatialFilter& h = bank.for_frame(0);
    const auto& k = simd::active();
    const std::size_t run = d.ny * d.nt;
    for (std::size_t a = 0; a < d.nx; ++a) {
      const cx* src = r.raw() + a * run;
      for (std::size_t p = 0; p < kx; ++p) {
        for (std::size_t q = 0; q < ky; ++q) {
          cx* dst = out.raw() + out.index(a + kx - 1 - p, ky - 1 - q, 0);
          k.axpy(dst, std::conj(h(p, q)), src, run);
        }
      }
    }
    return out;
  }
  for (std::size_t a = 0; a < d.nx; ++a) {
    for (std::size_t b = 0; b < d.ny; ++b) {
      for (std::size_t t = 0; t < d.nt; ++t) {
        const SpatialFilter& h = bank.for_frame(t);
        const cx rv = r(a, b, t);
        for (std::size_t p = 0; p < kx; ++p) {
          for (std::size_t q = 0; q < ky; ++q) {
            out(a + kx - 1 - p, b + ky - 1 - q, t) += std::conj(h(p, q)) * rv;
          }
        }
      }
    }
  }
  return out;
}

ComplexVolume gram_apply_spatial(const ComplexVolume& v, const SpatialBank& bank) {
  return adjoint_annihilation_spatial(apply_annihilation_spatial(v, bank), bank, v.dims().nx,
                                      v.dims().ny);
}

std::vector<cx> gram_tap_gradient_temporal(const ComplexVolume& v, const ComplexVolume& w,
                                           const TemporalFilter& h) {
  require_same_dims(v.dims(), w.dims(), "gram_tap_gradient_temporal");
  const Dims d = v.dims();
  check_temporal_fit(d, h, "gram_tap_gradient_temporal");
  const std::size_t L = h.order();
  const std::size_t out_nt = d.nt - L;
  const ComplexVolume tv = apply_annihilation_temporal(v, h);
  const ComplexVolume tw = apply_annihilation_temporal(w, h);
  const auto& k = simd::active();
  std::vector<cx> g(h.size());
  for (std::size_t p = 0; p < d.frame_size(); ++p) {
    for (std::size_t j = 0; j <= L; ++j) {
      g[j] += k.dot(w.raw() + p * d.nt + L - j, tv.raw() + p * out_nt, out_nt);
      g[j] += k.dot(v.raw() + p * d.nt + L - j, tw.raw() + p * out_nt, out_nt);
    }
  }
  return g;
}

std::vector<std::vector<cx>> gram_tap_gradient_spatial(const ComplexVolume& v,
                                                       const ComplexVolume& w,
                                                       const SpatialBank& bank) {
  require_same_dims(v.dims(), w.dims(), "gram_tap_gradient_spatial");
  const Dims d = v.dims();
  bank.check_fits(d);
  const std::size_t kx = bank.kx(), ky = bank.ky();
  const std::size_t ox = d.nx - kx + 1;
  const std::size_t oy = d.ny - ky + 1;
  const ComplexVolume sv = apply_annihilation_spatial(v, bank);
  const ComplexVolume sw = apply_annihilation_spatial(w, bank);
  std::vector<std::vector<cx>> g(bank.count(), std::vector<cx>(kx * ky));
  for (std::size_t t = 0; t < d.nt; ++t) {
    auto& gt = g[bank.is_shared() ? 0 : t];
    for (std::size_t p = 0; p < kx; ++p) {
      for (std::size_t q = 0; q < ky; ++q) {
        cx acc{};
        for (std::size_t a = 0; a < ox; ++a) {
          for (std::size_t b = 0; b < oy; ++b) {
            const std::size_t sx = a + kx - 1 - p, sy = b + ky - 1 - q;
            acc += std::conj(w(sx, sy, t)) * sv(a, b, t) + std::conj(v(sx, sy, t)) * sw(a, b, t);
          }
        }
        gt[p * ky + q] += acc;
      }
    }
  }
  return g;
}

}  // namespace psr
