#include "psr/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "psr/error.hpp"
#include "psr/rng.hpp"

namespace psr {

SamplingMask::SamplingMask(RealVolume mask) : mask_(std::move(mask)) {
  const Dims d = mask_.dims();
  check_dims(d);
  std::size_t lines = 0;
  for (std::size_t y = 0; y < d.ny; ++y) {
    for (std::size_t t = 0; t < d.nt; ++t) {
      const double first = mask_(0, y, t);
      if (first != 0.0 && first != 1.0) throw ValidationError("mask entries must be 0 or 1");
      for (std::size_t x = 1; x < d.nx; ++x) {
        if (mask_(x, y, t) != first) {
          throw ValidationError("mask line (y=" + std::to_string(y) + ", t=" + std::to_string(t) +
                                ") does not span the full readout");
        }
      }
      lines += first != 0.0;
    }
  }
  if (lines == 0) throw ValidationError("mask samples nothing");
  const double mean_lines = static_cast<double>(lines) / static_cast<double>(d.nt);
  acceleration_ = static_cast<double>(d.ny) / mean_lines;
}

std::size_t SamplingMask::lines_in_frame(std::size_t t) const {
  std::size_t n = 0;
  for (std::size_t y = 0; y < dims().ny; ++y) n += sampled(y, t);
  return n;
}

bool SamplingMask::full() const {
  return std::all_of(mask_.data().begin(), mask_.data().end(), [](double v) { return v != 0.0; });
}

SamplingMask make_mask(std::size_t nx, std::size_t ny, std::size_t nt, double acceleration,
                       std::size_t acs_lines, std::uint64_t seed, bool per_frame) {
  check_dims({nx, ny, nt});
  if (!(acceleration >= 1.0)) throw ValidationError("acceleration must be >= 1");
  if (acs_lines >= ny && acceleration > 1.0) {
    throw ValidationError("acs_lines must be smaller than ny");
  }
  const auto budget = static_cast<std::size_t>(
      std::max(1.0, std::round(static_cast<double>(ny) / acceleration)));
  if (acs_lines > budget) {
    throw ValidationError("infeasible line budget: " + std::to_string(budget) +
                          " lines per frame cannot hold " + std::to_string(acs_lines) +
                          " ACS lines");
  }

  std::vector<bool> acs(ny, false);
  const std::size_t acs_start = ny / 2 - acs_lines / 2;
  for (std::size_t i = 0; i < acs_lines; ++i) acs[acs_start + i] = true;
  std::vector<std::size_t> candidates;
  for (std::size_t y = 0; y < ny; ++y) {
    if (!acs[y]) candidates.push_back(y);
  }

  Rng rng(seed);
  RealVolume m({nx, ny, nt}, Domain::Mask);
  std::vector<bool> chosen;
  for (std::size_t t = 0; t < nt; ++t) {
    if (t == 0 || per_frame) {
      chosen = acs;
      std::vector<std::size_t> pool = candidates;
      // Partial Fisher-Yates: the first `extra` entries become the sample.
      const std::size_t extra = budget - acs_lines;
      for (std::size_t i = 0; i < extra; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
        std::swap(pool[i], pool[j]);
        chosen[pool[i]] = true;
      }
    }
    for (std::size_t y = 0; y < ny; ++y) {
      if (!chosen[y]) continue;
      for (std::size_t x = 0; x < nx; ++x) m(x, y, t) = 1.0;
    }
  }
  return SamplingMask(std::move(m));
}

double CoilSet::normalization_error() const {
  double worst = 0.0;
  for (std::size_t p = 0; p < nx * ny; ++p) {
    double s = 0.0;
    for (const auto& c : maps) s += std::norm(c[p]);
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

CoilSet identity_coils(std::size_t nx, std::size_t ny) {
  return CoilSet{nx, ny, {std::vector<cx>(nx * ny, cx{1.0, 0.0})}};
}

CoilSet make_coils(std::size_t nx, std::size_t ny, std::size_t m, std::uint64_t seed) {
  check_dims({nx, ny, 1});
  if (m == 0) throw ValidationError("coil count must be >= 1");
  if (m == 1) return identity_coils(nx, ny);

  Rng rng(seed);
  const double fx = static_cast<double>(nx), fy = static_cast<double>(ny);
  const double sigma = 0.45 * std::min(fx, fy);
  CoilSet coils{nx, ny, std::vector<std::vector<cx>>(m, std::vector<cx>(nx * ny))};
  for (std::size_t i = 0; i < m; ++i) {
    const double angle = 2.0 * std::numbers::pi * (static_cast<double>(i) + rng.uniform(-0.1, 0.1)) /
                         static_cast<double>(m);
    const double px = fx / 2.0 + 0.7 * (fx / 2.0) * std::cos(angle);
    const double py = fy / 2.0 + 0.7 * (fy / 2.0) * std::sin(angle);
    const double phase0 = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double ramp_x = rng.uniform(-1.0, 1.0) * std::numbers::pi / fx;
    const double ramp_y = rng.uniform(-1.0, 1.0) * std::numbers::pi / fy;
    for (std::size_t ix = 0; ix < nx; ++ix) {
      for (std::size_t iy = 0; iy < ny; ++iy) {
        const double dx = static_cast<double>(ix) - px, dy = static_cast<double>(iy) - py;
        const double mag = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
        const double ph = phase0 + ramp_x * static_cast<double>(ix) + ramp_y * static_cast<double>(iy);
        coils.maps[i][ix * ny + iy] = std::polar(mag, ph);
      }
    }
  }
  for (std::size_t p = 0; p < nx * ny; ++p) {
    double s = 0.0;
    for (const auto& c : coils.maps) s += std::norm(c[p]);
    const double inv = 1.0 / std::sqrt(s);
    for (auto& c : coils.maps) c[p] *= inv;
  }
  return coils;
}

ComplexVolume coils_to_volume(const CoilSet& coils) {
  ComplexVolume v({coils.nx, coils.ny, coils.count()}, Domain::Map);
  for (std::size_t p = 0; p < coils.nx * coils.ny; ++p) {
    for (std::size_t i = 0; i < coils.count(); ++i) v[p * coils.count() + i] = coils.maps[i][p];
  }
  return v;
}

CoilSet coils_from_volume(const ComplexVolume& v) {
  const Dims d = v.dims();
  CoilSet coils{d.nx, d.ny, std::vector<std::vector<cx>>(d.nt, std::vector<cx>(d.nx * d.ny))};
  for (std::size_t p = 0; p < d.frame_size(); ++p) {
    for (std::size_t i = 0; i < d.nt; ++i) coils.maps[i][p] = v[p * d.nt + i];
  }
  return coils;
}

void check_consistent(const Dims& image, const CoilSet& coils, const SamplingMask& mask,
                      const std::vector<ComplexVolume>* y) {
  check_dims(image);
  require_same_dims(image, mask.dims(), "mask");
  if (coils.count() == 0) throw DimensionError("coil set is empty");
  if (coils.nx != image.nx || coils.ny != image.ny) {
    throw DimensionError("coil maps " + std::to_string(coils.nx) + "x" + std::to_string(coils.ny) +
                         " do not match image " + to_string(image));
  }
  if (y != nullptr) {
    if (y->size() != coils.count()) {
      throw DimensionError("got " + std::to_string(y->size()) + " k-space volumes for " +
                           std::to_string(coils.count()) + " coils");
    }
    for (const auto& yi : *y) require_same_dims(image, yi.dims(), "k-space data");
  }
}

namespace {

void multiply_map(ComplexVolume& v, const std::vector<cx>& map, bool conjugate) {
  const Dims d = v.dims();
  for (std::size_t p = 0; p < d.frame_size(); ++p) {
    const cx c = conjugate ? std::conj(map[p]) : map[p];
    cx* row = v.raw() + p * d.nt;
    for (std::size_t t = 0; t < d.nt; ++t) row[t] *= c;
  }
}

}  // namespace

std::vector<ComplexVolume> encode(const ComplexVolume& gamma, const CoilSet& coils,
                                  const SamplingMask& mask, int threads) {
  check_consistent(gamma.dims(), coils, mask);
  const Fft2 fft(gamma.dims().nx, gamma.dims().ny, threads);
  std::vector<ComplexVolume> y;
  y.reserve(coils.count());
  for (const auto& map : coils.maps) {
    ComplexVolume yi = gamma;
    multiply_map(yi, map, false);
    fft.forward(yi);
    multiply(yi, mask.values());
    y.push_back(std::move(yi));
  }
  return y;
}

ComplexVolume adjoint_encode(const std::vector<ComplexVolume>& y, const CoilSet& coils,
                             const SamplingMask& mask, int threads) {
  const Dims d = mask.dims();
  check_consistent(d, coils, mask, &y);
  const Fft2 fft(d.nx, d.ny, threads);
  ComplexVolume out(d, Domain::Image);
  for (std::size_t i = 0; i < coils.count(); ++i) {
    ComplexVolume xi = y[i];
    multiply(xi, mask.values());
    fft.inverse(xi);
    multiply_map(xi, coils.maps[i], true);
    axpy(out, 1.0, xi);
  }
  return out;
}

}  // namespace psr
