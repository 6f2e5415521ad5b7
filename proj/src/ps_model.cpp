#include "psr/ps_model.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "psr/error.hpp"
#include "psr/rng.hpp"

namespace psr {

ComplexVolume assemble_phantom(const PSDecomposition& decomp) {
  const Dims d{decomp.nx, decomp.ny, decomp.nt};
  check_dims(d);
  if (decomp.order() == 0 || decomp.temporal_basis.size() != decomp.order()) {
    throw DimensionError("assemble_phantom: need matching, nonempty spatial and temporal factors");
  }
  ComplexVolume out(d, Domain::Image);
  for (std::size_t l = 0; l < decomp.order(); ++l) {
    const auto& c = decomp.spatial_maps[l];
    const auto& phi = decomp.temporal_basis[l];
    if (c.size() != d.frame_size() || phi.size() != d.nt) {
      throw DimensionError("assemble_phantom: component " + std::to_string(l) +
                           " has inconsistent length");
    }
    for (std::size_t p = 0; p < d.frame_size(); ++p) {
      cx* row = out.raw() + p * d.nt;
      for (std::size_t t = 0; t < d.nt; ++t) row[t] += c[p] * phi[t];
    }
  }
  return out;
}

TemporalFilter prony_filter(std::span<const cx> roots) {
  if (roots.empty()) throw ValidationError("prony_filter: need at least one root");
  std::vector<cx> taps{1.0};
  for (const cx& z : roots) {
    std::vector<cx> next(taps.size() + 1);
    for (std::size_t j = 0; j < taps.size(); ++j) {
      next[j] += taps[j];
      next[j + 1] -= z * taps[j];
    }
    taps = std::move(next);
  }
  return TemporalFilter(std::move(taps));
}

CalibrationResult calibrate_nullspace(std::span<const ComplexVolume> training,
                                      std::size_t window) {
  if (training.empty()) throw ValidationError("calibrate_nullspace: empty training set");
  if (window < 2) throw ValidationError("calibrate_nullspace: window must be >= 2");
  for (const auto& v : training) {
    if (window > v.dims().nt) {
      throw DimensionError("calibrate_nullspace: window " + std::to_string(window) +
                           " exceeds " + std::to_string(v.dims().nt) + " frames");
    }
  }

  const Eigen::Index w = static_cast<Eigen::Index>(window);
  constexpr Eigen::Index kChunkRows = 4096;
  Eigen::MatrixXcd r_factor(0, w);
  Eigen::MatrixXcd chunk(kChunkRows, w);
  Eigen::Index filled = 0;
  double frob2 = 0.0;

  auto fold = [&]() {
    if (filled == 0) return;
    Eigen::MatrixXcd stacked(r_factor.rows() + filled, w);
    stacked << r_factor, chunk.topRows(filled);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(stacked);
    const Eigen::Index k = std::min(stacked.rows(), w);
    r_factor = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    filled = 0;
  };

  for (const auto& v : training) {
    const Dims d = v.dims();
    const std::size_t rows = d.nt - window + 1;
    for (std::size_t p = 0; p < d.frame_size(); ++p) {
      const cx* s = v.raw() + p * d.nt;
      for (std::size_t r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < w; ++c) {
          chunk(filled, c) = s[r + static_cast<std::size_t>(c)];
          frob2 += std::norm(s[r + static_cast<std::size_t>(c)]);
        }
        if (++filled == kChunkRows) fold();
      }
    }
  }
  fold();
  if (frob2 == 0.0) throw ValidationError("calibrate_nullspace: training data are all zero");

  Eigen::MatrixXcd square = Eigen::MatrixXcd::Zero(w, w);
  square.topRows(r_factor.rows()) = r_factor;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(square, Eigen::ComputeFullV);
  const Eigen::VectorXd sv = svd.singularValues();
  const Eigen::VectorXcd v_min = svd.matrixV().col(w - 1);

  // Hankel product uses v; convolution order is its reverse.
  std::vector<cx> taps(window);
  for (std::size_t j = 0; j < window; ++j) taps[j] = v_min(w - 1 - static_cast<Eigen::Index>(j));
  // Fix the global phase: leading tap real and positive.
  const double lead = std::abs(taps.front());
  if (lead <= 1e-14) {
    throw NumericalError("calibrate_nullspace: calibrated filter has a vanishing leading tap");
  }
  const cx phase = std::conj(taps.front()) / lead;
  for (cx& z : taps) z *= phase;

  CalibrationResult result{TemporalFilter(std::move(taps)), {}, 0.0};
  result.singular_values.assign(sv.data(), sv.data() + sv.size());
  result.residual = result.singular_values.back() / std::sqrt(frob2);
  return result;
}

double annihilation_residual(std::span<const ComplexVolume> volumes, const TemporalFilter& h) {
  const std::size_t window = h.size();
  double num2 = 0.0, frob2 = 0.0;
  for (const auto& v : volumes) {
    num2 += norm2(apply_annihilation_temporal(v, h));
    const Dims d = v.dims();
    for (std::size_t p = 0; p < d.frame_size(); ++p) {
      const cx* s = v.raw() + p * d.nt;
      for (std::size_t r = 0; r + window <= d.nt; ++r) {
        for (std::size_t c = 0; c < window; ++c) frob2 += std::norm(s[r + c]);
      }
    }
  }
  if (frob2 == 0.0) return 0.0;
  return std::sqrt(num2) / (h.norm() * std::sqrt(frob2));
}

SpatialFilter spatial_filter_default() {
  const double s = 1.0 / std::sqrt(20.0);
  return SpatialFilter(3, 3, {0.0, s, 0.0, s, -4.0 * s, s, 0.0, s, 0.0});
}

namespace {

struct SmoothField {
  double u[3], v[3], phase[3];
  explicit SmoothField(Rng& rng) {
    for (int k = 0; k < 3; ++k) {
      u[k] = rng.uniform(-1.5, 1.5);
      v[k] = rng.uniform(-1.5, 1.5);
      phase[k] = rng.uniform(0.0, 2.0 * std::numbers::pi);
    }
  }
  // Values in [-1, 1].
  double operator()(double x, double y, double nx, double ny) const {
    double s = 0.0;
    for (int k = 0; k < 3; ++k) {
      s += std::cos(2.0 * std::numbers::pi * (u[k] * x / nx + v[k] * y / ny) + phase[k]);
    }
    return s / 3.0;
  }
};

std::vector<cx> draw_roots(const PhantomConfig& cfg) {
  if (cfg.constant) return {cx{1.0, 0.0}};
  Rng rng(cfg.dynamics_seed.value_or(cfg.seed) ^ 0x9e3779b97f4a7c15ull);
  std::vector<cx> roots;
  roots.push_back(rng.uniform(cfg.modulus_min, cfg.modulus_max));
  while (roots.size() < cfg.order) {
    const double m = rng.uniform(cfg.modulus_min, cfg.modulus_max);
    const double theta = rng.uniform(0.15, 0.85) * std::numbers::pi;
    if (cfg.order - roots.size() >= 2) {
      roots.push_back(std::polar(m, theta));
      roots.push_back(std::polar(m, -theta));
    } else {
      roots.push_back(std::polar(m, theta));
    }
  }
  return roots;
}

}  // namespace

Phantom make_phantom(const PhantomConfig& cfg) {
  check_dims({cfg.nx, cfg.ny, cfg.nt});
  if (cfg.order < 1) throw ValidationError("phantom order must be >= 1");
  if (cfg.constant && cfg.order != 1) throw ValidationError("--constant requires order 1");
  if (!(cfg.modulus_min > 0.0) || cfg.modulus_min > cfg.modulus_max) {
    throw ValidationError("phantom root moduli need 0 < min <= max");
  }
  if (!(cfg.noise >= 0.0)) throw ValidationError("phantom noise must be >= 0");

  Phantom ph;
  ph.roots = draw_roots(cfg);
  Rng rng(cfg.seed);
  const double nx = static_cast<double>(cfg.nx), ny = static_cast<double>(cfg.ny);
  const double s = std::min(nx, ny);
  const double r0 = 0.28 * s;
  const double width = std::max(1.0, 0.05 * s);
  const double swing = 0.06 * s;
  const double blob = 0.12 * s;
  const double aspect = rng.uniform(0.85, 1.15);
  const double cx0 = nx / 2.0 + rng.uniform(-0.03, 0.03) * nx;
  const double cy0 = ny / 2.0 + rng.uniform(-0.03, 0.03) * ny;

  auto& dec = ph.decomposition;
  dec.nx = cfg.nx;
  dec.ny = cfg.ny;
  dec.nt = cfg.nt;
  const std::size_t order = ph.roots.size();
  dec.spatial_maps.assign(order, std::vector<cx>(cfg.nx * cfg.ny));
  dec.temporal_basis.assign(order, std::vector<cx>(cfg.nt));
  for (std::size_t l = 0; l < order; ++l) {
    cx zt = 1.0;
    for (std::size_t t = 0; t < cfg.nt; ++t) {
      dec.temporal_basis[l][t] = zt;
      zt *= ph.roots[l];
    }
  }

  std::vector<SmoothField> fields;
  std::vector<double> texture_phase;
  for (std::size_t l = 0; l < order; ++l) {
    fields.emplace_back(rng);
    texture_phase.push_back(rng.uniform(0.0, 2.0 * std::numbers::pi));
  }

  for (std::size_t ix = 0; ix < cfg.nx; ++ix) {
    for (std::size_t iy = 0; iy < cfg.ny; ++iy) {
      const double x = static_cast<double>(ix), y = static_cast<double>(iy);
      const double dx = (x - cx0) * aspect, dy = (y - cy0) / aspect;
      const double dist = std::hypot(dx, dy);
      const double ring = std::exp(-(dist - r0) * (dist - r0) / (2.0 * width * width));
      const double dring = (dist - r0) / (width * width) * ring;  // d ring / d r0
      const std::size_t p = ix * cfg.ny + iy;

      dec.spatial_maps[0][p] = ring * (0.85 + 0.15 * fields[0](x, y, nx, ny)) +
                               0.4 * std::exp(-dist * dist / (2.0 * blob * blob));
      std::size_t l = 1;
      double amplitude = 1.0;
      while (l < order) {
        if (order - l >= 2) {
          // Conjugate root pair: radius r0 + a cos(theta t) to first order.
          const double a = 0.5 * swing * amplitude * (0.7 + 0.3 * fields[l](x, y, nx, ny));
          dec.spatial_maps[l][p] = a * dring;
          dec.spatial_maps[l + 1][p] = a * dring;
          amplitude *= 0.5;
          l += 2;
        } else {
          dec.spatial_maps[l][p] =
              0.15 * ring * fields[l](x, y, nx, ny) * std::polar(1.0, texture_phase[l]);
          ++l;
        }
      }
    }
  }

  ph.clean = assemble_phantom(dec);
  ph.volume = ph.clean;
  if (cfg.noise > 0.0) {
    Rng noise_rng(cfg.seed ^ 0xd1b54a32d192ed03ull);
    for (std::size_t i = 0; i < ph.volume.size(); ++i) {
      ph.volume[i] += cfg.noise * noise_rng.complex_normal();
    }
  }
  return ph;
}

}  // namespace psr
