#include "psr/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>

#include "psr/csv.hpp"
#include "psr/error.hpp"

namespace psr {

namespace {

constexpr int kWin = 7;
constexpr double kSigma = 1.5;
constexpr double kK1 = 0.01;
constexpr double kK2 = 0.03;

std::array<double, kWin * kWin> gaussian_window() {
  std::array<double, kWin * kWin> w{};
  double sum = 0.0;
  const int r = kWin / 2;
  for (int i = 0; i < kWin; ++i) {
    for (int j = 0; j < kWin; ++j) {
      const double d2 = (i - r) * (i - r) + (j - r) * (j - r);
      w[i * kWin + j] = std::exp(-d2 / (2.0 * kSigma * kSigma));
      sum += w[i * kWin + j];
    }
  }
  for (double& v : w) v /= sum;
  return w;
}

double peak(const ComplexVolume& v) { return max_abs(v); }

Psnr psnr_from(double peak_value, double m) {
  if (m == 0.0) return {std::numeric_limits<double>::infinity(), true};
  return {20.0 * std::log10(peak_value / std::sqrt(m)), false};
}

double frame_mse(const ComplexVolume& out, const ComplexVolume& ref, std::size_t t) {
  const Dims d = out.dims();
  double s = 0.0;
  for (std::size_t p = 0; p < d.frame_size(); ++p) s += std::norm(out[p * d.nt + t] - ref[p * d.nt + t]);
  return s / static_cast<double>(d.frame_size());
}

}  // namespace

PeakMode parse_peak_mode(const std::string& s) {
  if (s == "ref" || s == "reference") return PeakMode::ReferenceMax;
  if (s == "out" || s == "output") return PeakMode::OutputMax;
  throw ValidationError("unknown peak mode '" + s + "' (expected ref or out)");
}

double mse(const ComplexVolume& out, const ComplexVolume& ref) {
  require_same_dims(out.dims(), ref.dims(), "mse");
  double s = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) s += std::norm(out[i] - ref[i]);
  return s / static_cast<double>(out.size());
}

Psnr psnr(const ComplexVolume& out, const ComplexVolume& ref, PeakMode mode) {
  const double m = mse(out, ref);
  return psnr_from(mode == PeakMode::ReferenceMax ? peak(ref) : peak(out), m);
}

double ssim_frame(const ComplexVolume& out, const ComplexVolume& ref, std::size_t t,
                  double range) {
  require_same_dims(out.dims(), ref.dims(), "ssim");
  const Dims d = out.dims();
  if (d.nx < kWin || d.ny < kWin) {
    throw DimensionError("ssim: frames smaller than the 7x7 window");
  }
  static const auto w = gaussian_window();
  const double c1 = (kK1 * range) * (kK1 * range);
  const double c2 = (kK2 * range) * (kK2 * range);
  std::vector<double> a(d.frame_size()), b(d.frame_size());
  for (std::size_t p = 0; p < d.frame_size(); ++p) {
    a[p] = std::abs(out[p * d.nt + t]);
    b[p] = std::abs(ref[p * d.nt + t]);
  }
  double total = 0.0;
  std::size_t windows = 0;
  for (std::size_t x = 0; x + kWin <= d.nx; ++x) {
    for (std::size_t y = 0; y + kWin <= d.ny; ++y) {
      double ma = 0.0, mb = 0.0;
      for (int i = 0; i < kWin; ++i) {
        for (int j = 0; j < kWin; ++j) {
          const std::size_t p = (x + i) * d.ny + (y + j);
          ma += w[i * kWin + j] * a[p];
          mb += w[i * kWin + j] * b[p];
        }
      }
      double va = 0.0, vb = 0.0, cab = 0.0;
      for (int i = 0; i < kWin; ++i) {
        for (int j = 0; j < kWin; ++j) {
          const std::size_t p = (x + i) * d.ny + (y + j);
          const double da = a[p] - ma, db = b[p] - mb;
          va += w[i * kWin + j] * da * da;
          vb += w[i * kWin + j] * db * db;
          cab += w[i * kWin + j] * da * db;
        }
      }
      total += ((2.0 * ma * mb + c1) * (2.0 * cab + c2)) /
               ((ma * ma + mb * mb + c1) * (va + vb + c2));
      ++windows;
    }
  }
  return total / static_cast<double>(windows);
}

double ssim(const ComplexVolume& out, const ComplexVolume& ref) {
  require_same_dims(out.dims(), ref.dims(), "ssim");
  double range = std::max(peak(out), peak(ref));
  if (range == 0.0) range = 1.0;
  double s = 0.0;
  for (std::size_t t = 0; t < out.dims().nt; ++t) s += ssim_frame(out, ref, t, range);
  return s / static_cast<double>(out.dims().nt);
}

EvalReport evaluate(const ComplexVolume& out, const ComplexVolume& ref, PeakMode mode) {
  EvalReport r;
  r.mse = mse(out, ref);
  const double pk = mode == PeakMode::ReferenceMax ? peak(ref) : peak(out);
  r.psnr = psnr_from(pk, r.mse);
  double range = std::max(peak(out), peak(ref));
  if (range == 0.0) range = 1.0;
  double s = 0.0;
  for (std::size_t t = 0; t < out.dims().nt; ++t) {
    FrameMetrics f;
    f.mse = frame_mse(out, ref, t);
    f.psnr = psnr_from(pk, f.mse);
    f.ssim = ssim_frame(out, ref, t, range);
    s += f.ssim;
    r.per_frame.push_back(f);
  }
  r.ssim = s / static_cast<double>(out.dims().nt);
  return r;
}

void write_report_csv(std::ostream& os, const std::vector<EvalCase>& cases) {
  os << "case,frame,mse,psnr_db,ssim\n";
  double m = 0.0, p = 0.0, s = 0.0;
  for (const auto& c : cases) {
    for (std::size_t t = 0; t < c.report.per_frame.size(); ++t) {
      const auto& f = c.report.per_frame[t];
      os << c.name << ',' << t << ',' << fmt12(f.mse) << ',' << fmt12(f.psnr.db) << ','
         << fmt12(f.ssim) << '\n';
    }
    m += c.report.mse;
    p += c.report.psnr.db;
    s += c.report.ssim;
  }
  const double n = cases.empty() ? 1.0 : static_cast<double>(cases.size());
  os << "mean,all," << fmt12(m / n) << ',' << fmt12(p / n) << ',' << fmt12(s / n) << '\n';
}

}  // namespace psr
