#pragma once

// Reconstruction quality metrics. PSNR and SSIM work on magnitudes; SSIM is
// evaluated per frame with a 7x7 Gaussian window (sigma 1.5) over valid
// window positions, K1 = 0.01, K2 = 0.03.

#include <iosfwd>
#include <string>
#include <vector>

#include "psr/volume.hpp"

namespace psr {

enum class PeakMode { ReferenceMax, OutputMax };

PeakMode parse_peak_mode(const std::string& s);

/// Mean over entries of |out - ref|^2.
double mse(const ComplexVolume& out, const ComplexVolume& ref);

struct Psnr {
  double db = 0.0;
  bool infinite = false;  // mse == 0
};

/// 20 log10(peak / sqrt(mse)).
Psnr psnr(const ComplexVolume& out, const ComplexVolume& ref,
          PeakMode mode = PeakMode::ReferenceMax);

/// Mean SSIM over frames. The dynamic range is the larger of the two volumes'
/// peak magnitudes, which keeps ssim(a, b) == ssim(b, a).
double ssim(const ComplexVolume& out, const ComplexVolume& ref);
/// SSIM of a single frame with an explicit dynamic range.
double ssim_frame(const ComplexVolume& out, const ComplexVolume& ref, std::size_t t,
                  double range);

struct FrameMetrics {
  double mse = 0.0;
  Psnr psnr;
  double ssim = 0.0;
};

struct EvalReport {
  double mse = 0.0;
  Psnr psnr;
  double ssim = 0.0;
  std::vector<FrameMetrics> per_frame;
};

/// Per-frame PSNR uses the volume's peak so frames are comparable.
EvalReport evaluate(const ComplexVolume& out, const ComplexVolume& ref,
                    PeakMode mode = PeakMode::ReferenceMax);

struct EvalCase {
  std::string name;
  EvalReport report;
};

/// Columns: case,frame,mse,psnr_db,ssim. One row per case and frame, then a
/// summary row (case "mean", frame "all") averaging the per-case volume metrics.
void write_report_csv(std::ostream& os, const std::vector<EvalCase>& cases);

}  // namespace psr
