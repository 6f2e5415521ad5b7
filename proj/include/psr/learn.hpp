#pragma once

// Unrolled training of the paper-mode HQS network. Every sweep is linear in
// (gamma, y) and rational in the parameters, so reverse-mode differentiation
// through the sweeps is exact; gradient() replays each sweep's forward pieces
// and propagates cotangents with the adjoint of every primitive.
//
// Cotangent convention: for a real loss L and complex quantity z, the
// cotangent is zbar = dL/dRe(z) + i dL/dIm(z), so dL = Re sum conj(zbar) dz.

#include <array>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "psr/hqs.hpp"

namespace psr {

/// Parameters used by one sweep. Hyperparameters are stored as logs in the
/// order lambda1, lambda2, rho0, rho1, rho2; a log of -inf encodes an exact 0.
struct SweepParams {
  std::array<double, 5> log_hyper{};
  TemporalFilter hps;
  SpatialBank hs;

  Hyperparams hyper() const;
  static SweepParams from(const Hyperparams& h, FilterBank filters);
};

struct LearnableParams {
  /// One entry when weights are tied across sweeps, otherwise one per sweep.
  std::vector<SweepParams> sweeps;
  int unroll_depth = 5;

  bool tied() const { return sweeps.size() == 1; }
  const SweepParams& for_sweep(int k) const { return sweeps[tied() ? 0 : k]; }
  SolverConfig config_for_sweep(int k) const;

  static LearnableParams from_config(const SolverConfig& cfg, int unroll_depth, bool tied = true);

  /// Real coordinates: per parameter set, 5 log-hyperparameters, then h_ps taps
  /// as (re, im) pairs, then every h_s bank entry's taps as (re, im) pairs.
  std::vector<double> flatten() const;
  void unflatten(std::span<const double> coords);
  std::size_t coordinate_count() const;
  /// True when coordinate `c` is a log-hyperparameter.
  bool is_hyper_coordinate(std::size_t c) const;
};

struct TrainingPair {
  Problem problem;
  ComplexVolume gamma_ref;
};

/// y = encode(gamma_ref, coils, mask).
TrainingPair make_training_pair(const ComplexVolume& gamma_ref, const SamplingMask& mask,
                                const CoilSet& coils, int threads = 1);

/// Mean over entries of |out - ref|^2.
double loss(const ComplexVolume& out, const ComplexVolume& ref);

/// init_state followed by `unroll_depth` paper-mode sweeps.
ComplexVolume forward_unrolled(const LearnableParams& params, const Problem& problem);

struct GradientResult {
  double loss = 0.0;           // mean over the batch
  std::vector<double> grad;    // same layout as LearnableParams::flatten
};

GradientResult gradient(const LearnableParams& params, std::span<const TrainingPair> batch);
/// Batch loss only.
double batch_loss(const LearnableParams& params, std::span<const TrainingPair> batch);

enum class Optimizer { GradientDescent, Adam };

struct TrainOptions {
  int steps = 100;
  double step_hyper = 1e-2;
  double step_taps = 1e-3;
  Optimizer optimizer = Optimizer::GradientDescent;
  double divergence_factor = 1e6;
};

struct TrainRecord {
  int step = 0;
  double loss = 0.0;
  double grad_norm = 0.0;
};

struct TrainResult {
  LearnableParams params;
  /// Entry k: loss and gradient norm after k updates (entry 0 is the start).
  std::vector<TrainRecord> history;
  bool diverged = false;
};

TrainResult train(const LearnableParams& params0, std::span<const TrainingPair> pairs,
                  const TrainOptions& opts);

/// Columns: step,loss,grad_norm
void write_history_csv(std::ostream& os, const std::vector<TrainRecord>& history);

// "PSNP" parameter file: magic, u16 version, u8 tied, u8 reserved,
// u64 parameter sets, u64 unroll depth, u64 temporal taps, u64 kx, u64 ky,
// u64 spatial bank entries, then the flattened coordinates as little-endian f64.
void save_params(const std::filesystem::path& path, const LearnableParams& params);
LearnableParams load_params(const std::filesystem::path& path);
void write_params(std::ostream& os, const LearnableParams& params);
LearnableParams read_params(std::istream& is);

}  // namespace psr
