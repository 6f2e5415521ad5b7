#pragma once

// Half-quadratic splitting for
//   1/2 sum_i ||M F x_i - y_i||^2 + lambda1 sum_t ||H1(U_t) h_st||^2 + lambda2 ||H2(Z) h_ps||^2
//   + rho0/2 sum_i ||x_i - c_i gamma||^2 + rho1/2 ||U - (i wx F gamma, i wy F gamma)||^2
//   + rho2/2 ||Z - gamma||^2.
// U holds the two k-space gradient channels, Z is an image-domain copy of
// gamma, x_i are per-coil images.
//
// Two update flavours:
//  - Paper: U and Z take one gradient step (I - 2 lambda/rho H^H H); the gamma
//    update divides by M + rho0 + rho1 |w|^2 + rho2 and carries an extra M y term.
//  - Exact: every block is the exact minimizer of the penalty above, so the
//    objective never increases across sweeps.

#include <iosfwd>
#include <vector>

#include "psr/fft.hpp"
#include "psr/hankel.hpp"
#include "psr/sampling.hpp"
#include "psr/volume.hpp"

namespace psr {

enum class SolverMode { Paper, Exact };

const char* to_string(SolverMode m);
SolverMode parse_solver_mode(const std::string& s);

struct Hyperparams {
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double rho0 = 1.0;
  double rho1 = 1.0;
  double rho2 = 1.0;

  /// lambdas >= 0, rho1, rho2 > 0, rho0 >= 0, all finite.
  void validate() const;
};

struct FilterBank {
  TemporalFilter ps;  // h_ps, image domain, along t
  SpatialBank s;      // h_s, k-space, per frame
};

struct SolverConfig {
  SolverMode mode = SolverMode::Paper;
  int iterations = 10;
  Hyperparams hyper;
  FilterBank filters;
  double cg_tolerance = 1e-10;
  int cg_max_iterations = 2000;
};

/// Measurement model plus the k-space constants every sweep needs.
class Problem {
 public:
  Problem(std::vector<ComplexVolume> y, SamplingMask mask, CoilSet coils, int threads = 1);

  const Dims& dims() const { return dims_; }
  const std::vector<ComplexVolume>& y() const { return y_; }
  const SamplingMask& mask() const { return mask_; }
  const CoilSet& coils() const { return coils_; }
  const Fft2& fft() const { return fft_; }
  /// wx, wy and wx^2 + wy^2 expanded to full volume dims.
  const RealVolume& wx() const { return wx_; }
  const RealVolume& wy() const { return wy_; }
  const RealVolume& w2() const { return w2_; }
  /// M . F(sum_i conj(c_i) F^-1 y_i); equals M y for a single coil.
  const ComplexVolume& masked_data() const { return masked_data_; }

 private:
  Dims dims_;
  std::vector<ComplexVolume> y_;
  SamplingMask mask_;
  CoilSet coils_;
  Fft2 fft_;
  RealVolume wx_, wy_, w2_;
  ComplexVolume masked_data_;
};

struct GradientChannels {
  ComplexVolume x;  // i wx F(gamma)
  ComplexVolume y;  // i wy F(gamma)
};

struct HQSState {
  ComplexVolume gamma;
  GradientChannels u;
  ComplexVolume z;
  std::vector<ComplexVolume> x;
  int iteration = 0;
};

struct ObjectiveTerms {
  double data = 0.0;
  double sparse = 0.0;
  double ps = 0.0;
  double pen0 = 0.0;
  double pen1 = 0.0;
  double pen2 = 0.0;
  double total() const { return data + sparse + ps + pen0 + pen1 + pen2; }
};

struct ReconResult {
  HQSState state;
  /// Entry 0 is the initial state, entry k the state after sweep k.
  std::vector<ObjectiveTerms> log;
};

GradientChannels gradient_channels(const ComplexVolume& gamma, const Problem& problem);

/// Zero-filled start: gamma = Z = adjoint_encode(y), U = G(gamma), x_i = c_i gamma.
HQSState init_state(const Problem& problem);
GradientChannels update_u(const HQSState& s, const Problem& problem, const SolverConfig& cfg);
ComplexVolume update_z(const HQSState& s, const Problem& problem, const SolverConfig& cfg);
std::vector<ComplexVolume> update_x(const HQSState& s, const Problem& problem,
                                    const SolverConfig& cfg);
/// Uses s.u, s.z and s.x as the already-updated blocks.
ComplexVolume update_gamma(const HQSState& s, const Problem& problem, const SolverConfig& cfg);

/// One sweep in the order U, Z, x, gamma.
void sweep(HQSState& s, const Problem& problem, const SolverConfig& cfg);
ObjectiveTerms objective(const HQSState& s, const Problem& problem, const SolverConfig& cfg);
ReconResult reconstruct(const Problem& problem, const SolverConfig& cfg);

/// Throws if filters do not fit the problem or hyperparameters are invalid.
void validate(const Problem& problem, const SolverConfig& cfg);

/// Columns: sweep,data_term,sparse_term,ps_term,pen0,pen1,pen2,total
void write_objective_csv(std::ostream& os, const std::vector<ObjectiveTerms>& log);

}  // namespace psr
