#include "psr/hqs.hpp"

#include <cmath>
#include <ostream>

#include "psr/cg.hpp"
#include "psr/csv.hpp"
#include "psr/simd/kernels.hpp"
#include "psr/error.hpp"

namespace psr {

const char* to_string(SolverMode m) { return m == SolverMode::Paper ? "paper" : "exact"; }

SolverMode parse_solver_mode(const std::string& s) {
  if (s == "paper") return SolverMode::Paper;
  if (s == "exact") return SolverMode::Exact;
  throw ValidationError("unknown solver mode '" + s + "' (expected paper or exact)");
}

void Hyperparams::validate() const {
  const double all[] = {lambda1, lambda2, rho0, rho1, rho2};
  for (double v : all) {
    if (!std::isfinite(v)) throw ValidationError("hyperparameters must be finite");
  }
  if (lambda1 < 0.0 || lambda2 < 0.0) throw ValidationError("lambda1, lambda2 must be >= 0");
  if (rho0 < 0.0) throw ValidationError("rho0 must be >= 0");
  if (!(rho1 > 0.0) || !(rho2 > 0.0)) throw ValidationError("rho1, rho2 must be > 0");
}

namespace {

RealVolume expand(const std::vector<double>& grid, const Dims& d) {
  RealVolume v(d, Domain::Map);
  for (std::size_t p = 0; p < d.frame_size(); ++p) {
    for (std::size_t t = 0; t < d.nt; ++t) v[p * d.nt + t] = grid[p];
  }
  return v;
}

// v * (i w) for a real weight volume w.
ComplexVolume times_iw(const ComplexVolume& v, const RealVolume& w) {
  ComplexVolume out = v;
  multiply(out, w);
  scale(out, cx{0.0, 1.0});
  return out;
}

void multiply_map(ComplexVolume& v, const std::vector<cx>& map, bool conjugate) {
  const Dims d = v.dims();
  for (std::size_t p = 0; p < d.frame_size(); ++p) {
    const cx c = conjugate ? std::conj(map[p]) : map[p];
    cx* row = v.raw() + p * d.nt;
    for (std::size_t t = 0; t < d.nt; ++t) row[t] *= c;
  }
}

}  // namespace

Problem::Problem(std::vector<ComplexVolume> y, SamplingMask mask, CoilSet coils, int threads)
    : dims_(mask.dims()),
      y_(std::move(y)),
      mask_(std::move(mask)),
      coils_(std::move(coils)),
      fft_(dims_.nx, dims_.ny, threads) {
  check_consistent(dims_, coils_, mask_, &y_);
  for (auto& yi : y_) yi.set_domain(Domain::KSpace);
  const GradientWeights w = gradient_weights(dims_.nx, dims_.ny);
  wx_ = expand(w.wx, dims_);
  wy_ = expand(w.wy, dims_);
  w2_ = RealVolume(dims_, Domain::Map);
  for (std::size_t i = 0; i < w2_.size(); ++i) w2_[i] = wx_[i] * wx_[i] + wy_[i] * wy_[i];
  masked_data_ = adjoint_encode(y_, coils_, mask_, threads);
  fft_.forward(masked_data_);
  multiply(masked_data_, mask_.values());
}

void validate(const Problem& problem, const SolverConfig& cfg) {
  cfg.hyper.validate();
  if (cfg.iterations < 0) throw ValidationError("iterations must be >= 0");
  const Dims d = problem.dims();
  if (cfg.filters.ps.size() < 2) throw ValidationError("temporal filter is missing");
  if (cfg.filters.ps.size() > d.nt) {
    throw DimensionError("temporal filter longer than the number of frames");
  }
  cfg.filters.s.check_fits(d);
  if (cfg.mode == SolverMode::Exact && problem.coils().normalization_error() > 1e-8) {
    throw ValidationError("exact mode needs sum-of-squares normalized coil maps");
  }
}

GradientChannels gradient_channels(const ComplexVolume& gamma, const Problem& problem) {
  ComplexVolume g = gamma;
  problem.fft().forward(g);
  return {times_iw(g, problem.wx()), times_iw(g, problem.wy())};
}

HQSState init_state(const Problem& problem) {
  HQSState s;
  s.gamma = adjoint_encode(problem.y(), problem.coils(), problem.mask());
  s.z = s.gamma;
  s.u = gradient_channels(s.gamma, problem);
  for (const auto& map : problem.coils().maps) {
    ComplexVolume xi = s.gamma;
    multiply_map(xi, map, false);
    s.x.push_back(std::move(xi));
  }
  return s;
}

namespace {

// Solves (rho I + 2 lambda A) out = rho b for the Hermitian PSD operator A.
template <class Gram>
ComplexVolume shifted_solve(const Gram& gram, const ComplexVolume& b, double rho, double lambda,
                            const SolverConfig& cfg) {
  ComplexVolume rhs = b;
  scale(rhs, rho);
  auto apply = [&](const ComplexVolume& v) {
    ComplexVolume out = gram(v);
    scale(out, 2.0 * lambda);
    axpy(out, rho, v);
    return out;
  };
  ComplexVolume out;
  conjugate_gradient(apply, rhs, out, cfg.cg_tolerance, cfg.cg_max_iterations);
  return out;
}

// b - (2 lambda / rho) A b
template <class Gram>
ComplexVolume gradient_step(const Gram& gram, const ComplexVolume& b, double rho, double lambda) {
  ComplexVolume out = b;
  axpy(out, -2.0 * lambda / rho, gram(b));
  return out;
}

}  // namespace

GradientChannels update_u(const HQSState& s, const Problem& problem, const SolverConfig& cfg) {
  GradientChannels g = gradient_channels(s.gamma, problem);
  const auto& h = cfg.hyper;
  if (h.lambda1 == 0.0) return g;
  auto gram = [&](const ComplexVolume& v) { return gram_apply_spatial(v, cfg.filters.s); };
  if (cfg.mode == SolverMode::Paper) {
    return {gradient_step(gram, g.x, h.rho1, h.lambda1), gradient_step(gram, g.y, h.rho1, h.lambda1)};
  }
  return {shifted_solve(gram, g.x, h.rho1, h.lambda1, cfg),
          shifted_solve(gram, g.y, h.rho1, h.lambda1, cfg)};
}

ComplexVolume update_z(const HQSState& s, const Problem& /*problem*/, const SolverConfig& cfg) {
  const auto& h = cfg.hyper;
  if (h.lambda2 == 0.0) return s.gamma;
  auto gram = [&](const ComplexVolume& v) { return gram_apply_temporal(v, cfg.filters.ps); };
  if (cfg.mode == SolverMode::Paper) return gradient_step(gram, s.gamma, h.rho2, h.lambda2);
  return shifted_solve(gram, s.gamma, h.rho2, h.lambda2, cfg);
}

std::vector<ComplexVolume> update_x(const HQSState& s, const Problem& problem,
                                    const SolverConfig& cfg) {
  const double rho0 = cfg.hyper.rho0;
  const RealVolume& m = problem.mask().values();
  if (rho0 == 0.0 && !problem.mask().full()) {
    throw NumericalError("update_x: rho0 = 0 leaves unsampled entries with a zero denominator");
  }
  RealVolume den(problem.dims(), Domain::Map);
  for (std::size_t i = 0; i < den.size(); ++i) den[i] = m[i] + rho0;
  std::vector<ComplexVolume> x;
  x.reserve(problem.coils().count());
  for (std::size_t c = 0; c < problem.coils().count(); ++c) {
    ComplexVolume q = s.gamma;
    multiply_map(q, problem.coils().maps[c], false);
    problem.fft().forward(q);
    scale(q, rho0);
    ComplexVolume my = problem.y()[c];
    multiply(my, m);
    axpy(q, 1.0, my);
    simd::active().div_real(q.raw(), den.data().data(), q.size());
    problem.fft().inverse(q);
    x.push_back(std::move(q));
  }
  return x;
}

ComplexVolume update_gamma(const HQSState& s, const Problem& problem, const SolverConfig& cfg) {
  const auto& h = cfg.hyper;
  const bool paper = cfg.mode == SolverMode::Paper;
  const RealVolume& m = problem.mask().values();

  // rho1 conj(i w) . U  =  -i rho1 (wx Ux + wy Uy)
  ComplexVolume num = s.u.x;
  multiply(num, problem.wx());
  ComplexVolume uy = s.u.y;
  multiply(uy, problem.wy());
  axpy(num, 1.0, uy);
  scale(num, cx{0.0, -h.rho1});

  ComplexVolume combined(problem.dims(), Domain::Image);
  for (std::size_t c = 0; c < problem.coils().count(); ++c) {
    ComplexVolume xc = s.x[c];
    multiply_map(xc, problem.coils().maps[c], true);
    axpy(combined, 1.0, xc);
  }
  problem.fft().forward(combined);
  axpy(num, h.rho0, combined);

  ComplexVolume fz = s.z;
  problem.fft().forward(fz);
  axpy(num, h.rho2, fz);
  if (paper) axpy(num, 1.0, problem.masked_data());

  RealVolume den(problem.dims(), Domain::Map);
  for (std::size_t i = 0; i < den.size(); ++i) {
    den[i] = (paper ? m[i] : 0.0) + h.rho0 + h.rho1 * problem.w2()[i] + h.rho2;
    if (!(den[i] > 0.0)) throw NumericalError("update_gamma: zero denominator");
  }
  simd::active().div_real(num.raw(), den.data().data(), num.size());
  problem.fft().inverse(num);
  return num;
}

void sweep(HQSState& s, const Problem& problem, const SolverConfig& cfg) {
  s.u = update_u(s, problem, cfg);
  s.z = update_z(s, problem, cfg);
  s.x = update_x(s, problem, cfg);
  s.gamma = update_gamma(s, problem, cfg);
  ++s.iteration;
  if (!all_finite(s.gamma)) {
    throw NumericalError("reconstruction produced non-finite values", 0.0, s.iteration);
  }
}

ObjectiveTerms objective(const HQSState& s, const Problem& problem, const SolverConfig& cfg) {
  const auto& h = cfg.hyper;
  ObjectiveTerms o;
  for (std::size_t c = 0; c < problem.coils().count(); ++c) {
    ComplexVolume r = s.x[c];
    problem.fft().forward(r);
    multiply(r, problem.mask().values());
    axpy(r, -1.0, problem.y()[c]);
    o.data += 0.5 * norm2(r);

    ComplexVolume cg = s.gamma;
    multiply_map(cg, problem.coils().maps[c], false);
    o.pen0 += 0.5 * h.rho0 * norm2(s.x[c] - cg);
  }
  o.sparse = h.lambda1 * (norm2(apply_annihilation_spatial(s.u.x, cfg.filters.s)) +
                          norm2(apply_annihilation_spatial(s.u.y, cfg.filters.s)));
  o.ps = h.lambda2 * norm2(apply_annihilation_temporal(s.z, cfg.filters.ps));
  const GradientChannels g = gradient_channels(s.gamma, problem);
  o.pen1 = 0.5 * h.rho1 * (norm2(s.u.x - g.x) + norm2(s.u.y - g.y));
  o.pen2 = 0.5 * h.rho2 * norm2(s.z - s.gamma);
  return o;
}

ReconResult reconstruct(const Problem& problem, const SolverConfig& cfg) {
  validate(problem, cfg);
  ReconResult result{init_state(problem), {}};
  result.log.push_back(objective(result.state, problem, cfg));
  for (int k = 0; k < cfg.iterations; ++k) {
    sweep(result.state, problem, cfg);
    result.log.push_back(objective(result.state, problem, cfg));
  }
  return result;
}

void write_objective_csv(std::ostream& os, const std::vector<ObjectiveTerms>& log) {
  os << "sweep,data_term,sparse_term,ps_term,pen0,pen1,pen2,total\n";
  for (std::size_t k = 0; k < log.size(); ++k) {
    const auto& o = log[k];
    os << k << ',' << fmt12(o.data) << ',' << fmt12(o.sparse) << ',' << fmt12(o.ps) << ','
       << fmt12(o.pen0) << ',' << fmt12(o.pen1) << ',' << fmt12(o.pen2) << ',' << fmt12(o.total())
       << '\n';
  }
}

}  // namespace psr
