#include "psr/learn.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

#include "psr/csv.hpp"
#include "psr/error.hpp"
#include "psr/io.hpp"
#include "psr/simd/kernels.hpp"

namespace psr {

namespace {

constexpr char kMagic[4] = {'P', 'S', 'N', 'P'};
constexpr std::uint16_t kVersion = 1;

double log_or_neg_inf(double v) {
  return v == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(v);
}

void multiply_map(ComplexVolume& v, const std::vector<cx>& map, bool conjugate) {
  const Dims d = v.dims();
  for (std::size_t p = 0; p < d.frame_size(); ++p) {
    const cx c = conjugate ? std::conj(map[p]) : map[p];
    cx* row = v.raw() + p * d.nt;
    for (std::size_t t = 0; t < d.nt; ++t) row[t] *= c;
  }
}

ComplexVolume in_kspace(ComplexVolume v, const Fft2& fft) {
  v.set_domain(Domain::Image);
  fft.forward(v);
  return v;
}

ComplexVolume in_image(ComplexVolume v, const Fft2& fft) {
  v.set_domain(Domain::KSpace);
  fft.inverse(v);
  return v;
}

// Cotangents of one parameter set, with respect to the raw hyperparameters.
struct SetGrad {
  std::array<double, 5> hyper{};
  std::vector<cx> hps;
  std::vector<std::vector<cx>> hs;

  explicit SetGrad(const SweepParams& p)
      : hps(p.hps.size()), hs(p.hs.count()) {
    for (std::size_t b = 0; b < hs.size(); ++b) hs[b].assign(p.hs.filters()[b].taps().size(), {});
  }
};

enum { L1 = 0, L2 = 1, R0 = 2, R1 = 3, R2 = 4 };

// Maps the cotangent of a sweep's output gamma to that of its input gamma and
// accumulates parameter cotangents into `acc`.
ComplexVolume backward_sweep(const ComplexVolume& gin, const ComplexVolume& gbar_out,
                             const Problem& pb, const SweepParams& sp, SetGrad& acc) {
  const Hyperparams h = sp.hyper();
  const Fft2& fft = pb.fft();
  const RealVolume& m = pb.mask().values();
  const Dims d = pb.dims();
  const CoilSet& coils = pb.coils();

  // Forward pieces.
  const GradientChannels g = gradient_channels(gin, pb);
  const bool s_on = h.lambda1 > 0.0;
  const double a1 = 2.0 * h.lambda1 / h.rho1;
  ComplexVolume sgx, sgy;
  ComplexVolume ux = g.x, uy = g.y;
  if (s_on) {
    sgx = gram_apply_spatial(g.x, sp.hs);
    sgy = gram_apply_spatial(g.y, sp.hs);
    axpy(ux, -a1, sgx);
    axpy(uy, -a1, sgy);
  }
  const bool t_on = h.lambda2 > 0.0;
  const double a2 = 2.0 * h.lambda2 / h.rho2;
  ComplexVolume tg, z = gin;
  if (t_on) {
    tg = gram_apply_temporal(gin, sp.hps);
    axpy(z, -a2, tg);
  }

  RealVolume mden(d, Domain::Map);
  for (std::size_t i = 0; i < mden.size(); ++i) mden[i] = m[i] + h.rho0;
  std::vector<ComplexVolume> q, xk;
  ComplexVolume s(d, Domain::Image);
  for (std::size_t c = 0; c < coils.count(); ++c) {
    ComplexVolume qc = gin;
    multiply_map(qc, coils.maps[c], false);
    fft.forward(qc);
    ComplexVolume xc = qc;
    scale(xc, h.rho0);
    ComplexVolume my = pb.y()[c];
    multiply(my, m);
    axpy(xc, 1.0, my);
    simd::active().div_real(xc.raw(), mden.data().data(), xc.size());
    ComplexVolume xi = in_image(xc, fft);
    multiply_map(xi, coils.maps[c], true);
    axpy(s, 1.0, xi);
    q.push_back(std::move(qc));
    xk.push_back(std::move(xc));
  }
  const ComplexVolume fs = in_kspace(s, fft);
  const ComplexVolume fz = in_kspace(z, fft);

  ComplexVolume agrad = ux;  // wx Ux + wy Uy
  multiply(agrad, pb.wx());
  {
    ComplexVolume t = uy;
    multiply(t, pb.wy());
    axpy(agrad, 1.0, t);
  }
  ComplexVolume num = agrad;
  scale(num, cx{0.0, -h.rho1});
  axpy(num, 1.0, pb.masked_data());
  axpy(num, h.rho0, fs);
  axpy(num, h.rho2, fz);
  RealVolume den(d, Domain::Map);
  for (std::size_t i = 0; i < den.size(); ++i) {
    den[i] = m[i] + h.rho0 + h.rho1 * pb.w2()[i] + h.rho2;
  }

  // Reverse pass.
  const ComplexVolume pbar = in_kspace(gbar_out, fft);
  ComplexVolume nbar = pbar;
  simd::active().div_real(nbar.raw(), den.data().data(), nbar.size());
  for (std::size_t i = 0; i < den.size(); ++i) {
    const cx qi = num[i] / den[i];
    const double denbar = -std::real(std::conj(pbar[i]) * qi) / den[i];
    acc.hyper[R0] += denbar;
    acc.hyper[R2] += denbar;
    acc.hyper[R1] += denbar * pb.w2()[i];
  }
  acc.hyper[R1] += real_dot(nbar, cx{0.0, -1.0} * agrad);
  acc.hyper[R0] += real_dot(nbar, fs);
  acc.hyper[R2] += real_dot(nbar, fz);

  ComplexVolume uxbar = nbar;
  multiply(uxbar, pb.wx());
  scale(uxbar, cx{0.0, h.rho1});
  ComplexVolume uybar = nbar;
  multiply(uybar, pb.wy());
  scale(uybar, cx{0.0, h.rho1});

  ComplexVolume sbar = in_image(nbar, fft);
  ComplexVolume zbar = sbar;
  scale(sbar, h.rho0);
  scale(zbar, h.rho2);

  ComplexVolume gbar(d, Domain::Image);
  for (std::size_t c = 0; c < coils.count(); ++c) {
    ComplexVolume xbar = sbar;
    multiply_map(xbar, coils.maps[c], false);
    fft.forward(xbar);
    ComplexVolume diff = q[c] - xk[c];
    simd::active().div_real(diff.raw(), mden.data().data(), diff.size());
    acc.hyper[R0] += real_dot(xbar, diff);
    simd::active().div_real(xbar.raw(), mden.data().data(), xbar.size());
    scale(xbar, h.rho0);
    fft.inverse(xbar);
    multiply_map(xbar, coils.maps[c], true);
    axpy(gbar, 1.0, xbar);
  }

  axpy(gbar, 1.0, zbar);
  if (t_on) {
    axpy(gbar, -a2, gram_apply_temporal(zbar, sp.hps));
    const double a2bar = -real_dot(zbar, tg);
    acc.hyper[L2] += a2bar * 2.0 / h.rho2;
    acc.hyper[R2] += a2bar * (-2.0 * h.lambda2 / (h.rho2 * h.rho2));
    const std::vector<cx> tap = gram_tap_gradient_temporal(gin, zbar, sp.hps);
    for (std::size_t j = 0; j < tap.size(); ++j) acc.hps[j] += -a2 * tap[j];
  }

  ComplexVolume gxbar = uxbar, gybar = uybar;
  if (s_on) {
    axpy(gxbar, -a1, gram_apply_spatial(uxbar, sp.hs));
    axpy(gybar, -a1, gram_apply_spatial(uybar, sp.hs));
    const double a1bar = -(real_dot(uxbar, sgx) + real_dot(uybar, sgy));
    acc.hyper[L1] += a1bar * 2.0 / h.rho1;
    acc.hyper[R1] += a1bar * (-2.0 * h.lambda1 / (h.rho1 * h.rho1));
    const auto tx = gram_tap_gradient_spatial(g.x, uxbar, sp.hs);
    const auto ty = gram_tap_gradient_spatial(g.y, uybar, sp.hs);
    for (std::size_t b = 0; b < acc.hs.size(); ++b) {
      for (std::size_t j = 0; j < acc.hs[b].size(); ++j) {
        acc.hs[b][j] += -a1 * (tx[b][j] + ty[b][j]);
      }
    }
  }

  // gbar_k = -i wx Gxbar - i wy Gybar
  multiply(gxbar, pb.wx());
  multiply(gybar, pb.wy());
  axpy(gxbar, 1.0, gybar);
  scale(gxbar, cx{0.0, -1.0});
  axpy(gbar, 1.0, in_image(gxbar, fft));
  return gbar;
}

void check_params(const LearnableParams& p) {
  if (p.unroll_depth < 0) throw ValidationError("unroll depth must be >= 0");
  if (p.sweeps.empty()) throw ValidationError("no parameter sets");
  if (!p.tied() && p.sweeps.size() != static_cast<std::size_t>(p.unroll_depth)) {
    throw ValidationError("untied parameters need one set per sweep");
  }
}

}  // namespace

Hyperparams SweepParams::hyper() const {
  Hyperparams h;
  h.lambda1 = std::exp(log_hyper[L1]);
  h.lambda2 = std::exp(log_hyper[L2]);
  h.rho0 = std::exp(log_hyper[R0]);
  h.rho1 = std::exp(log_hyper[R1]);
  h.rho2 = std::exp(log_hyper[R2]);
  return h;
}

SweepParams SweepParams::from(const Hyperparams& h, FilterBank filters) {
  h.validate();
  SweepParams p;
  p.log_hyper = {log_or_neg_inf(h.lambda1), log_or_neg_inf(h.lambda2), log_or_neg_inf(h.rho0),
                 std::log(h.rho1), std::log(h.rho2)};
  p.hps = std::move(filters.ps);
  p.hs = std::move(filters.s);
  return p;
}

SolverConfig LearnableParams::config_for_sweep(int k) const {
  const SweepParams& sp = for_sweep(k);
  SolverConfig cfg;
  cfg.mode = SolverMode::Paper;
  cfg.iterations = unroll_depth;
  cfg.hyper = sp.hyper();
  cfg.filters = {sp.hps, sp.hs};
  return cfg;
}

LearnableParams LearnableParams::from_config(const SolverConfig& cfg, int unroll_depth,
                                             bool tied) {
  if (unroll_depth < 0) throw ValidationError("unroll depth must be >= 0");
  LearnableParams p;
  p.unroll_depth = unroll_depth;
  const std::size_t sets = tied ? 1 : static_cast<std::size_t>(unroll_depth);
  for (std::size_t k = 0; k < sets; ++k) p.sweeps.push_back(SweepParams::from(cfg.hyper, cfg.filters));
  if (p.sweeps.empty()) p.sweeps.push_back(SweepParams::from(cfg.hyper, cfg.filters));
  return p;
}

std::vector<double> LearnableParams::flatten() const {
  std::vector<double> out;
  out.reserve(coordinate_count());
  for (const auto& sp : sweeps) {
    out.insert(out.end(), sp.log_hyper.begin(), sp.log_hyper.end());
    for (cx t : sp.hps.taps()) {
      out.push_back(t.real());
      out.push_back(t.imag());
    }
    for (const auto& f : sp.hs.filters()) {
      for (cx t : f.taps()) {
        out.push_back(t.real());
        out.push_back(t.imag());
      }
    }
  }
  return out;
}

void LearnableParams::unflatten(std::span<const double> coords) {
  if (coords.size() != coordinate_count()) throw ValidationError("coordinate count mismatch");
  std::size_t c = 0;
  auto next_cx = [&] {
    const cx v{coords[c], coords[c + 1]};
    c += 2;
    return v;
  };
  for (auto& sp : sweeps) {
    for (auto& v : sp.log_hyper) v = coords[c++];
    std::vector<cx> taps(sp.hps.size());
    for (auto& t : taps) t = next_cx();
    sp.hps = TemporalFilter(std::move(taps));
    std::vector<SpatialFilter> bank;
    for (const auto& f : sp.hs.filters()) {
      std::vector<cx> st(f.taps().size());
      for (auto& t : st) t = next_cx();
      bank.emplace_back(f.kx(), f.ky(), std::move(st));
    }
    sp.hs = SpatialBank(std::move(bank));
  }
}

std::size_t LearnableParams::coordinate_count() const {
  std::size_t n = 0;
  for (const auto& sp : sweeps) {
    n += 5 + 2 * sp.hps.size();
    for (const auto& f : sp.hs.filters()) n += 2 * f.taps().size();
  }
  return n;
}

bool LearnableParams::is_hyper_coordinate(std::size_t c) const {
  for (const auto& sp : sweeps) {
    std::size_t n = 5 + 2 * sp.hps.size();
    for (const auto& f : sp.hs.filters()) n += 2 * f.taps().size();
    if (c < n) return c < 5;
    c -= n;
  }
  return false;
}

TrainingPair make_training_pair(const ComplexVolume& gamma_ref, const SamplingMask& mask,
                                const CoilSet& coils, int threads) {
  ComplexVolume ref = gamma_ref;
  ref.set_domain(Domain::Image);
  auto y = encode(ref, coils, mask, threads);
  return {Problem(std::move(y), mask, coils, threads), std::move(ref)};
}

double loss(const ComplexVolume& out, const ComplexVolume& ref) {
  require_same_dims(out.dims(), ref.dims(), "loss");
  return norm2(out - ref) / static_cast<double>(out.size());
}

ComplexVolume forward_unrolled(const LearnableParams& params, const Problem& problem) {
  check_params(params);
  HQSState s = init_state(problem);
  for (int k = 0; k < params.unroll_depth; ++k) {
    const SolverConfig cfg = params.config_for_sweep(k);
    if (k == 0 || !params.tied()) validate(problem, cfg);
    sweep(s, problem, cfg);
  }
  return s.gamma;
}

double batch_loss(const LearnableParams& params, std::span<const TrainingPair> batch) {
  if (batch.empty()) throw ValidationError("empty training batch");
  double total = 0.0;
  for (const auto& pair : batch) total += loss(forward_unrolled(params, pair.problem), pair.gamma_ref);
  return total / static_cast<double>(batch.size());
}

GradientResult gradient(const LearnableParams& params, std::span<const TrainingPair> batch) {
  check_params(params);
  if (batch.empty()) throw ValidationError("empty training batch");
  std::vector<SetGrad> acc;
  for (const auto& sp : params.sweeps) acc.emplace_back(sp);

  GradientResult result;
  const double pairs = static_cast<double>(batch.size());
  for (const auto& pair : batch) {
    const Problem& pb = pair.problem;
    std::vector<ComplexVolume> gammas;
    HQSState s = init_state(pb);
    gammas.push_back(s.gamma);
    for (int k = 0; k < params.unroll_depth; ++k) {
      const SolverConfig cfg = params.config_for_sweep(k);
      if (k == 0 || !params.tied()) validate(pb, cfg);
      sweep(s, pb, cfg);
      gammas.push_back(s.gamma);
    }
    require_same_dims(s.gamma.dims(), pair.gamma_ref.dims(), "gradient");
    ComplexVolume diff = s.gamma - pair.gamma_ref;
    const double n = static_cast<double>(diff.size());
    result.loss += norm2(diff) / n / pairs;
    scale(diff, 2.0 / (n * pairs));
    for (int k = params.unroll_depth - 1; k >= 0; --k) {
      const std::size_t set = params.tied() ? 0 : static_cast<std::size_t>(k);
      diff = backward_sweep(gammas[k], diff, pb, params.sweeps[set], acc[set]);
      if (!all_finite(diff)) {
        throw NumericalError("gradient produced non-finite values", 0.0, k + 1);
      }
    }
  }

  result.grad.reserve(params.coordinate_count());
  for (std::size_t i = 0; i < acc.size(); ++i) {
    const Hyperparams h = params.sweeps[i].hyper();
    const double raw[5] = {h.lambda1, h.lambda2, h.rho0, h.rho1, h.rho2};
    for (int j = 0; j < 5; ++j) {
      const double v = raw[j] == 0.0 ? 0.0 : raw[j] * acc[i].hyper[j];
      result.grad.push_back(v);
    }
    for (cx t : acc[i].hps) {
      result.grad.push_back(t.real());
      result.grad.push_back(t.imag());
    }
    for (const auto& b : acc[i].hs) {
      for (cx t : b) {
        result.grad.push_back(t.real());
        result.grad.push_back(t.imag());
      }
    }
  }
  for (double v : result.grad) {
    if (!std::isfinite(v)) throw NumericalError("parameter gradient is not finite");
  }
  return result;
}

TrainResult train(const LearnableParams& params0, std::span<const TrainingPair> pairs,
                  const TrainOptions& opts) {
  if (opts.steps < 0) throw ValidationError("steps must be >= 0");
  if (!(opts.step_hyper >= 0.0) || !(opts.step_taps >= 0.0)) {
    throw ValidationError("step sizes must be >= 0");
  }
  TrainResult r{params0, {}, false};
  GradientResult g = gradient(r.params, pairs);
  auto grad_norm = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
  };
  const double initial = g.loss;
  r.history.push_back({0, g.loss, grad_norm(g.grad)});

  std::vector<double> coords = r.params.flatten();
  std::vector<double> m1(coords.size(), 0.0), m2(coords.size(), 0.0);
  constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  for (int step = 1; step <= opts.steps; ++step) {
    std::vector<double> next = coords;
    for (std::size_t c = 0; c < next.size(); ++c) {
      const double lr = r.params.is_hyper_coordinate(c) ? opts.step_hyper : opts.step_taps;
      if (opts.optimizer == Optimizer::GradientDescent) {
        next[c] -= lr * g.grad[c];
      } else {
        m1[c] = b1 * m1[c] + (1.0 - b1) * g.grad[c];
        m2[c] = b2 * m2[c] + (1.0 - b2) * g.grad[c] * g.grad[c];
        const double mh = m1[c] / (1.0 - std::pow(b1, step));
        const double vh = m2[c] / (1.0 - std::pow(b2, step));
        next[c] -= lr * mh / (std::sqrt(vh) + eps);
      }
    }
    LearnableParams candidate = r.params;
    GradientResult gn;
    try {
      candidate.unflatten(next);
      gn = gradient(candidate, pairs);
    } catch (const Error&) {
      r.diverged = true;
      break;
    }
    r.history.push_back({step, gn.loss, grad_norm(gn.grad)});
    if (!std::isfinite(gn.loss) || gn.loss > opts.divergence_factor * initial) {
      r.diverged = true;
      break;
    }
    r.params = std::move(candidate);
    coords = std::move(next);
    g = std::move(gn);
  }
  return r;
}

void write_history_csv(std::ostream& os, const std::vector<TrainRecord>& history) {
  os << "step,loss,grad_norm\n";
  for (const auto& h : history) {
    os << h.step << ',' << fmt12(h.loss) << ',' << fmt12(h.grad_norm) << '\n';
  }
}

void write_params(std::ostream& os, const LearnableParams& p) {
  check_params(p);
  const SweepParams& first = p.sweeps.front();
  os.write(kMagic, 4);
  io::put_u16(os, kVersion);
  io::put_u8(os, p.tied() ? 1 : 0);
  io::put_u8(os, 0);
  io::put_u64(os, p.sweeps.size());
  io::put_u64(os, static_cast<std::uint64_t>(p.unroll_depth));
  io::put_u64(os, first.hps.size());
  io::put_u64(os, first.hs.kx());
  io::put_u64(os, first.hs.ky());
  io::put_u64(os, first.hs.count());
  for (double v : p.flatten()) io::put_f64(os, v);
  if (!os) throw IoError("failed writing parameter file");
}

LearnableParams read_params(std::istream& is) {
  char magic[4] = {};
  is.read(magic, 4);
  if (!is || std::string(magic, 4) != std::string(kMagic, 4)) {
    throw ValidationError("not a parameter file (bad magic)");
  }
  if (io::get_u16(is) != kVersion) throw ValidationError("unsupported parameter file version");
  io::get_u8(is);
  io::get_u8(is);
  const std::uint64_t sets = io::get_u64(is);
  const std::uint64_t depth = io::get_u64(is);
  const std::uint64_t taps = io::get_u64(is);
  const std::uint64_t kx = io::get_u64(is);
  const std::uint64_t ky = io::get_u64(is);
  const std::uint64_t bank = io::get_u64(is);
  constexpr std::uint64_t kLimit = 1u << 20;
  if (sets == 0 || sets > kLimit || depth > kLimit || taps < 2 || taps > kLimit || kx == 0 ||
      ky == 0 || kx * ky > kLimit || bank == 0 || bank > kLimit) {
    throw ValidationError("implausible parameter file header");
  }
  LearnableParams p;
  p.unroll_depth = static_cast<int>(depth);
  std::vector<cx> placeholder(taps, cx{1.0, 0.0});
  SpatialFilter sf(kx, ky, std::vector<cx>(kx * ky, cx{1.0, 0.0}));
  for (std::uint64_t s = 0; s < sets; ++s) {
    SweepParams sp;
    sp.hps = TemporalFilter(placeholder);
    sp.hs = SpatialBank(std::vector<SpatialFilter>(bank, sf));
    p.sweeps.push_back(std::move(sp));
  }
  std::vector<double> coords(p.coordinate_count());
  for (auto& v : coords) v = io::get_f64(is);
  p.unflatten(coords);
  check_params(p);
  return p;
}

void save_params(const std::filesystem::path& path, const LearnableParams& params) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  write_params(os, params);
}

LearnableParams load_params(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  return read_params(is);
}

}  // namespace psr
