// psrecon: command-line front end for phantom generation, sampling,
// calibration, reconstruction, training, evaluation and export.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "psr/csv.hpp"
#include "psr/error.hpp"
#include "psr/filter_io.hpp"
#include "psr/hqs.hpp"
#include "psr/io.hpp"
#include "psr/learn.hpp"
#include "psr/metrics.hpp"
#include "psr/ps_model.hpp"
#include "psr/rng.hpp"
#include "psr/sampling.hpp"

namespace fs = std::filesystem;
using namespace psr;

namespace {

enum Exit { kOk = 0, kUsage = 2, kInput = 3, kNumerical = 4 };

struct Global {
  int threads = 1;
};

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

bool is_number(const std::string& s) {
  if (s.empty()) return false;
  char* end = nullptr;
  std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

std::string value_text(const std::string& v) {
  if (is_number(v) || v == "true" || v == "false") return v;
  return quote(v);
}

// Manifest in the same key=value form accepted by --config.
void write_manifest(const fs::path& out, const CLI::App& app, const CLI::App& sub,
                    const std::vector<std::string>& notes,
                    const std::map<std::string, std::string>& resolved = {}) {
  std::ostringstream os;
  os << "# psrecon " << sub.get_name() << '\n';
  for (const auto& n : notes) os << "# " << n << '\n';
  os << "threads=" << app.get_option("--threads")->as<int>() << '\n';
  os << '[' << sub.get_name() << "]\n";
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string name = opt->get_lnames().front();
    if (name == "help") continue;
    if (auto it = resolved.find(name); it != resolved.end()) {
      os << name << '=' << value_text(it->second) << '\n';
      continue;
    }
    if (opt->get_expected_max() == 0) {
      os << name << '=' << (opt->count() > 0 && opt->as<bool>() ? "true" : "false") << '\n';
      continue;
    }
    std::vector<std::string> vals;
    if (opt->count() > 0) {
      vals = opt->results();
    } else if (!opt->get_default_str().empty()) {
      vals = {opt->get_default_str()};
    } else {
      continue;
    }
    if (opt->get_expected_max() > 1) {
      os << name << "=[";
      for (std::size_t i = 0; i < vals.size(); ++i) os << (i ? "," : "") << value_text(vals[i]);
      os << "]\n";
    } else {
      os << name << '=' << value_text(vals.front()) << '\n';
    }
  }
  std::ofstream f(out.string() + ".manifest", std::ios::binary);
  f << os.str();
  if (!f) throw IoError("cannot write manifest for " + out.string());
}

std::string format_roots(const std::vector<cx>& roots) {
  std::string s = "roots";
  for (const cx& r : roots) s += ' ' + fmt12(r.real()) + (r.imag() < 0 ? "" : "+") + fmt12(r.imag()) + 'i';
  return s;
}

CoilSet load_coils_or_identity(const std::string& path, std::size_t nx, std::size_t ny) {
  if (path.empty()) return identity_coils(nx, ny);
  return coils_from_volume(io::load_complex(path));
}

SamplingMask load_mask(const std::string& path) { return SamplingMask(io::load_real(path)); }

// ---------------------------------------------------------------- phantom

struct PhantomArgs {
  PhantomConfig cfg;
  std::uint64_t dynamics_seed = 0;
  std::string out;
};

void add_phantom(CLI::App& app, PhantomArgs& a) {
  auto* s = app.add_subcommand("phantom", "Synthetic PS phantom");
  s->add_option("--nx", a.cfg.nx)->capture_default_str()->check(CLI::PositiveNumber);
  s->add_option("--ny", a.cfg.ny)->capture_default_str()->check(CLI::PositiveNumber);
  s->add_option("--nt", a.cfg.nt)->capture_default_str()->check(CLI::PositiveNumber);
  s->add_option("--order", a.cfg.order)->capture_default_str()->check(CLI::PositiveNumber);
  s->add_option("--seed", a.cfg.seed)->required();
  s->add_option("--dynamics-seed", a.dynamics_seed, "Seed for the temporal roots (default: --seed)");
  s->add_option("--modulus-min", a.cfg.modulus_min)->capture_default_str();
  s->add_option("--modulus-max", a.cfg.modulus_max)->capture_default_str();
  s->add_option("--noise", a.cfg.noise)->capture_default_str();
  s->add_flag("--constant", a.cfg.constant, "Order 1 only: constant in time");
  s->add_option("--out", a.out)->required();
}

int run_phantom(const CLI::App& app, const CLI::App& sub, PhantomArgs& a) {
  if (sub.get_option("--dynamics-seed")->count() > 0) a.cfg.dynamics_seed = a.dynamics_seed;
  Phantom ph = make_phantom(a.cfg);
  io::save(a.out, ph.volume);
  write_manifest(a.out, app, sub, {format_roots(ph.roots)});
  return kOk;
}

// ---------------------------------------------------------------- mask

struct MaskArgs {
  std::size_t nx = 64, ny = 64, nt = 16, acs = 4;
  double accel = 4.0;
  std::uint64_t seed = 0;
  bool shared = false;
  std::string out;
};

void add_mask(CLI::App& app, MaskArgs& a) {
  auto* s = app.add_subcommand("mask", "Cartesian phase-encode mask");
  s->add_option("--nx", a.nx)->capture_default_str()->check(CLI::PositiveNumber);
  s->add_option("--ny", a.ny)->capture_default_str()->check(CLI::PositiveNumber);
  s->add_option("--nt", a.nt)->capture_default_str()->check(CLI::PositiveNumber);
  s->add_option("--accel", a.accel)->capture_default_str();
  s->add_option("--acs", a.acs, "Fully sampled center lines")->capture_default_str();
  s->add_option("--seed", a.seed)->required();
  s->add_flag("--shared-lines", a.shared, "Same lines in every frame");
  s->add_option("--out", a.out)->required();
}

int run_mask(const CLI::App& app, const CLI::App& sub, const MaskArgs& a) {
  SamplingMask m = make_mask(a.nx, a.ny, a.nt, a.accel, a.acs, a.seed, !a.shared);
  io::save(a.out, m.values());
  write_manifest(a.out, app, sub,
                 {"lines_per_frame " + std::to_string(m.lines_in_frame(0)),
                  "acceleration " + fmt12(m.acceleration())});
  std::cout << "lines per frame: " << m.lines_in_frame(0) << '\n';
  return kOk;
}

// ---------------------------------------------------------------- coils

struct CoilArgs {
  std::size_t nx = 64, ny = 64, count = 1;
  std::uint64_t seed = 0;
  std::string out;
};

void add_coils(CLI::App& app, CoilArgs& a) {
  auto* s = app.add_subcommand("coils", "Synthetic coil sensitivities");
  s->add_option("--nx", a.nx)->capture_default_str()->check(CLI::PositiveNumber);
  s->add_option("--ny", a.ny)->capture_default_str()->check(CLI::PositiveNumber);
  s->add_option("--count", a.count)->capture_default_str()->check(CLI::PositiveNumber);
  s->add_option("--seed", a.seed)->required();
  s->add_option("--out", a.out)->required();
}

int run_coils(const CLI::App& app, const CLI::App& sub, const CoilArgs& a) {
  io::save(a.out, coils_to_volume(make_coils(a.nx, a.ny, a.count, a.seed)));
  write_manifest(a.out, app, sub, {});
  return kOk;
}

// ---------------------------------------------------------------- undersample

struct UndersampleArgs {
  std::string image, mask, coils, out;
  double noise = 0.0;
  std::uint64_t seed = 0;
};

void add_undersample(CLI::App& app, UndersampleArgs& a) {
  auto* s = app.add_subcommand("undersample", "Per-coil undersampled k-space of an image");
  s->add_option("--image", a.image)->required();
  s->add_option("--mask", a.mask)->required();
  s->add_option("--coils", a.coils, "Coil file (default: single identity coil)")
      ;
  s->add_option("--noise", a.noise, "Std of complex noise on sampled entries")->capture_default_str();
  s->add_option("--seed", a.seed, "Noise seed (required with --noise)");
  s->add_option("--out", a.out)->required();
}

int run_undersample(const CLI::App& app, const CLI::App& sub, const UndersampleArgs& a,
                    const Global& g) {
  if (a.noise < 0.0) throw ValidationError("--noise must be >= 0");
  if (a.noise > 0.0 && sub.get_option("--seed")->count() == 0) {
    throw ValidationError("--noise needs --seed");
  }
  ComplexVolume img = io::load_complex(a.image);
  img.set_domain(Domain::Image);
  SamplingMask mask = load_mask(a.mask);
  CoilSet coils = load_coils_or_identity(a.coils, img.dims().nx, img.dims().ny);
  check_consistent(img.dims(), coils, mask);
  auto y = encode(img, coils, mask, g.threads);
  if (a.noise > 0.0) {
    Rng rng(a.seed);
    for (auto& yi : y) {
      for (std::size_t i = 0; i < yi.size(); ++i) {
        const cx n = a.noise * rng.complex_normal();
        if (mask.values()[i] != 0.0) yi[i] += n;
      }
    }
  }
  io::save_all(a.out, y);
  write_manifest(a.out, app, sub, {});
  return kOk;
}

// ---------------------------------------------------------------- calibrate

struct CalibrateArgs {
  std::vector<std::string> images;
  std::string kspace, mask, coils, out;
  std::size_t order = 3;
  std::size_t acs = 4;
};

void add_calibrate(CLI::App& app, CalibrateArgs& a) {
  auto* s = app.add_subcommand("calibrate", "SVD null-space temporal filter");
  auto* im = s->add_option("--images", a.images, "Training image volumes");
  auto* ks = s->add_option("--kspace", a.kspace, "Undersampled k-space; calibrates on ACS lines")
                 ;
  im->excludes(ks);
  s->add_option("--mask", a.mask, "Mask of --kspace")->needs(ks);
  s->add_option("--coils", a.coils)->needs(ks);
  s->add_option("--acs", a.acs, "Center lines used with --kspace")->capture_default_str();
  s->add_option("--order", a.order, "Filter order L (L+1 taps)")->capture_default_str();
  s->add_option("--out", a.out)->required();
}

// Low-resolution coil-combined image from the fully sampled center lines.
ComplexVolume acs_image(const std::vector<ComplexVolume>& y, const SamplingMask& mask,
                        const CoilSet& coils, std::size_t acs, int threads) {
  const Dims d = mask.dims();
  if (acs == 0 || acs > d.ny) throw ValidationError("--acs must be in [1, ny]");
  const std::size_t first = d.ny / 2 - acs / 2;
  RealVolume center(d, Domain::Mask);
  for (std::size_t x = 0; x < d.nx; ++x) {
    for (std::size_t yy = first; yy < first + acs; ++yy) {
      for (std::size_t t = 0; t < d.nt; ++t) {
        if (!mask.sampled(yy, t)) {
          throw ValidationError("ACS line " + std::to_string(yy) + " is not sampled in frame " +
                                std::to_string(t));
        }
        center(x, yy, t) = 1.0;
      }
    }
  }
  return adjoint_encode(y, coils, SamplingMask(center), threads);
}

int run_calibrate(const CLI::App& app, const CLI::App& sub, const CalibrateArgs& a,
                  const Global& g) {
  std::vector<ComplexVolume> training;
  if (!a.images.empty()) {
    for (const auto& p : a.images) training.push_back(io::load_complex(p));
  } else if (!a.kspace.empty()) {
    if (a.mask.empty()) throw ValidationError("--kspace needs --mask");
    SamplingMask mask = load_mask(a.mask);
    auto y = io::load_complex_all(a.kspace);
    CoilSet coils = load_coils_or_identity(a.coils, mask.dims().nx, mask.dims().ny);
    check_consistent(mask.dims(), coils, mask, &y);
    training.push_back(acs_image(y, mask, coils, a.acs, g.threads));
  } else {
    throw ValidationError("calibrate needs --images or --kspace");
  }
  CalibrationResult cal = calibrate_nullspace(training, a.order + 1);
  save_filters(a.out, {cal.filter, SpatialBank::shared(spatial_filter_default())});
  write_manifest(a.out, app, sub, {"residual " + fmt12(cal.residual)});
  std::cout << "calibration residual: " << fmt12(cal.residual) << '\n';
  return kOk;
}

// ---------------------------------------------------------------- recon

struct ReconArgs {
  std::string kspace, mask, coils, filters, params, out, log, mode = "paper";
  int iters = 10;
  Hyperparams hyper;
};

void add_recon(CLI::App& app, ReconArgs& a) {
  auto* s = app.add_subcommand("recon", "HQS reconstruction");
  s->add_option("--kspace", a.kspace)->required();
  s->add_option("--mask", a.mask)->required();
  s->add_option("--coils", a.coils);
  auto* f = s->add_option("--filters", a.filters, "Filter bank file");
  auto* p = s->add_option("--params", a.params, "Learned parameter file (paper mode)")
                ;
  f->excludes(p);
  s->add_option("--mode", a.mode)->capture_default_str()->check(CLI::IsMember({"paper", "exact"}));
  s->add_option("--iters", a.iters)->capture_default_str()->check(CLI::NonNegativeNumber);
  s->add_option("--lambda1", a.hyper.lambda1)->capture_default_str();
  s->add_option("--lambda2", a.hyper.lambda2)->capture_default_str();
  s->add_option("--rho0", a.hyper.rho0)->capture_default_str();
  s->add_option("--rho1", a.hyper.rho1)->capture_default_str();
  s->add_option("--rho2", a.hyper.rho2)->capture_default_str();
  s->add_option("--out", a.out)->required();
  s->add_option("--log", a.log, "Objective CSV (default: <out>.objective.csv)");
}

int run_recon(const CLI::App& app, const CLI::App& sub, const ReconArgs& a, const Global& g) {
  SamplingMask mask = load_mask(a.mask);
  auto y = io::load_complex_all(a.kspace);
  CoilSet coils = load_coils_or_identity(a.coils, mask.dims().nx, mask.dims().ny);
  Problem problem(std::move(y), std::move(mask), std::move(coils), g.threads);

  std::vector<ObjectiveTerms> log;
  HQSState state;
  std::map<std::string, std::string> resolved;
  if (!a.params.empty()) {
    if (a.mode != "paper") throw ValidationError("--params runs the paper-mode network");
    LearnableParams lp = load_params(a.params);
    const int iters = sub.get_option("--iters")->count() ? a.iters : lp.unroll_depth;
    resolved["iters"] = std::to_string(iters);
    if (!lp.tied() && iters > static_cast<int>(lp.sweeps.size())) {
      throw ValidationError("untied parameters cover only " + std::to_string(lp.sweeps.size()) +
                            " sweeps");
    }
    state = init_state(problem);
    for (int k = 0; k < iters; ++k) {
      const SolverConfig cfg = lp.config_for_sweep(k);
      if (k == 0) log.push_back(objective(state, problem, cfg));
      validate(problem, cfg);
      sweep(state, problem, cfg);
      log.push_back(objective(state, problem, cfg));
    }
    if (iters == 0) log.push_back(objective(state, problem, lp.config_for_sweep(0)));
  } else {
    if (a.filters.empty()) throw ValidationError("recon needs --filters or --params");
    SolverConfig cfg;
    cfg.mode = parse_solver_mode(a.mode);
    cfg.iterations = a.iters;
    cfg.hyper = a.hyper;
    cfg.filters = load_filters(a.filters);
    ReconResult r = reconstruct(problem, cfg);
    state = std::move(r.state);
    log = std::move(r.log);
  }
  io::save(a.out, state.gamma);
  const std::string log_path = a.log.empty() ? a.out + ".objective.csv" : a.log;
  std::ofstream os(log_path, std::ios::binary);
  write_objective_csv(os, log);
  if (!os) throw IoError("cannot write " + log_path);
  write_manifest(a.out, app, sub, {}, resolved);
  return kOk;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::vector<std::string> refs, masks;
  std::string coils, filters, out, history, optimizer = "gd";
  int depth = 5;
  bool untied = false;
  Hyperparams hyper;
  TrainOptions opts;
};

void add_train(CLI::App& app, TrainArgs& a) {
  auto* s = app.add_subcommand("train", "Learn hyperparameters and filter taps");
  s->add_option("--refs", a.refs, "Reference image volumes")->required();
  s->add_option("--masks", a.masks, "One mask for all references, or one per reference")
      ->required()
      ;
  s->add_option("--coils", a.coils);
  s->add_option("--filters", a.filters, "Initial filter bank")->required();
  s->add_option("--depth", a.depth, "Unrolled sweeps")->capture_default_str()->check(CLI::NonNegativeNumber);
  s->add_option("--steps", a.opts.steps)->capture_default_str()->check(CLI::NonNegativeNumber);
  s->add_option("--step-hyper", a.opts.step_hyper)->capture_default_str();
  s->add_option("--step-taps", a.opts.step_taps)->capture_default_str();
  s->add_option("--optimizer", a.optimizer)->capture_default_str()->check(CLI::IsMember({"gd", "adam"}));
  s->add_flag("--untied", a.untied, "Separate parameters per sweep");
  s->add_option("--lambda1", a.hyper.lambda1)->capture_default_str();
  s->add_option("--lambda2", a.hyper.lambda2)->capture_default_str();
  s->add_option("--rho0", a.hyper.rho0)->capture_default_str();
  s->add_option("--rho1", a.hyper.rho1)->capture_default_str();
  s->add_option("--rho2", a.hyper.rho2)->capture_default_str();
  s->add_option("--out", a.out, "Parameter file")->required();
  s->add_option("--history", a.history, "Loss history CSV (default: <out>.history.csv)");
}

int run_train(const CLI::App& app, const CLI::App& sub, TrainArgs& a, const Global& g) {
  if (a.masks.size() != 1 && a.masks.size() != a.refs.size()) {
    throw ValidationError("--masks needs one file or one per reference");
  }
  std::vector<TrainingPair> pairs;
  for (std::size_t i = 0; i < a.refs.size(); ++i) {
    ComplexVolume ref = io::load_complex(a.refs[i]);
    SamplingMask mask = load_mask(a.masks.size() == 1 ? a.masks[0] : a.masks[i]);
    CoilSet coils = load_coils_or_identity(a.coils, ref.dims().nx, ref.dims().ny);
    check_consistent(ref.dims(), coils, mask);
    pairs.push_back(make_training_pair(ref, mask, coils, g.threads));
  }
  SolverConfig cfg;
  cfg.hyper = a.hyper;
  cfg.filters = load_filters(a.filters);
  LearnableParams p0 = LearnableParams::from_config(cfg, a.depth, !a.untied);
  a.opts.optimizer = a.optimizer == "adam" ? Optimizer::Adam : Optimizer::GradientDescent;
  TrainResult r = train(p0, pairs, a.opts);

  const std::string hist = a.history.empty() ? a.out + ".history.csv" : a.history;
  std::ofstream os(hist, std::ios::binary);
  write_history_csv(os, r.history);
  if (!os) throw IoError("cannot write " + hist);
  if (r.diverged) {
    throw NumericalError("training diverged at step " + std::to_string(r.history.back().step),
                         r.history.back().loss);
  }
  save_params(a.out, r.params);
  write_manifest(a.out, app, sub,
                 {"initial_loss " + fmt12(r.history.front().loss),
                  "final_loss " + fmt12(r.history.back().loss)});
  std::cout << "loss " << fmt12(r.history.front().loss) << " -> " << fmt12(r.history.back().loss)
            << '\n';
  return kOk;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::vector<std::string> recon, ref;
  std::string out, peak = "ref";
};

void add_eval(CLI::App& app, EvalArgs& a) {
  auto* s = app.add_subcommand("eval", "MSE / PSNR / SSIM report");
  s->add_option("--recon", a.recon)->required();
  s->add_option("--ref", a.ref)->required();
  s->add_option("--peak", a.peak, "PSNR peak: ref or out")->capture_default_str()->check(CLI::IsMember({"ref", "out"}));
  s->add_option("--out", a.out, "CSV report")->required();
}

int run_eval(const CLI::App& app, const CLI::App& sub, const EvalArgs& a) {
  if (a.recon.size() != a.ref.size()) throw ValidationError("--recon and --ref counts differ");
  std::vector<EvalCase> cases;
  const PeakMode mode = parse_peak_mode(a.peak);
  for (std::size_t i = 0; i < a.recon.size(); ++i) {
    cases.push_back({fs::path(a.recon[i]).stem().string(),
                     evaluate(io::load_complex(a.recon[i]), io::load_complex(a.ref[i]), mode)});
  }
  std::ofstream os(a.out, std::ios::binary);
  write_report_csv(os, cases);
  if (!os) throw IoError("cannot write " + a.out);
  write_manifest(a.out, app, sub, {});
  for (const auto& c : cases) {
    std::cout << c.name << ": mse " << fmt12(c.report.mse) << " psnr " << fmt12(c.report.psnr.db)
              << " dB ssim " << fmt12(c.report.ssim) << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------- export-pgm

struct ExportArgs {
  std::string input, prefix;
};

void add_export(CLI::App& app, ExportArgs& a) {
  auto* s = app.add_subcommand("export-pgm", "8-bit magnitude frames as binary PGM");
  s->add_option("--input", a.input)->required();
  s->add_option("--prefix", a.prefix, "Writes <prefix>_tNNN.pgm")->required();
}

int run_export(const ExportArgs& a) {
  ComplexVolume v = io::load_complex(a.input);
  const Dims d = v.dims();
  const double peak = max_abs(v);
  for (std::size_t t = 0; t < d.nt; ++t) {
    char name[32];
    std::snprintf(name, sizeof name, "_t%03zu.pgm", t);
    const std::string path = a.prefix + name;
    std::ofstream os(path, std::ios::binary);
    os << "P5\n" << d.ny << ' ' << d.nx << "\n255\n";
    for (std::size_t x = 0; x < d.nx; ++x) {
      for (std::size_t y = 0; y < d.ny; ++y) {
        const double m = peak > 0.0 ? std::abs(v(x, y, t)) / peak : 0.0;
        const auto byte = static_cast<unsigned char>(std::lround(std::clamp(m, 0.0, 1.0) * 255.0));
        os.put(static_cast<char>(byte));
      }
    }
    if (!os) throw IoError("cannot write " + path);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PS-model dynamic MRI reconstruction"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value file; command-line flags take precedence");
  Global g;
  app.add_option("--threads", g.threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);

  PhantomArgs phantom;
  MaskArgs mask;
  CoilArgs coils;
  UndersampleArgs under;
  CalibrateArgs calib;
  ReconArgs recon;
  TrainArgs trainer;
  EvalArgs eval;
  ExportArgs exporter;
  add_phantom(app, phantom);
  add_mask(app, mask);
  add_coils(app, coils);
  add_undersample(app, under);
  add_calibrate(app, calib);
  add_recon(app, recon);
  add_train(app, trainer);
  add_eval(app, eval);
  add_export(app, exporter);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  const CLI::App& sub = *app.get_subcommands().front();
  const std::string name = sub.get_name();
  try {
    if (name == "phantom") return run_phantom(app, sub, phantom);
    if (name == "mask") return run_mask(app, sub, mask);
    if (name == "coils") return run_coils(app, sub, coils);
    if (name == "undersample") return run_undersample(app, sub, under, g);
    if (name == "calibrate") return run_calibrate(app, sub, calib, g);
    if (name == "recon") return run_recon(app, sub, recon, g);
    if (name == "train") return run_train(app, sub, trainer, g);
    if (name == "eval") return run_eval(app, sub, eval);
    if (name == "export-pgm") return run_export(exporter);
  } catch (const NumericalError& e) {
    std::cerr << "psrecon " << name << ": numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const Error& e) {
    std::cerr << "psrecon " << name << ": " << e.what() << '\n';
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "psrecon " << name << ": " << e.what() << '\n';
    return kInput;
  }
  return kUsage;
}
