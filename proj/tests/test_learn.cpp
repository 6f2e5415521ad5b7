#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <limits>
#include <sstream>

#include "psr/error.hpp"
#include "psr/learn.hpp"
#include "psr/ps_model.hpp"
#include "support.hpp"

using namespace psr;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<TrainingPair> pairs_for(std::size_t n, std::size_t nx, std::size_t nt, double accel,
                                    std::size_t coils, double noise = 0.02) {
  std::vector<TrainingPair> out;
  for (std::size_t i = 0; i < n; ++i) {
    PhantomConfig pc;
    pc.seed = 50 + i;
    pc.dynamics_seed = 5;
    pc.nx = pc.ny = nx;
    pc.nt = nt;
    pc.noise = noise;
    const Phantom ph = make_phantom(pc);
    const SamplingMask mask = make_mask(nx, nx, nt, accel, 2, 60 + i);
    out.push_back(make_training_pair(ph.volume, mask, make_coils(nx, nx, coils, 70 + i)));
  }
  return out;
}

SolverConfig base_config() {
  SolverConfig cfg;
  cfg.hyper = {0.3, 0.7, 0.5, 1.2, 0.8};
  cfg.filters = {TemporalFilter({{1, 0.1}, {-0.9, 0.2}, {0.3, -0.1}}),
                 SpatialBank::shared(spatial_filter_default())};
  return cfg;
}

// Central differences on every coordinate; returns the worst relative error
// over coordinates whose derivative is not negligible.
double worst_fd_error(const LearnableParams& p, const std::vector<TrainingPair>& batch,
                      const std::vector<double>& grad) {
  const auto c = p.flatten();
  double gmax = 0.0;
  for (double g : grad) gmax = std::max(gmax, std::abs(g));
  double worst = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(c[i]));
    auto cp = c, cm = c;
    cp[i] += h;
    cm[i] -= h;
    LearnableParams pp = p, pm = p;
    pp.unflatten(cp);
    pm.unflatten(cm);
    const double fd = (batch_loss(pp, batch) - batch_loss(pm, batch)) / (2 * h);
    if (std::abs(fd) < 1e-6 * gmax) continue;
    worst = std::max(worst, std::abs(fd - grad[i]) / std::abs(fd));
  }
  return worst;
}

}  // namespace

TEST_CASE("loss examples") {
  const ComplexVolume a = test::random_volume({4, 3, 2}, 1), b = test::random_volume({4, 3, 2}, 2);
  CHECK(loss(a, a) == 0.0);
  ComplexVolume off = a;
  for (std::size_t i = 0; i < off.size(); ++i) off[i] += std::polar(0.1, 0.3 * double(i));
  CHECK(loss(off, a) == doctest::Approx(0.01).epsilon(1e-12));
  double s = 0.0;
  for (std::size_t x = 0; x < 4; ++x)
    for (std::size_t y = 0; y < 3; ++y)
      for (std::size_t t = 0; t < 2; ++t) s += std::norm(a(x, y, t) - b(x, y, t));
  CHECK(std::abs(loss(a, b) - s / 24.0) < 1e-12 * s / 24.0);
  const cx ph = std::polar(1.0, 0.83);
  CHECK(loss(ph * a, ph * b) == doctest::Approx(loss(a, b)).epsilon(1e-12));
  CHECK_THROWS_AS(loss(a, test::random_volume({4, 3, 3}, 1)), DimensionError);
}

TEST_CASE("unrolled forward pass is the paper-mode solver") {
  auto batch = pairs_for(1, 8, 6, 2.0, 2);
  SolverConfig cfg = base_config();
  cfg.hyper = {1.0, 1.0, 1.0, 1.0, 1.0};
  cfg.iterations = 4;
  const LearnableParams p = LearnableParams::from_config(cfg, 4);
  REQUIRE(p.sweeps[0].hyper().lambda1 == 1.0);
  const ComplexVolume out = forward_unrolled(p, batch[0].problem);
  CHECK(test::bit_equal(out, reconstruct(batch[0].problem, cfg).state.gamma));
  CHECK(test::bit_equal(out, forward_unrolled(p, batch[0].problem)));

  const LearnableParams zero = LearnableParams::from_config(cfg, 0);
  CHECK(test::bit_equal(forward_unrolled(zero, batch[0].problem), init_state(batch[0].problem).gamma));
}

TEST_CASE("exact PS data with the true filter and a full mask is a fixed point") {
  PhantomConfig pc;
  pc.seed = 4;
  pc.nx = pc.ny = 8;
  pc.nt = 8;
  const Phantom ph = make_phantom(pc);
  std::vector<TrainingPair> batch;
  batch.push_back(make_training_pair(ph.volume, make_mask(8, 8, 8, 1.0, 0, 1), identity_coils(8, 8)));
  SolverConfig cfg;
  cfg.filters = {prony_filter(ph.roots), SpatialBank::shared(spatial_filter_default())};
  LearnableParams p = LearnableParams::from_config(cfg, 5);
  p.sweeps[0].log_hyper[0] = kNegInf;  // lambda1 = 0
  CHECK(batch_loss(p, batch) < 1e-12);
  const GradientResult g = gradient(p, batch);
  double gmax = 0.0;
  for (double v : g.grad) gmax = std::max(gmax, std::abs(v));
  CHECK(gmax < 1e-10);
}

TEST_CASE("reverse-mode gradient matches central differences") {
  auto batch = pairs_for(2, 8, 6, 2.0, 2);
  const LearnableParams p = LearnableParams::from_config(base_config(), 3);
  const GradientResult g = gradient(p, batch);
  REQUIRE(g.grad.size() == p.coordinate_count());
  CHECK(g.loss == doctest::Approx(batch_loss(p, batch)).epsilon(1e-13));
  CHECK(worst_fd_error(p, batch, g.grad) < 1e-4);
}

TEST_CASE("untied gradients match central differences") {
  auto batch = pairs_for(1, 8, 6, 2.0, 1);
  LearnableParams p = LearnableParams::from_config(base_config(), 2, false);
  REQUIRE(p.sweeps.size() == 2);
  p.sweeps[1].log_hyper[1] = 0.2;
  const GradientResult g = gradient(p, batch);
  CHECK(worst_fd_error(p, batch, g.grad) < 1e-4);
}

TEST_CASE("taps on a disabled path get an exactly zero gradient") {
  auto batch = pairs_for(1, 8, 6, 2.0, 1);
  LearnableParams p = LearnableParams::from_config(base_config(), 3);
  p.sweeps[0].log_hyper[0] = kNegInf;
  const GradientResult g = gradient(p, batch);
  const std::size_t first_spatial = 5 + 2 * p.sweeps[0].hps.size();
  for (std::size_t i = first_spatial; i < g.grad.size(); ++i) CHECK(g.grad[i] == 0.0);
  CHECK(g.grad[0] == 0.0);
  CHECK(g.grad[first_spatial - 1] != 0.0);
}

TEST_CASE("gradient is deterministic") {
  auto batch = pairs_for(2, 8, 6, 2.0, 2);
  const LearnableParams p = LearnableParams::from_config(base_config(), 3);
  const GradientResult a = gradient(p, batch), b = gradient(p, batch);
  CHECK(a.loss == b.loss);
  CHECK(a.grad == b.grad);
}

TEST_CASE("non-finite intermediates name the sweep") {
  auto batch = pairs_for(1, 8, 6, 2.0, 1);
  LearnableParams p = LearnableParams::from_config(base_config(), 4);
  p.sweeps[0].log_hyper[1] = 690.0;
  try {
    gradient(p, batch);
    FAIL("expected a numerical failure");
  } catch (const NumericalError& e) {
    CHECK(e.sweep() >= 1);
  }
}

TEST_CASE("training lowers the loss and keeps its history") {
  auto batch = pairs_for(2, 8, 6, 2.0, 1);
  const LearnableParams p = LearnableParams::from_config(base_config(), 3);
  TrainOptions o;
  o.steps = 0;
  TrainResult r0 = train(p, batch, o);
  CHECK(r0.history.size() == 1);
  CHECK(r0.params.flatten() == p.flatten());

  o.steps = 15;
  TrainResult r = train(p, batch, o);
  CHECK(!r.diverged);
  REQUIRE(r.history.size() == 16);
  CHECK(r.history.back().loss < r.history.front().loss);
  CHECK(r.history.back().loss == doctest::Approx(batch_loss(r.params, batch)).epsilon(1e-12));

  o.optimizer = Optimizer::Adam;
  TrainResult ra = train(p, batch, o);
  CHECK(ra.history.back().loss < ra.history.front().loss);

  TrainResult again = train(p, batch, o);
  CHECK(again.params.flatten() == ra.params.flatten());
}

TEST_CASE("divergence aborts with the history so far") {
  auto batch = pairs_for(1, 8, 6, 2.0, 1);
  const LearnableParams p = LearnableParams::from_config(base_config(), 3);
  TrainOptions o;
  o.steps = 10;
  o.divergence_factor = 1e-3;
  const TrainResult r = train(p, batch, o);
  CHECK(r.diverged);
  REQUIRE(r.history.size() == 2);
  CHECK(r.history[1].loss > 1e-3 * r.history[0].loss);
  CHECK(r.params.flatten() == p.flatten());
}

TEST_CASE("parameter files round-trip exactly") {
  LearnableParams p = LearnableParams::from_config(base_config(), 3, false);
  p.sweeps[2].log_hyper[0] = kNegInf;
  std::ostringstream os;
  write_params(os, p);
  CHECK(os.str().substr(0, 4) == "PSNP");
  std::istringstream is(os.str());
  const LearnableParams back = read_params(is);
  CHECK(back.unroll_depth == 3);
  CHECK(!back.tied());
  CHECK(back.flatten() == p.flatten());

  std::string bad = os.str();
  bad[0] = 'X';
  std::istringstream ib(bad);
  CHECK_THROWS_AS(read_params(ib), ValidationError);
  std::istringstream it(os.str().substr(0, os.str().size() - 3));
  CHECK_THROWS_AS(read_params(it), ValidationError);
}

TEST_CASE("history CSV layout") {
  std::ostringstream os;
  write_history_csv(os, {{0, 1.5, 2.0}, {1, 0.75, 1.0}});
  CHECK(os.str() == "step,loss,grad_norm\n0,1.5,2\n1,0.75,1\n");
}
