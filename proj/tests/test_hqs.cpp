#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "psr/error.hpp"
#include "psr/hqs.hpp"
#include "psr/ps_model.hpp"
#include "support.hpp"

using namespace psr;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using test::from_vec;
using test::random_volume;
using test::to_vec;

namespace {

struct Instance {
  Dims d{8, 8, 4};
  std::vector<cx> ht, hs;
  SolverConfig cfg;
  Problem problem;
  HQSState state;

  static Problem make_problem(const Dims& d, std::size_t coils, std::uint64_t seed) {
    SamplingMask mask = make_mask(d.nx, d.ny, d.nt, 2.0, 2, seed);
    CoilSet c = coils == 1 ? identity_coils(d.nx, d.ny) : make_coils(d.nx, d.ny, coils, seed + 1);
    std::vector<ComplexVolume> y;
    for (std::size_t i = 0; i < coils; ++i) {
      ComplexVolume yi = random_volume(d, seed + 10 + i, Domain::KSpace);
      multiply(yi, mask.values());
      y.push_back(std::move(yi));
    }
    return Problem(std::move(y), std::move(mask), std::move(c));
  }

  Instance(SolverMode mode, std::size_t coils = 1, std::uint64_t seed = 1)
      : ht(test::random_taps(3, seed + 2)),
        hs(test::random_taps(4, seed + 3)),
        problem(make_problem(d, coils, seed)) {
    cfg.mode = mode;
    cfg.hyper = {0.7, 1.3, 0.6, 0.9, 1.7};
    cfg.filters = {TemporalFilter(ht), SpatialBank::shared(SpatialFilter(2, 2, hs))};
    state.gamma = random_volume(d, seed + 20);
    state.z = random_volume(d, seed + 21);
    state.u = {random_volume(d, seed + 22, Domain::KSpace), random_volume(d, seed + 23, Domain::KSpace)};
    for (std::size_t i = 0; i < coils; ++i) state.x.push_back(random_volume(d, seed + 30 + i));
  }

  MatrixXcd F() const { return test::dense_fft2(d); }
  MatrixXcd diag(const RealVolume& v) const {
    VectorXcd dv(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) dv(i) = v[i];
    return dv.asDiagonal();
  }
  MatrixXcd coil(std::size_t c) const {
    VectorXcd dv(d.size());
    for (std::size_t p = 0; p < d.frame_size(); ++p)
      for (std::size_t t = 0; t < d.nt; ++t) dv(p * d.nt + t) = problem.coils().maps[c][p];
    return dv.asDiagonal();
  }
  MatrixXcd Gx() const { return cx{0, 1} * diag(problem.wx()) * F(); }
  MatrixXcd Gy() const { return cx{0, 1} * diag(problem.wy()) * F(); }
  MatrixXcd S() const { return test::dense_spatial_conv(d, 2, 2, hs); }
  MatrixXcd T() const { return test::dense_temporal_conv(d, ht); }
  MatrixXcd I() const { return MatrixXcd::Identity(d.size(), d.size()); }
};

double vrel(const VectorXcd& a, const VectorXcd& b) { return (a - b).norm() / b.norm(); }

}  // namespace

TEST_CASE("exact U update solves its sub-problem") {
  Instance in(SolverMode::Exact);
  const auto& h = in.cfg.hyper;
  const GradientChannels u = update_u(in.state, in.problem, in.cfg);
  const MatrixXcd S = in.S();
  const MatrixXcd A = h.rho1 * in.I() + 2.0 * h.lambda1 * S.adjoint() * S;
  const VectorXcd g = to_vec(in.state.gamma);
  CHECK(vrel(to_vec(u.x), A.partialPivLu().solve(h.rho1 * in.Gx() * g)) < 1e-8);
  CHECK(vrel(to_vec(u.y), A.partialPivLu().solve(h.rho1 * in.Gy() * g)) < 1e-8);
}

TEST_CASE("exact Z update solves its sub-problem") {
  Instance in(SolverMode::Exact);
  const auto& h = in.cfg.hyper;
  const MatrixXcd T = in.T();
  const MatrixXcd A = h.rho2 * in.I() + 2.0 * h.lambda2 * T.adjoint() * T;
  const VectorXcd ref = A.partialPivLu().solve(h.rho2 * to_vec(in.state.gamma));
  CHECK(vrel(to_vec(update_z(in.state, in.problem, in.cfg)), ref) < 1e-8);
}

TEST_CASE("x update solves its sub-problem for every coil") {
  for (std::size_t coils : {1u, 3u}) {
    Instance in(SolverMode::Exact, coils, 5);
    const auto& h = in.cfg.hyper;
    const MatrixXcd F = in.F();
    const MatrixXcd M = in.diag(in.problem.mask().values());
    const MatrixXcd A = F.adjoint() * M * F + h.rho0 * in.I();
    const auto x = update_x(in.state, in.problem, in.cfg);
    REQUIRE(x.size() == coils);
    for (std::size_t c = 0; c < coils; ++c) {
      const VectorXcd rhs = F.adjoint() * M * to_vec(in.problem.y()[c]) +
                            h.rho0 * in.coil(c) * to_vec(in.state.gamma);
      CHECK(vrel(to_vec(x[c]), A.partialPivLu().solve(rhs)) < 1e-8);
    }
  }
}

TEST_CASE("exact gamma update solves its sub-problem") {
  for (std::size_t coils : {1u, 2u}) {
    Instance in(SolverMode::Exact, coils, 7);
    const auto& h = in.cfg.hyper;
    const MatrixXcd Gx = in.Gx(), Gy = in.Gy();
    MatrixXcd A = h.rho1 * (Gx.adjoint() * Gx + Gy.adjoint() * Gy) + h.rho2 * in.I();
    VectorXcd rhs = h.rho1 * (Gx.adjoint() * to_vec(in.state.u.x) + Gy.adjoint() * to_vec(in.state.u.y)) +
                    h.rho2 * to_vec(in.state.z);
    for (std::size_t c = 0; c < coils; ++c) {
      const MatrixXcd C = in.coil(c);
      A += h.rho0 * C.adjoint() * C;
      rhs += h.rho0 * C.adjoint() * to_vec(in.state.x[c]);
    }
    CHECK(vrel(to_vec(update_gamma(in.state, in.problem, in.cfg)), A.partialPivLu().solve(rhs)) < 1e-8);
  }
}

TEST_CASE("paper-mode updates match a dense transcription of the closed forms") {
  for (std::size_t coils : {1u, 2u}) {
    Instance in(SolverMode::Paper, coils, 11);
    const auto& h = in.cfg.hyper;
    const MatrixXcd F = in.F(), S = in.S(), T = in.T();
    const VectorXcd g = to_vec(in.state.gamma);

    const MatrixXcd stepS = in.I() - (2.0 * h.lambda1 / h.rho1) * S.adjoint() * S;
    const GradientChannels u = update_u(in.state, in.problem, in.cfg);
    CHECK(vrel(to_vec(u.x), stepS * in.Gx() * g) < 1e-12);
    CHECK(vrel(to_vec(u.y), stepS * in.Gy() * g) < 1e-12);

    const MatrixXcd stepT = in.I() - (2.0 * h.lambda2 / h.rho2) * T.adjoint() * T;
    CHECK(vrel(to_vec(update_z(in.state, in.problem, in.cfg)), stepT * g) < 1e-12);

    const RealVolume& m = in.problem.mask().values();
    const MatrixXcd M = in.diag(m);
    const auto x = update_x(in.state, in.problem, in.cfg);
    for (std::size_t c = 0; c < coils; ++c) {
      VectorXcd num = M * to_vec(in.problem.y()[c]) + h.rho0 * F * in.coil(c) * g;
      for (std::size_t i = 0; i < m.size(); ++i) num(i) /= m[i] + h.rho0;
      CHECK(vrel(to_vec(x[c]), F.adjoint() * num) < 1e-12);
    }

    // gamma = F^-1 [(rho1 conj(i w) U + M ybar + rho0 F sum conj(c) x + rho2 F Z) / den],
    // ybar = F sum conj(c_i) F^-1 (M y_i).
    VectorXcd combined = VectorXcd::Zero(in.d.size());
    VectorXcd back = VectorXcd::Zero(in.d.size());
    for (std::size_t c = 0; c < coils; ++c) {
      combined += in.coil(c).adjoint() * to_vec(in.state.x[c]);
      back += in.coil(c).adjoint() * F.adjoint() * M * to_vec(in.problem.y()[c]);
    }
    const MatrixXcd Wx = in.diag(in.problem.wx()), Wy = in.diag(in.problem.wy());
    VectorXcd num = cx{0, -h.rho1} * (Wx * to_vec(in.state.u.x) + Wy * to_vec(in.state.u.y)) +
                    M * F * back + h.rho0 * F * combined + h.rho2 * F * to_vec(in.state.z);
    for (std::size_t i = 0; i < m.size(); ++i) {
      num(i) /= m[i] + h.rho0 + h.rho1 * in.problem.w2()[i] + h.rho2;
    }
    CHECK(vrel(to_vec(update_gamma(in.state, in.problem, in.cfg)), F.adjoint() * num) < 1e-12);
  }
}

TEST_CASE("with lambda = 0 both modes pass U and Z through unchanged") {
  Instance paper(SolverMode::Paper), exact(SolverMode::Exact);
  paper.cfg.hyper.lambda1 = paper.cfg.hyper.lambda2 = 0.0;
  exact.cfg.hyper.lambda1 = exact.cfg.hyper.lambda2 = 0.0;
  const GradientChannels up = update_u(paper.state, paper.problem, paper.cfg);
  const GradientChannels ue = update_u(exact.state, exact.problem, exact.cfg);
  const GradientChannels g = gradient_channels(paper.state.gamma, paper.problem);
  CHECK(test::rel_err(up.x, ue.x) < 1e-12);
  CHECK(test::rel_err(up.y, ue.y) < 1e-12);
  CHECK(test::rel_err(up.x, g.x) < 1e-12);
  const ComplexVolume zp = update_z(paper.state, paper.problem, paper.cfg);
  CHECK(test::rel_err(zp, update_z(exact.state, exact.problem, exact.cfg)) < 1e-12);
  CHECK(test::rel_err(zp, paper.state.gamma) < 1e-12);
}

TEST_CASE("exact-mode objective never increases") {
  PhantomConfig pc;
  pc.seed = 3;
  pc.nx = 16;
  pc.ny = 16;
  pc.nt = 8;
  pc.noise = 0.02;
  const Phantom ph = make_phantom(pc);
  const SamplingMask mask = make_mask(16, 16, 8, 3.0, 2, 4);
  const CoilSet coils = make_coils(16, 16, 2, 5);
  Problem problem(encode(ph.volume, coils, mask), mask, coils);
  SolverConfig cfg;
  cfg.mode = SolverMode::Exact;
  cfg.iterations = 30;
  cfg.filters = {prony_filter(ph.roots), SpatialBank::shared(spatial_filter_default())};
  const ReconResult r = reconstruct(problem, cfg);
  REQUIRE(r.log.size() == 31);
  for (std::size_t k = 1; k < r.log.size(); ++k) {
    CHECK(r.log[k].total() <= r.log[k - 1].total() * (1.0 + 1e-10));
  }
  CHECK(r.log.back().total() < r.log.front().total());
}

TEST_CASE("without regularization, sampled k-space converges to the data") {
  for (SolverMode mode : {SolverMode::Exact, SolverMode::Paper}) {
    Instance in(mode, 1, 13);
    in.cfg.hyper.lambda1 = in.cfg.hyper.lambda2 = 0.0;
    in.cfg.iterations = 200;
    const ReconResult r = reconstruct(in.problem, in.cfg);
    ComplexVolume k = fft2(r.state.gamma);
    multiply(k, in.problem.mask().values());
    CHECK(test::rel_err(k, in.problem.y()[0]) < 1e-6);
  }
}

TEST_CASE("zero sweeps return the zero-filled reconstruction") {
  Instance in(SolverMode::Paper);
  in.cfg.iterations = 0;
  const ReconResult r = reconstruct(in.problem, in.cfg);
  CHECK(r.log.size() == 1);
  const ComplexVolume zf = adjoint_encode(in.problem.y(), in.problem.coils(), in.problem.mask());
  CHECK(test::bit_equal(r.state.gamma, zf));
}

TEST_CASE("sweeps are deterministic") {
  Instance a(SolverMode::Exact), b(SolverMode::Exact);
  a.cfg.iterations = b.cfg.iterations = 3;
  CHECK(test::bit_equal(reconstruct(a.problem, a.cfg).state.gamma,
                        reconstruct(b.problem, b.cfg).state.gamma));
}

TEST_CASE("configuration validation") {
  Instance in(SolverMode::Paper);
  SolverConfig c = in.cfg;
  c.hyper.rho1 = 0.0;
  CHECK_THROWS_AS(reconstruct(in.problem, c), ValidationError);
  c = in.cfg;
  c.hyper.lambda2 = -1.0;
  CHECK_THROWS_AS(reconstruct(in.problem, c), ValidationError);
  c = in.cfg;
  c.iterations = -1;
  CHECK_THROWS_AS(reconstruct(in.problem, c), ValidationError);
  c = in.cfg;
  c.filters.ps = TemporalFilter(test::random_taps(6, 1));
  CHECK_THROWS_AS(reconstruct(in.problem, c), DimensionError);
  c = in.cfg;
  c.hyper.rho0 = 0.0;
  CHECK_THROWS_AS(update_x(in.state, in.problem, c), NumericalError);
  CHECK_THROWS_AS(parse_solver_mode("fast"), ValidationError);

  Instance ex(SolverMode::Exact);
  CoilSet raw = identity_coils(8, 8);
  raw.maps[0][3] = cx{2.0, 0.0};
  Problem p(ex.problem.y(), ex.problem.mask(), raw);
  CHECK_THROWS_AS(reconstruct(p, ex.cfg), ValidationError);
}

TEST_CASE("non-finite values are reported with the sweep index") {
  Instance in(SolverMode::Paper);
  in.cfg.hyper.lambda2 = 1e300;
  in.cfg.iterations = 5;
  try {
    reconstruct(in.problem, in.cfg);
    FAIL("expected a numerical failure");
  } catch (const NumericalError& e) {
    CHECK(e.sweep() >= 1);
    CHECK(std::string(e.what()).find("sweep") != std::string::npos);
  }
}

TEST_CASE("objective CSV layout") {
  Instance in(SolverMode::Exact);
  in.cfg.iterations = 2;
  const ReconResult r = reconstruct(in.problem, in.cfg);
  std::ostringstream os;
  write_objective_csv(os, r.log);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "sweep,data_term,sparse_term,ps_term,pen0,pen1,pen2,total");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 3);
}
