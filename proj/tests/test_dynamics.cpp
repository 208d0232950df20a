#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <vector>

#include "ffbench/analysis/msd.hpp"
#include "ffbench/core/rng.hpp"

using namespace ffbench;
using Catch::Approx;

namespace {

Trajectory empty_traj(int natoms, double box, double interval_fs) {
  Trajectory traj;
  traj.frame_interval_fs = interval_fs;
  Configuration c;
  c.types = AtomTypes::argon();
  c.cell = SimulationCell::cubic(box);
  c.positions.assign(static_cast<size_t>(natoms), Vec3{});
  c.velocities.assign(static_cast<size_t>(natoms), Vec3{});
  c.species.assign(static_cast<size_t>(natoms), 0);
  traj.frames.push_back(std::move(c));
  return traj;
}

// Random-walk trajectory pair: wrapped input plus the true continuous path.
struct WalkPair {
  Trajectory wrapped;
  Trajectory truth;
};

WalkPair random_walk(int natoms, int nframes, double box, double step_sigma, uint64_t seed,
                     double interval_fs = 107.8) {
  Rng rng(seed);
  WalkPair out;
  out.truth = empty_traj(natoms, box, interval_fs);
  auto& first = out.truth.frames.front();
  for (auto& p : first.positions)
    p = {rng.uniform() * box, rng.uniform() * box, rng.uniform() * box};
  for (int f = 1; f < nframes; ++f) {
    Configuration c = out.truth.frames.back();
    c.time_fs = f * interval_fs;
    for (auto& p : c.positions) p += rng.gaussian_vec3() * step_sigma;
    out.truth.frames.push_back(std::move(c));
  }
  out.wrapped = out.truth;
  for (auto& frame : out.wrapped.frames) frame.wrap();
  return out;
}

double max_position_error(const Trajectory& a, const Trajectory& b) {
  double worst = 0.0;
  for (int f = 0; f < a.nframes(); ++f)
    for (int i = 0; i < a.frames.front().natoms(); ++i)
      worst = std::max(worst, norm(a.frames[static_cast<size_t>(f)].positions[static_cast<size_t>(i)] -
                                   b.frames[static_cast<size_t>(f)].positions[static_cast<size_t>(i)]));
  return worst;
}

}  // namespace

TEST_CASE("unwrap leaves a static trajectory unchanged") {
  Trajectory traj = empty_traj(5, 12.0, 10.0);
  Rng rng(3);
  for (auto& p : traj.frames.front().positions)
    p = {rng.uniform() * 12, rng.uniform() * 12, rng.uniform() * 12};
  for (int f = 1; f < 6; ++f) {
    traj.frames.push_back(traj.frames.front());
    traj.frames.back().time_fs = f * 10.0;
  }
  Trajectory un = unwrap(traj);
  REQUIRE(max_position_error(un, traj) == 0.0);
}

TEST_CASE("unwrap reconstructs a linear path across the boundary") {
  const double box = 10.0, v = 0.03, dt = 100.0;  // 3 A per frame, crosses x = L
  Trajectory traj = empty_traj(1, box, dt);
  traj.frames.front().positions[0] = {8.0, 5.0, 5.0};
  for (int f = 1; f < 12; ++f) {
    Configuration c = traj.frames.back();
    c.time_fs = f * dt;
    c.positions[0].x += v * dt;
    c.wrap();
    traj.frames.push_back(std::move(c));
  }
  Trajectory un = unwrap(traj);
  for (int f = 0; f < 12; ++f) {
    REQUIRE(un.frames[static_cast<size_t>(f)].positions[0].x == Approx(8.0 + v * dt * f).margin(1e-12));
    REQUIRE(un.frames[static_cast<size_t>(f)].positions[0].y == Approx(5.0).margin(1e-12));
  }
}

TEST_CASE("unwrap recovers a synthetic random walk exactly") {
  WalkPair walk = random_walk(16, 10, 9.0, 0.9, 11);
  Trajectory un = unwrap(walk.wrapped);
  REQUIRE(max_position_error(un, walk.truth) < 1e-12);
}

TEST_CASE("unwrap rejects displacements at or beyond the minimum-image limit") {
  Trajectory traj = empty_traj(1, 10.0, 100.0);
  traj.frames.front().positions[0] = {1.0, 1.0, 5.0};
  Configuration next = traj.frames.front();
  next.time_fs = 100.0;
  next.positions[0] = {5.5, 5.5, 5.0};  // min-image displacement norm 6.36 A > L/2
  traj.frames.push_back(next);
  REQUIRE_THROWS_AS(unwrap(traj), ComputeError);
  REQUIRE_THROWS_WITH(unwrap(traj), Catch::Matchers::ContainsSubstring("too coarse"));
}

TEST_CASE("msd of a frozen configuration is zero at all lags") {
  Trajectory traj = empty_traj(6, 15.0, 50.0);
  Rng rng(5);
  for (auto& p : traj.frames.front().positions)
    p = {rng.uniform() * 15, rng.uniform() * 15, rng.uniform() * 15};
  for (int f = 1; f < 20; ++f) {
    traj.frames.push_back(traj.frames.front());
    traj.frames.back().time_fs = f * 50.0;
  }
  MsdCurve curve = msd(traj);
  REQUIRE(curve.msd.size() == 20);
  REQUIRE(curve.msd[0] == 0.0);
  for (double m : curve.msd) REQUIRE(m == Approx(0.0).margin(1e-20));
  for (size_t k = 0; k < curve.origins.size(); ++k)
    REQUIRE(curve.origins[k] == 20 - static_cast<int>(k));
}

TEST_CASE("msd of ballistic motion is v^2 tau^2") {
  const double speed = 0.004;  // A/fs
  Trajectory traj = empty_traj(32, 50.0, 107.8);
  Rng rng(7);
  std::vector<Vec3> dirs;
  for (int i = 0; i < 32; ++i) {
    Vec3 d = rng.gaussian_vec3();
    dirs.push_back(d / norm(d));
    traj.frames.front().positions[static_cast<size_t>(i)] = {rng.uniform() * 50, rng.uniform() * 50,
                                                             rng.uniform() * 50};
  }
  for (int f = 1; f < 40; ++f) {
    Configuration c = traj.frames.back();
    c.time_fs = f * 107.8;
    for (int i = 0; i < 32; ++i) c.positions[static_cast<size_t>(i)] += dirs[static_cast<size_t>(i)] * (speed * 107.8);
    traj.frames.push_back(std::move(c));
  }
  MsdCurve curve = msd(traj);
  for (size_t k = 1; k < curve.msd.size(); ++k) {
    const double tau_fs = curve.lag_ps[k] * 1000.0;
    REQUIRE(curve.msd[k] == Approx(speed * speed * tau_fs * tau_fs).epsilon(1e-9));
  }
}

TEST_CASE("msd recovers an injected Brownian diffusion constant") {
  // D = 1000 um^2/s = 0.1 A^2/ps; per-frame step sigma = sqrt(2 D dt) per component.
  const double d_A2ps = 0.1;
  const double interval_fs = 107.8;
  const double sigma = std::sqrt(2.0 * d_A2ps * interval_fs * 1e-3);
  WalkPair walk = random_walk(256, 4000, 60.0, sigma, 23, interval_fs);

  MsdCurve curve = msd(walk.truth, 60.0);
  DiffusivityFit fit = fit_diffusivity(curve, 1.0, 60.0);
  REQUIRE(fit.d_um2_s == Approx(1000.0).epsilon(0.03));
  REQUIRE(fit.points > 500);

  // Spot check the curve itself in the averaging-rich region.
  const size_t k2 = static_cast<size_t>(std::lround(2.0 / (interval_fs * 1e-3)));
  REQUIRE(curve.msd[k2] == Approx(6.0 * d_A2ps * curve.lag_ps[k2]).epsilon(0.04));
}

TEST_CASE("fft and direct msd evaluations agree") {
  WalkPair walk = random_walk(12, 90, 30.0, 1.1, 31, 50.0);
  MsdCurve direct = detail::msd_direct(walk.truth, 89);
  MsdCurve fast = detail::msd_fft(walk.truth, 89);
  REQUIRE(direct.msd.size() == fast.msd.size());
  for (size_t k = 0; k < direct.msd.size(); ++k) {
    REQUIRE(fast.msd[k] == Approx(direct.msd[k]).margin(1e-9));
    REQUIRE(fast.origins[k] == direct.origins[k]);
  }
}

TEST_CASE("msd is invariant under rigid translation and atom permutation") {
  WalkPair walk = random_walk(10, 40, 25.0, 0.8, 41, 80.0);
  MsdCurve base = msd(walk.truth);

  Trajectory shifted = walk.truth;
  for (auto& f : shifted.frames)
    for (auto& p : f.positions) p += Vec3{103.0, -55.5, 9.25};
  MsdCurve s = msd(shifted);

  Trajectory permuted = walk.truth;
  for (auto& f : permuted.frames) {
    std::reverse(f.positions.begin(), f.positions.end());
    std::reverse(f.velocities.begin(), f.velocities.end());
  }
  MsdCurve p = msd(permuted);

  for (size_t k = 0; k < base.msd.size(); ++k) {
    REQUIRE(s.msd[k] == Approx(base.msd[k]).margin(1e-9));
    REQUIRE(p.msd[k] == Approx(base.msd[k]).margin(1e-9));
  }
}

TEST_CASE("multi-origin msd matches the single-origin estimator") {
  WalkPair walk = random_walk(512, 400, 80.0, 0.5, 53, 100.0);
  MsdCurve multi = msd(walk.truth, 10.0);

  // Single-origin estimator from frame 0 only.
  const auto& frames = walk.truth.frames;
  const int n = frames.front().natoms();
  for (size_t k = 1; k < multi.msd.size(); k += 25) {
    double single = 0.0;
    for (int i = 0; i < n; ++i)
      single += norm2(frames[k].positions[static_cast<size_t>(i)] - frames[0].positions[static_cast<size_t>(i)]);
    single /= n;
    // Combined statistical error: single-origin has ~2/N relative variance.
    const double sigma = std::sqrt(2.0 / n) * multi.msd[k];
    REQUIRE(std::abs(single - multi.msd[k]) < 5.0 * sigma);
  }

  // At the maximum lag only one origin exists: the estimators coincide.
  MsdCurve full = msd(walk.truth);
  double single_max = 0.0;
  for (int i = 0; i < n; ++i)
    single_max += norm2(frames.back().positions[static_cast<size_t>(i)] - frames.front().positions[static_cast<size_t>(i)]);
  single_max /= n;
  REQUIRE(full.msd.back() == Approx(single_max).epsilon(1e-9));
  REQUIRE(full.origins.back() == 1);
}

TEST_CASE("fit_diffusivity recovers an exact line to 1e-9") {
  MsdCurve curve;
  const double d_A2ps = 0.1;  // 1000 um^2/s
  for (int k = 0; k <= 80; ++k) {
    const double t = k * 0.1078;
    curve.lag_ps.push_back(t);
    curve.msd.push_back(6.0 * d_A2ps * t + 1.7);
    curve.origins.push_back(81 - k);
  }
  DiffusivityFit fit = fit_diffusivity(curve, 1.0, 8.0);
  REQUIRE(fit.d_um2_s == Approx(1000.0).epsilon(1e-9));
  REQUIRE(fit.intercept_A2 == Approx(1.7).margin(1e-9));
  REQUIRE(fit.d_stderr_um2_s == Approx(0.0).margin(1e-6));
  REQUIRE(fit.window_lo_ps == 1.0);
  REQUIRE(fit.points >= 3);
}

TEST_CASE("fit_diffusivity enforces window preconditions") {
  MsdCurve curve;
  for (int k = 0; k <= 30; ++k) {
    curve.lag_ps.push_back(k * 0.5);
    curve.msd.push_back(k * 0.6);
    curve.origins.push_back(31 - k);
  }
  REQUIRE_THROWS_AS(fit_diffusivity(curve, 0.5, 10.0), ConfigError);
  REQUIRE_THROWS_AS(fit_diffusivity(curve, 2.0, 2.0), ConfigError);
  REQUIRE_THROWS_AS(fit_diffusivity(curve, 14.5, 30.0), ComputeError);  // 1 point only
}

TEST_CASE("fitted diffusivity preserves the ordering of injected constants") {
  const double interval_fs = 107.8;
  auto fit_for = [&](double d_A2ps, uint64_t seed) {
    const double sigma = std::sqrt(2.0 * d_A2ps * interval_fs * 1e-3);
    WalkPair walk = random_walk(128, 1200, 50.0, sigma, seed, interval_fs);
    MsdCurve curve = msd(walk.truth, 30.0);
    return fit_diffusivity(curve, 1.0, 30.0).d_um2_s;
  };
  const double d_cold = fit_for(0.05, 61);
  const double d_mid = fit_for(0.10, 62);
  const double d_hot = fit_for(0.20, 63);
  REQUIRE(d_cold < d_mid);
  REQUIRE(d_mid < d_hot);
}

TEST_CASE("msd rejects degenerate inputs") {
  Trajectory traj = empty_traj(4, 10.0, 100.0);
  REQUIRE_THROWS_AS(msd(traj), ComputeError);  // single frame
  traj.frames.push_back(traj.frames.front());
  traj.frames.back().time_fs = 100.0;
  REQUIRE_THROWS_AS(msd(traj, 1.0), ComputeError);  // lag beyond span
  REQUIRE_NOTHROW(msd(traj));
}
