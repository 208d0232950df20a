#include <algorithm>
#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <vector>

#include "ffbench/core/rng.hpp"
#include "ffbench/md/engine.hpp"
#include "ffbench/md/protocol.hpp"
#include "ffbench/solid/fcc.hpp"

using namespace ffbench;
using Catch::Approx;

namespace {

Configuration random_packed(int n, double box, double min_sep, uint64_t seed) {
  Configuration c;
  c.types = AtomTypes::argon();
  c.cell = SimulationCell::cubic(box);
  Rng rng(seed);
  const double min2 = min_sep * min_sep;
  while (c.positions.size() < static_cast<size_t>(n)) {
    Vec3 p{rng.uniform() * box, rng.uniform() * box, rng.uniform() * box};
    bool ok = true;
    for (const auto& q : c.positions)
      if (norm2(minimum_image(p - q, c.cell)) < min2) {
        ok = false;
        break;
      }
    if (ok) c.positions.push_back(p);
  }
  c.velocities.assign(static_cast<size_t>(n), Vec3{});
  c.species.assign(static_cast<size_t>(n), 0);
  return c;
}

// Short-range variant for boxes too small to host the full 8.5 A reach.
const LennardJonesModel& short_lj() {
  static const LennardJonesModel m(0.0103, 3.40, 5.0);
  return m;
}

// Liquid-like state at the benchmark density, thermalized briefly with the
// given model (systems under ~256 atoms need short_lj()).
Configuration thermal_liquid(int n, double temperature_K, uint64_t seed,
                             double duration_ps, const PairModel& model) {
  const double box = std::cbrt(n * 39.948 / 0.858);
  Configuration c = random_packed(n, box, 3.0, seed);
  init_velocities(c, temperature_K, seed + 1);
  Engine engine(std::move(c), model);
  NoseHooverChain chain;
  chain.collision_frequency_per_ps = 2.0;
  chain.target_temperature_K = temperature_K;
  const int steps = static_cast<int>(duration_ps * 1000 / 5.0);
  for (int s = 0; s < steps; ++s) engine.step_nvt(5.0, chain);
  return std::move(engine).take_config();
}

std::vector<Vec3> brute_forces(const Configuration& c, const PairModel& m) {
  std::vector<Vec3> f(c.positions.size());
  for (int i = 0; i < c.natoms(); ++i)
    for (int j = i + 1; j < c.natoms(); ++j) {
      const Vec3 d = minimum_image(c.positions[i] - c.positions[j], c.cell);
      const double r = norm(d);
      if (r >= m.cutoff()) continue;
      const Vec3 fij = (m.pair_force(r) / r) * d;
      f[static_cast<size_t>(i)] += fij;
      f[static_cast<size_t>(j)] -= fij;
    }
  return f;
}

}  // namespace

TEST_CASE("NVE: equilibrium crystal at rest stays put") {
  const auto lj = LennardJonesModel::argon();
  auto c = build_fcc(4, 0.858);
  const auto ref = c.positions;
  Engine e(std::move(c), lj);
  for (int s = 0; s < 10; ++s) e.step_nve(10.78);
  for (int i = 0; i < e.config().natoms(); ++i)
    CHECK(norm(e.config().positions[static_cast<size_t>(i)] - ref[static_cast<size_t>(i)]) < 1e-12);
}

TEST_CASE("NVE: free atom advances by v dt") {
  const auto lj = LennardJonesModel::argon();
  Configuration c;
  c.types = AtomTypes::argon();
  c.cell = SimulationCell::cubic(30.0);
  c.positions = {{5.0, 6.0, 7.0}};
  c.velocities = {{1e-3, -2e-3, 5e-4}};
  c.species = {0};

  auto out = step_nve(c, lj, 10.78);
  CHECK(out.positions[0].x == 5.0 + 10.78 * 1e-3);
  CHECK(out.positions[0].y == 6.0 + 10.78 * -2e-3);
  CHECK(out.positions[0].z == 7.0 + 10.78 * 5e-4);
  CHECK(out.velocities[0] == c.velocities[0]);
  CHECK(out.time_fs == Approx(10.78));
}

TEST_CASE("NVE: bound dimer conserves energy over 1e4 steps") {
  const auto lj = LennardJonesModel::argon();
  Configuration c;
  c.types = AtomTypes::argon();
  c.cell = SimulationCell::cubic(30.0);
  c.positions = {{10.0, 10.0, 10.0}, {13.9, 10.0, 10.0}};  // inside the well
  c.velocities = {{2e-4, 1e-4, 0.0}, {-2e-4, -1e-4, 0.0}};
  c.species = {0, 0};

  auto drift_at = [&](double dt) {
    Engine e(c, lj);
    const double e0 = e.conserved_nve();
    double worst = 0.0;
    for (int s = 0; s < 10000; ++s) {
      e.step_nve(dt);
      worst = std::max(worst, std::abs(e.conserved_nve() - e0));
    }
    return worst;
  };

  const double d1 = drift_at(1.0);
  const double d05 = drift_at(0.5);
  CHECK(d1 < 1e-5);
  CHECK(d05 < d1);  // second-order integrator: halving dt shrinks the error
}

TEST_CASE("NVE energy error scales as dt^2") {
  // Cold 32-atom crystal with an energy-shifted potential: rare cutoff
  // crossings then cost no energy jump, leaving the pure integrator signal.
  const LennardJonesModel lj(0.0103, 3.40, 5.0, true);
  auto c = build_fcc(2, 0.858);
  init_velocities(c, 20.0, 303);

  auto drift_at = [&](double dt, int steps) {
    Engine e(c, lj);
    const double e0 = e.conserved_nve();
    double worst = 0.0;
    for (int s = 0; s < steps; ++s) {
      e.step_nve(dt);
      worst = std::max(worst, std::abs(e.conserved_nve() - e0));
    }
    return worst;
  };

  // Same physical duration at each dt.
  const double d2 = drift_at(2.0, 1000), d1 = drift_at(1.0, 2000), d05 = drift_at(0.5, 4000);
  CHECK(d2 / d1 == Approx(4.0).margin(2.5));
  CHECK(d1 / d05 == Approx(4.0).margin(2.5));
}

TEST_CASE("NVE conserves momentum") {
  const auto& lj = short_lj();
  auto c = thermal_liquid(64, 80.0, 7, 3.0, lj);
  Engine e(std::move(c), lj);
  for (int s = 0; s < 1000; ++s) e.step_nve(5.0);
  Vec3 p{};
  for (int i = 0; i < e.config().natoms(); ++i)
    p += e.config().mass(i) * e.config().velocities[static_cast<size_t>(i)];
  CHECK(norm(p) < 1e-10);
}

TEST_CASE("neighbor-list forces equal brute force throughout a run") {
  const auto& lj = short_lj();
  auto c = thermal_liquid(64, 90.0, 11, 3.0, lj);
  Engine e(std::move(c), lj);
  for (int s = 0; s < 1000; ++s) {
    e.step_nve(5.0);
    if ((s + 1) % 100 == 0) {
      auto oracle = brute_forces(e.config(), lj);
      double dev = 0.0;
      for (int i = 0; i < e.config().natoms(); ++i)
        dev = std::max(dev, norm(e.forces().forces[static_cast<size_t>(i)] - oracle[static_cast<size_t>(i)]));
      CHECK(dev < 1e-10);
    }
  }
}

TEST_CASE("NVT holds the target temperature") {
  const auto lj = LennardJonesModel::argon();
  auto c = thermal_liquid(256, 100.0, 21, 8.0, lj);
  Engine e(std::move(c), lj);
  NoseHooverChain chain;
  chain.collision_frequency_per_ps = 0.5;
  chain.target_temperature_K = 100.0;

  double t_sum = 0.0;
  int t_count = 0;
  for (int s = 0; s < 100000; ++s) {
    e.step_nvt(5.0, chain);
    if ((s + 1) % 10 == 0) {
      t_sum += e.temperature();
      ++t_count;
    }
  }
  const double t_avg = t_sum / t_count;
  CHECK(t_avg == Approx(100.0).margin(2.0));
}

TEST_CASE("NVT extended conserved quantity is stable") {
  // Shifted potential for the same reason as the NVE scaling check.
  const LennardJonesModel lj(0.0103, 3.40, 5.0, true);
  auto c = build_fcc(2, 0.858);
  init_velocities(c, 30.0, 33);

  auto drift_at = [&](double dt, int steps) {
    Engine e(c, lj);
    NoseHooverChain chain;
    chain.collision_frequency_per_ps = 1.0;
    chain.target_temperature_K = 30.0;
    double e0 = 0.0;
    double worst = 0.0;
    for (int s = 0; s < steps; ++s) {
      e.step_nvt(dt, chain);
      const double h = e.conserved_nvt(chain);
      if (s == 0) e0 = h;
      else worst = std::max(worst, std::abs(h - e0));
    }
    return worst;
  };

  const double d2 = drift_at(2.0, 100000);
  const double d1 = drift_at(1.0, 100000);
  CHECK(d2 < 1e-3);
  CHECK(d1 < 1e-3);
  CHECK(d1 <= d2 * 1.2);
}

TEST_CASE("NVT with matched target and quiet chain reduces to NVE for one step") {
  const auto& lj = short_lj();
  auto c = thermal_liquid(32, 70.0, 41, 3.0, lj);
  c.zero_com_momentum();

  Engine nvt(c, lj), nve(c, lj);
  NoseHooverChain chain;
  chain.target_temperature_K = nvt.temperature();  // thermostat force vanishes
  nvt.step_nvt(10.78, chain);
  nve.step_nve(10.78);

  for (int i = 0; i < c.natoms(); ++i) {
    CHECK(norm(nvt.config().positions[static_cast<size_t>(i)] -
               nve.config().positions[static_cast<size_t>(i)]) < 1e-13);
    CHECK(norm(nvt.config().velocities[static_cast<size_t>(i)] -
               nve.config().velocities[static_cast<size_t>(i)]) < 1e-8);
  }
}

TEST_CASE("NPT with zero barostat frequency is exactly NVT") {
  const auto& lj = short_lj();
  auto c = thermal_liquid(64, 80.0, 55, 3.0, lj);

  Engine a(c, lj), b(c, lj);
  NoseHooverChain chain_a, chain_b;
  chain_a.target_temperature_K = chain_b.target_temperature_K = 80.0;
  chain_a.collision_frequency_per_ps = chain_b.collision_frequency_per_ps = 1.0;
  BarostatSpec off;
  off.collision_frequency_per_ps = 0.0;
  BarostatState state;
  state.reset(80.0, 1.0);

  const double v0 = a.config().cell.volume();
  for (int s = 0; s < 200; ++s) {
    a.step_npt(5.0, chain_a, off, state);
    b.step_nvt(5.0, chain_b);
    CHECK(a.config().cell.volume() == v0);
  }
  for (int i = 0; i < c.natoms(); ++i)
    CHECK(a.config().positions[static_cast<size_t>(i)] == b.config().positions[static_cast<size_t>(i)]);
}

TEST_CASE("NPT drives an ideal gas to the ideal-gas density") {
  const double t_target = 100.0;
  const double rho_target = 0.02;  // atoms per A^3
  const double p_target = rho_target * units::k_boltzmann * t_target;

  const int n = 256;
  const double box = std::cbrt(n / 0.022);  // start 10% denser
  Configuration c = random_packed(n, box, 1.0, 77);
  init_velocities(c, t_target, 78);

  const ZeroPairModel gas(2.0);
  Engine e(std::move(c), gas);
  NoseHooverChain chain;
  chain.collision_frequency_per_ps = 1.0;
  chain.target_temperature_K = t_target;
  BarostatSpec baro;
  baro.collision_frequency_per_ps = 0.2;
  baro.target_pressure_evA3 = p_target;
  BarostatState state;
  state.reset(t_target, baro.collision_frequency_per_ps);

  const int steps = 20000;
  double rho_sum = 0.0;
  int count = 0;
  for (int s = 0; s < steps; ++s) {
    e.step_npt(10.0, chain, baro, state);
    if (s >= steps / 2) {
      rho_sum += e.config().natoms() / e.config().cell.volume();
      ++count;
    }
  }
  const double rho_avg = rho_sum / count;
  CHECK(rho_avg == Approx(rho_target).epsilon(0.05));
}

TEST_CASE("NPT at the measured liquid pressure recovers the benchmark density") {
  const auto lj = LennardJonesModel::argon();
  auto c = thermal_liquid(256, 100.0, 91, 12.0, lj);

  // Measure the virial pressure of the NVT liquid at 0.858 amu/A^3.
  Engine probe(c, lj);
  NoseHooverChain chain;
  chain.collision_frequency_per_ps = 1.0;
  chain.target_temperature_K = 100.0;
  double p_sum = 0.0;
  int p_count = 0;
  for (int s = 0; s < 2000; ++s) {
    probe.step_nvt(5.0, chain);
    p_sum += probe.pressure();
    ++p_count;
  }
  const double p_avg = p_sum / p_count;

  // NPT at that pressure must keep the density near 0.858.
  Engine e(std::move(probe).take_config(), lj);
  NoseHooverChain chain2;
  chain2.collision_frequency_per_ps = 1.0;
  chain2.target_temperature_K = 100.0;
  BarostatSpec baro;
  baro.collision_frequency_per_ps = 0.5;
  baro.target_pressure_evA3 = p_avg;
  BarostatState state;
  state.reset(100.0, baro.collision_frequency_per_ps);

  const int steps = 12000;
  double rho_sum = 0.0;
  int count = 0;
  for (int s = 0; s < steps; ++s) {
    e.step_npt(5.0, chain2, baro, state);
    if (s >= steps / 3) {
      rho_sum += e.config().mass_density();
      ++count;
    }
  }
  CHECK(rho_sum / count == Approx(0.858).epsilon(0.02));
}

TEST_CASE("NVT velocity components are Maxwell-Boltzmann distributed") {
  const auto lj = LennardJonesModel::argon();
  auto c = thermal_liquid(256, 100.0, 101, 10.0, lj);
  Engine e(std::move(c), lj);
  NoseHooverChain chain;
  chain.collision_frequency_per_ps = 1.0;
  chain.target_temperature_K = 100.0;

  std::vector<double> samples;
  samples.reserve(1 << 20);
  const int steps = 40000;
  for (int s = 0; s < steps; ++s) {
    e.step_nvt(5.0, chain);
    if ((s + 1) % 10 == 0)
      for (const auto& v : e.config().velocities) samples.push_back(v.x);
  }

  std::sort(samples.begin(), samples.end());
  const double sigma = std::sqrt(units::k_boltzmann * 100.0 / (39.948 * units::mv2_to_ev));
  double ks = 0.0;
  const double n = static_cast<double>(samples.size());
  for (size_t k = 0; k < samples.size(); ++k) {
    const double cdf = 0.5 * (1.0 + std::erf(samples[k] / (sigma * std::sqrt(2.0))));
    ks = std::max(ks, std::abs(cdf - (k + 1) / n));
    ks = std::max(ks, std::abs(cdf - k / n));
  }
  CHECK(samples.size() >= 1000000);
  CHECK(ks < 0.01);
}

TEST_CASE("instantaneous temperature oracle cases") {
  auto crystal = build_fcc(10, 0.858);
  REQUIRE(crystal.natoms() == 4000);

  CHECK(instantaneous_temperature(crystal) == 0.0);

  init_velocities(crystal, 100.0, 314159);
  CHECK(instantaneous_temperature(crystal) == Approx(100.0).margin(3.0));

  // Uniform translation carries no thermal content.
  for (auto& v : crystal.velocities) v = {4e-3, -1e-3, 2e-3};
  CHECK(instantaneous_temperature(crystal) == Approx(0.0).margin(1e-12));

  Configuration lone;
  lone.types = AtomTypes::argon();
  lone.cell = SimulationCell::cubic(10.0);
  lone.positions = {{0, 0, 0}};
  lone.velocities = {{1e-3, 0, 0}};
  lone.species = {0};
  CHECK_THROWS_AS(instantaneous_temperature(lone), ComputeError);
}

TEST_CASE("run_protocol: sampling grid and determinism") {
  const auto& lj = short_lj();
  auto c = thermal_liquid(32, 60.0, 121, 2.0, lj);

  ProtocolSpec spec;
  spec.seed = 5;
  ProtocolStage warm;
  warm.ensemble = Ensemble::nvt;
  warm.duration_ps = 0.0539;  // 5 steps at 10.78 fs
  warm.t_start_K = 60.0;
  warm.thermostat_frequency_per_ps = 1.0;
  warm.sample_every_steps = 0;
  ProtocolStage prod = warm;
  prod.duration_ps = 0.1078;  // 10 steps
  prod.sample_every_steps = 2;
  spec.stages = {warm, prod};

  auto t1 = run_protocol(spec, lj, c);
  CHECK(t1.nframes() == 5);
  CHECK(t1.frame_interval_fs == Approx(2 * 10.78));
  t1.validate();

  auto t2 = run_protocol(spec, lj, c);
  REQUIRE(t2.nframes() == t1.nframes());
  for (int f = 0; f < t1.nframes(); ++f)
    for (int i = 0; i < t1.frames[static_cast<size_t>(f)].natoms(); ++i)
      CHECK(t1.frames[static_cast<size_t>(f)].positions[static_cast<size_t>(i)] ==
            t2.frames[static_cast<size_t>(f)].positions[static_cast<size_t>(i)]);
}

TEST_CASE("run_protocol: empty stage list returns the initial frame") {
  const auto& lj = short_lj();
  auto c = thermal_liquid(32, 60.0, 131, 1.0, lj);
  ProtocolSpec spec;
  auto t = run_protocol(spec, lj, c);
  CHECK(t.nframes() == 1);
  CHECK(t.frames[0].positions[0] == c.positions[0]);
}

TEST_CASE("run_protocol assigns Maxwell-Boltzmann velocities when absent") {
  const auto& lj = short_lj();
  auto c = build_fcc(2, 0.858);  // zero velocities

  ProtocolSpec spec;
  spec.seed = 7;
  ProtocolStage s;
  s.ensemble = Ensemble::nvt;
  s.duration_ps = 0.05;
  s.timestep_fs = 5.0;
  s.t_start_K = 10.0;
  s.thermostat_frequency_per_ps = 1.0;
  s.sample_every_steps = 10;
  spec.stages = {s};

  auto t = run_protocol(spec, lj, c);
  double ke = t.frames.back().kinetic_energy();
  CHECK(ke > 0.0);
}

TEST_CASE("protocol validation rejects malformed stages") {
  ProtocolStage s;
  s.duration_ps = -1.0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s.duration_ps = 1.0;
  s.timestep_fs = 0.0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s.timestep_fs = 10.78;
  s.ensemble = Ensemble::nvt;
  s.t_start_K = 0.0;
  CHECK_THROWS_AS(s.validate(), ConfigError);

  NoseHooverChain chain;
  chain.chain_length = 0;
  chain.target_temperature_K = 10.0;
  CHECK_THROWS_AS(chain.validate(), ConfigError);
  chain.chain_length = 5;
  chain.collision_frequency_per_ps = 0.0;
  CHECK_THROWS_AS(chain.validate(), ConfigError);
}
