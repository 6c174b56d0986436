// Acceptance gate. Each criterion prints one PASS/FAIL line; with
// `--criterion N` only that criterion runs. Exit status is non-zero if any
// selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "spinlink/dynamics.hpp"
#include "spinlink/gaussian.hpp"
#include "spinlink/network.hpp"
#include "spinlink/transport.hpp"
#include "support/discord_oracle.hpp"
#include "support/generators.hpp"
#include "support/spectral.hpp"

using namespace spinlink;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

ChannelConfig channel(int id, double theta, bool probe_on = true,
                      Polarization pol = Polarization::normal) {
  ChannelConfig c;
  c.id = id;
  c.control_phase = theta;
  c.probe_on = probe_on;
  c.polarization = pol;
  return c;
}

std::vector<double> full_turn(std::size_t points) {
  std::vector<double> grid(points);
  for (std::size_t k = 0; k < points; ++k) {
    grid[k] = 2.0 * pi * static_cast<double>(k) / static_cast<double>(points - 1);
  }
  return grid;
}

// Least-squares scale c minimizing ‖y − c·x‖, and the relative residual.
double relative_fit_residual(const std::vector<double>& y, const std::vector<double>& x) {
  double xy = 0.0, xx = 0.0, yy = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    xy += x[k] * y[k];
    xx += x[k] * x[k];
    yy += y[k] * y[k];
  }
  const double c = xy / xx;
  double rr = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) rr += (y[k] - c * x[k]) * (y[k] - c * x[k]);
  return std::sqrt(rr / yy);
}

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buffer[256];
  std::snprintf(buffer, sizeof buffer, format, a, b, c, d);
  return buffer;
}

// Two-probe phase sweep at balanced coupling (β = 1/2).
Outcome criterion_1() {
  const auto start = Clock::now();
  ReservoirConfig res;
  res.exchange_rate = res.spin_decay;
  const std::vector<ChannelConfig> chans{channel(0, 0.0), channel(1, 0.0),
                                         channel(2, 0.0, false)};
  const auto grid = full_turn(361);
  const auto sweep = phase_sweep(chans, res, grid);
  std::vector<double> model(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) model[k] = 1.0 + std::cos(grid[k]);
  const double r2 = relative_fit_residual(sweep.i2, model);
  const double r1 = relative_fit_residual(sweep.i1, sweep.i2);
  const double elapsed = seconds_since(start);
  return {r2 < 1e-6 && r1 < 1e-6 && elapsed < 1.0,
          fmt("I2 vs 1+cos residual %.2e, I1 vs I2 residual %.2e, %.3f s", r2, r1, elapsed)};
}

// Three-probe sweep, θ1 = 0, θ2 = π, β = 0.1.
Outcome criterion_2() {
  ReservoirConfig res;
  res.exchange_rate = res.spin_decay / 9.0;
  const std::vector<ChannelConfig> chans{channel(0, 0.0), channel(1, 0.0), channel(2, pi)};
  const auto grid = full_turn(361);
  const auto sweep = phase_sweep(chans, res, grid);
  const auto i1_min = std::min_element(sweep.i1.begin(), sweep.i1.end()) - sweep.i1.begin();
  const auto i2_max = std::max_element(sweep.i2.begin(), sweep.i2.end()) - sweep.i2.begin();
  // The grid point at θ0 = π is the midpoint of the 361-point turn.
  const auto at_pi = static_cast<long>(grid.size() / 2);
  const double theta_min = grid[static_cast<std::size_t>(i1_min)];
  const double theta_max = grid[static_cast<std::size_t>(i2_max)];
  return {i1_min == at_pi && i2_max == at_pi,
          fmt("beta %.3f: I1 minimum at theta0 = %.6f, I2 maximum at theta0 = %.6f",
              beam_splitter_ratio(res), theta_min, theta_max)};
}

// Isolation at (0, 0, π) and reciprocity at θ0 = π/2.
Outcome criterion_3() {
  const ReservoirConfig res;
  const double w = eit_linewidth(ChannelConfig{}.control_rabi, res.optical_decay, res.spin_decay);
  const auto grid = uniform_grid(0.0, 5.0 * w, 401);
  const auto isolating =
      transport_spectrum({channel(0, 0.0), channel(1, 0.0), channel(2, pi)}, res, grid);
  const auto reciprocal =
      transport_spectrum({channel(0, pi / 2), channel(1, 0.0), channel(2, pi)}, res, grid);
  double worst = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    worst = std::max(worst, std::abs(reciprocal.t12[k] - reciprocal.t21[k]) / reciprocal.t12[k]);
  }
  const bool iso_ok = std::abs(isolating.isolation_db - 19.0) <= 0.1;
  return {iso_ok && worst < 1e-9,
          fmt("isolation %.3f dB (target 19.0 +/- 0.1), reciprocal max |T12-T21|/T12 = %.2e",
              isolating.isolation_db, worst)};
}

// Operating point for the quantum-correlation criteria: Ch0 reversed, Larmor
// detuning, Γc = 0.02 Γs, one memory mode.
ReservoirConfig quantum_reservoir() {
  ReservoirConfig res;
  res.exchange_rate = 0.02 * res.spin_decay;
  res.two_photon_detuning = res.larmor_frequency;
  res.memory_modes = 1;
  return res;
}

std::vector<ChannelConfig> quantum_channels(bool with_ch0) {
  std::vector<ChannelConfig> chans;
  if (with_ch0) chans.push_back(channel(0, 0.0, false, Polarization::reversed));
  chans.push_back(channel(1, 0.0, false));
  chans.push_back(channel(2, 0.0, false));
  return chans;
}

double pair_discord(const CoupledModeNetwork& net, const CovarianceMatrix& sigma, int a, int b) {
  return gaussian_discord(reduce(sigma, {net.channel_mode(a), net.channel_mode(b)}));
}

Outcome criterion_4() {
  const auto res = quantum_reservoir();
  const auto absent_net = build_network(quantum_channels(false), res);
  const auto absent = steady_state_covariance(drift_diffusion(absent_net));
  const double d12_absent = pair_discord(absent_net, absent, 1, 2);

  const auto net = build_network(quantum_channels(true), res);
  const auto dd = drift_diffusion(net);
  const bool stable = hurwitz_check(dd.drift).stable;
  const auto sigma = steady_state_covariance(dd);
  const double d01 = pair_discord(net, sigma, 0, 1);
  const double d02 = pair_discord(net, sigma, 0, 2);
  const double d12 = pair_discord(net, sigma, 1, 2);
  auto in_band = [](double d) { return d >= 1e-4 && d <= 1e-2; };
  const bool pass = d12_absent < 1e-12 && stable && d01 > 0 && d02 > 0 && d12 > 0 &&
                    in_band(d01) && in_band(d02) && in_band(d12);
  return {pass, fmt("Ch0 absent D12 = %.2e; Ch0 reversed D01 = %.3e, D02 = %.3e, D12 = %.3e",
                    d12_absent, d01, d02, d12)};
}

Outcome criterion_5() {
  const auto res = quantum_reservoir();
  const auto net = build_network(quantum_channels(true), res);
  const auto sigma = steady_state_covariance(drift_diffusion(net));
  // Strictly below: the margin must exceed rounding noise.
  constexpr double kMargin = 1e-10;
  bool pairs_ok = true;
  std::string detail;
  for (auto [a, b] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}}) {
    const ModePair p(net.channel_mode(a), net.channel_mode(b));
    const double lhs = joint_quadrature_variance(sigma, p, Sign::minus, Quadrature::x) +
                       joint_quadrature_variance(sigma, p, Sign::plus, Quadrature::p);
    const auto xi = CovarianceMatrix::x_index(p.first()), xj = CovarianceMatrix::x_index(p.second());
    const auto pi_ = CovarianceMatrix::p_index(p.first()), pj = CovarianceMatrix::p_index(p.second());
    const double rhs = 0.5 * (sigma(xi, xi) + sigma(xj, xj)) + 0.5 * (sigma(pi_, pi_) + sigma(pj, pj));
    const bool ok = rhs - lhs > kMargin;
    pairs_ok &= ok;
    detail += fmt("(%g,%g) lhs-rhs = %.3e; ", a, b, lhs - rhs);
  }

  // Single channel, output spectrum around the Larmor frequency.
  const auto single = drift_diffusion(build_network({channel(0, 0.0, false)}, res));
  const double slowest = -hurwitz_check(single.drift).max_real_part;
  const auto grid = uniform_grid(res.larmor_frequency, 50.0 * slowest, 4097);
  const auto n = single.n_modes();
  const auto spectrum = noise_spectrum(single,
                                       {quadrature_observable(n, 0, Quadrature::x, "x0"),
                                        quadrature_observable(n, 0, Quadrature::p, "p0")},
                                       grid);
  double worst_db = 0.0;
  for (const auto& trace : spectrum.db_rel_shot) {
    for (double db : trace) worst_db = std::max(worst_db, std::abs(db));
  }
  detail += fmt("single-channel max |dB| = %.2e", worst_db);
  return {pairs_ok && worst_db <= 0.01, detail};
}

// Twenty random Hurwitz networks with at most five modes, Γs = 1.
Outcome criterion_6() {
  const auto start = Clock::now();
  std::mt19937_64 rng(0);
  int networks = 0, residual_fail = 0, wk_fail = 0, entries = 0, outside = 0;
  double worst_wk = 0.0, worst_z = 0.0;
  while (networks < 20) {
    const auto candidate = spinlink::testing::random_network(rng, 5);
    const auto dd = drift_diffusion(build_network(candidate.channels, candidate.reservoir));
    const auto hurwitz = hurwitz_check(dd.drift);
    if (!hurwitz.stable || -hurwitz.max_real_part < 0.2) continue;
    ++networks;
    const double slowest = -hurwitz.max_real_part;

    const auto sigma = steady_state_covariance(dd).matrix();
    const double bound = kLyapunovTolerance * std::max(1.0, dd.diffusion.cwiseAbs().maxCoeff());
    if (!(lyapunov_residual(dd, sigma) <= bound)) ++residual_fail;

    EnsembleOptions opt;
    opt.dt = 0.05 * max_ensemble_step(dd.drift);
    opt.horizon = 8.0 / slowest;
    opt.n_trajectories = 2000;
    opt.seed = 0;
    const auto est = trajectory_ensemble(dd, opt);
    for (Eigen::Index i = 0; i < sigma.rows(); ++i) {
      for (Eigen::Index j = i; j < sigma.cols(); ++j) {
        ++entries;
        const double z = std::abs(est.covariance(i, j) - sigma(i, j)) / est.standard_error(i, j);
        worst_z = std::max(worst_z, z);
        if (z > 3.0) ++outside;
      }
    }

    const auto m = dd.n_modes();
    const auto grid = uniform_grid(0.0, 50.0 * slowest, 4001);
    std::vector<Observable> obs;
    for (std::size_t k = 0; k < m; ++k) {
      obs.push_back(quadrature_observable(m, k, Quadrature::x, "x"));
      obs.push_back(quadrature_observable(m, k, Quadrature::p, "p"));
    }
    const auto spectrum = noise_spectrum(dd, obs, grid, SpectrumKind::internal);
    for (std::size_t o = 0; o < obs.size(); ++o) {
      const double var = (obs[o].row * sigma * obs[o].row.transpose())(0, 0);
      const double wk =
          spinlink::testing::wiener_khinchin_variance(dd, obs[o].row, grid, spectrum.psd[o]);
      const double rel = std::abs(wk - var) / var;
      worst_wk = std::max(worst_wk, rel);
      if (rel >= 0.01) ++wk_fail;
    }
  }
  const double elapsed = seconds_since(start);
  std::ostringstream detail;
  detail << "residual failures " << residual_fail << "; ensemble entries outside 3 SE " << outside
         << "/" << entries << fmt(" (max z %.2f)", worst_z) << "; WK failures " << wk_fail
         << fmt(" (max rel %.2e)", worst_wk) << fmt("; %.1f s", elapsed);
  return {residual_fail == 0 && outside == 0 && wk_fail == 0 && elapsed < 60.0, detail.str()};
}

Outcome criterion_7() {
  std::mt19937_64 rng(0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = spinlink::testing::random_state(rng, 2).sigma;
    const double closed = gaussian_discord(s);
    const double oracle = spinlink::testing::oracle_discord(s.matrix()).discord;
    worst = std::max(worst, std::abs(closed - oracle));
  }
  return {worst < 1e-6, fmt("max |closed form - oracle| over 100 states = %.2e", worst)};
}

struct Criterion {
  int number;
  const char* title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "two-probe phase sweep", criterion_1},
      {2, "three-probe sweep extrema", criterion_2},
      {3, "isolation and reciprocal point", criterion_3},
      {4, "steady-state discord", criterion_4},
      {5, "joint-quadrature inequality and shot-noise baseline", criterion_5},
      {6, "solver cross-validation", criterion_6},
      {7, "discord oracle equivalence", criterion_7},
  };
  int only = 0;
  for (int k = 1; k < argc; ++k) {
    const std::string arg = argv[k];
    if (arg == "--criterion" && k + 1 < argc) {
      only = std::atoi(argv[++k]);
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
      return 2;
    }
  }
  bool all = true;
  bool ran = false;
  for (const auto& c : criteria) {
    if (only != 0 && c.number != only) continue;
    ran = true;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", c.number, c.title,
                o.detail.c_str());
    std::fflush(stdout);
    all &= o.pass;
  }
  if (!ran) {
    std::fprintf(stderr, "no criterion %d\n", only);
    return 2;
  }
  return all ? 0 : 1;
}
